#pragma once

// On-disk persistence of a warehouse directory. The documents are the
// database; replacement is staged in a sibling directory and swapped in with
// a single rename so a crash leaves either the old or the new set.

#include "xdw/warehouse.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace xdw {

/// Called at named points of a replacement ("write:<file>", "staged",
/// "verified", "moved-aside", "swapped", "cleaned"); tests use it to crash.
using FaultHook = std::function<void(std::string_view point)>;

std::filesystem::path staging_path(const std::filesystem::path &dir); // <dir>.xdw-new
std::filesystem::path aside_path(const std::filesystem::path &dir);   // <dir>.xdw-old
std::filesystem::path lock_path(const std::filesystem::path &dir);    // <dir>.lock

/// Finish or roll back an interrupted replacement: restore <dir>.xdw-old
/// when <dir> is missing, then drop leftover staging and aside copies.
void recover_directory(const std::filesystem::path &dir);

/// Exclusive advisory lock on <dir>.lock for cross-process writers.
/// Throws concurrent-writer when another holder exists.
class WriterLock {
public:
  explicit WriterLock(const std::filesystem::path &dir);
  ~WriterLock();
  WriterLock(const WriterLock &) = delete;
  WriterLock &operator=(const WriterLock &) = delete;

private:
  int fd_ = -1;
};

struct ReplaceOptions {
  FaultHook hook;
  bool force_rename_fallback = false; // skip RENAME_EXCHANGE (tests)
};

/// Replace the documents of `dir` with `w` plus `extra` files. Other files
/// already in `dir` are carried over. The staged copy is reloaded and
/// validated before the swap; throws invalid-warehouse or io-error, leaving
/// `dir` untouched.
void replace_directory(const std::filesystem::path &dir, const Warehouse &w, const std::vector<Document> &extra,
                       const ReplaceOptions &options = {});

/// write + fsync of one file.
void write_file_durably(const std::filesystem::path &p, std::string_view text);

} // namespace xdw
