#include "xdw/store.hpp"

#include "xdw/error.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace xdw {

namespace {

fs::path sibling(const fs::path &dir, const char *suffix) {
  fs::path clean = dir;
  if (!clean.has_filename()) clean = clean.parent_path(); // trailing slash
  return clean.parent_path() / (clean.filename().string() + suffix);
}

[[noreturn]] void io_error(const std::string &what, const fs::path &p) {
  throw Error("io-error", what + " '" + p.string() + "': " + std::strerror(errno), p.string());
}

void fsync_path(const fs::path &p, int flags) {
  const int fd = ::open(p.c_str(), flags | O_CLOEXEC);
  if (fd < 0) io_error("cannot open", p);
  const int rc = ::fsync(fd);
  ::close(fd);
  if (rc != 0) io_error("cannot sync", p);
}

void fsync_dir(const fs::path &p) { fsync_path(p, O_RDONLY | O_DIRECTORY); }

void call(const ReplaceOptions &o, std::string_view point) {
  if (o.hook) o.hook(point);
}

} // namespace

fs::path staging_path(const fs::path &dir) { return sibling(dir, ".xdw-new"); }
fs::path aside_path(const fs::path &dir) { return sibling(dir, ".xdw-old"); }
fs::path lock_path(const fs::path &dir) { return sibling(dir, ".lock"); }

void recover_directory(const fs::path &dir) {
  const fs::path aside = aside_path(dir), staging = staging_path(dir);
  // The fallback path moved the old copy aside but never moved the new one
  // in: the old copy is authoritative.
  if (!fs::exists(dir) && fs::exists(aside)) fs::rename(aside, dir);
  if (fs::exists(staging)) fs::remove_all(staging);
  if (fs::exists(aside)) fs::remove_all(aside);
}

WriterLock::WriterLock(const fs::path &dir) {
  const fs::path p = lock_path(dir);
  fd_ = ::open(p.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) io_error("cannot open lock file", p);
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    const int err = errno;
    ::close(fd_);
    fd_ = -1;
    if (err == EWOULDBLOCK)
      throw Error("concurrent-writer", "another writer holds '" + p.string() + "'", p.string());
    errno = err;
    io_error("cannot lock", p);
  }
}

WriterLock::~WriterLock() {
  if (fd_ >= 0) ::close(fd_); // releases the flock
}

void write_file_durably(const fs::path &p, std::string_view text) {
  const int fd = ::open(p.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) io_error("cannot write", p);
  std::size_t done = 0;
  while (done < text.size()) {
    const ssize_t n = ::write(fd, text.data() + done, text.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      io_error("cannot write", p);
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    io_error("cannot sync", p);
  }
  ::close(fd);
}

void replace_directory(const fs::path &dir, const Warehouse &w, const std::vector<Document> &extra,
                       const ReplaceOptions &options) {
  const fs::path staging = staging_path(dir), aside = aside_path(dir);
  if (!fs::is_directory(dir)) throw Error("io-error", "not a directory: '" + dir.string() + "'", dir.string());
  if (fs::exists(staging)) fs::remove_all(staging);
  if (fs::exists(aside)) fs::remove_all(aside);
  fs::copy(dir, staging, fs::copy_options::recursive);

  std::vector<Document> docs = serialize_warehouse(w);
  docs.insert(docs.end(), extra.begin(), extra.end());
  for (const auto &doc : docs) {
    const fs::path target = staging / doc.file_name;
    fs::create_directories(target.parent_path());
    write_file_durably(target, doc.text);
    call(options, "write:" + doc.file_name);
  }
  fsync_dir(staging);
  call(options, "staged");

  try {
    const Warehouse reloaded = load_warehouse(staging);
    const ValidationReport report = validate_warehouse(reloaded);
    if (!report.ok()) throw Error("invalid-warehouse", "staged warehouse fails validation: " + report.findings.front().message);
  } catch (...) {
    fs::remove_all(staging);
    throw;
  }
  call(options, "verified");

  const fs::path parent = fs::absolute(dir).parent_path();
  bool exchanged = false;
  if (!options.force_rename_fallback) {
    if (::renameat2(AT_FDCWD, dir.c_str(), AT_FDCWD, staging.c_str(), RENAME_EXCHANGE) == 0) exchanged = true;
    else if (errno != EINVAL && errno != ENOSYS && errno != EXDEV) io_error("cannot swap in", staging);
  }
  fs::path old_copy = staging;
  if (!exchanged) {
    // Two renames; recover_directory() restores the old copy if we die
    // between them.
    fs::rename(dir, aside);
    call(options, "moved-aside");
    fs::rename(staging, dir);
    old_copy = aside;
  }
  fsync_dir(parent);
  call(options, "swapped");
  fs::remove_all(old_copy);
  call(options, "cleaned");
}

} // namespace xdw
