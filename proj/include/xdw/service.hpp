#pragma once

// The request handlers behind both the HTTP API and the CLI. A Service owns
// one warehouse (optionally backed by a directory), the cubes built over it
// and the log of applied rule sets. Reads share a snapshot; rule application
// is the single writer.

#include "xdw/cube.hpp"
#include "xdw/error.hpp"
#include "xdw/evolution.hpp"
#include "xdw/store.hpp"
#include "xdw/warehouse.hpp"

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xdw {

using Json = nlohmann::ordered_json;

inline constexpr std::size_t kDefaultPageLimit = 10000;
inline constexpr std::string_view kLogFileName = "evolution-log.json";

struct Response {
  int status = 200;
  Json body;
};

/// {"error": {"code", "message", "location"}} and the HTTP status for a code.
Json error_envelope(const Error &e);
int status_for(std::string_view code);

class Service {
public:
  /// Recover any interrupted replacement, then load and validate `dir`.
  explicit Service(std::filesystem::path dir);
  /// In-memory only: applies change the session but write nothing.
  explicit Service(Warehouse w);

  /// Route a request: `target` is the path with an optional query string.
  /// Never throws; failures become error envelopes.
  Response handle(std::string_view method, std::string_view target, const Json &body = Json::object());

  Json model() const;
  Json dimension(std::string_view dim_id) const;
  Json create_cube(const Json &body);
  Json cube_op(std::string_view cube_id, const Json &body);
  Json get_cube(std::string_view cube_id, std::size_t offset, std::size_t limit) const;
  Json export_cube(std::string_view cube_id) const; // {"text": tab-separated export}
  Json validate_rules(const Json &body) const;
  Json apply_rules(const Json &body);
  Json mine(std::string_view task, const Json &body);
  Json log() const;

  std::shared_ptr<const Warehouse> snapshot() const;
  std::uint64_t version() const;

  void set_fault_hook(FaultHook hook) { replace_options_.hook = std::move(hook); }
  void set_force_rename_fallback(bool on) { replace_options_.force_rename_fallback = on; }

private:
  struct StoredCube {
    Cube cube;
    std::uint64_t version;
  };

  std::string store_cube(Cube cube, std::uint64_t version);
  StoredCube find_cube(std::string_view id) const;
  /// Cube named by body["cube"]: a stored id or an inline build request.
  StoredCube resolve_cube(const Json &body);
  Json render(const std::string &id, const StoredCube &c, std::size_t offset, std::size_t limit) const;

  std::optional<std::filesystem::path> dir_;
  ReplaceOptions replace_options_;

  // Guards the fields below. Held only to copy or swap them, never across
  // real work, so a plain mutex keeps readers from starving the writer.
  mutable std::mutex state_;
  std::shared_ptr<const Warehouse> warehouse_;
  std::uint64_t version_ = 1;
  std::map<std::string, StoredCube> cubes_;
  std::uint64_t next_cube_ = 1;
  Json log_ = Json::array();

  std::mutex writer_;
};

// --- JSON forms shared with clients ----------------------------------------

RuleSet ruleset_from_json(const Json &j);
Json ruleset_to_json(const RuleSet &r);
Json summary_to_json(const ChangeSummary &s);

} // namespace xdw
