// Command-line client. Every verb builds the same request the HTTP API would
// receive and passes it to Service::handle, so output matches the API body.

#include "xdw/http.hpp"
#include "xdw/ingest.hpp"
#include "xdw/service.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace fs = std::filesystem;
using xdw::Json;

namespace {

// "@path" reads a file; anything else is inline JSON.
Json json_arg(const std::string &arg, const std::string &what) {
  const std::string text = !arg.empty() && arg.front() == '@' ? xdw::read_file(arg.substr(1)) : arg;
  try {
    return Json::parse(text);
  } catch (const Json::parse_error &e) {
    throw xdw::Error("bad-request", what + " is not valid JSON: " + e.what(), what);
  }
}

[[noreturn]] void fail(const xdw::Response &r) {
  std::cerr << r.body.dump(2) << "\n";
  std::exit(1);
}

Json call(xdw::Service &svc, const std::string &method, const std::string &target, const Json &body = Json::object()) {
  xdw::Response r = svc.handle(method, target, body);
  if (r.status >= 400) fail(r);
  return std::move(r.body);
}

void print(const Json &j) { std::cout << j.dump(2) << "\n"; }

std::string page_query(std::size_t offset, std::size_t limit) {
  return "?offset=" + std::to_string(offset) + "&limit=" + std::to_string(limit);
}

// Build the cube, then apply each operator in turn; returns the final id.
std::string build_chain(xdw::Service &svc, const std::string &cube, const std::vector<std::string> &ops) {
  std::string id = call(svc, "POST", "/cubes", json_arg(cube, "--cube")).at("id");
  for (const auto &op : ops) id = call(svc, "POST", "/cubes/" + id + "/op", json_arg(op, "--op")).at("id");
  return id;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"XML data warehouse: OLAP cubes, hierarchy evolution and cube mining"};
  app.require_subcommand(1);

  std::string dir, cube, body, rules_file, host = "127.0.0.1", out, csv_out, name, csv_file, mapping_file;
  std::vector<std::string> ops;
  std::size_t offset = 0, limit = xdw::kDefaultPageLimit;
  std::uint64_t seed = 1;
  int port = 8080;
  bool dry_run = false, structured = false;

  auto *load = app.add_subcommand("load", "Open and validate a warehouse; print its model");
  load->add_option("dir", dir, "Warehouse directory")->required();

  auto *cube_cmd = app.add_subcommand("cube", "Build a cube and print it");
  cube_cmd->add_option("dir", dir)->required();
  cube_cmd->add_option("--cube", cube, "Cube spec: JSON or @file")->required();

  auto *op_cmd = app.add_subcommand("op", "Build a cube, apply operators in order, print the result");
  op_cmd->add_option("dir", dir)->required();
  op_cmd->add_option("--cube", cube, "Cube spec: JSON or @file")->required();
  op_cmd->add_option("--op", ops, "Operator body: JSON or @file (repeatable)")->required();

  for (auto *c : {cube_cmd, op_cmd}) {
    c->add_option("--offset", offset, "First cell of the page");
    c->add_option("--limit", limit, "Cells per page");
  }

  auto *export_cmd = app.add_subcommand("export", "Print a cube as tab-separated text");
  export_cmd->add_option("dir", dir)->required();
  export_cmd->add_option("--cube", cube, "Cube spec: JSON or @file")->required();
  export_cmd->add_option("--op", ops, "Operator body: JSON or @file (repeatable)");

  auto *evolve = app.add_subcommand("evolve", "Validate and apply an aggregation rule set");
  evolve->add_option("dir", dir)->required();
  evolve->add_option("rules", rules_file, "Rules file (text form, or JSON with --structured)")->required();
  evolve->add_flag("--dry-run", dry_run, "Validate and summarize without writing");
  evolve->add_flag("--structured", structured, "Rules file holds the JSON rule set");

  auto *mine = app.add_subcommand("mine", "Run a mining task: opac, mca or rules");
  std::string task;
  mine->add_option("task", task)->required()->check(CLI::IsMember({"opac", "mca", "rules"}));
  mine->add_option("dir", dir)->required();
  mine->add_option("--body", body, "Task parameters: JSON or @file")->required();

  auto *log_cmd = app.add_subcommand("log", "Print the log of applied rule sets");
  log_cmd->add_option("dir", dir)->required();

  auto *fixture = app.add_subcommand("fixture", "Generate a named fixture warehouse");
  fixture->add_option("name", name)->required();
  fixture->add_option("--seed", seed, "Generator seed");
  fixture->add_option("--out", out, "Output directory")->required();
  fixture->add_option("--csv", csv_out, "Also write <prefix>.csv and <prefix>.mapping.json");

  auto *ingest_cmd = app.add_subcommand("ingest", "Load a CSV through a mapping into a warehouse directory");
  ingest_cmd->add_option("csv", csv_file)->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("mapping", mapping_file)->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--out", out, "Output directory")->required();

  auto *serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("dir", dir)->required();
  serve->add_option("--host", host);
  serve->add_option("--port", port);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fixture) {
      const xdw::FixtureSource src = xdw::fixture_source(name, seed);
      xdw::write_warehouse(xdw::ingest(src.table, src.mapping), out);
      if (!csv_out.empty()) {
        xdw::write_file(csv_out + ".csv", xdw::write_csv(src.table));
        xdw::write_file(csv_out + ".mapping.json", xdw::format_mapping(src.mapping));
      }
      return 0;
    }
    if (*ingest_cmd) {
      const xdw::Warehouse w =
          xdw::ingest(xdw::parse_csv(xdw::read_file(csv_file)), xdw::parse_mapping(xdw::read_file(mapping_file)));
      xdw::write_warehouse(w, out);
      return 0;
    }

    xdw::Service svc{fs::path(dir)};
    if (*load) print(call(svc, "GET", "/model"));
    else if (*log_cmd) print(call(svc, "GET", "/log"));
    else if (*cube_cmd || *op_cmd)
      print(call(svc, "GET", "/cubes/" + build_chain(svc, cube, ops) + page_query(offset, limit)));
    else if (*export_cmd) std::cout << call(svc, "GET", "/cubes/" + build_chain(svc, cube, ops) + "/export").at("text").get<std::string>();
    else if (*evolve) {
      Json req;
      if (structured) req["ruleset"] = json_arg("@" + rules_file, "rules");
      else req["rules"] = xdw::read_file(rules_file);
      req["dry_run"] = dry_run;
      print(call(svc, "POST", "/rules/apply", req));
    } else if (*mine) print(call(svc, "POST", "/mine/" + task, json_arg(body, "--body")));
    else if (*serve) {
      std::cerr << "serving " << dir << " on http://" << host << ":" << port << "\n";
      xdw::serve_http(svc, host, port);
    }
  } catch (const xdw::Error &e) {
    fail({xdw::status_for(e.code()), xdw::error_envelope(e)});
  }
  return 0;
}
