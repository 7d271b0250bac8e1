#include "xdw/http.hpp"

#include "xdw/error.hpp"

#include <httplib.h>

namespace xdw {

namespace {

void forward(Service &service, const httplib::Request &req, httplib::Response &res) {
  Json body = Json::object();
  if (!req.body.empty()) {
    try {
      body = Json::parse(req.body);
    } catch (const Json::parse_error &e) {
      const Json env = error_envelope(Error("bad-request", std::string("body is not JSON: ") + e.what()));
      res.status = 400;
      res.set_content(env.dump(), "application/json");
      return;
    }
  }
  std::string target = req.path;
  std::string query;
  for (const auto &[k, v] : req.params) query += (query.empty() ? "" : "&") + k + "=" + v;
  if (!query.empty()) target += "?" + query;
  const Response r = service.handle(req.method, target, body);
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

} // namespace

std::unique_ptr<httplib::Server> make_http_server(Service &service) {
  auto server = std::make_unique<httplib::Server>();
  auto handler = [&service](const httplib::Request &req, httplib::Response &res) { forward(service, req, res); };
  const char *any = R"(/.*)";
  server->Get(any, handler);
  server->Post(any, handler);
  server->Put(any, handler);
  server->Delete(any, handler);
  server->Patch(any, handler);
  // Lets a browser UI on another origin call the API.
  server->set_post_routing_handler([](const httplib::Request &, httplib::Response &res) {
    res.set_header("Access-Control-Allow-Origin", "*");
  });
  server->Options(any, [](const httplib::Request &, httplib::Response &res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  return server;
}

void serve_http(Service &service, const std::string &host, int port) {
  auto server = make_http_server(service);
  if (!server->bind_to_port(host, port))
    throw Error("io-error", "cannot bind " + host + ":" + std::to_string(port));
  server->listen_after_bind();
}

} // namespace xdw
