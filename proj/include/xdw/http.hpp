#pragma once

// HTTP binding of Service: every route forwards method, path+query and the
// JSON body to Service::handle.

#include "xdw/service.hpp"

#include <memory>
#include <string>

namespace httplib {
class Server;
}

namespace xdw {

std::unique_ptr<httplib::Server> make_http_server(Service &service);

/// Blocks until the server stops. Throws io-error when the port cannot be bound.
void serve_http(Service &service, const std::string &host, int port);

} // namespace xdw
