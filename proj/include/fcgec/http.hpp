#pragma once

#include <string>

#include "fcgec/error.hpp"
#include "fcgec/service.hpp"

namespace httplib {
class Server;
}

namespace fcgec::service {

/// Installs the /v1 routes on `server`. The store must outlive the server.
void register_routes(httplib::Server& server, AnnotationStore& store);

/// HTTP status used for an error code in responses.
int http_status(Errc code);

/// Blocks serving on host:port until the server is stopped.
bool serve(AnnotationStore& store, const std::string& host, int port);

}  // namespace fcgec::service
