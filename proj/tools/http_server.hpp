#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include "cartometry/service.hpp"

namespace carto::cli {

/// HTTP/1.1 front end for Api. Every /api and /healthz request is handed to
/// Api::handle; anything else is looked up under the static directory.
class HttpServer {
public:
    explicit HttpServer(const Api& api, std::string static_dir = {});
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Port 0 picks a free port. Returns the bound port, or -1 on failure.
    int bind(const std::string& address, int port);
    // Blocks until stop().
    bool listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct ServeOptions {
    std::string bind_address = "127.0.0.1";
    int port = 8080;
    std::string static_dir;
};

// Blocks until SIGINT/SIGTERM. Returns a process exit code.
int serve(SessionStore& store, const ServeOptions& options, std::ostream& out, std::ostream& err);

}  // namespace carto::cli
