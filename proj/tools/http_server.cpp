#include "http_server.hpp"

#include <httplib.h>
#include <pthread.h>
#include <signal.h>

#include <ostream>
#include <thread>

#include "cli.hpp"

namespace carto::cli {

struct HttpServer::Impl {
    const Api& api;
    httplib::Server server;

    explicit Impl(const Api& a) : api(a) {}

    void forward(const httplib::Request& req, httplib::Response& res) const {
        const ApiResponse r = api.handle({req.method, req.path, req.body});
        res.status = r.status;
        for (const auto& [name, value] : r.headers) res.set_header(name, value);
        res.set_content(r.body, r.content_type);
    }
};

HttpServer::HttpServer(const Api& api, std::string static_dir)
    : impl_(std::make_unique<Impl>(api)) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        impl_->forward(req, res);
    };
    auto& s = impl_->server;
    // httplib's default also sets SO_REUSEPORT, which would let a second
    // server share a busy port instead of failing to bind.
    s.set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    s.Get("/healthz", handler);
    s.Get("/api/.*", handler);
    s.Put("/api/.*", handler);
    s.Post("/api/.*", handler);
    s.Delete("/api/.*", handler);
    if (!static_dir.empty()) s.set_mount_point("/", static_dir);
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& address, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(address);
    return impl_->server.bind_to_port(address, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

int serve(SessionStore& store, const ServeOptions& options, std::ostream& out, std::ostream& err) {
    for (const auto& [file, why] : store.load_errors()) {
        err << "warning: skipped " << file << ": " << why << "\n";
    }

    // Route termination signals to a dedicated thread instead of a handler.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    Api api(store);
    HttpServer server(api, options.static_dir);
    const int port = server.bind(options.bind_address, options.port);
    if (port < 0) {
        err << "error: cannot bind " << options.bind_address << ":" << options.port << "\n";
        pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
        return kSchemaOrIo;
    }
    out << "serving " << store.directory().string() << " on http://" << options.bind_address
        << ":" << port << "\n"
        << std::flush;

    std::thread waiter([&] {
        int received = 0;
        sigwait(&signals, &received);
        server.stop();
    });
    server.listen();
    // listen() can also return on its own; wake the waiter so it can finish.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
    out << "stopped\n";
    return kSuccess;
}

}  // namespace carto::cli
