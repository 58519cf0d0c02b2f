#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cartometry/error.hpp"
#include "cartometry/session.hpp"

namespace carto {

// Letters, digits, '.', '_' and '-'; 1..128 chars; no leading dot.
bool valid_session_id(std::string_view id) noexcept;

/**
 * Directory-backed set of sessions, one `<id>.json` per session.
 *
 * Sessions live in memory and are flushed (atomic rename) after every
 * mutation. Mutations of one session are serialized; different sessions
 * proceed independently and reads never wait on another session.
 */
class SessionStore {
public:
    // Throws io_error when `dir` is not an existing directory.
    explicit SessionStore(std::filesystem::path dir);

    const std::filesystem::path& directory() const noexcept { return dir_; }

    // Files that failed to load at startup, with the reason.
    const std::vector<std::pair<std::string, std::string>>& load_errors() const noexcept {
        return load_errors_;
    }

    std::vector<std::string> ids() const;
    std::optional<Session> get(std::string_view id) const;

    // Last writer wins.
    void put(const std::string& id, const Session& session);

    // Applies `mutate` to the current value under the session's write lock,
    // stores and flushes the result, and returns it. Throws not_found for
    // unknown ids; a throwing `mutate` leaves the session unchanged.
    Session update(std::string_view id, const std::function<Session(const Session&)>& mutate);

private:
    struct Entry {
        mutable std::shared_mutex mutex;
        Session session;
    };

    std::shared_ptr<Entry> find(std::string_view id) const;
    void flush(const std::string& id, const Session& session) const;

    std::filesystem::path dir_;
    mutable std::shared_mutex map_mutex_;
    std::map<std::string, std::shared_ptr<Entry>, std::less<>> entries_;
    std::vector<std::pair<std::string, std::string>> load_errors_;
};

struct ApiRequest {
    std::string method;
    std::string path;
    std::string body;
};

struct ApiResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
    std::vector<std::pair<std::string, std::string>> headers;
};

int http_status(ErrorCode code) noexcept;

// {"error": machine code, "message": ..., "field": ...}
ApiResponse error_response(ErrorCode code, std::string_view message, std::string_view field = {});

/// REST routing over a SessionStore, independent of any HTTP library.
class Api {
public:
    explicit Api(SessionStore& store) : store_(store) {}

    ApiResponse handle(const ApiRequest& request) const;

private:
    ApiResponse route(const ApiRequest& request) const;

    SessionStore& store_;
};

}  // namespace carto
