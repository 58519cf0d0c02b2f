#include "cartometry/service.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>

#include "cartometry/boundary_fit.hpp"
#include "cartometry/json_io.hpp"

namespace carto {
namespace {

ApiResponse json_response(int status, const Json& body) {
    ApiResponse r;
    r.status = status;
    r.body = dump_compact(body);
    return r;
}

std::vector<std::string_view> split_path(std::string_view path) {
    if (auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (start <= path.size()) {
        const std::size_t end = std::min(path.find('/', start), path.size());
        if (end > start) parts.push_back(path.substr(start, end - start));
        start = end + 1;
    }
    return parts;
}

Json parse_body(std::string_view body, bool allow_empty) {
    if (allow_empty && body.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        return Json::object();
    }
    try {
        Json j = Json::parse(body.begin(), body.end());
        if (!j.is_object()) throw Error(ErrorCode::schema_violation, "body must be a JSON object", "/");
        return j;
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::schema_violation, std::string("malformed JSON body: ") + e.what());
    }
}

double body_number(const Json& body, const char* key) {
    auto it = body.find(key);
    if (it == body.end() || !it->is_number()) {
        throw Error(ErrorCode::schema_violation, std::string("expected number field '") + key + "'",
                    std::string("/") + key);
    }
    return it->get<double>();
}

std::optional<int> body_int(const Json& body, const char* key) {
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_integer()) {
        throw Error(ErrorCode::schema_violation, std::string("expected integer field '") + key + "'",
                    std::string("/") + key);
    }
    return it->get<int>();
}

std::string body_string(const Json& body, const char* key, std::string fallback) {
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) return fallback;
    if (!it->is_string()) {
        throw Error(ErrorCode::schema_violation, std::string("expected string field '") + key + "'",
                    std::string("/") + key);
    }
    return it->get<std::string>();
}

ApiResponse method_not_allowed() {
    ApiResponse r = error_response(ErrorCode::invalid_input, "method not allowed");
    r.status = 405;
    return r;
}

}  // namespace

bool valid_session_id(std::string_view id) noexcept {
    if (id.empty() || id.size() > 128 || id.front() == '.') return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-';
    });
}

SessionStore::SessionStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir_, ec)) {
        throw Error(ErrorCode::io_error, "not a directory: " + dir_.string());
    }
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
        const std::string id = entry.path().stem().string();
        if (!valid_session_id(id)) continue;
        try {
            auto e = std::make_shared<Entry>();
            e->session = load_session(entry.path());
            entries_.emplace(id, std::move(e));
        } catch (const Error& err) {
            load_errors_.emplace_back(entry.path().string(), err.what());
        }
    }
}

std::vector<std::string> SessionStore::ids() const {
    std::shared_lock lock(map_mutex_);
    std::vector<std::string> out;
    for (const auto& [id, entry] : entries_) out.push_back(id);
    return out;
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(std::string_view id) const {
    std::shared_lock lock(map_mutex_);
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : it->second;
}

std::optional<Session> SessionStore::get(std::string_view id) const {
    auto entry = find(id);
    if (!entry) return std::nullopt;
    std::shared_lock lock(entry->mutex);
    return entry->session;
}

void SessionStore::flush(const std::string& id, const Session& session) const {
    save_session(session, dir_ / (id + ".json"));
}

void SessionStore::put(const std::string& id, const Session& session) {
    if (!valid_session_id(id)) throw Error(ErrorCode::invalid_input, "invalid session id");
    validate(session);
    std::shared_ptr<Entry> entry;
    {
        std::unique_lock lock(map_mutex_);
        auto& slot = entries_[id];
        if (!slot) slot = std::make_shared<Entry>();
        entry = slot;
    }
    std::unique_lock lock(entry->mutex);
    flush(id, session);
    entry->session = session;
}

Session SessionStore::update(std::string_view id,
                             const std::function<Session(const Session&)>& mutate) {
    auto entry = find(id);
    if (!entry) throw Error(ErrorCode::not_found, "session not found: " + std::string(id));
    std::unique_lock lock(entry->mutex);
    Session next = mutate(entry->session);
    flush(std::string(id), next);
    entry->session = std::move(next);
    return entry->session;
}

int http_status(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::not_found: return 404;
        case ErrorCode::degenerate_configuration:
        case ErrorCode::non_invertible:
        case ErrorCode::uncalibrated_session:
        case ErrorCode::duplicate_point: return 409;
        case ErrorCode::io_error: return 500;
        case ErrorCode::invalid_input:
        case ErrorCode::insufficient_data:
        case ErrorCode::domain_error:
        case ErrorCode::incomplete_feature:
        case ErrorCode::schema_violation:
        case ErrorCode::unsupported_version: return 422;
    }
    return 500;
}

ApiResponse error_response(ErrorCode code, std::string_view message, std::string_view field) {
    Json body;
    body["error"] = machine_code(code);
    body["message"] = message;
    if (!field.empty()) body["field"] = field;
    return json_response(http_status(code), body);
}

ApiResponse Api::handle(const ApiRequest& request) const {
    try {
        return route(request);
    } catch (const Error& e) {
        return error_response(e.code(), e.what(), e.field());
    } catch (const nlohmann::json::exception& e) {
        return error_response(ErrorCode::schema_violation, e.what());
    } catch (const std::exception& e) {
        ApiResponse r = error_response(ErrorCode::io_error, e.what());
        r.status = 500;
        return r;
    }
}

ApiResponse Api::route(const ApiRequest& request) const {
    const auto parts = split_path(request.path);
    const std::string& method = request.method;

    if (parts.size() == 1 && parts[0] == "healthz") {
        if (method != "GET") return method_not_allowed();
        ApiResponse r;
        r.content_type = "text/plain";
        r.body = "ok";
        return r;
    }
    if (parts.size() < 2 || parts[0] != "api" || parts[1] != "sessions") {
        return error_response(ErrorCode::not_found, "no such endpoint");
    }
    if (parts.size() == 2) {
        if (method != "GET") return method_not_allowed();
        return json_response(200, Json(store_.ids()));
    }

    const std::string id(parts[2]);
    if (!valid_session_id(id)) return error_response(ErrorCode::invalid_input, "invalid session id");

    if (parts.size() == 3) {
        if (method == "GET") {
            auto s = store_.get(id);
            if (!s) return error_response(ErrorCode::not_found, "session not found: " + id);
            ApiResponse r;
            r.body = serialize_session(*s);
            return r;
        }
        if (method == "PUT") {
            const Session s = parse_session(request.body);
            store_.put(id, s);
            ApiResponse r;
            r.body = serialize_session(s);
            return r;
        }
        return method_not_allowed();
    }

    if (parts.size() == 4 && parts[3] == "calibrate") {
        if (method != "POST") return method_not_allowed();
        const Json body = parse_body(request.body, false);
        const auto kind = parse_transform_kind(body_string(body, "kind", "similarity"));
        auto it = body.find("pairs");
        if (it == body.end() || !it->is_array()) {
            throw Error(ErrorCode::schema_violation, "expected array field 'pairs'", "/pairs");
        }
        std::vector<ControlPoint> pairs;
        for (std::size_t i = 0; i < it->size(); ++i) {
            pairs.push_back(control_point_from_json((*it)[i], "/pairs/" + std::to_string(i)));
        }
        const Session updated = store_.update(id, [&](const Session& s) {
            return calibrate(s, pairs, kind);
        });
        return json_response(200, calibration_result_to_json(updated));
    }

    if (parts.size() == 4 && parts[3] == "features") {
        if (method != "POST") return method_not_allowed();
        const Json body = parse_body(request.body, false);
        Feature f;
        f.id = body_string(body, "id", "");
        if (!valid_session_id(f.id)) {
            throw Error(ErrorCode::invalid_input, "invalid feature id", "/id");
        }
        f.kind = parse_feature_kind(body_string(body, "kind", "route"));
        f.name = body_string(body, "name", f.id);
        store_.update(id, [&](const Session& s) { return add_feature(s, f); });
        return json_response(201, feature_to_json(f));
    }

    if (parts.size() == 6 && parts[3] == "features") {
        if (method != "POST") return method_not_allowed();
        const std::string fid(parts[4]);
        const std::string_view action = parts[5];

        if (action == "points") {
            const Json body = parse_body(request.body, false);
            const PixelPoint p{body_number(body, "u"), body_number(body, "v")};
            const Session updated = store_.update(id, [&](const Session& s) {
                return add_point(s, fid, p);
            });
            ApiResponse r = json_response(200, feature_to_json(updated.feature(fid)));
            if (!within_image(updated, p)) {
                r.headers.emplace_back("X-Cartometry-Warning", "point outside image bounds");
            }
            return r;
        }

        auto s = store_.get(id);
        if (!s) return error_response(ErrorCode::not_found, "session not found: " + id);

        if (action == "measure") {
            const Json body = parse_body(request.body, true);
            const DisplayUnit unit =
                parse_display_unit(body_string(body, "unit", std::string(to_string(s->display_unit))));
            return json_response(200, report_to_json(measure_feature(*s, fid, unit)));
        }
        if (action == "fit") {
            const Json body = parse_body(request.body, true);
            const Feature& f = s->feature(fid);
            if (f.kind != FeatureKind::region) {
                throw Error(ErrorCode::invalid_input, "fit requires a region");
            }
            const Polygon poly = region_polygon(*s, fid);
            const int n = body_int(body, "n").value_or(default_harmonics(poly.size()));
            const FitReport fit = fit_fourier_boundary(poly, n);
            Json out = fit_to_json(fid, fit);
            if (auto m = body_int(body, "samples")) {
                Json samples = Json::array();
                for (const WorldPoint& w : sample_boundary(fit.boundary, *m)) {
                    samples.push_back(Json::array({w.x, w.y}));
                }
                out["samples"] = std::move(samples);
            }
            return json_response(200, out);
        }
    }
    return error_response(ErrorCode::not_found, "no such endpoint");
}

}  // namespace carto
