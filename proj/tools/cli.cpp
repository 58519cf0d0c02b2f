#include "cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "cartometry/atomic_file.hpp"
#include "cartometry/boundary_fit.hpp"
#include "cartometry/error.hpp"
#include "cartometry/json_io.hpp"
#include "cartometry/service.hpp"
#include "cartometry/session.hpp"
#include "http_server.hpp"

namespace carto::cli {
namespace {

// Malformed command-line values; exits with kUsage.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::io_error:
        case ErrorCode::schema_violation:
        case ErrorCode::unsupported_version: return kSchemaOrIo;
        default: return kDomain;
    }
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

double parse_double(const std::string& text, std::string_view context) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v)) {
        throw UsageError(fmt::format("invalid number '{}' in {}", text, context));
    }
    return v;
}

std::pair<double, double> parse_xy(std::string_view text, std::string_view context) {
    const auto parts = split(text, ',');
    if (parts.size() != 2) throw UsageError(fmt::format("expected 'a,b' in {}", context));
    return {parse_double(parts[0], context), parse_double(parts[1], context)};
}

ControlPoint make_control_point(double u, double v, double a, double b, bool geo,
                                std::string label) {
    ControlPoint cp;
    cp.pixel = {u, v};
    if (geo) {
        cp.target = GeoPoint{a, b};
        validate(std::get<GeoPoint>(cp.target));
    } else {
        cp.target = WorldPoint{a, b};
    }
    cp.label = std::move(label);
    return cp;
}

// "u,v=x,y" or, for geographic pairs, "u,v=lat,lon".
ControlPoint parse_pair(const std::string& text, bool geo) {
    const auto sides = split(text, '=');
    if (sides.size() != 2) throw UsageError("control point '" + text + "' is not of the form u,v=x,y");
    const auto [u, v] = parse_xy(sides[0], "control point '" + text + "'");
    const auto [a, b] = parse_xy(sides[1], "control point '" + text + "'");
    return make_control_point(u, v, a, b, geo, {});
}

// CSV with a header of u,v,x,y or u,v,lat,lon and an optional label column.
std::vector<ControlPoint> read_pairs_file(const std::string& path, bool& geo) {
    std::istringstream in(read_file(path));
    std::string line;
    std::vector<ControlPoint> pairs;
    bool header_seen = false;
    bool has_label = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split(line, ',');
        const std::string where = fmt::format("{} line {}", path, line_no);
        if (!header_seen) {
            header_seen = true;
            if (cells.size() >= 4 && cells[0] == "u" && cells[1] == "v") {
                if (cells[2] == "lat" && cells[3] == "lon") {
                    geo = true;
                } else if (!(cells[2] == "x" && cells[3] == "y")) {
                    throw Error(ErrorCode::schema_violation, where + ": unknown header columns");
                }
                has_label = cells.size() >= 5 && cells[4] == "label";
                continue;
            }
            throw Error(ErrorCode::schema_violation,
                        where + ": expected header 'u,v,x,y' or 'u,v,lat,lon'");
        }
        if (cells.size() < 4 || cells.size() > (has_label ? 5u : 4u)) {
            throw Error(ErrorCode::schema_violation, where + ": wrong number of columns");
        }
        double vals[4];
        for (int i = 0; i < 4; ++i) {
            try {
                vals[i] = parse_double(cells[static_cast<std::size_t>(i)], where);
            } catch (const UsageError& e) {
                throw Error(ErrorCode::schema_violation, e.what());
            }
        }
        pairs.push_back(make_control_point(vals[0], vals[1], vals[2], vals[3], geo,
                                           has_label && cells.size() == 5 ? cells[4] : ""));
    }
    return pairs;
}

std::string join_numbers(const std::vector<double>& values) {
    std::string out;
    for (double v : values) {
        if (!out.empty()) out += ' ';
        out += format_number(v);
    }
    return out;
}

void print_row(std::ostream& out, std::string_view key, std::string_view value) {
    out << fmt::format("{:<15}{}\n", key, value);
}

// Text mode hides round-off: anything below 1e-12 of `scale` prints as zero.
double snap_noise(double value, double scale) {
    return std::abs(value) <= 1e-12 * std::abs(scale) ? 0.0 : value;
}

std::string with_unit(double value, std::string_view unit) {
    return format_number(value) + " " + std::string(unit);
}

std::string optional_value(const std::optional<double>& v, std::string_view unit) {
    return v ? with_unit(*v, unit) : std::string("null");
}

// ---------------------------------------------------------------- commands

struct InitArgs {
    std::string session;
    std::string image;
    long long width = 0;
    long long height = 0;
    std::string projection = "web_mercator";
    std::string unit = "km";
    bool force = false;
};

int cmd_init(const InitArgs& a, std::ostream& out) {
    if (!a.force && std::filesystem::exists(a.session)) {
        throw Error(ErrorCode::io_error, a.session + " already exists (use --force)");
    }
    Session s;
    s.image = {a.image, a.width, a.height};
    s.projection = parse_projection(a.projection);
    s.display_unit = parse_display_unit(a.unit);
    validate(s);
    save_session(s, a.session);
    out << "created " << a.session << "\n";
    return kSuccess;
}

struct TraceArgs {
    std::string session;
    std::string feature;
    std::string kind;
    std::string name;
    std::vector<std::string> points;
};

int cmd_trace(const TraceArgs& a, std::ostream& out, std::ostream& err) {
    Session s = load_session(a.session);
    if (!s.find_feature(a.feature)) {
        Feature f;
        f.id = a.feature;
        f.kind = parse_feature_kind(a.kind.empty() ? "route" : a.kind);
        f.name = a.name.empty() ? a.feature : a.name;
        s = add_feature(s, std::move(f));
    } else if (!a.kind.empty() && parse_feature_kind(a.kind) != s.feature(a.feature).kind) {
        throw Error(ErrorCode::invalid_input, "feature '" + a.feature + "' is a " +
                                                  std::string(to_string(s.feature(a.feature).kind)));
    }
    for (const auto& text : a.points) {
        const auto [u, v] = parse_xy(text, "point '" + text + "'");
        if (!within_image(s, {u, v})) {
            err << "warning: point " << text << " lies outside the image\n";
        }
        s = add_point(s, a.feature, {u, v});
    }
    save_session(s, a.session);
    out << a.feature << ": " << s.feature(a.feature).pixel_points.size() << " points\n";
    return kSuccess;
}

struct CalibrateArgs {
    std::string session;
    std::vector<std::string> pairs;
    std::string pairs_file;
    std::string kind = "similarity";
    bool geo = false;
    bool json = false;
};

int cmd_calibrate(const CalibrateArgs& a, std::ostream& out, std::ostream& err) {
    const Session s = load_session(a.session);
    bool geo = a.geo;
    std::vector<ControlPoint> pairs;
    if (!a.pairs_file.empty()) pairs = read_pairs_file(a.pairs_file, geo);
    for (const auto& text : a.pairs) pairs.push_back(parse_pair(text, geo));

    const Session updated = calibrate(s, std::move(pairs), parse_transform_kind(a.kind));
    save_session(updated, a.session);

    const auto& t = updated.calibration->transform;
    if (residual_warning(updated)) {
        err << "warning: residual exceeds "
            << format_number(kResidualWarningFraction * 100.0) << "% of the map diagonal\n";
    }
    if (a.json) {
        out << dump_compact(calibration_result_to_json(updated)) << "\n";
        return kSuccess;
    }
    // Translations and the residual are lengths on the map; the rest are
    // rotations or per-pixel scales.
    const double diagonal = world_diagonal(t, static_cast<double>(s.image.width_px),
                                           static_cast<double>(s.image.height_px));
    std::vector<double> coeffs = t.coefficients();
    double linear_scale = 0.0;
    for (std::size_t i = 0; i + 2 < coeffs.size(); ++i)
        linear_scale = std::max(linear_scale, std::abs(coeffs[i]));
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const bool translation = i + 2 >= coeffs.size();
        const bool angle = t.kind() == TransformKind::similarity && i == 1;
        coeffs[i] = snap_noise(coeffs[i], translation ? diagonal : angle ? 2 * M_PI : linear_scale);
    }
    print_row(out, "kind", to_string(t.kind()));
    print_row(out, "coefficients", join_numbers(coeffs));
    print_row(out, "rms_residual",
              with_unit(convert_display(snap_noise(t.rms_residual(), diagonal), updated.display_unit),
                        unit_label(updated.display_unit, Quantity::length)));
    return kSuccess;
}

struct MeasureArgs {
    std::string session;
    std::string feature;
    std::string unit;
    bool json = false;
};

int cmd_measure(const MeasureArgs& a, std::ostream& out) {
    const Session s = load_session(a.session);
    const DisplayUnit unit = a.unit.empty() ? s.display_unit : parse_display_unit(a.unit);
    const MeasurementReport r = measure_feature(s, a.feature, unit);
    if (a.json) {
        out << dump_compact(report_to_json(r)) << "\n";
        return kSuccess;
    }
    const Quantity q = r.quantity();
    const std::string km_unit = unit_label(DisplayUnit::km, q);
    print_row(out, "feature_id", r.feature_id);
    print_row(out, "kind", to_string(r.kind));
    print_row(out, "planar", with_unit(r.planar_value, km_unit));
    print_row(out, "geodesic", optional_value(r.geodesic_value, km_unit));
    print_row(out, "anomaly_ratio", r.anomaly_ratio ? format_number(*r.anomaly_ratio) : "null");
    print_row(out, "bbox_w", with_unit(r.bounding_box.width, "km"));
    print_row(out, "bbox_h", with_unit(r.bounding_box.height, "km"));
    print_row(out, "bbox_area", with_unit(r.bounding_box.area, "km²"));
    print_row(out, "simple", r.simple ? "true" : "false");
    print_row(out, "display_value", with_unit(r.display_value, unit_label(unit, q)));
    return kSuccess;
}

struct FitArgs {
    std::string session;
    std::string feature;
    int n = 0;
    int emit_samples = 0;
    int error_curve = 0;
    bool json = false;
};

int cmd_fit(const FitArgs& a, std::ostream& out) {
    const Session s = load_session(a.session);
    const Feature& f = s.feature(a.feature);
    if (f.kind != FeatureKind::region) throw Error(ErrorCode::invalid_input, "fit requires a region");
    const Polygon poly = region_polygon(s, a.feature);

    if (a.error_curve > 0) {
        out << "n,rms,area\n";
        for (const auto& row : fit_error_curve(poly, a.error_curve)) {
            out << fmt::format("{},{},{}\n", row.n, row.rms_error, row.area);
        }
        return kSuccess;
    }

    const int n = a.n > 0 ? a.n : default_harmonics(poly.size());
    const FitReport fit = fit_fourier_boundary(poly, n);

    if (a.emit_samples > 0) {
        const auto samples = sample_boundary(fit.boundary, a.emit_samples);
        Feature smooth;
        smooth.id = fmt::format("{}-fourier-n{}", f.id, n);
        smooth.kind = FeatureKind::region;
        smooth.name = fmt::format("{} (Fourier n={})", f.name, n);
        for (const WorldPoint& w : samples) {
            smooth.pixel_points.push_back(to_pixel(s.calibration->transform, w));
        }
        Session updated = s;
        std::erase_if(updated.features, [&](const Feature& g) { return g.id == smooth.id; });
        updated = add_feature(updated, smooth);
        save_session(updated, a.session);
        if (!a.json) out << "wrote feature " << smooth.id << " (" << samples.size() << " points)\n";
    }

    if (a.json) {
        out << dump_compact(fit_to_json(f.id, fit)) << "\n";
        return kSuccess;
    }
    print_row(out, "feature_id", f.id);
    print_row(out, "n", std::to_string(n));
    print_row(out, "rms_error", with_unit(fit.rms_error, "km"));
    print_row(out, "area", with_unit(fit.area, "km²"));
    print_row(out, "a0", format_number(fit.boundary.a0));
    print_row(out, "c0", format_number(fit.boundary.c0));
    for (int k = 0; k < n; ++k) {
        const auto i = static_cast<std::size_t>(k);
        print_row(out, fmt::format("k={}", k + 1),
                  join_numbers({fit.boundary.a[i], fit.boundary.b[i], fit.boundary.c[i],
                                fit.boundary.d[i]}));
    }
    return kSuccess;
}

struct ServeArgs {
    std::string dir;
    ServeOptions options;
};

int cmd_serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
    SessionStore store(a.dir);
    return serve(store, a.options, out, err);
}

}  // namespace

std::string format_number(double value) {
    if (!std::isfinite(value)) return fmt::format("{}", value);
    if (value == 0.0) return "0.00000";
    const int exponent = static_cast<int>(std::floor(std::log10(std::abs(value))));
    if (exponent < -4 || exponent >= 15) return fmt::format("{:.5e}", value);
    return fmt::format("{:.{}f}", value, std::max(0, 5 - exponent));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cartometric measurement on calibrated map images", "cartometry"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");
    const CLI::IsMember kUnits({"m", "km", "mi"});

    InitArgs init;
    auto* init_cmd = app.add_subcommand("init", "Create an empty session for a map image");
    init_cmd->add_option("session", init.session, "Session file to create")->required();
    init_cmd->add_option("--image", init.image, "Path of the map image")->required();
    init_cmd->add_option("--width", init.width, "Image width in pixels")->required();
    init_cmd->add_option("--height", init.height, "Image height in pixels")->required();
    init_cmd->add_option("--projection", init.projection, "web_mercator or planar_unknown")
        ->check(CLI::IsMember({"web_mercator", "planar_unknown"}));
    init_cmd->add_option("--unit", init.unit, "Display unit: m, km or mi")->check(kUnits);
    init_cmd->add_flag("--force", init.force, "Overwrite an existing file");

    TraceArgs trace;
    auto* trace_cmd = app.add_subcommand("trace", "Append points to a route or region");
    trace_cmd->add_option("session", trace.session)->required();
    trace_cmd->add_option("feature", trace.feature)->required();
    trace_cmd->add_option("--kind", trace.kind, "route or region (for new features)")
        ->check(CLI::IsMember({"route", "region"}));
    trace_cmd->add_option("--name", trace.name, "Display name for new features");
    trace_cmd->add_option("--point,-p", trace.points, "Pixel point u,v (repeatable)");

    CalibrateArgs cal;
    auto* cal_cmd = app.add_subcommand("calibrate", "Fit the pixel to world transform");
    cal_cmd->add_option("session", cal.session)->required();
    cal_cmd->add_option("--pair", cal.pairs, "Control point u,v=x,y (or u,v=lat,lon with --geo)");
    cal_cmd->add_option("--pairs-file", cal.pairs_file, "CSV with header u,v,x,y or u,v,lat,lon");
    cal_cmd->add_option("--kind", cal.kind, "similarity (default) or affine")
        ->check(CLI::IsMember({"similarity", "affine"}));
    cal_cmd->add_flag("--geo", cal.geo, "Targets are latitude,longitude in degrees");
    cal_cmd->add_flag("--json", cal.json, "Single-line JSON output");

    MeasureArgs measure;
    auto* measure_cmd = app.add_subcommand("measure", "Measure a traced feature");
    measure_cmd->add_option("session", measure.session)->required();
    measure_cmd->add_option("feature", measure.feature)->required();
    measure_cmd->add_option("--unit", measure.unit, "Display unit override: m, km or mi")
        ->check(kUnits);
    measure_cmd->add_flag("--json", measure.json, "Single-line JSON output");

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a continuous Fourier boundary to a region");
    fit_cmd->add_option("session", fit.session)->required();
    fit_cmd->add_option("feature", fit.feature)->required();
    fit_cmd->add_option("--n", fit.n, "Harmonic count (default min(8, vertices/4))")
        ->check(CLI::PositiveNumber);
    fit_cmd->add_option("--emit-samples", fit.emit_samples,
                        "Store m samples of the fitted curve as a new region")
        ->check(CLI::Range(3, 1000000));
    fit_cmd->add_option("--error-curve", fit.error_curve, "Print n,rms,area CSV for n = 1..N")
        ->check(CLI::PositiveNumber);
    fit_cmd->add_flag("--json", fit.json, "Single-line JSON output");

    ServeArgs serve_args;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the REST API over a session directory");
    serve_cmd->add_option("session_dir", serve_args.dir)->required();
    serve_cmd->add_option("--port", serve_args.options.port)->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--bind", serve_args.options.bind_address, "Listen address");
    serve_cmd->add_option("--static", serve_args.options.static_dir, "Static UI asset directory");

    std::vector<std::string> storage{"cartometry"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsage;
    }

    try {
        if (*init_cmd) return cmd_init(init, out);
        if (*trace_cmd) return cmd_trace(trace, out, err);
        if (*cal_cmd) return cmd_calibrate(cal, out, err);
        if (*measure_cmd) return cmd_measure(measure, out);
        if (*fit_cmd) return cmd_fit(fit, out);
        if (*serve_cmd) return cmd_serve(serve_args, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    }
    return kUsage;
}

}  // namespace carto::cli
