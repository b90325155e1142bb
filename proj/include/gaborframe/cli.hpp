#pragma once

// Command runner behind the gaborframe tool: bounds, verify, scan and
// check-identities. Argument parsing lives in tools/gaborframe.cpp; this
// header turns a RunConfig into an artifact and an exit status.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gaborframe/errors.hpp"
#include "gaborframe/frame_bounds.hpp"
#include "gaborframe/identities.hpp"
#include "gaborframe/lattice.hpp"
#include "gaborframe/phase_space.hpp"
#include "gaborframe/windows.hpp"

namespace gabor::cli {

enum ExitStatus : int { kOk = 0, kChecksFailed = 1, kInvalidConfig = 2, kNotConverged = 3 };

struct RunConfig {
    std::string command;
    std::string window = "hermite:0";
    std::string lattice = "square";
    std::optional<double> volume; // default 2^{-d}
    int grid_res = kDefaultGridRes;
    double tail = kDefaultTargetTail;
    double section_radius = kDefaultSectionRadius;
    std::string method = "janssen";
    std::string out;    // empty: stdout
    std::string format; // empty: json, csv for scan

    // scan
    std::optional<double> density; // default 1 / volume
    double tau_min = 0.0, tau_max = 0.5;
    int tau_count = 11;
    double h_min = std::sqrt(3.0) / 2.0 - 2.0 * (1.0 - std::sqrt(3.0) / 2.0) / 5.0;
    double h_max = std::sqrt(3.0) / 2.0 + 8.0 * (1.0 - std::sqrt(3.0) / 2.0) / 5.0;
    int h_count = 11;
    unsigned threads = 0;

    // check-identities
    bool quick = false;
    std::string dump_grids; // directory for A / W grid samples
};

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

inline int parse_int(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size()) throw InvalidArgument("bad integer '" + s + "' in " + what);
    return v;
}

/// hermite:N[,M...] | gaussian[:d] | sampled:PATH
inline Window parse_window(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "hermite") {
        if (arg.empty()) throw InvalidArgument("window spec hermite needs an order, e.g. hermite:1");
        std::vector<int> n;
        for (const auto& p : split(arg, ',')) n.push_back(parse_int(p, "window spec"));
        return hermite_window(n, static_cast<int>(n.size()));
    }
    if (kind == "gaussian") return gaussian_window(arg.empty() ? 1 : parse_int(arg, "window spec"));
    if (kind == "sampled") {
        if (arg.empty()) throw InvalidArgument("window spec sampled needs a path");
        return read_window_csv(arg);
    }
    throw InvalidArgument("unknown window kind '" + kind + "'");
}

/// Generator from a JSON file ({"M": [[...]]} or [[...]]) or a plain text
/// file with one matrix row per line.
inline Eigen::MatrixXd read_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open lattice matrix file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    std::vector<std::vector<double>> rows;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
            if (j.is_object()) j = j.at("M");
            rows = j.get<std::vector<std::vector<double>>>();
        } catch (const nlohmann::json::exception& e) {
            throw InvalidArgument("bad lattice matrix JSON in " + path + ": " + e.what());
        }
    } else {
        std::stringstream ss(text);
        std::string line;
        while (std::getline(ss, line)) {
            for (char& c : line)
                if (c == ',') c = ' ';
            std::stringstream ls(line);
            std::vector<double> row;
            double v = 0.0;
            while (ls >> v) row.push_back(v);
            if (!ls.eof()) throw InvalidArgument("bad number in lattice matrix file " + path);
            if (!row.empty()) rows.push_back(row);
        }
    }
    if (rows.empty()) throw InvalidArgument("empty lattice matrix file " + path);
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size()) throw InvalidArgument("ragged lattice matrix in " + path);
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return m;
}

/// square | hexagonal | matrix:PATH; presets are scaled to `volume`.
inline Lattice parse_lattice(const std::string& spec, std::optional<double> volume, int d) {
    const double v = volume.value_or(std::pow(2.0, -d));
    if (!(v > 0.0)) throw InvalidArgument("volume must be positive");
    if (spec == "square") return square_lattice(v, d);
    if (spec == "hexagonal") {
        if (d != 1) throw InvalidArgument("hexagonal preset is two-dimensional (d = 1 windows)");
        return hexagonal_lattice(v);
    }
    if (spec.rfind("matrix:", 0) == 0) {
        const Lattice l(read_matrix(spec.substr(7)));
        if (volume) throw InvalidArgument("--volume applies to presets only; matrix lattices carry their own volume");
        if (l.dim() != d) throw InvalidArgument("lattice matrix dimension does not match the window");
        return l;
    }
    throw InvalidArgument("unknown lattice spec '" + spec + "'");
}

inline void validate(const RunConfig& c) {
    if (c.command != "bounds" && c.command != "verify" && c.command != "scan" && c.command != "check-identities")
        throw InvalidArgument("unknown command '" + c.command + "'");
    if (c.grid_res < 1) throw InvalidArgument("grid-res must be >= 1");
    if (!(c.tail > 0.0)) throw InvalidArgument("tail must be positive");
    if (!(c.section_radius > 0.0)) throw InvalidArgument("section-radius must be positive");
    if (c.method != "janssen" && c.method != "gram" && c.method != "both")
        throw InvalidArgument("method must be janssen, gram or both");
    if (!c.format.empty() && c.format != "json" && c.format != "csv") throw InvalidArgument("format must be json or csv");
    if (c.tau_count < 1 || c.h_count < 1) throw InvalidArgument("scan counts must be >= 1");
}

namespace detail {

inline std::string format_of(const RunConfig& c, const char* fallback) { return c.format.empty() ? fallback : c.format; }

inline void emit(const RunConfig& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream os(c.out);
    if (!os) throw InvalidArgument("cannot write " + c.out);
    os << text;
}

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline void bounds_csv_row(std::ostream& os, const FrameBoundsResult& r) {
    os << to_string(r.method) << ',' << r.lower_A << ',' << r.upper_B << ',' << (r.converged ? "true" : "false") << ','
       << r.grid_res << ',' << r.truncation_radius << '\n';
}

inline int run_bounds(const RunConfig& c) {
    const Window g = parse_window(c.window);
    const Lattice l = parse_lattice(c.lattice, c.volume, g.dim());
    std::vector<FrameBoundsResult> results;
    if (c.method == "janssen" || c.method == "both") results.push_back(frame_bounds_janssen(g, l, c.grid_res, c.tail));
    if (c.method == "gram" || c.method == "both") results.push_back(frame_bounds_gram(g, l, c.section_radius));

    bool converged = true;
    for (const auto& r : results) converged = converged && r.converged;
    if (format_of(c, "json") == "csv") {
        std::ostringstream os;
        os << std::setprecision(17) << "method,A,B,converged,grid_res,truncation_radius\n";
        for (const auto& r : results) bounds_csv_row(os, r);
        emit(c, os.str());
    } else if (results.size() == 1) {
        emit(c, dump(to_json(results.front())));
    } else {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : results) arr.push_back(to_json(r));
        emit(c, dump(arr));
    }
    return converged ? kOk : kNotConverged;
}

inline int run_verify(const RunConfig& c) {
    const Window g = parse_window(c.window);
    const Lattice l = parse_lattice(c.lattice, c.volume, g.dim());
    const auto rep = verify_theorem_main(g, l, c.grid_res, c.tail);
    emit(c, dump(to_json(rep)));
    if (rep.hypotheses_met && rep.lower_A && !rep.converged) return kNotConverged;
    return rep.passed() ? kOk : kChecksFailed;
}

inline int run_scan(const RunConfig& c) {
    const Window g = parse_window(c.window);
    const double density = c.density.value_or(1.0 / c.volume.value_or(0.5));
    const ShapeGrid grid{ShapeGrid::linspace(c.tau_min, c.tau_max, c.tau_count),
                         ShapeGrid::linspace(c.h_min, c.h_max, c.h_count)};
    ScanOptions opt;
    opt.grid_res = c.grid_res;
    opt.target_tail = c.tail;
    opt.section_radius = c.section_radius;
    opt.threads = c.threads;
    const auto rows = scan_lattices(g, density, grid, opt);
    if (format_of(c, "csv") == "csv") {
        std::ostringstream os;
        write_scan_csv(os, rows);
        emit(c, os.str());
    } else {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rows) {
            nlohmann::json j = {{"s", r.s}, {"tau", r.tau}, {"h", r.h}, {"converged", r.converged}};
            j["A"] = std::isnan(r.lower_A) ? nlohmann::json(nullptr) : nlohmann::json(r.lower_A);
            j["B"] = std::isnan(r.upper_B) ? nlohmann::json(nullptr) : nlohmann::json(r.upper_B);
            if (!r.error.empty()) j["error"] = r.error;
            arr.push_back(j);
        }
        emit(c, dump(arr));
    }
    for (const auto& r : rows)
        if (!r.converged) return kNotConverged;
    return kOk;
}

inline void dump_identity_grids(const std::string& dir) {
    const Window g = hermite_window(0);
    const auto axes = uniform_axes(1, -2.0, 2.0, 41);
    save_sample(dir + "/ambiguity_h0",
                sample_function([&](const PhaseSpacePoint& p) { return ambiguity(g, g, p); }, axes, "A h0"));
    save_sample(dir + "/wigner_h0",
                sample_function([&](const PhaseSpacePoint& p) { return wigner(g, g, p); }, axes, "W h0"));
}

inline int run_check_identities(const RunConfig& c) {
    IdentityOptions opt;
    opt.quick = c.quick;
    const auto suites = run_identity_suites(opt);
    bool ok = true;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : suites) {
        ok = ok && s.passed;
        arr.push_back(to_json(s));
    }
    if (!c.dump_grids.empty()) dump_identity_grids(c.dump_grids);
    emit(c, dump({{"quick", c.quick}, {"passed", ok}, {"suites", arr}}));
    return ok ? kOk : kChecksFailed;
}

} // namespace detail

/// Executes the command; errors map to exit statuses 2 (invalid config) and
/// 3 (non-convergence). Diagnostics go to `err`, never to the artifact stream.
inline int run(const RunConfig& c, std::ostream& err = std::cerr) {
    try {
        validate(c);
        if (c.command == "bounds") return detail::run_bounds(c);
        if (c.command == "verify") return detail::run_verify(c);
        if (c.command == "scan") return detail::run_scan(c);
        return detail::run_check_identities(c);
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        nlohmann::json partial = {{"command", c.command}, {"converged", false}, {"error", e.what()}};
        try {
            detail::emit(c, detail::dump(partial));
        } catch (const Error&) {
        }
        return kNotConverged;
    } catch (const CapExceeded& e) {
        err << "error: " << e.what() << '\n';
        return kNotConverged;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidConfig;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidConfig;
    }
}

} // namespace gabor::cli
