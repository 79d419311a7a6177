#ifndef ERGOPT_CONFIG_HPP
#define ERGOPT_CONFIG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ergopt/expanding_map.hpp"
#include "ergopt/potential.hpp"
#include "ergopt/rng.hpp"

namespace ergopt {

/// One run's worth of parameters: instance (map + potential + lambda),
/// tolerances, depths, and the master seed. Flat dotted-key text format,
/// '#' comments, one "key = value" per line; lists are comma separated.
struct RunConfig {
    // map.*
    int degree = 2;
    std::vector<double> map_cos;
    std::vector<double> map_sin;

    // potential.*
    std::string potential_kind = "trig";  // trig | coboundary | log-derivative
    double potential_constant = 0.0;
    std::vector<double> potential_cos{1.0};
    std::vector<double> potential_sin;
    std::vector<double> phi_cos{1.0};  // coboundary phi
    std::vector<double> phi_sin;
    double coboundary_c = 0.0;
    int log_sign = 1;

    Complex lambda{1.0, 0.0};

    // tol.*
    double tol_branch = 1e-13;
    double tol_h = 1e-9;
    double tol_agree = 1e-8;
    double tol_sep = 1e-3;
    double tol_lo = 1e-10;
    double tol_orbit = 1e-12;
    double tol_conj = 1e-11;
    double tol_subaction = 1e-6;

    // depth.* and friends
    int depth_k = 64;
    int p_max = 10;
    int n_max = 12;
    int grid_subaction = 1 << 12;
    int grid_scan = 256;
    int n_samples = 100000;
    int entropy_depth = 14;
    int scan_random_words = 8;
    int lo_max_iter = 5000;
    double epsilon = 1e-3;
    double lambda1_safety = 0.95;

    std::uint64_t seed = 20260809;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<double> parse_list(const std::string& text, int line_no) {
    std::vector<double> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": bad number '" + item + "'");
        }
    }
    return out;
}

inline double parse_double(const std::string& text, int line_no) {
    const auto v = parse_list(text, line_no);
    if (v.size() != 1)
        throw std::runtime_error("config line " + std::to_string(line_no) +
                                 ": expected a single number");
    return v[0];
}

inline long long parse_int(const std::string& text, int line_no) {
    const double v = parse_double(text, line_no);
    const auto n = static_cast<long long>(std::llround(v));
    if (static_cast<double>(n) != v)
        throw std::runtime_error("config line " + std::to_string(line_no) +
                                 ": expected an integer");
    return n;
}

// "a", "a+bi", "a-bi"
inline Complex parse_complex(std::string text, int line_no) {
    text = trim(text);
    const auto ipos = text.find('i');
    if (ipos == std::string::npos) return Complex(parse_double(text, line_no), 0.0);
    if (ipos + 1 != text.size())
        throw std::runtime_error("config line " + std::to_string(line_no) +
                                 ": bad complex literal '" + text + "'");
    std::string body = text.substr(0, ipos);
    // split at the sign of the imaginary part (skip a leading sign)
    std::size_t split = std::string::npos;
    for (std::size_t j = 1; j < body.size(); ++j) {
        const char c = body[j];
        if ((c == '+' || c == '-') && body[j - 1] != 'e' && body[j - 1] != 'E')
            split = j;
    }
    if (split == std::string::npos)
        throw std::runtime_error("config line " + std::to_string(line_no) +
                                 ": bad complex literal '" + text + "'");
    const double re = parse_double(body.substr(0, split), line_no);
    std::string im_text = body.substr(split);
    if (im_text == "+" || im_text == "-") im_text += "1";
    const double im = parse_double(im_text, line_no);
    return Complex(re, im);
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += format_double(v[i]);
    }
    return s;
}

inline std::string format_complex(Complex z) {
    if (z.imag() == 0.0) return format_double(z.real());
    return format_double(z.real()) + (z.imag() >= 0 ? "+" : "") +
           format_double(z.imag()) + "i";
}

}  // namespace detail

inline RunConfig parse_config_text(const std::string& text);

inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("parse_config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

/// Canonical serialized form: fixed key order, %.17g numbers. Parsing the
/// output reproduces the config exactly.
inline std::string serialize_config(const RunConfig& c) {
    using detail::format_complex;
    using detail::format_double;
    using detail::format_list;
    std::ostringstream os;
    os << "map.degree = " << c.degree << "\n";
    os << "map.cos = " << format_list(c.map_cos) << "\n";
    os << "map.sin = " << format_list(c.map_sin) << "\n";
    os << "potential.kind = " << c.potential_kind << "\n";
    os << "potential.constant = " << format_double(c.potential_constant) << "\n";
    os << "potential.cos = " << format_list(c.potential_cos) << "\n";
    os << "potential.sin = " << format_list(c.potential_sin) << "\n";
    os << "potential.phi_cos = " << format_list(c.phi_cos) << "\n";
    os << "potential.phi_sin = " << format_list(c.phi_sin) << "\n";
    os << "potential.c = " << format_double(c.coboundary_c) << "\n";
    os << "potential.sign = " << c.log_sign << "\n";
    os << "lambda = " << format_complex(c.lambda) << "\n";
    os << "tol.branch = " << format_double(c.tol_branch) << "\n";
    os << "tol.h = " << format_double(c.tol_h) << "\n";
    os << "tol.agree = " << format_double(c.tol_agree) << "\n";
    os << "tol.sep = " << format_double(c.tol_sep) << "\n";
    os << "tol.lo = " << format_double(c.tol_lo) << "\n";
    os << "tol.orbit = " << format_double(c.tol_orbit) << "\n";
    os << "tol.conj = " << format_double(c.tol_conj) << "\n";
    os << "tol.subaction = " << format_double(c.tol_subaction) << "\n";
    os << "depth.k = " << c.depth_k << "\n";
    os << "depth.p_max = " << c.p_max << "\n";
    os << "depth.n_max = " << c.n_max << "\n";
    os << "grid.subaction = " << c.grid_subaction << "\n";
    os << "grid.scan = " << c.grid_scan << "\n";
    os << "samples = " << c.n_samples << "\n";
    os << "entropy.depth = " << c.entropy_depth << "\n";
    os << "scan.random_words = " << c.scan_random_words << "\n";
    os << "lo.max_iter = " << c.lo_max_iter << "\n";
    os << "epsilon = " << format_double(c.epsilon) << "\n";
    os << "safety.lambda1 = " << format_double(c.lambda1_safety) << "\n";
    os << "seed = " << c.seed << "\n";
    return os.str();
}

inline std::uint64_t config_hash(const RunConfig& c) {
    return Rng::fnv1a(serialize_config(c));
}

inline ExpandingMap build_map(const RunConfig& c) {
    return ExpandingMap(c.degree,
                        TrigPoly::from_coefficients(0.0, c.map_cos, c.map_sin),
                        c.tol_branch, c.n_max, c.lambda1_safety);
}

inline Potential build_potential(const RunConfig& c, const ExpandingMap& map) {
    if (c.potential_kind == "trig")
        return Potential::trig(TrigPoly::from_coefficients(
            c.potential_constant, c.potential_cos, c.potential_sin));
    if (c.potential_kind == "coboundary")
        return Potential::coboundary(
            TrigPoly::from_coefficients(0.0, c.phi_cos, c.phi_sin), c.lambda,
            c.coboundary_c, map);
    if (c.potential_kind == "log-derivative")
        return Potential::log_derivative(c.log_sign, map);
    throw std::runtime_error("config: unknown potential.kind '" + c.potential_kind +
                             "' (trig | coboundary | log-derivative)");
}

/// Check every documented config invariant; throws naming the violated one.
/// Also constructs the map once, which certifies expansion (lambda_min).
inline void validate_config(const RunConfig& c) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0))
            throw std::runtime_error(std::string("config invariant: ") + name +
                                     " must be > 0");
    };
    positive(c.tol_branch, "tol.branch");
    positive(c.tol_h, "tol.h");
    positive(c.tol_agree, "tol.agree");
    positive(c.tol_sep, "tol.sep");
    positive(c.tol_lo, "tol.lo");
    positive(c.tol_orbit, "tol.orbit");
    positive(c.tol_conj, "tol.conj");
    positive(c.tol_subaction, "tol.subaction");
    if (!(c.tol_agree < c.tol_sep))
        throw std::runtime_error("config invariant: tol.agree must be < tol.sep");
    if (c.degree < 2)
        throw std::runtime_error("config invariant: map.degree must be >= 2");
    if (c.depth_k < 1 || c.depth_k > 4096)
        throw std::runtime_error("config invariant: depth.k out of [1, 4096]");
    if (c.p_max < 1 || std::pow(c.degree, c.p_max) > 65536.0 + 0.5)
        throw std::runtime_error(
            "config invariant: depth.p_max exceeds ceiling d^p_max <= 65536");
    if (c.n_max < 1 || c.n_max > 64)
        throw std::runtime_error("config invariant: depth.n_max out of [1, 64]");
    if (c.grid_subaction < (1 << 8))
        throw std::runtime_error("config invariant: grid.subaction must be >= 256");
    if (c.grid_scan < 2)
        throw std::runtime_error("config invariant: grid.scan must be >= 2");
    if (c.n_samples < 2)
        throw std::runtime_error("config invariant: samples must be >= 2");
    if (c.entropy_depth < 1 || c.entropy_depth > 40)
        throw std::runtime_error("config invariant: entropy.depth out of [1, 40]");
    if (!(c.lambda1_safety > 0.0 && c.lambda1_safety < 1.0))
        throw std::runtime_error("config invariant: safety.lambda1 out of (0, 1)");
    if (c.potential_kind == "log-derivative" && c.log_sign != 1 && c.log_sign != -1)
        throw std::runtime_error("config invariant: potential.sign must be +-1");

    const ExpandingMap map = build_map(c);  // certifies lambda_min > 1
    if (!(std::abs(c.lambda) > 0.0 && std::abs(c.lambda) < map.lambda1()))
        throw std::runtime_error(
            "config invariant: need 0 < |lambda| < lambda1 = " +
            std::to_string(map.lambda1()));
    (void)build_potential(c, map);
}

inline RunConfig parse_config_text(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        using detail::parse_complex;
        using detail::parse_double;
        using detail::parse_int;
        using detail::parse_list;

        if (key == "map.degree") c.degree = static_cast<int>(parse_int(value, line_no));
        else if (key == "map.cos") c.map_cos = parse_list(value, line_no);
        else if (key == "map.sin") c.map_sin = parse_list(value, line_no);
        else if (key == "potential.kind") c.potential_kind = value;
        else if (key == "potential.constant") c.potential_constant = parse_double(value, line_no);
        else if (key == "potential.cos") c.potential_cos = parse_list(value, line_no);
        else if (key == "potential.sin") c.potential_sin = parse_list(value, line_no);
        else if (key == "potential.phi_cos") c.phi_cos = parse_list(value, line_no);
        else if (key == "potential.phi_sin") c.phi_sin = parse_list(value, line_no);
        else if (key == "potential.c") c.coboundary_c = parse_double(value, line_no);
        else if (key == "potential.sign") c.log_sign = static_cast<int>(parse_int(value, line_no));
        else if (key == "lambda") c.lambda = parse_complex(value, line_no);
        else if (key == "tol.branch") c.tol_branch = parse_double(value, line_no);
        else if (key == "tol.h") c.tol_h = parse_double(value, line_no);
        else if (key == "tol.agree") c.tol_agree = parse_double(value, line_no);
        else if (key == "tol.sep") c.tol_sep = parse_double(value, line_no);
        else if (key == "tol.lo") c.tol_lo = parse_double(value, line_no);
        else if (key == "tol.orbit") c.tol_orbit = parse_double(value, line_no);
        else if (key == "tol.conj") c.tol_conj = parse_double(value, line_no);
        else if (key == "tol.subaction") c.tol_subaction = parse_double(value, line_no);
        else if (key == "depth.k") c.depth_k = static_cast<int>(parse_int(value, line_no));
        else if (key == "depth.p_max") c.p_max = static_cast<int>(parse_int(value, line_no));
        else if (key == "depth.n_max") c.n_max = static_cast<int>(parse_int(value, line_no));
        else if (key == "grid.subaction") c.grid_subaction = static_cast<int>(parse_int(value, line_no));
        else if (key == "grid.scan") c.grid_scan = static_cast<int>(parse_int(value, line_no));
        else if (key == "samples") c.n_samples = static_cast<int>(parse_int(value, line_no));
        else if (key == "entropy.depth") c.entropy_depth = static_cast<int>(parse_int(value, line_no));
        else if (key == "scan.random_words") c.scan_random_words = static_cast<int>(parse_int(value, line_no));
        else if (key == "lo.max_iter") c.lo_max_iter = static_cast<int>(parse_int(value, line_no));
        else if (key == "epsilon") c.epsilon = parse_double(value, line_no);
        else if (key == "safety.lambda1") c.lambda1_safety = parse_double(value, line_no);
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(value, line_no));
        else
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": unknown key '" + key + "'");
    }
    validate_config(c);
    return c;
}

}  // namespace ergopt

#endif
