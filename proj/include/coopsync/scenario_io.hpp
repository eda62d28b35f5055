#ifndef COOPSYNC_SCENARIO_IO_HPP
#define COOPSYNC_SCENARIO_IO_HPP

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "coopsync/montecarlo.hpp"

namespace coopsync {

/**
 * Scenario files are flat key = value text. Blank lines, full-line and
 * trailing '#' comments, and cosmetic [section] headers are allowed.
 * Numeric keys accept either a scalar or a sweep range:
 *   lo:hi:step        inclusive linear range
 *   lo:hi:logN        N log-spaced points
 * Exactly one key may carry a range; it becomes the sweep axis.
 */

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] inline void parse_fail(const std::string& key, int line, const std::string& why) {
    throw InvalidParameter("scenario line " + std::to_string(line) + ", key '" + key +
                           "': " + why);
}

inline double parse_number(const std::string& key, int line, const std::string& text) {
    const std::string t = trim(text);
    if (t == "inf" || t == "+inf" || t == "infinity") return kInfinity;
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size()) parse_fail(key, line, "trailing characters after number");
        return v;
    } catch (const std::logic_error&) {
        parse_fail(key, line, "expected a number, got '" + t + "'");
    }
}

inline long parse_integer(const std::string& key, int line, const std::string& text) {
    const double v = parse_number(key, line, text);
    if (!std::isfinite(v) || v != std::floor(v)) parse_fail(key, line, "expected an integer");
    return static_cast<long>(v);
}

inline bool looks_like_range(const std::string& text) {
    int colons = 0;
    for (char c : text) colons += (c == ':');
    return colons == 2 || text.find(',') != std::string::npos;
}

inline std::vector<double> parse_range(const std::string& key, int line, const std::string& text) {
    if (text.find(',') != std::string::npos) {
        std::vector<double> values;
        std::string item;
        std::istringstream is(text);
        while (std::getline(is, item, ','))
            values.push_back(parse_number(key, line, trim(item)));
        if (values.empty()) parse_fail(key, line, "sweep list is empty");
        return values;
    }
    const std::size_t c1 = text.find(':');
    const std::size_t c2 = text.find(':', c1 + 1);
    const double lo = parse_number(key, line, text.substr(0, c1));
    const double hi = parse_number(key, line, text.substr(c1 + 1, c2 - c1 - 1));
    const std::string step_text = trim(text.substr(c2 + 1));
    std::vector<double> values;
    if (step_text.rfind("log", 0) == 0) {
        const long count = parse_integer(key, line, step_text.substr(3));
        if (count < 1) parse_fail(key, line, "log point count must be >= 1");
        if (!(lo > 0.0) || !(hi > 0.0)) parse_fail(key, line, "log range needs positive bounds");
        for (long i = 0; i < count; ++i) {
            const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
            values.push_back(lo * std::pow(hi / lo, t));
        }
    } else {
        const double step = parse_number(key, line, step_text);
        if (!(step > 0.0)) parse_fail(key, line, "range step must be positive");
        if (hi < lo) parse_fail(key, line, "range end is below its start");
        for (double v = lo; v <= hi + 1e-9 * step; v += step) values.push_back(v);
    }
    if (values.empty()) parse_fail(key, line, "range is empty");
    return values;
}

inline std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ',')) {
        const std::string t = trim(item);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

}  // namespace detail

/// Apply scenario text onto an existing configuration; used both for
/// scenario files and for command-line overrides layered on top of one.
/// Unknown keys, malformed values, and constraint violations produce
/// diagnostics naming the key and line.
inline void apply_scenario_text(Scenario& sc, const std::string& text) {
    bool sweep_set = false;
    std::istringstream is(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        std::string line = raw;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw InvalidParameter("scenario line " + std::to_string(line_no) +
                                       ": unterminated section header");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidParameter("scenario line " + std::to_string(line_no) +
                                   ": expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (value.empty()) detail::parse_fail(key, line_no, "missing value");

        const auto set_sweep = [&](const std::string& axis) {
            if (sweep_set) detail::parse_fail(key, line_no, "a sweep axis is already defined");
            sweep_set = true;
            sc.sweep_key = axis;
            sc.sweep_values = detail::parse_range(key, line_no, value);
        };

        if (key == "phase") {
            if (value == "listening")
                sc.phase = Scenario::Phase::Listening;
            else if (value == "cooperation")
                sc.phase = Scenario::Phase::Cooperation;
            else
                detail::parse_fail(key, line_no, "expected 'listening' or 'cooperation'");
        } else if (key == "n_listen") {
            sc.n_listen = static_cast<int>(detail::parse_integer(key, line_no, value));
        } else if (key == "n_coop") {
            sc.n_coop = static_cast<int>(detail::parse_integer(key, line_no, value));
        } else if (key == "n") {
            if (detail::looks_like_range(value)) {
                set_sweep("n");
            } else {
                sc.n_listen = sc.n_coop =
                    static_cast<int>(detail::parse_integer(key, line_no, value));
            }
        } else if (key == "snr_sd_db") {
            if (detail::looks_like_range(value))
                set_sweep("snr_sd_db");
            else
                sc.snr_sd_db = detail::parse_number(key, line_no, value);
        } else if (key == "snr_rd_db") {
            if (value == "tied")
                sc.snr_rd_db.reset();
            else
                sc.snr_rd_db = detail::parse_number(key, line_no, value);
        } else if (key == "snr_sr_db") {
            if (value == "tied")
                sc.snr_sr_db.reset();
            else
                sc.snr_sr_db = detail::parse_number(key, line_no, value);
        } else if (key == "snr_sr_offset_db") {
            sc.snr_sr_offset_db = detail::parse_number(key, line_no, value);
        } else if (key == "sigma_f_sq") {
            if (detail::looks_like_range(value))
                set_sweep("sigma_f_sq");
            else
                sc.sigma_f_sq = detail::parse_number(key, line_no, value);
        } else if (key == "gamma") {
            if (value == "optimal") {
                sc.gamma_optimal = true;
            } else if (value == "zero") {
                sc.gamma_optimal = false;
                sc.gamma_value = 0.0;
            } else if (detail::looks_like_range(value)) {
                set_sweep("gamma");
                sc.gamma_optimal = false;
            } else {
                sc.gamma_optimal = false;
                sc.gamma_value = detail::parse_number(key, line_no, value);
            }
        } else if (key == "estimators") {
            sc.estimators = detail::split_list(value);
            if (sc.estimators.empty()) detail::parse_fail(key, line_no, "empty estimator list");
        } else if (key == "trials") {
            sc.trials = detail::parse_integer(key, line_no, value);
            if (sc.trials < 1) detail::parse_fail(key, line_no, "trials must be >= 1");
        } else if (key == "seed") {
            const long v = detail::parse_integer(key, line_no, value);
            if (v < 0) detail::parse_fail(key, line_no, "seed must be >= 0");
            sc.seed = static_cast<std::uint64_t>(v);
        } else if (key == "bound_variant") {
            sc.bound_variant = value;
        } else if (key == "search_iterations") {
            sc.search_iterations = detail::parse_integer(key, line_no, value);
        } else {
            detail::parse_fail(key, line_no, "unknown key");
        }
    }
}

inline Scenario parse_scenario(const std::string& text) {
    Scenario sc;
    apply_scenario_text(sc, text);
    sc.validate();
    return sc;
}

namespace detail {

inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace detail

/// Canonical text form: parse(serialize(s)) == s.
inline std::string serialize_scenario(const Scenario& sc) {
    std::ostringstream os;
    os << "phase = "
       << (sc.phase == Scenario::Phase::Listening ? "listening" : "cooperation") << "\n";
    os << "n_listen = " << sc.n_listen << "\n";
    os << "n_coop = " << sc.n_coop << "\n";
    if (sc.sweep_key != "snr_sd_db")
        os << "snr_sd_db = " << detail::format_double(sc.snr_sd_db) << "\n";
    os << "snr_rd_db = "
       << (sc.snr_rd_db ? detail::format_double(*sc.snr_rd_db) : std::string("tied")) << "\n";
    os << "snr_sr_db = "
       << (sc.snr_sr_db ? detail::format_double(*sc.snr_sr_db) : std::string("tied")) << "\n";
    os << "snr_sr_offset_db = " << detail::format_double(sc.snr_sr_offset_db) << "\n";
    if (sc.sweep_key != "sigma_f_sq")
        os << "sigma_f_sq = " << detail::format_double(sc.sigma_f_sq) << "\n";
    if (sc.gamma_optimal)
        os << "gamma = optimal\n";
    else if (sc.sweep_key != "gamma")
        os << "gamma = " << detail::format_double(sc.gamma_value) << "\n";
    os << "estimators = ";
    for (std::size_t i = 0; i < sc.estimators.size(); ++i)
        os << (i ? "," : "") << sc.estimators[i];
    os << "\n";
    os << "trials = " << sc.trials << "\n";
    os << "seed = " << sc.seed << "\n";
    os << "bound_variant = " << sc.bound_variant << "\n";
    os << "search_iterations = " << sc.search_iterations << "\n";
    // sweep values are written as an explicit list so that serialization
    // round-trips bit-exactly regardless of how the range was specified
    os << sc.sweep_key << " = ";
    for (std::size_t i = 0; i < sc.sweep_values.size(); ++i)
        os << (i ? "," : "") << detail::format_double(sc.sweep_values[i]);
    // a trailing comma marks a single-point sweep as a list, not a scalar
    if (sc.sweep_values.size() == 1) os << ",";
    os << "\n";
    return os.str();
}

/// FNV-1a 64-bit hash of the canonical scenario text, echoed in CSV
/// headers as a reproducibility breadcrumb.
inline std::uint64_t scenario_hash(const Scenario& sc) {
    const std::string text = serialize_scenario(sc);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace coopsync

#endif  // COOPSYNC_SCENARIO_IO_HPP
