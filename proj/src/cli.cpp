#include "threebox/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "threebox/experiment.hpp"
#include "threebox/weakcalc.hpp"

namespace threebox::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double x = std::stod(value, &used);
        if (used != value.size() || !std::isfinite(x)) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw UsageError("malformed number for key '" + key + "': " + value);
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const int x = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw UsageError("malformed number for key '" + key + "': " + value);
    }
}

// key = value lines, '#' comments, blank lines ignored
std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError("malformed config line (expected key = value): " + line);
        }
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "states") {
        cfg.states = value;
    } else if (key == "pre") {
        cfg.pre_amplitudes = parse_amplitudes(value);
    } else if (key == "post") {
        cfg.post_amplitudes = parse_amplitudes(value);
    } else if (key == "rail") {
        cfg.rail = value;
    } else if (key == "k_min") {
        cfg.k_min = parse_double(key, value);
    } else if (key == "k_max") {
        cfg.k_max = parse_double(key, value);
    } else if (key == "steps") {
        cfg.steps = parse_int(key, value);
    } else if (key == "theta_deg") {
        cfg.theta_deg = parse_double(key, value);
    } else if (key == "visibility") {
        cfg.visibility = parse_double(key, value);
    } else if (key == "polarizer") {
        cfg.polarizer = value;
    } else if (key == "pixel_scale") {
        cfg.pixel_scale = parse_double(key, value);
    } else if (key == "k_c") {
        cfg.k_c = parse_double(key, value);
    } else if (key == "points") {
        cfg.points = parse_int(key, value);
    } else if (key == "output") {
        cfg.output = value;
    } else {
        throw UsageError("unknown key '" + key + "'");
    }
}

void require(bool ok, const std::string& message) {
    if (!ok) throw UsageError(message);
}

void validate(RunConfig& cfg) {
    require(cfg.scenario == "weak-values" || cfg.scenario == "scan" ||
                cfg.scenario == "fig2" || cfg.scenario == "two-pointer",
            "unknown scenario '" + cfg.scenario + "'");
    require(cfg.visibility >= 0.0 && cfg.visibility <= 1.0,
            "visibility out of range [0,1]");
    require(cfg.polarizer == "none" || cfg.polarizer == "block-v" ||
                cfg.polarizer == "block-h",
            "polarizer must be none, block-v, or block-h");
    require(cfg.pre_amplitudes.has_value() == cfg.post_amplitudes.has_value(),
            "keys 'pre' and 'post' must be given together");
    if (cfg.pre_amplitudes) {
        require(cfg.pre_amplitudes->size() == cfg.post_amplitudes->size(),
                "keys 'pre' and 'post' must have the same length");
        require(cfg.states.empty(),
                "give either 'states' or explicit 'pre'/'post', not both");
        // fail fast on non-normalizable input
        try {
            make_state(*cfg.pre_amplitudes);
            make_state(*cfg.post_amplitudes);
        } catch (const std::exception& e) {
            throw UsageError(std::string("bad amplitudes: ") + e.what());
        }
    }

    const bool needs_states = cfg.scenario != "fig2";
    if (needs_states) {
        require(!cfg.states.empty() || cfg.pre_amplitudes.has_value(),
                "missing required key 'states' (or explicit 'pre'/'post')");
    } else {
        require(cfg.states.empty() || cfg.states == "generalized",
                "fig2 always uses the generalized states");
        require(!cfg.pre_amplitudes, "fig2 always uses the generalized states");
        require(cfg.points >= 2, "key 'points' must be at least 2");
        require(std::isfinite(cfg.k_c), "malformed number for key 'k_c'");
    }

    const bool scanning = cfg.scenario == "scan" || cfg.scenario == "two-pointer";
    if (scanning) {
        require(cfg.k_min.has_value(), "missing required key 'k_min'");
        require(cfg.k_max.has_value(), "missing required key 'k_max'");
        require(cfg.steps.has_value(), "missing required key 'steps'");
        require(*cfg.steps >= 2, "key 'steps' must be at least 2");
        require(*cfg.k_min < *cfg.k_max, "key 'k_min' must be below 'k_max'");
    }
    if (cfg.scenario == "scan") {
        require(!cfg.rail.empty(), "missing required key 'rail'");
    }
    if (cfg.scenario == "two-pointer") {
        require(cfg.theta_deg.has_value(), "missing required key 'theta_deg'");
        require(*cfg.theta_deg != 0.0, "key 'theta_deg' must be nonzero");
        if (cfg.rail.empty()) cfg.rail = "B";
    }
    if (cfg.scenario != "weak-values" && cfg.output.empty()) {
        cfg.output = cfg.scenario + ".csv";
    }
    require(cfg.pixel_scale > 0.0, "key 'pixel_scale' must be positive");
}

}  // namespace

Complex parse_complex(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty()) throw UsageError("empty amplitude");
    const char* p = s.c_str();
    char* end = nullptr;
    double first = std::strtod(p, &end);
    if (end == p) throw UsageError("malformed amplitude: " + s);
    if (*end == '\0') return {first, 0.0};
    if (*end == 'i' && *(end + 1) == '\0') return {0.0, first};
    const char* q = end;
    double second = std::strtod(q, &end);
    if (end == q || *end != 'i' || *(end + 1) != '\0') {
        throw UsageError("malformed amplitude: " + s);
    }
    return {first, second};
}

std::string format_complex(const Complex& z) {
    char buf[64];
    if (z.imag() == 0.0) {
        std::snprintf(buf, sizeof buf, "%.17g", z.real());
    } else {
        std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
    }
    return buf;
}

std::vector<Complex> parse_amplitudes(const std::string& text) {
    std::vector<Complex> amps;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        amps.push_back(parse_complex(item));
    }
    if (amps.size() < 2) throw UsageError("need at least 2 amplitudes");
    return amps;
}

RunConfig parse_config(const std::vector<std::string>& args) {
    if (args.empty()) {
        throw UsageError(
            "missing scenario (weak-values | scan | fig2 | two-pointer)");
    }
    RunConfig cfg;
    cfg.scenario = args[0];

    std::map<std::string, std::string> from_file;
    std::vector<std::pair<std::string, std::string>> from_cli;
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& flag = args[i];
        if (flag.rfind("--", 0) != 0) {
            throw UsageError("expected a --flag, got '" + flag + "'");
        }
        if (i + 1 >= args.size()) {
            throw UsageError("flag '" + flag + "' needs a value");
        }
        std::string key = flag.substr(2);
        for (auto& c : key) {
            if (c == '-') c = '_';
        }
        const std::string& value = args[++i];
        if (key == "config") {
            for (const auto& [k, v] : read_config_file(value)) from_file[k] = v;
        } else {
            from_cli.emplace_back(key, value);
        }
    }
    for (const auto& [k, v] : from_file) apply_key(cfg, k, v);
    for (const auto& [k, v] : from_cli) apply_key(cfg, k, v);  // flags win
    validate(cfg);
    return cfg;
}

namespace {

std::string fmt(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

std::string fmt_signed(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%+.12g", x);
    return buf;
}

std::string states_line(const RailState& s) {
    std::string line;
    for (std::size_t i = 0; i < s.dimension(); ++i) {
        if (i) line += ", ";
        line += format_complex(s.amplitudes()[i]);
    }
    return line;
}

std::pair<RailState, RailState> resolve_states(const RunConfig& cfg) {
    if (cfg.pre_amplitudes) {
        return {make_state(*cfg.pre_amplitudes), make_state(*cfg.post_amplitudes)};
    }
    return preset_states(cfg.states.empty() ? "generalized" : cfg.states);
}

void print_states(std::ostream& out, const RunConfig& cfg,
                  const RailState& pre, const RailState& post) {
    out << "states: " << (cfg.states.empty() ? "explicit" : cfg.states) << "\n";
    out << "pre  = " << states_line(pre) << "\n";
    out << "post = " << states_line(post) << "\n";
}

void print_weak_summary(std::ostream& out, const RailState& pre,
                        const RailState& post) {
    const Complex ov = inner(post, pre);
    out << "overlap <post|pre> = " << format_complex(ov) << "\n";
    out << "weak probabilities:\n";
    const auto probs = weak_probabilities(pre, post);
    for (std::size_t r = 0; r < probs.size(); ++r) {
        out << "  P_" << pre.labels()[r] << "W = ";
        if (std::abs(probs[r].imag()) < 1e-12) {
            out << fmt_signed(probs[r].real());
        } else {
            out << format_complex(probs[r]);
        }
        out << "\n";
    }
    out << "strong-measurement (ABL) probabilities:\n";
    for (std::size_t r = 0; r < pre.dimension(); ++r) {
        out << "  P_" << pre.labels()[r] << " = "
            << fmt_signed(abl_probability(pre, post, {pre.labels()[r]})) << "\n";
    }
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    return out;
}

void write_scan_csv(std::ostream& csv, const DataSeries& series) {
    csv << "k_sigma,mean_shift_sigma,inferred_p,success_prob,weak_regime\n";
    for (const auto& row : series) {
        csv << fmt(row.k) << ',' << fmt(row.mean_shift) << ','
            << (row.inferred ? fmt(*row.inferred) : std::string{}) << ','
            << fmt(row.success_probability) << ','
            << (row.weak_regime ? "true" : "false") << '\n';
    }
}

void write_two_pointer_csv(std::ostream& csv, const TwoPointerSeries& series) {
    csv << "k_b_sigma,mean_shift_sigma,inferred_p_b,inferred_p_c,success_prob\n";
    for (const auto& row : series) {
        csv << fmt(row.k_b) << ',' << fmt(row.mean_shift) << ','
            << (row.inferred_p_b ? fmt(*row.inferred_p_b) : std::string{}) << ','
            << fmt(row.inferred_p_c) << ',' << fmt(row.success_probability)
            << '\n';
    }
}

void write_profiles_csv(std::ostream& csv, const BeamProfiles& p) {
    csv << "x_pixels,i_rail_a,i_rail_b,i_rail_c,i_postselected\n";
    for (std::size_t i = 0; i < p.x_pixels.size(); ++i) {
        csv << fmt(p.x_pixels[i]) << ',' << fmt(p.rail_a[i]) << ','
            << fmt(p.rail_b[i]) << ',' << fmt(p.rail_c[i]) << ','
            << fmt(p.postselected[i]) << '\n';
    }
}

int run_weak_values(const RunConfig& cfg, std::ostream& out) {
    const auto [pre, post] = resolve_states(cfg);
    out << "scenario: weak-values\n";
    print_states(out, cfg, pre, post);
    print_weak_summary(out, pre, post);
    if (!cfg.output.empty()) {
        auto file = open_output(cfg.output);
        file << "scenario: weak-values\n";
        print_states(file, cfg, pre, post);
        print_weak_summary(file, pre, post);
    }
    return 0;
}

int run_scan(const RunConfig& cfg, std::ostream& out) {
    const auto [pre, post] = resolve_states(cfg);
    ScanSpec spec{cfg.rail, *cfg.k_min, *cfg.k_max, *cfg.steps,
                  VisibilityModel(cfg.visibility)};
    const DataSeries series = scan_single_rail(spec, pre, post);
    auto csv = open_output(cfg.output);
    write_scan_csv(csv, series);

    out << "scenario: scan\n";
    print_states(out, cfg, pre, post);
    print_weak_summary(out, pre, post);
    out << "rail: " << cfg.rail << "\n";
    out << "visibility: " << fmt_signed(cfg.visibility) << "\n";
    std::size_t weak_rows = 0;
    for (const auto& row : series) weak_rows += row.weak_regime ? 1 : 0;
    out << "rows: " << series.size() << "  K in [" << fmt_signed(*cfg.k_min)
        << ", " << fmt_signed(*cfg.k_max) << "] sigma\n";
    out << "weak regime (|K| < 0.5 sigma): " << weak_rows << " rows\n";
    out << "wrote: " << cfg.output << "\n";
    return 0;
}

int run_fig2(const RunConfig& cfg, std::ostream& out) {
    const auto profiles =
        beam_profiles(cfg.k_c, PixelScale{cfg.pixel_scale}, cfg.points,
                      VisibilityModel(cfg.visibility));
    auto csv = open_output(cfg.output);
    write_profiles_csv(csv, profiles);

    const auto [pre, post] = preset_states("generalized");
    const auto ps = evolve_and_postselect(pre, post, {{"C", cfg.k_c}},
                                          std::nullopt, GaussianPointer{});
    const PointerMoments m =
        shifted_moments(ps, VisibilityModel(cfg.visibility));
    out << "scenario: fig2\n";
    print_states(out, cfg, pre, post);
    out << "K_C = " << fmt_signed(cfg.k_c) << " sigma = "
        << fmt_signed(cfg.k_c * cfg.pixel_scale) << " px\n";
    out << "visibility: " << fmt_signed(cfg.visibility) << "\n";
    out << "post-selected mean shift = " << fmt_signed(m.mean_shift)
        << " sigma = " << fmt_signed(m.mean_shift * cfg.pixel_scale) << " px\n";
    if (cfg.k_c != 0.0) {
        out << "inferred P_C = " << fmt_signed(m.mean_shift / cfg.k_c) << "\n";
    }
    out << "wrote: " << cfg.output << "\n";
    return 0;
}

int run_two_pointer(const RunConfig& cfg, std::ostream& out) {
    const auto [pre, post] = resolve_states(cfg);
    const double theta = *cfg.theta_deg * M_PI / 180.0;
    ScanSpec spec{cfg.rail, *cfg.k_min, *cfg.k_max, *cfg.steps,
                  VisibilityModel(cfg.visibility)};
    const PolarizerSetting pol = cfg.polarizer == "none"
                                     ? PolarizerSetting::None
                                     : (cfg.polarizer == "block-v"
                                            ? PolarizerSetting::BlockV
                                            : PolarizerSetting::BlockH);
    const TwoPointerSeries series =
        two_pointer_scan(spec, theta, "C", pol, pre, post);
    auto csv = open_output(cfg.output);
    write_two_pointer_csv(csv, series);

    out << "scenario: two-pointer\n";
    print_states(out, cfg, pre, post);
    print_weak_summary(out, pre, post);
    out << "displaced rail: " << cfg.rail << ", rotated rail: C, theta = "
        << fmt_signed(*cfg.theta_deg) << " deg\n";
    out << "polarizer: " << cfg.polarizer << "\n";
    out << "rows: " << series.size() << "  K_B in [" << fmt_signed(*cfg.k_min)
        << ", " << fmt_signed(*cfg.k_max) << "] sigma\n";
    out << "wrote: " << cfg.output << "\n";
    return 0;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.scenario == "weak-values") return run_weak_values(cfg, out);
        if (cfg.scenario == "scan") return run_scan(cfg, out);
        if (cfg.scenario == "fig2") return run_fig2(cfg, out);
        if (cfg.scenario == "two-pointer") return run_two_pointer(cfg, out);
        err << "usage error: unknown scenario '" << cfg.scenario << "'\n";
        return 2;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
    try {
        return run(parse_config(args), out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        err << "usage: threebox <weak-values|scan|fig2|two-pointer> [--flag value ...]\n";
        return 2;
    }
}

}  // namespace threebox::cli
