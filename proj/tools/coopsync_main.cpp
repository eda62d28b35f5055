// coopsync: scenario-driven frequency-synchronization simulator for a
// three-node cooperative relay system. Subcommands compute Cramer-Rao
// bound sweeps, run Monte Carlo estimator comparisons, search binary
// relay training sequences, and optimize the relay adjustment gain.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "coopsync/coopsync.hpp"

namespace {

using namespace coopsync;

struct CommonArgs {
    std::string scenario_path;
    std::string out_path;
    std::vector<std::string> overrides;  // "key = value" lines
    bool verbose = false;
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--scenario", args.scenario_path, "Scenario file (defaults apply if omitted)");
    cmd->add_option("--out", args.out_path, "Output CSV path (stdout if omitted)");
    cmd->add_flag("-v,--verbose", args.verbose, "Progress notes on stderr");

    const auto add_override = [cmd, &args](const std::string& flag, const std::string& key,
                                           const std::string& help) {
        cmd->add_option_function<std::string>(
            flag, [&args, key](const std::string& v) { args.overrides.push_back(key + " = " + v); },
            help);
    };
    add_override("--seed", "seed", "Override the scenario seed");
    add_override("--trials", "trials", "Monte Carlo trials per sweep point");
    add_override("--n", "n", "Preamble length for both phases");
    add_override("--n-listen", "n_listen", "Listening preamble length");
    add_override("--n-coop", "n_coop", "Cooperation preamble length");
    add_override("--snr-sd-db", "snr_sd_db", "Source-destination SNR in dB (or lo:hi:step)");
    add_override("--snr-rd-db", "snr_rd_db", "Relay-destination SNR in dB, or 'tied'");
    add_override("--snr-sr-db", "snr_sr_db", "Source-relay SNR in dB, or 'tied'");
    add_override("--snr-sr-offset-db", "snr_sr_offset_db", "Offset of tied source-relay SNR");
    add_override("--sigma-f-sq", "sigma_f_sq", "Oscillator variance (cycles^2), or 'inf'");
    add_override("--gamma", "gamma", "Relay gain: number, 'optimal', or 'zero'");
    add_override("--estimators", "estimators", "Comma list: map2d,ml1d,corr,corr-nonadaptive");
    add_override("--phase", "phase", "'listening' or 'cooperation'");
    add_override("--bound-variant", "bound_variant", "worstcase | optimal | listening");
    add_override("--search-iterations", "search_iterations", "Randomized sequence search size");
    cmd->add_option_function<std::string>(
        "--sweep",
        [&args](const std::string& v) {
            const std::size_t eq = v.find('=');
            if (eq == std::string::npos)
                throw CLI::ValidationError("--sweep expects KEY=START:STOP:STEP");
            args.overrides.push_back(v.substr(0, eq) + " = " + v.substr(eq + 1));
        },
        "Sweep axis, KEY=START:STOP:STEP (or KEY=v1,v2,... / lo:hi:logN)");
}

Scenario load_scenario(const CommonArgs& args) {
    Scenario sc;
    if (!args.scenario_path.empty()) {
        std::ifstream in(args.scenario_path);
        if (!in) throw InvalidParameter("cannot open scenario file: " + args.scenario_path);
        std::stringstream buf;
        buf << in.rdbuf();
        apply_scenario_text(sc, buf.str());
    }
    for (const auto& line : args.overrides) apply_scenario_text(sc, line);
    sc.validate();
    return sc;
}

class OutputStream {
  public:
    explicit OutputStream(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw InvalidParameter("cannot write output file: " + path);
        }
    }
    std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

int run_crb_sweep(const CommonArgs& args) {
    const Scenario sc = load_scenario(args);
    const MseCurve curve = crb_sweep(sc);
    OutputStream out(args.out_path);
    write_csv_preamble(out.get(), scenario_hash(sc), sc.seed);
    emit_csv(out.get(), {curve});
    return 0;
}

int run_simulate(const CommonArgs& args) {
    const Scenario sc = load_scenario(args);
    if (args.verbose)
        std::cerr << "simulate: " << sc.sweep_values.size() << " sweep points, " << sc.trials
                  << " trials each\n";
    const std::vector<MseCurve> curves = sc.phase == Scenario::Phase::Listening
                                             ? run_listening(sc)
                                             : run_cooperation(sc);
    OutputStream out(args.out_path);
    write_csv_preamble(out.get(), scenario_hash(sc), sc.seed);
    emit_csv(out.get(), curves);
    return 0;
}

int run_seq_search(const CommonArgs& args) {
    const Scenario sc = load_scenario(args);
    SequenceCriterion ctx;
    ctx.snr_sd_db = sc.snr_sd_db;
    ctx.snr_rd_db = sc.snr_rd_db.value_or(sc.snr_sd_db);
    ctx.snr_sr_db = sc.snr_sr_db.value_or(sc.snr_sd_db + sc.snr_sr_offset_db);
    ctx.sigma_f_sq = std::isfinite(sc.sigma_f_sq) ? sc.sigma_f_sq : 1e-4;
    ctx.gamma = sc.gamma_optimal ? 1.0 : sc.gamma_value;

    OutputStream out(args.out_path);
    write_csv_preamble(out.get(), scenario_hash(sc), sc.seed);
    out.get() << "n,method,criterion,sylvester_criterion,sequence\n";
    const std::vector<double> lengths =
        sc.sweep_key == "n" ? sc.sweep_values : std::vector<double>{double(sc.n_coop)};
    for (double n_value : lengths) {
        const int n = static_cast<int>(n_value);
        BinarySequence best;
        std::string method;
        if (n <= 16) {
            best = exhaustive_search(n, ctx);
            method = "exhaustive";
        } else {
            Rng rng(sc.seed);
            best = randomized_search(n, sc.search_iterations, ctx, rng);
            method = "randomized";
        }
        double syl_crit = std::numeric_limits<double>::quiet_NaN();
        if (n >= 4 && (n & (n - 1)) == 0) syl_crit = ctx.evaluate(sylvester_sequence(n));
        char crit_buf[40], syl_buf[40];
        std::snprintf(crit_buf, sizeof(crit_buf), "%.17e", ctx.evaluate(best));
        std::snprintf(syl_buf, sizeof(syl_buf), "%.17e", syl_crit);
        out.get() << n << "," << method << "," << crit_buf << "," << syl_buf << ","
                  << best.to_string() << "\n";
        if (args.verbose) std::cerr << "seq-search: n=" << n << " done\n";
    }
    return 0;
}

int run_gamma_opt(const CommonArgs& args) {
    const Scenario sc = load_scenario(args);
    OutputStream out(args.out_path);
    write_csv_preamble(out.get(), scenario_hash(sc), sc.seed);
    out.get() << "sweep_param,sweep_value,gamma_opt,trace_crb_opt,trace_crb_gamma1,penalty_db\n";
    for (double sweep_value : sc.sweep_values) {
        Scenario point = sc;
        point.gamma_optimal = true;
        const detail::PointConfig cfg = detail::resolve_point(point, sweep_value);
        const auto trace_at = [&](double gamma) {
            Eigen::Matrix2d info = freq_covariance(cfg.q, cfg.k, gamma, cfg.sigma_f_sq).prior_info();
            const double eta_l = 2.0 / 3.0 * std::numbers::pi * std::numbers::pi * cfg.n_listen *
                                 (double(cfg.n_listen) * cfg.n_listen - 1.0);
            const double eta_c = 2.0 / 3.0 * std::numbers::pi * std::numbers::pi * cfg.n_coop *
                                 (double(cfg.n_coop) * cfg.n_coop - 1.0);
            info(0, 0) += eta_c * cfg.s_sd + eta_l * cfg.s_sd;
            info(1, 1) += eta_c * cfg.s_rd;
            return symmetric_inverse(info).trace();
        };
        const double trace_opt = trace_at(cfg.gamma);
        const double trace_one = trace_at(1.0);
        char bufs[4][40];
        std::snprintf(bufs[0], 40, "%.17e", sweep_value);
        std::snprintf(bufs[1], 40, "%.17e", cfg.gamma);
        std::snprintf(bufs[2], 40, "%.17e", trace_opt);
        std::snprintf(bufs[3], 40, "%.17e", trace_one);
        char pen_buf[40];
        std::snprintf(pen_buf, 40, "%.17e", 10.0 * std::log10(trace_one / trace_opt));
        out.get() << sc.sweep_key << "," << bufs[0] << "," << bufs[1] << "," << bufs[2] << ","
                  << bufs[3] << "," << pen_buf << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frequency synchronization bounds and estimators for a three-node "
                 "cooperative relay system"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("coopsync ") + coopsync::kVersion);

    CommonArgs crb_args, sim_args, seq_args, gamma_args;
    CLI::App* crb = app.add_subcommand("crb-sweep", "Evaluate bound curves along a sweep axis");
    add_common_options(crb, crb_args);
    CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo estimator MSE curves");
    add_common_options(sim, sim_args);
    CLI::App* seq = app.add_subcommand("seq-search", "Binary relay training sequence search");
    add_common_options(seq, seq_args);
    CLI::App* gam = app.add_subcommand("gamma-opt", "Optimal relay gain along a sweep axis");
    add_common_options(gam, gamma_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (crb->parsed()) return run_crb_sweep(crb_args);
        if (sim->parsed()) return run_simulate(sim_args);
        if (seq->parsed()) return run_seq_search(seq_args);
        if (gam->parsed()) return run_gamma_opt(gamma_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
