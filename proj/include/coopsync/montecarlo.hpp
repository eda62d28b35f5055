#ifndef COOPSYNC_MONTECARLO_HPP
#define COOPSYNC_MONTECARLO_HPP

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "coopsync/estimators.hpp"
#include "coopsync/fisher.hpp"
#include "coopsync/model.hpp"
#include "coopsync/relay_policy.hpp"
#include "coopsync/sequences.hpp"
#include "coopsync/types.hpp"

namespace coopsync {

/**
 * Simulation configuration. One numeric axis is swept (sweep_key over
 * sweep_values); every other field is a scalar. SNRs are per-link
 * receive SNRs |h|^2/sigma^2 in dB with the noise variance normalized
 * to one. Unset relay-side SNRs follow the source-destination link:
 * S_rd = S_sd and S_sr = S_sd + snr_sr_offset_db.
 */
struct Scenario {
    enum class Phase { Listening, Cooperation };

    Phase phase = Phase::Cooperation;
    int n_listen = 16;
    int n_coop = 16;
    double snr_sd_db = 0.0;
    std::optional<double> snr_rd_db;           // absent = tied to snr_sd_db
    std::optional<double> snr_sr_db;           // absent = snr_sd_db + offset
    double snr_sr_offset_db = 10.0;
    double sigma_f_sq = 1e-4;                  // +inf = no prior (bounds only)
    bool gamma_optimal = false;
    double gamma_value = 1.0;
    std::vector<std::string> estimators = {"map2d", "ml1d", "corr"};
    long trials = 2000;
    std::uint64_t seed = 1;
    std::string bound_variant = "worstcase";   // worstcase | optimal | listening
    long search_iterations = 10000;
    std::string sweep_key = "snr_sd_db";
    std::vector<double> sweep_values = {-20, -15, -10, -5, 0, 5, 10, 15, 20, 25, 30};

    bool operator==(const Scenario&) const = default;

    void validate() const {
        if (trials < 1) throw InvalidParameter("scenario: trials must be >= 1");
        if (n_listen < 2 || n_coop < 2) throw InvalidParameter("scenario: N must be >= 2");
        if (sweep_values.empty()) throw InvalidParameter("scenario: sweep must be nonempty");
        if (std::isnan(sigma_f_sq) || sigma_f_sq <= 0.0)
            throw InvalidParameter("scenario: sigma_f_sq must be positive (or inf)");
        if (search_iterations < 0)
            throw InvalidParameter("scenario: search_iterations must be >= 0");
        static const std::vector<std::string> known_est = {"map2d", "ml1d", "corr",
                                                           "corr-nonadaptive"};
        for (const auto& e : estimators)
            if (std::find(known_est.begin(), known_est.end(), e) == known_est.end())
                throw InvalidParameter("scenario: unknown estimator '" + e + "'");
        static const std::vector<std::string> known_sweep = {"snr_sd_db", "sigma_f_sq", "n",
                                                             "gamma"};
        if (std::find(known_sweep.begin(), known_sweep.end(), sweep_key) == known_sweep.end())
            throw InvalidParameter("scenario: unknown sweep key '" + sweep_key + "'");
        static const std::vector<std::string> known_bound = {"worstcase", "optimal", "listening"};
        if (std::find(known_bound.begin(), known_bound.end(), bound_variant) == known_bound.end())
            throw InvalidParameter("scenario: unknown bound_variant '" + bound_variant + "'");
    }
};

struct MsePoint {
    double sweep_value = 0.0;
    double mse_fsd = 0.0;
    double mse_frd = 0.0;
    double bias_fsd = 0.0;
    double bias_frd = 0.0;
    double crb_fsd = 0.0;
    double crb_frd = 0.0;
    long trials = 0;
    long failures = 0;

    double mse_total() const { return mse_fsd + mse_frd; }
    double crb_total() const { return crb_fsd + crb_frd; }

    bool operator==(const MsePoint&) const = default;
};

struct MseCurve {
    std::string estimator;
    std::string sweep_key;
    std::vector<MsePoint> points;

    bool operator==(const MseCurve&) const = default;
};

namespace detail {

/// Scalar configuration of one sweep point.
struct PointConfig {
    int n_listen = 16;
    int n_coop = 16;
    double s_sd = 1.0;       // linear per-phase SNRs
    double s_rd = 1.0;
    double s_sr = 1.0;
    double sigma_f_sq = 1e-4;
    double gamma = 1.0;
    double q = 0.0;
    double k = 0.0;
};

inline PointConfig resolve_point(const Scenario& sc, double sweep_value) {
    PointConfig cfg;
    cfg.n_listen = sc.n_listen;
    cfg.n_coop = sc.n_coop;
    double sd_db = sc.snr_sd_db;
    double sigma_f_sq = sc.sigma_f_sq;
    double gamma = sc.gamma_value;
    bool gamma_optimal = sc.gamma_optimal;
    if (sc.sweep_key == "snr_sd_db") {
        sd_db = sweep_value;
    } else if (sc.sweep_key == "sigma_f_sq") {
        sigma_f_sq = sweep_value;
    } else if (sc.sweep_key == "n") {
        cfg.n_listen = cfg.n_coop = static_cast<int>(sweep_value);
    } else if (sc.sweep_key == "gamma") {
        gamma = sweep_value;
        gamma_optimal = false;
    }
    cfg.s_sd = db_to_linear(sd_db);
    cfg.s_rd = db_to_linear(sc.snr_rd_db.value_or(sd_db));
    cfg.s_sr = db_to_linear(sc.snr_sr_db.value_or(sd_db + sc.snr_sr_offset_db));
    cfg.sigma_f_sq = sigma_f_sq;

    cfg.q = compute_q(TrainingSequence::all_ones(cfg.n_listen), ChannelResponse::flat(std::sqrt(cfg.s_sr)));
    cfg.k = std::isfinite(sigma_f_sq) ? compute_k(1.0, sigma_f_sq) : 0.0;
    if (gamma_optimal) {
        const double eta_l = 2.0 / 3.0 * std::numbers::pi * std::numbers::pi * cfg.n_listen *
                             (static_cast<double>(cfg.n_listen) * cfg.n_listen - 1.0);
        const double eta_c = 2.0 / 3.0 * std::numbers::pi * std::numbers::pi * cfg.n_coop *
                             (static_cast<double>(cfg.n_coop) * cfg.n_coop - 1.0);
        const Eigen::Vector2d delta_opt(eta_c * cfg.s_sd + eta_l * cfg.s_sd, eta_c * cfg.s_rd);
        cfg.gamma = optimize_gamma(cfg.q, cfg.k, sigma_f_sq, delta_opt);
    } else {
        cfg.gamma = gamma;
    }
    return cfg;
}

inline FreqCovariance point_freq_cov(const PointConfig& cfg) {
    if (std::isfinite(cfg.sigma_f_sq))
        return freq_covariance(cfg.q, cfg.k, cfg.gamma, cfg.sigma_f_sq);
    return freq_covariance_no_prior(cfg.q, 1.0, cfg.gamma);
}

/// Relay training sequence used by the shipped scenarios.
inline TrainingSequence point_relay_sequence(int n_coop) {
    if (n_coop >= 4 && (n_coop & (n_coop - 1)) == 0)
        return sylvester_sequence(n_coop).to_training();
    throw InvalidParameter("cooperation scenarios need n_coop a power of two >= 4 "
                           "(relay sequence is the Sylvester construction)");
}

/// Worst-case and optimal cooperation bounds for one sweep point,
/// evaluated with the channel magnitudes (the worst-case form is
/// phase-free by construction).
inline CrbReport point_bound(const PointConfig& cfg, const std::string& variant) {
    const TrainingSequence x_ell = TrainingSequence::all_ones(cfg.n_listen);
    if (variant == "listening") {
        return crb_listening(x_ell, ChannelResponse::flat(std::sqrt(cfg.s_sr)), 1.0,
                             cfg.sigma_f_sq);
    }
    const TrainingSequence x_sd = TrainingSequence::all_ones(cfg.n_coop);
    const TrainingSequence x_rd = point_relay_sequence(cfg.n_coop);
    const FreqCovariance rf = point_freq_cov(cfg);
    const Eigen::Matrix2d prior = rf.prior_info();
    const CVector m = std::isfinite(cfg.sigma_f_sq) ? char_fn_diag(rf.matrix, cfg.n_coop)
                                                    : char_fn_diag_no_prior(cfg.n_coop);
    const FimBlocks blocks = fim_cooperation(
        x_sd, x_rd, x_ell, ChannelResponse::flat(std::sqrt(cfg.s_sd)),
        ChannelResponse::flat(std::sqrt(cfg.s_rd)), ChannelResponse::flat(std::sqrt(cfg.s_sd)),
        1.0, 1.0, m, prior);
    if (variant == "optimal") {
        Eigen::Vector2d delta_diag = blocks.delta_diag;
        return crb_optimal(delta_diag, prior);
    }
    return crb_worstcase(blocks);
}

inline unsigned worker_count(long trials) {
    unsigned threads = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("COOPSYNC_THREADS")) {
        const long parsed = std::strtol(env, nullptr, 10);
        if (parsed > 0) threads = static_cast<unsigned>(parsed);
    }
    if (threads == 0) threads = 1;
    return static_cast<unsigned>(std::min<long>(threads, trials));
}

/// Deterministic reduction: compact the successful trials in index order,
/// then pairwise-sum.
struct ErrorAccumulator {
    std::vector<double> e_fsd, e_frd;
    long failures = 0;

    MsePoint reduce(double sweep_value) const {
        MsePoint pt;
        pt.sweep_value = sweep_value;
        pt.trials = static_cast<long>(e_fsd.size());
        pt.failures = failures;
        if (e_fsd.empty()) return pt;
        std::vector<double> sq(e_fsd.size());
        const auto mean_of = [&sq](const std::vector<double>& v, bool square) {
            for (std::size_t i = 0; i < v.size(); ++i) sq[i] = square ? v[i] * v[i] : v[i];
            return pairwise_sum(sq.data(), sq.size()) / static_cast<double>(sq.size());
        };
        pt.mse_fsd = mean_of(e_fsd, true);
        pt.mse_frd = mean_of(e_frd, true);
        pt.bias_fsd = mean_of(e_fsd, false);
        pt.bias_frd = mean_of(e_frd, false);
        return pt;
    }
};

template <typename TrialFn>
void parallel_trials(long trials, TrialFn&& fn) {
    const unsigned workers = worker_count(trials);
    if (workers <= 1) {
        for (long t = 0; t < trials; ++t) fn(t);
        return;
    }
    std::vector<std::thread> pool;
    const long chunk = (trials + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const long lo = static_cast<long>(w) * chunk;
        const long hi = std::min(trials, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (long t = lo; t < hi; ++t) fn(t);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace detail

/**
 * Listening-phase Monte Carlo on the source-relay link: per trial draw the
 * node offsets and a uniform channel phase, synthesize the preamble at the
 * configured S_sr, and run the MAP and correlation estimators against the
 * true f_sr. Returns one curve per estimator ("map", "corr") with the
 * listening bound attached.
 */
inline std::vector<MseCurve> run_listening(const Scenario& scenario) {
    scenario.validate();
    if (!std::isfinite(scenario.sigma_f_sq))
        throw InvalidParameter("run_listening: simulation needs a finite prior to draw offsets");

    std::vector<MseCurve> curves(2);
    curves[0].estimator = "map";
    curves[1].estimator = "corr";
    for (auto& c : curves) c.sweep_key = scenario.sweep_key;

    for (std::size_t pi = 0; pi < scenario.sweep_values.size(); ++pi) {
        const double sweep_value = scenario.sweep_values[pi];
        const detail::PointConfig cfg = detail::resolve_point(scenario, sweep_value);
        const TrainingSequence x_ell = TrainingSequence::all_ones(cfg.n_listen);
        const OffsetPrior prior(cfg.sigma_f_sq);
        const GridSpec grid = GridSpec::defaults(cfg.n_listen, cfg.sigma_f_sq);
        const int lag = max_lag_rule(cfg.n_listen, cfg.sigma_f_sq);
        const double amp = std::sqrt(cfg.s_sr);
        const CrbReport bound = detail::point_bound(cfg, "listening");

        struct Record {
            double e_map = 0.0, e_corr = 0.0;
            bool ok_map = false, ok_corr = false;
        };
        std::vector<Record> records(static_cast<std::size_t>(scenario.trials));
        detail::parallel_trials(scenario.trials, [&](long t) {
            Rng rng = Rng::for_stream(scenario.seed,
                                      (static_cast<std::uint64_t>(pi) << 32) |
                                          static_cast<std::uint64_t>(t));
            const NodeOffsets q = draw_offsets(prior, rng);
            const double f_true = q.f_sr();
            const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const ChannelResponse h = ChannelResponse::flat(amp * cdouble(std::cos(phi), std::sin(phi)));
            const CVector y = synth_listening(x_ell, h, NormalizedFrequency(f_true), 1.0, rng);
            Record& rec = records[static_cast<std::size_t>(t)];
            try {
                rec.e_map = map_listening(y, x_ell, 1.0, cfg.sigma_f_sq, grid).f_hat - f_true;
                rec.ok_map = true;
            } catch (const std::exception&) {
            }
            try {
                rec.e_corr = corr_estimate(y, x_ell, cfg.sigma_f_sq, lag).f_hat - f_true;
                rec.ok_corr = true;
            } catch (const std::exception&) {
            }
        });

        detail::ErrorAccumulator acc_map, acc_corr;
        for (const Record& rec : records) {
            if (rec.ok_map) {
                acc_map.e_fsd.push_back(rec.e_map);
                acc_map.e_frd.push_back(0.0);
            } else {
                ++acc_map.failures;
            }
            if (rec.ok_corr) {
                acc_corr.e_fsd.push_back(rec.e_corr);
                acc_corr.e_frd.push_back(0.0);
            } else {
                ++acc_corr.failures;
            }
        }
        MsePoint pt_map = acc_map.reduce(sweep_value);
        MsePoint pt_corr = acc_corr.reduce(sweep_value);
        pt_map.crb_fsd = pt_corr.crb_fsd = bound.crb_fsd;
        curves[0].points.push_back(pt_map);
        curves[1].points.push_back(pt_corr);
    }
    return curves;
}

/**
 * Full two-phase Monte Carlo. Per trial: draw node offsets and channel
 * phases, synthesize the relay's listening observation, run the relay MAP
 * estimator, apply the gamma rule to fix the true f_rd, synthesize the
 * destination's two observations, and run every configured destination
 * estimator on identical data. Estimator failures drop the trial from
 * that estimator's average and are counted.
 */
inline std::vector<MseCurve> run_cooperation(const Scenario& scenario) {
    scenario.validate();
    if (!std::isfinite(scenario.sigma_f_sq))
        throw InvalidParameter("run_cooperation: simulation needs a finite prior to draw offsets");
    if (scenario.estimators.empty())
        throw InvalidParameter("run_cooperation: no estimators configured");

    const std::size_t n_est = scenario.estimators.size();
    std::vector<MseCurve> curves(n_est);
    for (std::size_t e = 0; e < n_est; ++e) {
        curves[e].estimator = scenario.estimators[e];
        curves[e].sweep_key = scenario.sweep_key;
    }

    for (std::size_t pi = 0; pi < scenario.sweep_values.size(); ++pi) {
        const double sweep_value = scenario.sweep_values[pi];
        const detail::PointConfig cfg = detail::resolve_point(scenario, sweep_value);
        const TrainingSequence x_ell = TrainingSequence::all_ones(cfg.n_listen);
        const TrainingSequence x_sd = TrainingSequence::all_ones(cfg.n_coop);
        const TrainingSequence x_rd = detail::point_relay_sequence(cfg.n_coop);
        const OffsetPrior prior(cfg.sigma_f_sq);
        const GridSpec grid_c = GridSpec::defaults(cfg.n_coop, cfg.sigma_f_sq);
        const int lag = max_lag_rule(std::min(cfg.n_listen, cfg.n_coop), cfg.sigma_f_sq);
        const int lag_relay = max_lag_rule(cfg.n_listen, cfg.sigma_f_sq);
        const FreqCovariance rf = detail::point_freq_cov(cfg);
        const CrbReport bound = detail::point_bound(cfg, scenario.bound_variant);

        struct Record {
            double e_sd = 0.0, e_rd = 0.0;
            bool ok = false;
        };
        std::vector<std::vector<Record>> records(
            n_est, std::vector<Record>(static_cast<std::size_t>(scenario.trials)));

        detail::parallel_trials(scenario.trials, [&](long t) {
            Rng rng = Rng::for_stream(scenario.seed,
                                      (static_cast<std::uint64_t>(pi) << 32) |
                                          static_cast<std::uint64_t>(t));
            const NodeOffsets q = draw_offsets(prior, rng);
            // channel phases in a fixed order: sr, sd_l, sd_c, rd
            double phi[4];
            for (double& p : phi) p = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const auto flat = [](double snr, double phase) {
                return ChannelResponse::flat(std::sqrt(snr) *
                                             cdouble(std::cos(phase), std::sin(phase)));
            };
            const ChannelResponse h_sr = flat(cfg.s_sr, phi[0]);
            const ChannelResponse h_sdl = flat(cfg.s_sd, phi[1]);
            const ChannelResponse h_sdc = flat(cfg.s_sd, phi[2]);
            const ChannelResponse h_rd = flat(cfg.s_rd, phi[3]);

            const double f_sd = q.f_sd();
            const double f_sr = q.f_sr();
            const CVector y_sr = synth_listening(x_ell, h_sr, NormalizedFrequency(f_sr), 1.0, rng);
            const CVector y_sdl =
                synth_listening(x_ell, h_sdl, NormalizedFrequency(f_sd), 1.0, rng);

            // the relay runs the correlation estimator with prior
            // shrinkage, which is asymptotically efficient and collapses
            // to the prior mean when the listening link is too weak
            ListeningSummary relay;
            relay.q_power = cfg.q;
            relay.k_penalty = cfg.k;
            relay.f_sr_hat = corr_estimate(y_sr, x_ell, cfg.sigma_f_sq, lag_relay).f_hat;

            // relay transmit deviation q_r - gamma * f_sr_hat; the
            // destination sees f_rd = q_d - (that deviation)
            const double f_tx =
                relay_transmit_frequency(NormalizedFrequency(q.q_r),
                                         NormalizedFrequency(relay.f_sr_hat), cfg.gamma)
                    .value();
            const double f_rd = q.q_d - f_tx;
            const CVector y_c =
                synth_cooperation(x_sd, x_rd, h_sdc, h_rd, NormalizedFrequency(f_sd),
                                  NormalizedFrequency(f_rd), 1.0, rng);

            for (std::size_t e = 0; e < n_est; ++e) {
                Record& rec = records[e][static_cast<std::size_t>(t)];
                try {
                    EstimatePairResult est;
                    const std::string& name = scenario.estimators[e];
                    if (name == "map2d") {
                        est = map_cooperation(y_c, y_sdl, x_sd, x_rd, x_ell, 1.0, rf, grid_c);
                    } else if (name == "ml1d") {
                        est = ml1d_cooperation(y_c, y_sdl, x_sd, x_rd, x_ell, 1.0, rf, grid_c);
                    } else if (name == "corr") {
                        est = corr_cooperation_twostep(y_c, y_sdl, x_sd, x_rd, x_ell, 1.0, rf,
                                                       cfg.sigma_f_sq, lag);
                    } else {
                        est = corr_cooperation_onestep(y_c, y_sdl, x_sd, x_rd, x_ell, 1.0, rf,
                                                       cfg.sigma_f_sq, lag);
                    }
                    rec.e_sd = est.f_sd_hat - f_sd;
                    rec.e_rd = est.f_rd_hat - f_rd;
                    rec.ok = true;
                } catch (const std::exception&) {
                }
            }
        });

        for (std::size_t e = 0; e < n_est; ++e) {
            detail::ErrorAccumulator acc;
            for (const Record& rec : records[e]) {
                if (rec.ok) {
                    acc.e_fsd.push_back(rec.e_sd);
                    acc.e_frd.push_back(rec.e_rd);
                } else {
                    ++acc.failures;
                }
            }
            MsePoint pt = acc.reduce(sweep_value);
            pt.crb_fsd = bound.crb_fsd;
            pt.crb_frd = bound.crb_frd.value_or(0.0);
            curves[e].points.push_back(pt);
        }
    }

    // both reference bounds ride along as zero-trial curves
    for (const char* variant : {"worstcase", "optimal"}) {
        MseCurve ref;
        ref.estimator = std::string("bound-") + variant;
        ref.sweep_key = scenario.sweep_key;
        for (double sweep_value : scenario.sweep_values) {
            const detail::PointConfig cfg = detail::resolve_point(scenario, sweep_value);
            const CrbReport bound = detail::point_bound(cfg, variant);
            MsePoint pt;
            pt.sweep_value = sweep_value;
            pt.crb_fsd = bound.crb_fsd;
            pt.crb_frd = bound.crb_frd.value_or(0.0);
            ref.points.push_back(pt);
        }
        curves.push_back(std::move(ref));
    }
    return curves;
}

/// Deterministic bound evaluation along the sweep axis; no trials.
inline MseCurve crb_sweep(const Scenario& scenario) {
    scenario.validate();
    MseCurve curve;
    curve.estimator = "bound";
    curve.sweep_key = scenario.sweep_key;
    for (double sweep_value : scenario.sweep_values) {
        const detail::PointConfig cfg = detail::resolve_point(scenario, sweep_value);
        const CrbReport bound = detail::point_bound(cfg, scenario.bound_variant);
        MsePoint pt;
        pt.sweep_value = sweep_value;
        pt.crb_fsd = bound.crb_fsd;
        pt.crb_frd = bound.crb_frd.value_or(0.0);
        curve.points.push_back(pt);
    }
    return curve;
}

}  // namespace coopsync

#endif  // COOPSYNC_MONTECARLO_HPP
