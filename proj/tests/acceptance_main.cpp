// Acceptance suite: runs every release criterion end to end at its stated
// tolerance and prints one PASS/FAIL line per criterion. Exit status is
// nonzero if any criterion fails.

#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "coopsync/coopsync.hpp"

using namespace coopsync;

namespace {

struct Outcome {
    bool pass = true;
    std::string details;
};

double eta_of(int n) {
    return 2.0 / 3.0 * std::numbers::pi * std::numbers::pi * n * (static_cast<double>(n) * n - 1.0);
}

double to_db(double x) { return 10.0 * std::log10(x); }

// ---------------------------------------------------------------------
// 1. flat-fading closed form of the listening bound: 1/(eta S)
Outcome criterion_flat_fading_crb() {
    Outcome out;
    double worst_rel = 0.0;
    for (int n : {4, 8, 16, 64}) {
        for (double snr : {0.25, 1.0, 31.6227766016838}) {
            const double bound =
                crb_listening(TrainingSequence::all_ones(n), ChannelResponse::flat(std::sqrt(snr)),
                              1.0, kInfinity)
                    .crb_fsd;
            const double expect = 1.0 / (eta_of(n) * snr);
            worst_rel = std::max(worst_rel, std::abs(bound - expect) / expect);
        }
    }
    out.pass = worst_rel <= 1e-9;
    std::ostringstream os;
    os << "max rel err " << worst_rel;
    out.details = os.str();
    return out;
}

// ---------------------------------------------------------------------
// 2. limiting behavior of the optimal relay gain
Outcome criterion_gamma_limits() {
    const int n = 16;
    const double s_sd = 1.0, s_rd = 1.0, s_sr = 10.0;
    const Eigen::Vector2d delta(2.0 * eta_of(n) * s_sd, eta_of(n) * s_rd);
    const double max_term = std::max(delta[0], delta[1]);
    const double q = compute_q(TrainingSequence::all_ones(n), ChannelResponse::flat(std::sqrt(s_sr)));

    // prior 1e4 times weaker than every data term (variance far above the
    // 1/(eta S) crossover) -> pass the estimate straight through
    const double sf_weak = 1e4 * max_term;
    const double g_weak = optimize_gamma(q, compute_k(1.0, sf_weak), sf_weak, delta);
    // prior information 1e4 times stronger than every data term
    // (1/sigma_f^2 above eta S by 1e4) -> halve the adjustment
    const double sf_strong = 1.0 / (1e4 * max_term);
    const double g_strong = optimize_gamma(q, compute_k(1.0, sf_strong), sf_strong, delta);

    Outcome out;
    out.pass = g_weak >= 0.95 && g_weak <= 1.0 && g_strong >= 0.48 && g_strong <= 0.52;
    std::ostringstream os;
    os << "gamma(no-prior limit) = " << g_weak << ", gamma(strong-prior limit) = " << g_strong;
    out.details = os.str();
    return out;
}

// ---------------------------------------------------------------------
// 3. penalty for always choosing gamma = 1
Outcome criterion_gamma_one_penalty() {
    const int n = 16;
    const Eigen::Vector2d delta_base(2.0 * eta_of(n), eta_of(n));
    double worst_db = 0.0;
    for (double s_sr_db : {-10.0, 0.0, 10.0}) {
        const double q = compute_q(TrainingSequence::all_ones(n),
                                   ChannelResponse::flat(std::sqrt(db_to_linear(s_sr_db))));
        for (int i = 0; i <= 40; ++i) {
            const double sf = std::pow(10.0, -10.0 + 0.5 * i);  // 1e-10 .. 1e10
            const double k = compute_k(1.0, sf);
            const auto trace_at = [&](double gamma) {
                Eigen::Matrix2d info = freq_covariance(q, k, gamma, sf).prior_info();
                info(0, 0) += delta_base[0];
                info(1, 1) += delta_base[1];
                return info.inverse().trace();
            };
            const double g_star = optimize_gamma(q, k, sf, delta_base);
            worst_db = std::max(worst_db, to_db(trace_at(1.0) / trace_at(g_star)));
        }
    }
    Outcome out;
    out.pass = worst_db <= 0.3;
    std::ostringstream os;
    os << "max penalty " << worst_db << " dB over the sweep grid";
    out.details = os.str();
    return out;
}

// ---------------------------------------------------------------------
// 4. binary-sequence loss against the best constant-modulus bound
// Operating point: S_sd = S_rd = 20 dB, S_sr = 10 * S_sd, sigma_f^2 =
// 1e-4, where the short-sequence loss dominates the gap as described for
// the length sweep.
Outcome criterion_sequence_gap() {
    const double sf = 1e-4;
    const double s_sd = db_to_linear(20.0);
    const double s_rd = s_sd, s_sr = 10.0 * s_sd;
    Outcome out;
    std::ostringstream os;
    for (int n : {4, 8, 16, 32, 64, 128}) {
        const TrainingSequence ones = TrainingSequence::all_ones(n);
        const double q = compute_q(ones, ChannelResponse::flat(std::sqrt(s_sr)));
        const double k = compute_k(1.0, sf);
        const Eigen::Vector2d delta(2.0 * eta_of(n) * s_sd, eta_of(n) * s_rd);
        const double g_star = optimize_gamma(q, k, sf, delta);
        const CrbReport best = crb_optimal(delta, freq_covariance(q, k, g_star, sf).prior_info());
        const FreqCovariance rf1 = freq_covariance(q, k, 1.0, sf);
        const FimBlocks blocks = fim_cooperation(
            ones, sylvester_sequence(n).to_training(), ones,
            ChannelResponse::flat(std::sqrt(s_sd)), ChannelResponse::flat(std::sqrt(s_rd)),
            ChannelResponse::flat(std::sqrt(s_sd)), 1.0, 1.0, char_fn_diag(rf1.matrix, n),
            rf1.prior_info());
        const double gap_db = to_db(crb_worstcase(blocks).total() / best.total());
        os << "N=" << n << ": " << gap_db << " dB  ";
        if (n == 4) {
            if (gap_db < 0.45 || gap_db > 0.75) out.pass = false;
        } else if (gap_db > 0.35) {
            out.pass = false;
        }
    }
    out.details = os.str();
    return out;
}

// ---------------------------------------------------------------------
// 5. exhaustive search agrees with the construction
Outcome criterion_exhaustive_agreement() {
    SequenceCriterion ctx;  // 0 dB links, sigma_f^2 = 1e-4, gamma = 1
    Outcome out;
    std::ostringstream os;
    for (int n : {4, 8, 16}) {
        const double best = ctx.evaluate(exhaustive_search(n, ctx));
        const double syl = ctx.evaluate(sylvester_sequence(n));
        const double rel = std::abs(best - syl) / syl;
        os << "N=" << n << ": rel gap " << rel << "  ";
        if (rel > 1e-9) out.pass = false;
    }
    out.details = os.str();
    return out;
}

// ---------------------------------------------------------------------
// 6. estimator efficiency at high SNR (length-16 two-phase scenario)
Outcome criterion_estimator_efficiency() {
    Scenario sc;
    sc.estimators = {"map2d", "ml1d", "corr"};
    sc.sweep_values = {15.0, 20.0, 25.0, 30.0};
    sc.trials = 2000;
    sc.seed = 20070613;
    const auto curves = run_cooperation(sc);
    Outcome out;
    std::ostringstream os;
    for (const auto& curve : curves) {
        if (curve.points.empty() || curve.points[0].trials == 0) continue;  // bound curves
        double worst = 0.0;
        for (const auto& pt : curve.points) {
            const double gap = std::abs(to_db(pt.mse_total() / pt.crb_total()));
            worst = std::max(worst, gap);
        }
        os << curve.estimator << ": worst |gap| " << worst << " dB  ";
        if (worst > 1.5) out.pass = false;
    }
    out.details = os.str();
    return out;
}

// ---------------------------------------------------------------------
// 7. adaptive correlation gain over the non-adaptive baseline
Outcome criterion_adaptive_gain() {
    Scenario sc;
    sc.estimators = {"corr", "corr-nonadaptive"};
    sc.sweep_values = {0.0, 5.0, 10.0, 20.0, 30.0};
    sc.trials = 2000;
    sc.seed = 19950214;
    const auto curves = run_cooperation(sc);
    const auto& adaptive = curves[0].points;
    const auto& baseline = curves[1].points;
    Outcome out;
    std::ostringstream os;
    double min_gain = kInfinity;
    for (int i = 0; i < 3; ++i)  // S_sd in {0, 5, 10} dB
        min_gain = std::min(min_gain, to_db(baseline[i].mse_total() / adaptive[i].mse_total()));
    os << "min low-SNR gain " << min_gain << " dB";
    if (min_gain < 2.5) out.pass = false;

    // the baseline floors out while the adaptive version keeps falling
    const double base_slope = to_db(baseline[4].mse_total() / baseline[3].mse_total());
    const double adap_slope = to_db(adaptive[4].mse_total() / adaptive[3].mse_total());
    const double separation = to_db(baseline[4].mse_total() / adaptive[4].mse_total());
    os << "; slopes 20->30 dB: baseline " << base_slope << " dB, adaptive " << adap_slope
       << " dB; floor separation " << separation << " dB";
    if (base_slope < -3.0) out.pass = false;   // flat: drops < 3 dB per decade
    if (adap_slope > -6.0) out.pass = false;   // still descending
    if (separation < 6.0) out.pass = false;
    out.details = os.str();
    return out;
}

// ---------------------------------------------------------------------
// 8. prior-dominated MSE floor at -34 dB
// The floor claim belongs to the correlation algorithms of the two-signal
// scenario; the 1-D ML with combining reaches it as well. The joint MAP
// is reported for reference: a grid argmin estimator keeps a threshold
// excess at these SNRs and is outside the claim.
Outcome criterion_prior_floor() {
    Scenario sc;
    sc.estimators = {"ml1d", "corr", "corr-nonadaptive", "map2d"};
    sc.sweep_values = {-30.0, -25.0};
    sc.trials = 2000;
    sc.seed = 34;
    const auto curves = run_cooperation(sc);
    Outcome out;
    std::ostringstream os;
    for (const auto& curve : curves) {
        if (curve.points.empty() || curve.points[0].trials == 0) continue;  // bound curves
        double worst_dev = 0.0;
        for (const auto& pt : curve.points)
            worst_dev = std::max(worst_dev, std::abs(to_db(pt.mse_total()) + 34.0));
        if (curve.estimator == "map2d") {
            os << "[map2d informational: dev " << worst_dev << " dB]  ";
        } else {
            os << curve.estimator << ": dev " << worst_dev << " dB  ";
            if (worst_dev > 1.0) out.pass = false;
        }
    }
    out.details = os.str();
    return out;
}

// ---------------------------------------------------------------------
// 9. relay estimate: asymptotically unbiased with CRB-level variance
Outcome criterion_relay_estimate_moments() {
    const int n = 16;
    const double sf = 1e-4;
    const double snr = 100.0;  // 20 dB
    const TrainingSequence x = TrainingSequence::all_ones(n);
    const double q = compute_q(x, ChannelResponse::flat(std::sqrt(snr)));
    const double k = compute_k(1.0, sf);
    const double predicted_var = 2.0 * k * sf / (q + k);
    const GridSpec grid = GridSpec::defaults(n, sf);
    const OffsetPrior prior(sf);

    const long trials = 10000;
    double sum = 0.0, sum_sq = 0.0;
    for (long t = 0; t < trials; ++t) {
        Rng rng = Rng::for_stream(9, static_cast<std::uint64_t>(t));
        const NodeOffsets node = draw_offsets(prior, rng);
        const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const CVector y = synth_listening(x, ChannelResponse::flat(std::polar(std::sqrt(snr), phi)),
                                          NormalizedFrequency(node.f_sr()), 1.0, rng);
        const double e = map_listening(y, x, 1.0, sf, grid).f_hat - node.f_sr();
        sum += e;
        sum_sq += e * e;
    }
    const double mean = sum / trials;
    const double var = sum_sq / trials - mean * mean;
    const double se = std::sqrt(var / trials);
    Outcome out;
    out.pass = std::abs(mean) < 3.0 * se && std::abs(var - predicted_var) <= 0.10 * predicted_var;
    std::ostringstream os;
    os << "mean " << mean << " (se " << se << "), var " << var << " vs predicted "
       << predicted_var;
    out.details = os.str();
    return out;
}

// ---------------------------------------------------------------------
// 10. property bundle
Outcome criterion_property_bundle() {
    Outcome out;
    std::ostringstream os;

    // Lemma-2 ordering on random positive definite triples
    Rng rng(10);
    bool lemma_ok = true;
    for (int trial = 0; trial < 100 && lemma_ok; ++trial) {
        const auto hpd = [&rng]() {
            CMatrix m(4, 4);
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) m(r, c) = cdouble(rng.normal(), rng.normal());
            return CMatrix(m * m.adjoint() + 0.1 * CMatrix::Identity(4, 4));
        };
        const CMatrix a = hpd(), c = hpd();
        const CMatrix b = c + hpd();
        const CMatrix diff = (a + c).inverse() - (a + b).inverse();
        for (int i = 0; i < 4; ++i) lemma_ok = lemma_ok && diff(i, i).real() > 0.0;
    }
    os << (lemma_ok ? "lemma2 ok" : "lemma2 FAILED");
    out.pass = out.pass && lemma_ok;

    // characteristic function against quadrature
    {
        Eigen::Matrix2d cov;
        cov << 2e-4, 1e-4, 1e-4, 3e-4;
        const double v = 3e-4;
        const double sigma = std::sqrt(v);
        const int n = 8;
        const CVector m = char_fn_diag(cov, n);
        const RVector d = symmetric_index_diag(n);
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const double t = std::numbers::pi * d[i];
            const int intervals = 8000;
            const double lo = -10.0 * sigma, hi = 10.0 * sigma;
            const double h = (hi - lo) / intervals;
            const auto f = [&](double z) {
                return std::cos(t * z) * std::exp(-z * z / (2.0 * v)) /
                       (sigma * std::sqrt(2.0 * std::numbers::pi));
            };
            double acc = f(lo) + f(hi);
            for (int j = 1; j < intervals; ++j) acc += f(lo + j * h) * ((j % 2) ? 4.0 : 2.0);
            worst = std::max(worst, std::abs(m[i].real() - acc * h / 3.0));
        }
        os << ", charfn err " << worst;
        out.pass = out.pass && worst <= 1e-6;
    }

    // Toeplitz multiply equals direct convolution
    {
        bool conv_ok = true;
        Rng crng(11);
        for (int trial = 0; trial < 100 && conv_ok; ++trial) {
            const int n = 4 + static_cast<int>(crng.uniform() * 12);
            const int p = 1 + static_cast<int>(crng.uniform() * std::min(n - 1, 4));
            CVector xs(n);
            for (int i = 0; i < n; ++i) {
                const double phi = crng.uniform(0.0, 2.0 * std::numbers::pi);
                xs[i] = cdouble(std::cos(phi), std::sin(phi));
            }
            CVector h(p);
            for (int i = 0; i < p; ++i) h[i] = cdouble(crng.normal(), crng.normal());
            const CVector via = toeplitz_matrix(TrainingSequence(xs), p) * h;
            CVector direct = CVector::Zero(n);
            for (int i = 0; i < n; ++i)
                for (int kk = 0; kk <= i && kk < p; ++kk) direct[i] += h[kk] * xs[i - kk];
            conv_ok = (via - direct).norm() < 1e-12;
        }
        os << (conv_ok ? ", toeplitz ok" : ", toeplitz FAILED");
        out.pass = out.pass && conv_ok;
    }

    // phase ramp unitarity and composition
    {
        bool ramp_ok = true;
        Rng rrng(12);
        for (int trial = 0; trial < 50 && ramp_ok; ++trial) {
            const int n = 2 + static_cast<int>(rrng.uniform() * 24);
            const double f1 = rrng.uniform(-0.4, 0.4);
            const double f2 = rrng.uniform(-0.05, 0.05);
            const CVector v1 = phase_ramp_diag(f1, n);
            const CVector v12 = phase_ramp_diag(f1 + f2, n);
            ramp_ok = (v1.cwiseProduct(phase_ramp_diag(f2, n)) - v12).norm() < 1e-12;
            for (int i = 0; i < n && ramp_ok; ++i)
                ramp_ok = std::abs(std::abs(v1[i]) - 1.0) < 1e-14;
        }
        os << (ramp_ok ? ", ramp ok" : ", ramp FAILED");
        out.pass = out.pass && ramp_ok;
    }

    // deterministic seeded runs: bit-identical CSV across thread counts
    {
        Scenario sc;
        sc.estimators = {"corr"};
        sc.sweep_values = {0.0, 10.0};
        sc.trials = 50;
        sc.seed = 13;
        setenv("COOPSYNC_THREADS", "1", 1);
        std::ostringstream csv_a;
        emit_csv(csv_a, run_cooperation(sc));
        setenv("COOPSYNC_THREADS", "3", 1);
        std::ostringstream csv_b;
        emit_csv(csv_b, run_cooperation(sc));
        unsetenv("COOPSYNC_THREADS");
        const bool det_ok = csv_a.str() == csv_b.str() && !csv_a.str().empty();
        os << (det_ok ? ", determinism ok" : ", determinism FAILED");
        out.pass = out.pass && det_ok;
    }

    out.details = os.str();
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 2 && std::strcmp(argv[1], "--only") == 0) only = std::atoi(argv[2]);

    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "flat-fading listening CRB closed form (rel tol 1e-9)", criterion_flat_fading_crb},
        {2, "optimal relay gain limits (-> 1 and -> 1/2)", criterion_gamma_limits},
        {3, "gamma = 1 penalty <= 0.3 dB across the gain sweep grid", criterion_gamma_one_penalty},
        {4, "binary-sequence worst-case gap (0.6 dB at N=4, <= 0.35 dB beyond)",
         criterion_sequence_gap},
        {5, "exhaustive search matches the construction (rel 1e-9)",
         criterion_exhaustive_agreement},
        {6, "estimator MSE within 1.5 dB of the bound for S_sd >= 15 dB",
         criterion_estimator_efficiency},
        {7, "adaptive correlation gain >= 2.5 dB and baseline floor", criterion_adaptive_gain},
        {8, "prior-dominated MSE floor at -34 +- 1 dB", criterion_prior_floor},
        {9, "relay estimate unbiased with CRB-level variance", criterion_relay_estimate_moments},
        {10, "property bundle (lemma2, charfn, toeplitz, ramp, determinism)",
         criterion_property_bundle},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        if (only != 0 && criterion.id != only) continue;
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.details = std::string("exception: ") + e.what();
        }
        std::printf("[%2d] %s  %s (%s)\n", criterion.id, outcome.pass ? "PASS" : "FAIL",
                    criterion.name, outcome.details.c_str());
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    if (failures == 0) {
        std::printf("acceptance: all criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criterion(s) failed\n", failures);
    return 1;
}
