#ifndef COOPSYNC_RELAY_POLICY_HPP
#define COOPSYNC_RELAY_POLICY_HPP

#include <cmath>
#include <numbers>

#include "coopsync/linalg.hpp"
#include "coopsync/model.hpp"
#include "coopsync/types.hpp"

namespace coopsync {

/// What the relay carries out of the listening phase: the effective signal
/// power Q of its frequency estimate, the prior weight K, and the estimate
/// itself.
struct ListeningSummary {
    double q_power = 0.0;
    double k_penalty = 0.0;
    double f_sr_hat = 0.0;
};

/**
 * Covariance of (f_sd, f_rd) after the relay adjustment with gain gamma,
 *
 *   R_f = sigma_f_sq * [ 2                      ((1+g)Q + K)/(Q+K)      ]
 *                      [ ((1+g)Q + K)/(Q+K)     2((1-g+g^2)Q + K)/(Q+K) ]
 *
 * The construction context (Q, K, gamma, sigma_f_sq) is kept alongside the
 * matrix because the prior information F_f = R_f^-1 needs the limiting
 * quadratic-penalty form when R_f degenerates (gamma = 1 with a perfect or
 * prior-free listening estimate).
 */
struct FreqCovariance {
    Eigen::Matrix2d matrix = Eigen::Matrix2d::Zero();
    double gamma = 0.0;
    double q_power = 0.0;
    double k_penalty = 0.0;
    double sigma_f_sq = 0.0;       // +inf marks the no-prior construction
    double noise_var_relay = 0.0;  // sigma_r^2 of the listening receiver

    bool informative() const { return std::isfinite(sigma_f_sq); }

    /**
     * Fisher information F_f of the Gaussian frequency prior. Closed-form
     * 2x2 inverse when R_f is regular; when R_f is singular (or under the
     * no-prior sentinel with gamma = 1) the information collapses onto the
     * frequency difference,
     *
     *   F_f -> (2 Q / sigma_r^2) * [1 -1; -1 1],
     *
     * the inverse listening-phase error variance of f_sr with no prior.
     * A flat prior with gamma != 1 carries no information at all.
     */
    Eigen::Matrix2d prior_info() const {
        Eigen::Matrix2d zeta;
        zeta << 1.0, -1.0, -1.0, 1.0;
        if (!informative()) {
            if (gamma == 1.0) {
                if (!(noise_var_relay > 0.0))
                    throw NumericalDegeneracy("prior_info: exact relay estimate with gamma = 1 "
                                              "pins f_rd to f_sd; no finite information exists");
                return (2.0 * q_power / noise_var_relay) * zeta;
            }
            return Eigen::Matrix2d::Zero();
        }
        const Eigen::Matrix2d scaled = matrix / sigma_f_sq;
        const double det = scaled(0, 0) * scaled(1, 1) - scaled(0, 1) * scaled(1, 0);
        if (det > 1e-9) {
            Eigen::Matrix2d inv;
            inv << scaled(1, 1), -scaled(0, 1), -scaled(1, 0), scaled(0, 0);
            return inv / (det * sigma_f_sq);
        }
        if (!(noise_var_relay > 0.0))
            throw NumericalDegeneracy("prior_info: singular frequency covariance without "
                                      "listening noise has no finite information");
        return (2.0 * q_power / noise_var_relay) * zeta;
    }
};

/// Effective signal power of the listening-phase estimate,
/// Q = pi^2 ||Pperp_X D X h||^2.
inline double compute_q(const TrainingSequence& x_ell, const ChannelResponse& h_sr) {
    const CMatrix xm = toeplitz_matrix(x_ell, h_sr.length());
    const CMatrix pperp = projector_complement(xm);
    const CVector dxh =
        symmetric_index_diag(x_ell.length()).cast<cdouble>().cwiseProduct(xm * h_sr.taps());
    const double pi_sq = std::numbers::pi * std::numbers::pi;
    return pi_sq * (pperp * dxh).squaredNorm();
}

/// Prior weight K = sigma_r^2 / (4 sigma_f^2) trading listening data
/// against the oscillator prior.
inline double compute_k(double noise_var_relay, double sigma_f_sq) {
    if (noise_var_relay < 0.0) throw InvalidParameter("compute_k: noise variance must be >= 0");
    if (std::isinf(sigma_f_sq)) return 0.0;
    if (!(sigma_f_sq > 0.0))
        throw InvalidParameter("compute_k: sigma_f_sq must be positive (or +inf)");
    return noise_var_relay / (4.0 * sigma_f_sq);
}

/// Covariance of (f_sd, f_rd) for a finite prior. gamma = 1 with k = 0
/// yields the singular matrix unchanged; prior_info() handles the limit.
inline FreqCovariance freq_covariance(double q, double k, double gamma, double sigma_f_sq) {
    if (!(q >= 0.0) || !(k >= 0.0)) throw InvalidParameter("freq_covariance: Q and K must be >= 0");
    if (q + k <= 0.0) throw NumericalDegeneracy("freq_covariance: Q + K must be positive");
    if (!(sigma_f_sq > 0.0) || std::isinf(sigma_f_sq))
        throw InvalidParameter("freq_covariance: sigma_f_sq must be positive and finite");
    FreqCovariance rf;
    rf.gamma = gamma;
    rf.q_power = q;
    rf.k_penalty = k;
    rf.sigma_f_sq = sigma_f_sq;
    rf.noise_var_relay = 4.0 * k * sigma_f_sq;
    const double off = ((1.0 + gamma) * q + k) / (q + k);
    const double var_rd = 2.0 * ((1.0 - gamma + gamma * gamma) * q + k) / (q + k);
    rf.matrix << 2.0, off, off, var_rd;
    rf.matrix *= sigma_f_sq;
    return rf;
}

/// No-prior construction (sigma_f_sq = +inf). The matrix entries diverge,
/// so only the context fields are meaningful; prior_info() returns the
/// difference-penalty limit for gamma = 1 and zero otherwise.
inline FreqCovariance freq_covariance_no_prior(double q, double noise_var_relay, double gamma) {
    if (!(q >= 0.0)) throw InvalidParameter("freq_covariance_no_prior: Q must be >= 0");
    if (!(noise_var_relay >= 0.0))
        throw InvalidParameter("freq_covariance_no_prior: noise variance must be >= 0");
    FreqCovariance rf;
    rf.gamma = gamma;
    rf.q_power = q;
    rf.k_penalty = 0.0;
    rf.sigma_f_sq = kInfinity;
    rf.noise_var_relay = noise_var_relay;
    rf.matrix.setConstant(kInfinity);
    return rf;
}

/// Relay adjustment rule: transmit at f_r - gamma * f_sr_hat. Under the
/// receiver-minus-transmitter link convention this makes the effective
/// relay-destination offset f_rd = (q_d - q_r) + gamma * f_sr_hat.
inline NormalizedFrequency relay_transmit_frequency(NormalizedFrequency f_r,
                                                    NormalizedFrequency f_sr_hat, double gamma) {
    return NormalizedFrequency(f_r.value() - gamma * f_sr_hat.value());
}

/**
 * Numerically minimize the trace of (Delta_opt + R_f(gamma)^-1)^-1 over
 * gamma in [0, 1.5]: dense grid with step 1e-3, then golden-section
 * refinement around the best grid point. The exact minimizer has no usable
 * closed form; this procedure is the definition.
 */
inline double optimize_gamma(double q, double k, double sigma_f_sq,
                             const Eigen::Vector2d& delta_diag) {
    if (!(sigma_f_sq > 0.0) || std::isinf(sigma_f_sq))
        throw InvalidParameter("optimize_gamma: sigma_f_sq must be positive and finite");
    const auto objective = [&](double gamma) -> double {
        Eigen::Matrix2d info;
        try {
            info = freq_covariance(q, k, gamma, sigma_f_sq).prior_info();
        } catch (const NumericalDegeneracy&) {
            return kInfinity;
        }
        info(0, 0) += delta_diag[0];
        info(1, 1) += delta_diag[1];
        const double det = info(0, 0) * info(1, 1) - info(0, 1) * info(1, 0);
        if (!(det > 0.0) || !(info(0, 0) > 0.0)) return kInfinity;
        return (info(0, 0) + info(1, 1)) / det;
    };

    constexpr double kLo = 0.0;
    constexpr double kHi = 1.5;
    constexpr double kStep = 1e-3;
    double best_gamma = kLo;
    double best_value = kInfinity;
    const int steps = static_cast<int>(std::round((kHi - kLo) / kStep));
    for (int i = 0; i <= steps; ++i) {
        const double gamma = kLo + kStep * i;
        const double value = objective(gamma);
        if (value < best_value) {
            best_value = value;
            best_gamma = gamma;
        }
    }
    if (std::isinf(best_value))
        throw NumericalDegeneracy("optimize_gamma: objective degenerate on the whole range");

    double lo = std::max(kLo, best_gamma - kStep);
    double hi = std::min(kHi, best_gamma + kStep);
    constexpr double kGolden = 0.6180339887498949;
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double f1 = objective(x1);
    double f2 = objective(x2);
    while (hi - lo > 1e-10) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = objective(x2);
        }
    }
    // keep the sub-grid refinement only when it improves the objective
    // beyond numerical noise; in the flat limiting regimes the grid point
    // itself is the answer
    const double refined = 0.5 * (lo + hi);
    if (objective(refined) < best_value * (1.0 - 1e-12)) return refined;
    return best_gamma;
}

}  // namespace coopsync

#endif  // COOPSYNC_RELAY_POLICY_HPP
