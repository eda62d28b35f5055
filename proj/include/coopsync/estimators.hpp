#ifndef COOPSYNC_ESTIMATORS_HPP
#define COOPSYNC_ESTIMATORS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "coopsync/fisher.hpp"
#include "coopsync/linalg.hpp"
#include "coopsync/model.hpp"
#include "coopsync/relay_policy.hpp"
#include "coopsync/types.hpp"

namespace coopsync {

/**
 * Discretization of a 1-D frequency search: coarse grid over
 * [center - half_width, center + half_width], then bracketed refinement
 * (golden section with a final parabolic fit) down to refine_tol.
 */
struct GridSpec {
    double center = 0.0;
    double half_width = 0.0;
    double coarse_step = 0.0;
    double refine_tol = 1e-7;

    /// Defaults: the coarse step stays under the objective's main-lobe
    /// width 1/N and the window covers five prior standard deviations of a
    /// link offset (or +-2/N when no prior is available).
    static GridSpec defaults(int n, double sigma_f_sq) {
        GridSpec g;
        g.center = 0.0;
        const double prior_width =
            std::isfinite(sigma_f_sq) ? 5.0 * std::sqrt(2.0 * sigma_f_sq) : 0.0;
        g.half_width = std::min(0.49, std::max(prior_width, 2.0 / n));
        g.coarse_step = 1.0 / (8.0 * n);
        g.refine_tol = 1e-7;
        return g;
    }

    void validate(int n) const {
        if (!(half_width > 0.0) || !(coarse_step > 0.0) || !(refine_tol > 0.0))
            throw InvalidParameter("GridSpec: widths and tolerances must be positive");
        if (coarse_step > 1.0 / (4.0 * n) + 1e-15)
            throw InvalidParameter("GridSpec: coarse_step must be <= 1/(4N)");
        if (refine_tol > coarse_step / 100.0 + 1e-18)
            throw InvalidParameter("GridSpec: refine_tol must be <= coarse_step/100");
    }
};

struct EstimateResult {
    double f_hat = 0.0;
    CVector h_hat;
    double objective = 0.0;
    bool degenerate = false;
};

struct EstimatePairResult {
    double f_sd_hat = 0.0;
    double f_rd_hat = 0.0;
    CVector h_sd_hat;
    CVector h_rd_hat;
    CVector h_sdl_hat;
    double objective = 0.0;
    bool degenerate = false;
};

namespace detail {

/// Confidence margin on least squares signal-energy estimates: only energy
/// exceeding this many times the fit's own noise floor counts as signal.
/// The fit is evaluated at a data-selected frequency, so under pure noise
/// its energy is an extreme statistic over the candidate lobes (roughly
/// ln-of-count above the mean); the margin covers that selection bias plus
/// a three-sigma guard. Without it the shrinkage leaks and the prior
/// floor is lost.
inline constexpr double kEnergyConfidence = 6.0;

/// Golden-section minimization on [center - step, center + step] followed
/// by one parabolic fit through the final bracket.
template <typename F>
double refine_minimum(F&& objective, double center, double step, double tol) {
    double a = center - step;
    double b = center + step;
    constexpr double kGolden = 0.6180339887498949;
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = objective(x1);
    double f2 = objective(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = objective(x2);
        }
    }
    double best = (f1 < f2) ? x1 : x2;
    double best_val = std::min(f1, f2);
    const double h = 0.5 * (b - a);
    const double m = 0.5 * (a + b);
    const double fa = objective(m - h);
    const double fm = objective(m);
    const double fb = objective(m + h);
    const double curv = fa - 2.0 * fm + fb;
    if (curv > 0.0) {
        const double offset = 0.5 * h * (fa - fb) / curv;
        if (std::abs(offset) <= h) {
            const double v = m + offset;
            const double fv = objective(v);
            if (fv < best_val) best = v;
        }
    }
    return best;
}

inline CVector demodulate(const CVector& y, double f) {
    return phase_ramp_diag(f, static_cast<int>(y.size())).conjugate().cwiseProduct(y);
}

/// Residual power of y against the joint two-signal design
/// [V_f1 X1, V_f2 X2]; rank-deficient designs (e.g. identical ramped
/// sequences) still yield the projection residual.
inline double joint_residual(const CVector& y_c, const CMatrix& x1, const CMatrix& x2,
                             double f_sd, double f_rd, CVector* coeffs = nullptr) {
    const int n = static_cast<int>(y_c.size());
    const int p = static_cast<int>(x1.cols());
    CMatrix a(n, 2 * p);
    const CVector v1 = phase_ramp_diag(f_sd, n);
    const CVector v2 = phase_ramp_diag(f_rd, n);
    for (int k = 0; k < p; ++k) {
        a.col(k) = v1.cwiseProduct(x1.col(k));
        a.col(p + k) = v2.cwiseProduct(x2.col(k));
    }
    Eigen::ColPivHouseholderQR<CMatrix> qr(a);
    qr.setThreshold(1e-12);
    const CVector g = qr.solve(y_c);
    if (coeffs) *coeffs = g;
    return (y_c - a * g).squaredNorm();
}

}  // namespace detail

/// Least squares channel estimate at a candidate frequency,
/// (X^H X)^-1 X^H V_f^H y.
inline ChannelResponse channel_ls(const CVector& y, const TrainingSequence& x,
                                  NormalizedFrequency f, int taps = 1) {
    if (y.size() != x.length()) throw InvalidDimensions("channel_ls: y and x must share a length");
    const CMatrix xm = toeplitz_matrix(x, taps);
    return ChannelResponse(least_squares(xm, detail::demodulate(y, f.value())));
}

/**
 * Listening-phase MAP estimator:
 *   argmin_f ||Pperp_X V_f^H y||^2 + (sigma^2 / (4 sigma_f_sq)) f^2.
 * With sigma_f_sq = +inf the penalty drops and this is the standard ML
 * frequency estimator.
 */
inline EstimateResult map_listening(const CVector& y, const TrainingSequence& x, double noise_var,
                                    double sigma_f_sq, const GridSpec& grid, int taps = 1) {
    if (y.size() != x.length())
        throw InvalidDimensions("map_listening: y and x must share a length");
    grid.validate(x.length());
    const CMatrix xm = toeplitz_matrix(x, taps);
    const CMatrix pperp = projector_complement(xm);
    const double weight = std::isfinite(sigma_f_sq) ? noise_var / (4.0 * sigma_f_sq) : 0.0;
    const auto objective = [&](double f) {
        return (pperp * detail::demodulate(y, f)).squaredNorm() + weight * f * f;
    };

    const int half_steps = static_cast<int>(std::floor(grid.half_width / grid.coarse_step));
    double best_f = grid.center;
    double best_val = objective(best_f);
    for (int i = -half_steps; i <= half_steps; ++i) {
        if (i == 0) continue;
        const double f = grid.center + i * grid.coarse_step;
        const double val = objective(f);
        if (val < best_val) {
            best_val = val;
            best_f = f;
        }
    }
    EstimateResult out;
    out.f_hat = detail::refine_minimum(objective, best_f, grid.coarse_step, grid.refine_tol);
    out.objective = objective(out.f_hat);
    out.h_hat = least_squares(xm, detail::demodulate(y, out.f_hat));
    return out;
}

namespace detail {

/**
 * Post-search least squares combining of a raw estimate pair:
 *   f_hat = R_f (R_f + C_tilde)^-1 f_tilde
 * where C_tilde is the cooperative bound evaluated with diag{R_f}^-1 as
 * prior information. The receiver does not know the channels, so the
 * blocks are built from the joint least squares estimates at the raw
 * frequencies; a non-positive data block is clipped to zero rather than
 * trusted. Skipped (identity) when no usable prior exists or the stated
 * noise power is zero.
 */
inline void combine_pair(const TrainingSequence& x_sd, const TrainingSequence& x_rd,
                         const TrainingSequence& x_ell, double noise_var_d,
                         const FreqCovariance& freq_cov, const CVector& y_c, const CVector& y_sdl,
                         EstimatePairResult& est, int p = 1) {
    const CMatrix x1 = toeplitz_matrix(x_sd, p);
    const CMatrix x2 = toeplitz_matrix(x_rd, p);
    const CMatrix xl = toeplitz_matrix(x_ell, p);

    CVector g;
    const double resid_c = joint_residual(y_c, x1, x2, est.f_sd_hat, est.f_rd_hat, &g);
    est.h_sd_hat = g.head(p);
    est.h_rd_hat = g.tail(p);
    est.h_sdl_hat = least_squares(xl, demodulate(y_sdl, est.f_sd_hat));

    if (!freq_cov.informative() || noise_var_d <= 0.0) return;

    // channel fits used for the information estimate get the same energy
    // confidence margin as the correlation shrinkage; a raw |h|^2 carries
    // a noise floor that would overstate the data information at low SNR
    const int n_c = x_sd.length();
    const int n_l = x_ell.length();
    const double noise_c = resid_c / std::max(1, n_c - 2 * p);
    const double resid_l =
        (demodulate(y_sdl, est.f_sd_hat) - xl * est.h_sdl_hat).squaredNorm();
    const double noise_l = resid_l / std::max(1, n_l - p);
    const auto deflate = [](CVector h, double margin) {
        for (Eigen::Index i = 0; i < h.size(); ++i) {
            const double e = std::norm(h[i]);
            h[i] *= (e > 0.0) ? std::sqrt(std::max(e - margin, 0.0) / e) : 0.0;
        }
        return h;
    };
    const CVector h_sd_inf = deflate(est.h_sd_hat, kEnergyConfidence * noise_c / n_c);
    const CVector h_rd_inf = deflate(est.h_rd_hat, kEnergyConfidence * noise_c / n_c);
    const CVector h_sdl_inf = deflate(est.h_sdl_hat, kEnergyConfidence * noise_l / n_l);

    Eigen::Matrix2d data_info = Eigen::Matrix2d::Zero();
    try {
        const CVector m = char_fn_diag(freq_cov.matrix, x_sd.length());
        const FimBlocks blocks = fim_cooperation(
            x_sd, x_rd, x_ell, ChannelResponse(h_sd_inf), ChannelResponse(h_rd_inf),
            ChannelResponse(h_sdl_inf), noise_var_d, noise_var_d, m, Eigen::Matrix2d::Zero());
        data_info = schur_frequency_info(blocks, false);
    } catch (const SingularDesign&) {
        data_info.setZero();
    }
    // clip to positive semidefinite: noisy channel estimates can push the
    // estimated information slightly indefinite
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(data_info);
    Eigen::Vector2d ev = eig.eigenvalues().cwiseMax(0.0);
    data_info = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();

    Eigen::Matrix2d info = data_info;
    info(0, 0) += 1.0 / freq_cov.matrix(0, 0);
    info(1, 1) += 1.0 / freq_cov.matrix(1, 1);
    const Eigen::Matrix2d c_tilde = symmetric_inverse(info);
    const Eigen::Matrix2d combine =
        freq_cov.matrix * symmetric_inverse(freq_cov.matrix + c_tilde);
    const Eigen::Vector2d raw(est.f_sd_hat, est.f_rd_hat);
    const Eigen::Vector2d combined = combine * raw;
    est.f_sd_hat = combined[0];
    est.f_rd_hat = combined[1];
}

}  // namespace detail

/**
 * Joint MAP estimator of (f_sd, f_rd) at the destination: full coarse grid
 * over both frequencies, then two passes of coordinate-wise refinement.
 * The criterion is
 *   ||Pperp_{[V1 X1, V2 X2]} y_c||^2 + ||Pperp_Xl V1^H y_sdl||^2
 *     + (sigma_d^2 / 2) f^T R_f^-1 f,
 * with the penalty replaced by its quadratic difference limit when R_f
 * degenerates (see FreqCovariance::prior_info).
 */
inline EstimatePairResult map_cooperation(const CVector& y_c, const CVector& y_sdl,
                                          const TrainingSequence& x_sd,
                                          const TrainingSequence& x_rd,
                                          const TrainingSequence& x_ell, double noise_var_d,
                                          const FreqCovariance& freq_cov, const GridSpec& grid,
                                          int p = 1) {
    const int n_c = x_sd.length();
    if (y_c.size() != n_c || x_rd.length() != n_c)
        throw InvalidDimensions("map_cooperation: cooperation inputs must share a length");
    if (y_sdl.size() != x_ell.length())
        throw InvalidDimensions("map_cooperation: listening inputs must share a length");
    grid.validate(n_c);

    const CMatrix x1 = toeplitz_matrix(x_sd, p);
    const CMatrix x2 = toeplitz_matrix(x_rd, p);
    const CMatrix xl = toeplitz_matrix(x_ell, p);
    const CMatrix pperp_l = projector_complement(xl);

    const Eigen::Matrix2d penalty =
        (noise_var_d > 0.0) ? Eigen::Matrix2d(0.5 * noise_var_d * freq_cov.prior_info())
                            : Eigen::Matrix2d(Eigen::Matrix2d::Zero());

    const auto listening_term = [&](double f_sd) {
        return (pperp_l * detail::demodulate(y_sdl, f_sd)).squaredNorm();
    };
    const auto objective = [&](double f_sd, double f_rd) {
        const Eigen::Vector2d f(f_sd, f_rd);
        return detail::joint_residual(y_c, x1, x2, f_sd, f_rd) + listening_term(f_sd) +
               f.dot(penalty * f);
    };

    const int half_steps = static_cast<int>(std::floor(grid.half_width / grid.coarse_step));
    std::vector<double> axis;
    axis.reserve(2 * half_steps + 1);
    for (int i = -half_steps; i <= half_steps; ++i) axis.push_back(grid.center + i * grid.coarse_step);

    double best_sd = grid.center, best_rd = grid.center;
    double best_val = kInfinity;
    for (double f_sd : axis) {
        for (double f_rd : axis) {
            const double val = objective(f_sd, f_rd);
            if (val < best_val) {
                best_val = val;
                best_sd = f_sd;
                best_rd = f_rd;
            }
        }
    }

    // alternate axis-aligned and rotated (mean/half-difference) passes: a
    // strong prior with gamma near 1 carves a narrow valley along
    // f_sd = f_rd that axis-aligned steps alone descend too slowly
    for (int pass = 0; pass < 2; ++pass) {
        best_sd = detail::refine_minimum([&](double f) { return objective(f, best_rd); }, best_sd,
                                         grid.coarse_step, grid.refine_tol);
        best_rd = detail::refine_minimum([&](double f) { return objective(best_sd, f); }, best_rd,
                                         grid.coarse_step, grid.refine_tol);
        double mean = 0.5 * (best_sd + best_rd);
        double half_diff = 0.5 * (best_sd - best_rd);
        mean = detail::refine_minimum(
            [&](double u) { return objective(u + half_diff, u - half_diff); }, mean,
            grid.coarse_step, grid.refine_tol);
        half_diff = detail::refine_minimum(
            [&](double v) { return objective(mean + v, mean - v); }, half_diff, grid.coarse_step,
            grid.refine_tol);
        best_sd = mean + half_diff;
        best_rd = mean - half_diff;
    }

    EstimatePairResult out;
    out.f_sd_hat = best_sd;
    out.f_rd_hat = best_rd;
    out.objective = objective(best_sd, best_rd);
    CVector g;
    detail::joint_residual(y_c, x1, x2, best_sd, best_rd, &g);
    out.h_sd_hat = g.head(p);
    out.h_rd_hat = g.tail(p);
    out.h_sdl_hat = least_squares(xl, detail::demodulate(y_sdl, best_sd));
    return out;
}

/**
 * Two independent 1-D ML searches with diagonal-prior penalties followed
 * by least squares combining against the full frequency covariance.
 */
inline EstimatePairResult ml1d_cooperation(const CVector& y_c, const CVector& y_sdl,
                                           const TrainingSequence& x_sd,
                                           const TrainingSequence& x_rd,
                                           const TrainingSequence& x_ell, double noise_var_d,
                                           const FreqCovariance& freq_cov, const GridSpec& grid,
                                           int p = 1) {
    const int n_c = x_sd.length();
    if (y_c.size() != n_c || x_rd.length() != n_c)
        throw InvalidDimensions("ml1d_cooperation: cooperation inputs must share a length");
    if (y_sdl.size() != x_ell.length())
        throw InvalidDimensions("ml1d_cooperation: listening inputs must share a length");
    grid.validate(n_c);

    const CMatrix pperp_sd = projector_complement(toeplitz_matrix(x_sd, p));
    const CMatrix pperp_rd = projector_complement(toeplitz_matrix(x_rd, p));
    const CMatrix pperp_l = projector_complement(toeplitz_matrix(x_ell, p));

    const bool informative = freq_cov.informative();
    const double w_sd =
        informative && noise_var_d > 0.0 ? noise_var_d / (2.0 * freq_cov.matrix(0, 0)) : 0.0;
    const double w_rd =
        informative && noise_var_d > 0.0 ? noise_var_d / (2.0 * freq_cov.matrix(1, 1)) : 0.0;

    const auto objective_rd = [&](double f) {
        return (pperp_rd * detail::demodulate(y_c, f)).squaredNorm() + w_rd * f * f;
    };
    const auto objective_sd = [&](double f) {
        return (pperp_sd * detail::demodulate(y_c, f)).squaredNorm() +
               (pperp_l * detail::demodulate(y_sdl, f)).squaredNorm() + w_sd * f * f;
    };

    const auto search = [&](const auto& objective) {
        const int half_steps = static_cast<int>(std::floor(grid.half_width / grid.coarse_step));
        double best_f = grid.center;
        double best_val = objective(best_f);
        for (int i = -half_steps; i <= half_steps; ++i) {
            if (i == 0) continue;
            const double f = grid.center + i * grid.coarse_step;
            const double val = objective(f);
            if (val < best_val) {
                best_val = val;
                best_f = f;
            }
        }
        return detail::refine_minimum(objective, best_f, grid.coarse_step, grid.refine_tol);
    };

    EstimatePairResult out;
    out.f_sd_hat = search(objective_sd);
    out.f_rd_hat = search(objective_rd);
    detail::combine_pair(x_sd, x_rd, x_ell, noise_var_d, freq_cov, y_c, y_sdl, out, p);
    out.objective = objective_sd(out.f_sd_hat) + objective_rd(out.f_rd_hat);
    return out;
}

/// Largest correlation lag: M = min(N/2, 12). The cap of 12 keeps the
/// unambiguous range 1/(M+1) beyond five standard deviations of the
/// reference oscillator prior.
inline int max_lag_rule(int n, [[maybe_unused]] double sigma_f_sq) {
    if (n < 2) throw InvalidParameter("max_lag_rule: need at least 2 samples");
    return std::min(n / 2, 12);
}

namespace detail {

struct CorrSegment {
    const CVector* y;
    const CVector* x;  // unit-modulus training samples, same length as y
};

/**
 * Pooled lag-correlation estimate over one or more demodulated segments:
 *   R[k] = sum_seg sum_n z[n] conj(z[n-k]) / count,  z = y .* conj(x),
 *   f_raw = arg(sum_{k=1..M} R[k]) / (pi (M+1)),
 * then prior shrinkage f = 2 sigma_f^2 / (2 sigma_f^2 + c_f^2) * f_raw,
 * where c_f^2 is the no-prior bound evaluated with the least squares
 * channel fit of each segment (flat fading).
 */
inline EstimateResult corr_core(const std::vector<CorrSegment>& segments, double sigma_f_sq,
                                int max_lag) {
    cdouble lag_sum(0.0, 0.0);
    for (int k = 1; k <= max_lag; ++k) {
        cdouble acc(0.0, 0.0);
        long count = 0;
        for (const auto& seg : segments) {
            const int n = static_cast<int>(seg.y->size());
            if (k >= n) continue;
            for (int i = k; i < n; ++i) {
                const cdouble zi = (*seg.y)[i] * std::conj((*seg.x)[i]);
                const cdouble zk = (*seg.y)[i - k] * std::conj((*seg.x)[i - k]);
                acc += zi * std::conj(zk);
            }
            count += n - k;
        }
        if (count > 0) lag_sum += acc / static_cast<double>(count);
    }

    EstimateResult out;
    out.objective = std::abs(lag_sum);
    if (out.objective == 0.0) {
        out.degenerate = true;
        out.f_hat = 0.0;
        return out;
    }
    double f = std::arg(lag_sum) / (std::numbers::pi * (max_lag + 1));

    if (std::isfinite(sigma_f_sq)) {
        // no-prior CRB from the receiver's own flat-fading fit; for a
        // constant-modulus sequence ||Pperp D x h||^2 = |h|^2 N(N^2-1)/3
        double info = 0.0;
        for (const auto& seg : segments) {
            const int n = static_cast<int>(seg.y->size());
            const CVector v = phase_ramp_diag(f, n);
            const cdouble h_ls = (v.cwiseProduct(*seg.x)).dot(*seg.y) / static_cast<double>(n);
            const double resid = (*seg.y - h_ls * v.cwiseProduct(*seg.x)).squaredNorm();
            const double noise_est = resid / std::max(1, n - 1);
            if (noise_est <= 0.0) {
                info = kInfinity;
                break;
            }
            const double power =
                std::max(std::norm(h_ls) - kEnergyConfidence * noise_est / n, 0.0);
            const double eta = 2.0 / 3.0 * std::numbers::pi * std::numbers::pi * n *
                               (static_cast<double>(n) * n - 1.0);
            info += eta * power / noise_est;
        }
        const double link_var = 2.0 * sigma_f_sq;
        f = (info > 0.0) ? f * (link_var / (link_var + 1.0 / info)) : 0.0;
    }
    out.f_hat = f;
    return out;
}

/// Project the reconstructed interferer V_f x out of y (rank-one
/// complement, flat fading).
inline CVector project_out(const CVector& y, const TrainingSequence& x, double f) {
    const CVector u = phase_ramp_diag(f, x.length()).cwiseProduct(x.samples());
    return y - u * (u.dot(y) / u.squaredNorm());
}

inline EstimatePairResult corr_cooperation_impl(const CVector& y_c, const CVector& y_sdl,
                                                const TrainingSequence& x_sd,
                                                const TrainingSequence& x_rd,
                                                const TrainingSequence& x_ell, double noise_var_d,
                                                const FreqCovariance& freq_cov, double sigma_f_sq,
                                                int max_lag, bool adaptive) {
    const int n_c = x_sd.length();
    if (y_c.size() != n_c || x_rd.length() != n_c)
        throw InvalidDimensions("corr_cooperation: cooperation inputs must share a length");
    if (y_sdl.size() != x_ell.length())
        throw InvalidDimensions("corr_cooperation: listening inputs must share a length");
    if (max_lag < 1 || max_lag >= n_c || max_lag >= x_ell.length())
        throw InvalidParameter("corr_cooperation: max_lag must satisfy 1 <= M < N");

    // The adaptive variant pools the destination's listening observation
    // into the f_sd correlation; the non-adaptive baseline correlates the
    // raw cooperation observation only, as in the original method.
    const auto estimate_sd = [&](const CVector& coop) {
        if (adaptive)
            return corr_core({{&y_sdl, &x_ell.samples()}, {&coop, &x_sd.samples()}}, sigma_f_sq,
                             max_lag);
        return corr_core({{&coop, &x_sd.samples()}}, sigma_f_sq, max_lag);
    };
    const auto estimate_rd = [&](const CVector& coop) {
        return corr_core({{&coop, &x_rd.samples()}}, sigma_f_sq, max_lag);
    };

    EstimateResult est_sd = estimate_sd(y_c);
    EstimateResult est_rd = estimate_rd(y_c);

    if (adaptive) {
        const CVector y_sd_clean = project_out(y_c, x_rd, est_rd.f_hat);
        const CVector y_rd_clean = project_out(y_c, x_sd, est_sd.f_hat);
        est_sd = estimate_sd(y_sd_clean);
        est_rd = estimate_rd(y_rd_clean);
    }

    EstimatePairResult out;
    out.f_sd_hat = est_sd.f_hat;
    out.f_rd_hat = est_rd.f_hat;
    out.degenerate = est_sd.degenerate || est_rd.degenerate;
    if (adaptive) {
        combine_pair(x_sd, x_rd, x_ell, noise_var_d, freq_cov, y_c, y_sdl, out);
    } else {
        // raw estimates only; fill the channel fits without recombining
        CVector g;
        joint_residual(y_c, toeplitz_matrix(x_sd, 1), toeplitz_matrix(x_rd, 1), out.f_sd_hat,
                       out.f_rd_hat, &g);
        out.h_sd_hat = g.head(1);
        out.h_rd_hat = g.tail(1);
        out.h_sdl_hat = least_squares(toeplitz_matrix(x_ell, 1), demodulate(y_sdl, out.f_sd_hat));
    }
    out.objective = est_sd.objective + est_rd.objective;
    return out;
}

}  // namespace detail

/// Single-signal correlation estimator (flat fading), Luise-Reggiannini
/// style lag sum with the prior shrinkage applied when sigma_f_sq is
/// finite. The estimate is unambiguous for |f| < 1/(max_lag + 1).
inline EstimateResult corr_estimate(const CVector& y, const TrainingSequence& x,
                                    double sigma_f_sq, int max_lag) {
    if (y.size() != x.length())
        throw InvalidDimensions("corr_estimate: y and x must share a length");
    if (max_lag < 1 || max_lag >= x.length())
        throw InvalidParameter("corr_estimate: max_lag must satisfy 1 <= M < N");
    EstimateResult out = detail::corr_core({{&y, &x.samples()}}, sigma_f_sq, max_lag);
    const CVector v = phase_ramp_diag(out.f_hat, x.length());
    CVector h(1);
    h[0] = (v.cwiseProduct(x.samples())).dot(y) / static_cast<double>(x.length());
    out.h_hat = h;
    return out;
}

/// Two-step adaptive correlation estimator for the cooperation phase:
/// raw estimates, interference projection at the raw frequencies, a second
/// correlation pass, then the least squares combining step.
inline EstimatePairResult corr_cooperation_twostep(const CVector& y_c, const CVector& y_sdl,
                                                   const TrainingSequence& x_sd,
                                                   const TrainingSequence& x_rd,
                                                   const TrainingSequence& x_ell,
                                                   double noise_var_d,
                                                   const FreqCovariance& freq_cov,
                                                   double sigma_f_sq, int max_lag) {
    return detail::corr_cooperation_impl(y_c, y_sdl, x_sd, x_rd, x_ell, noise_var_d, freq_cov,
                                         sigma_f_sq, max_lag, true);
}

/// Non-adaptive variant: the raw correlation estimates go straight to the
/// combining step. Exhibits an interference MSE floor at high SNR.
inline EstimatePairResult corr_cooperation_onestep(const CVector& y_c, const CVector& y_sdl,
                                                   const TrainingSequence& x_sd,
                                                   const TrainingSequence& x_rd,
                                                   const TrainingSequence& x_ell,
                                                   double noise_var_d,
                                                   const FreqCovariance& freq_cov,
                                                   double sigma_f_sq, int max_lag) {
    return detail::corr_cooperation_impl(y_c, y_sdl, x_sd, x_rd, x_ell, noise_var_d, freq_cov,
                                         sigma_f_sq, max_lag, false);
}

}  // namespace coopsync

#endif  // COOPSYNC_ESTIMATORS_HPP
