#ifndef COOPSYNC_FISHER_HPP
#define COOPSYNC_FISHER_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>

#include "coopsync/linalg.hpp"
#include "coopsync/model.hpp"
#include "coopsync/types.hpp"

namespace coopsync {

/**
 * Fisher information blocks for the joint parameter vector
 * (f_sd, f_rd, h_sd_c, h_rd, h_sd_l). The frequency cross terms carry the
 * expectation over the random frequency difference, i.e. every product
 * V_{f_sd}^H V_{f_rd} has already been replaced by the characteristic
 * function diagonal M.
 *
 * delta_cross keeps the complex cross scalar before taking the real part:
 * the exact bound needs Re{.} while the worst case over the unknown global
 * channel phase needs -abs{.}.
 */
struct FimBlocks {
    Eigen::Vector2d delta_diag = Eigen::Vector2d::Zero();
    cdouble delta_cross{0.0, 0.0};
    CMatrix lambda;                 // 2 x 3P
    CMatrix xi;                     // 3P x 3P Hermitian
    Eigen::Matrix2d prior_fim = Eigen::Matrix2d::Zero();

    Eigen::Matrix2d delta() const {
        Eigen::Matrix2d d;
        d << delta_diag[0], delta_cross.real(), delta_cross.real(), delta_diag[1];
        return d;
    }
};

enum class CrbVariant { Listening, CooperationExact, CooperationWorstCase, CooperationOptimal };

struct CrbReport {
    double crb_fsd = 0.0;
    std::optional<double> crb_frd;
    CrbVariant variant = CrbVariant::Listening;

    double total() const { return crb_fsd + crb_frd.value_or(0.0); }
};

/// Fisher information of the Gaussian prior, 1/sigma_sq. Callers pass the
/// variance of the quantity being bounded (2*sigma_f_sq for a link offset).
inline double prior_fisher_info(double sigma_sq) {
    if (std::isnan(sigma_sq) || sigma_sq <= 0.0)
        throw InvalidParameter("prior_fisher_info: variance must be positive");
    return std::isinf(sigma_sq) ? 0.0 : 1.0 / sigma_sq;
}

/**
 * Listening phase bound for a single link:
 *   ( (2*pi^2/sigma^2) ||Pperp_X D X h||^2 + 1/(2*sigma_f_sq) )^-1,
 * the maximum CRB over all priors with the given variance (the Gaussian
 * attains it). sigma_f_sq = +inf drops the prior term.
 */
inline CrbReport crb_listening(const TrainingSequence& x, const ChannelResponse& h,
                               double noise_var, double sigma_f_sq) {
    if (!(noise_var > 0.0) || !std::isfinite(noise_var))
        throw InvalidParameter("crb_listening: noise_var must be positive and finite");
    if (std::isnan(sigma_f_sq) || sigma_f_sq <= 0.0)
        throw InvalidParameter("crb_listening: sigma_f_sq must be positive (or +inf)");
    const int n = x.length();
    const CMatrix xm = toeplitz_matrix(x, h.length());
    const CMatrix pperp = projector_complement(xm);
    const CVector dxh = symmetric_index_diag(n).cast<cdouble>().cwiseProduct(xm * h.taps());
    const double pi_sq = std::numbers::pi * std::numbers::pi;
    const double data_info = 2.0 * pi_sq / noise_var * (pperp * dxh).squaredNorm();
    const double prior_info = std::isinf(sigma_f_sq) ? 0.0 : 1.0 / (2.0 * sigma_f_sq);
    CrbReport report;
    report.variant = CrbVariant::Listening;
    report.crb_fsd = 1.0 / (data_info + prior_info);
    return report;
}

/**
 * Characteristic function diagonal M of the frequency difference:
 * M_nn = Phi_{f_rd - f_sd}(pi * d_n) with d_n = 2n - 1 - N. For the
 * Gaussian least-informative prior Phi(t) = exp(-t^2 v / 2) with
 * v = var(f_rd - f_sd) = c11 + c22 - 2 c12. An infinite v (no prior)
 * sends every off-center entry to zero.
 */
inline CVector char_fn_diag(const Eigen::Matrix2d& freq_cov, int n) {
    const double v = freq_cov(0, 0) + freq_cov(1, 1) - freq_cov(0, 1) - freq_cov(1, 0);
    if (std::isnan(v) || v < -1e-15 * std::abs(freq_cov(0, 0) + freq_cov(1, 1)) - 1e-300)
        throw InvalidCovariance("char_fn_diag: difference variance is negative");
    const double var_diff = std::max(v, 0.0);
    const RVector d = symmetric_index_diag(n);
    CVector m(n);
    for (int i = 0; i < n; ++i) {
        if (d[i] == 0.0) {
            m[i] = 1.0;
        } else {
            const double t = std::numbers::pi * d[i];
            m[i] = std::exp(-0.5 * t * t * var_diff);
        }
    }
    return m;
}

/// No-prior variant: v -> infinity kills every off-center cross term.
inline CVector char_fn_diag_no_prior(int n) {
    const RVector d = symmetric_index_diag(n);
    CVector m(n);
    for (int i = 0; i < n; ++i) m[i] = (d[i] == 0.0) ? 1.0 : 0.0;
    return m;
}

/**
 * Assembles the expected Fisher information blocks of the cooperation
 * phase plus the destination's listening phase observation.
 *
 * Parameter order: (f_sd, f_rd, h_sd_c, h_rd, h_sd_l). The diagonal M
 * stands in for V_{f_sd}^H V_{f_rd} in every (1,2) cross term and its
 * conjugate in the (2,1) direction; passing the deterministic product
 * diag(V_{f_sd}^H V_{f_rd}) instead reproduces the fixed-frequency FIM,
 * which is what the finite-difference oracle in the tests checks.
 */
inline FimBlocks fim_cooperation(const TrainingSequence& x_sd, const TrainingSequence& x_rd,
                                 const TrainingSequence& x_ell, const ChannelResponse& h_sd,
                                 const ChannelResponse& h_rd, const ChannelResponse& h_sdl,
                                 double noise_var_d, double noise_var_listen, const CVector& m,
                                 const Eigen::Matrix2d& sigma_f_info) {
    const int n_c = x_sd.length();
    const int n_l = x_ell.length();
    const int p = h_sd.length();
    if (x_rd.length() != n_c)
        throw InvalidDimensions("fim_cooperation: cooperation sequences must share a length");
    if (h_rd.length() != p || h_sdl.length() != p)
        throw InvalidDimensions("fim_cooperation: channels must share a tap count");
    if (m.size() != n_c) throw InvalidDimensions("fim_cooperation: M must be N_c long");
    if (!(noise_var_d > 0.0) || !(noise_var_listen > 0.0))
        throw InvalidParameter("fim_cooperation: noise variances must be positive");

    const CMatrix x1 = toeplitz_matrix(x_sd, p);
    const CMatrix x2 = toeplitz_matrix(x_rd, p);
    const CMatrix xl = toeplitz_matrix(x_ell, p);
    const RVector dc = symmetric_index_diag(n_c);
    const RVector dl = symmetric_index_diag(n_l);
    const double pi_sq = std::numbers::pi * std::numbers::pi;
    const cdouble jpi(0.0, std::numbers::pi);

    const CVector s1 = x1 * h_sd.taps();    // noiseless sd_c signal before the ramp
    const CVector s2 = x2 * h_rd.taps();    // noiseless rd signal
    const CVector sl = xl * h_sdl.taps();   // noiseless sd_l signal

    FimBlocks b;
    b.delta_diag[0] = 2.0 * pi_sq / noise_var_d * dc.cwiseProduct(s1.cwiseAbs()).squaredNorm() +
                      2.0 * pi_sq / noise_var_listen * dl.cwiseProduct(sl.cwiseAbs()).squaredNorm();
    b.delta_diag[1] = 2.0 * pi_sq / noise_var_d * dc.cwiseProduct(s2.cwiseAbs()).squaredNorm();
    b.delta_cross = 2.0 * pi_sq / noise_var_d *
                    (s1.conjugate().cwiseProduct(m).cwiseProduct(dc.cwiseProduct(dc).cast<cdouble>()) .cwiseProduct(s2)).sum();

    b.lambda = CMatrix::Zero(2, 3 * p);
    b.lambda.block(0, 0, 1, p) = -jpi / noise_var_d *
        (s1.conjugate().cwiseProduct(dc.cast<cdouble>()).transpose() * x1);
    b.lambda.block(0, p, 1, p) = -jpi / noise_var_d *
        (s1.conjugate().cwiseProduct(m).cwiseProduct(dc.cast<cdouble>()).transpose() * x2);
    b.lambda.block(0, 2 * p, 1, p) = -jpi / noise_var_listen *
        (sl.conjugate().cwiseProduct(dl.cast<cdouble>()).transpose() * xl);
    b.lambda.block(1, 0, 1, p) = -jpi / noise_var_d *
        (s2.conjugate().cwiseProduct(m.conjugate()).cwiseProduct(dc.cast<cdouble>()).transpose() * x1);
    b.lambda.block(1, p, 1, p) = -jpi / noise_var_d *
        (s2.conjugate().cwiseProduct(dc.cast<cdouble>()).transpose() * x2);

    b.xi = CMatrix::Zero(3 * p, 3 * p);
    b.xi.block(0, 0, p, p) = x1.adjoint() * x1 / noise_var_d;
    b.xi.block(p, p, p, p) = x2.adjoint() * x2 / noise_var_d;
    b.xi.block(2 * p, 2 * p, p, p) = xl.adjoint() * xl / noise_var_listen;
    b.xi.block(0, p, p, p) = x1.adjoint() * m.asDiagonal() * x2 / noise_var_d;
    b.xi.block(p, 0, p, p) = b.xi.block(0, p, p, p).adjoint();

    b.prior_fim = sigma_f_info;
    return b;
}

namespace detail {

/// 2x2 frequency information after eliminating the channel parameters:
/// Delta - 2 Re{ Lambda Xi^-1 Lambda^H } plus the prior information.
inline Eigen::Matrix2d schur_frequency_info(const FimBlocks& b, bool worst_case) {
    CMatrix xi_inv;
    try {
        xi_inv = hermitian_inverse(b.xi);
    } catch (const NumericalDegeneracy&) {
        throw SingularDesign("cooperation FIM: channel block Xi is singular");
    }
    const Eigen::Matrix2cd cross = b.lambda * xi_inv * b.lambda.adjoint();
    Eigen::Matrix2d a;
    if (worst_case) {
        const double off = -std::abs(b.delta_cross) - 2.0 * std::abs(cross(0, 1));
        a << b.delta_diag[0] - 2.0 * cross(0, 0).real(), off,
             off, b.delta_diag[1] - 2.0 * cross(1, 1).real();
    } else {
        const double off = b.delta_cross.real() - 2.0 * cross(0, 1).real();
        a << b.delta_diag[0] - 2.0 * cross(0, 0).real(), off,
             off, b.delta_diag[1] - 2.0 * cross(1, 1).real();
    }
    return a + b.prior_fim;
}

inline CrbReport invert_frequency_info(const Eigen::Matrix2d& a, CrbVariant variant) {
    RMatrix inv;
    try {
        inv = symmetric_inverse(a);
    } catch (const NumericalDegeneracy&) {
        throw NumericalDegeneracy("frequency information matrix is not positive definite");
    }
    CrbReport report;
    report.variant = variant;
    report.crb_fsd = inv(0, 0);
    report.crb_frd = inv(1, 1);
    return report;
}

}  // namespace detail

/// Exact cooperation bound: diagonal of
/// (Delta - 2 Re{Lambda Xi^-1 Lambda^H} + F_f)^-1.
inline CrbReport crb_cooperation(const FimBlocks& blocks) {
    return detail::invert_frequency_info(detail::schur_frequency_info(blocks, false),
                                         CrbVariant::CooperationExact);
}

/// Worst case over the unknown global channel phase: the off-diagonal
/// magnitudes are maximized with the sign that lines up with the prior's
/// negative off-diagonal information.
inline CrbReport crb_worstcase(const FimBlocks& blocks) {
    return detail::invert_frequency_info(detail::schur_frequency_info(blocks, true),
                                         CrbVariant::CooperationWorstCase);
}

/// Best bound over constant-modulus training: cross terms zeroed, leaving
/// (diag(Delta) + F_f)^-1. The prior enters additively, consistent with the
/// listening bound and the exact cooperation bound.
inline CrbReport crb_optimal(const Eigen::Vector2d& delta_diag, const Eigen::Matrix2d& prior_fim) {
    Eigen::Matrix2d a = prior_fim;
    a(0, 0) += delta_diag[0];
    a(1, 1) += delta_diag[1];
    return detail::invert_frequency_info(a, CrbVariant::CooperationOptimal);
}

}  // namespace coopsync

#endif  // COOPSYNC_FISHER_HPP
