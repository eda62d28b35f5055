#ifndef COOPSYNC_MODEL_HPP
#define COOPSYNC_MODEL_HPP

#include <cmath>
#include <complex>
#include <numbers>

#include "coopsync/errors.hpp"
#include "coopsync/random.hpp"
#include "coopsync/types.hpp"

namespace coopsync {

/**
 * Signal model for the two phases of the relay frame.
 *
 * A received preamble is y = V_f X h + w where X is the Toeplitz
 * convolution matrix of the training sequence, h the channel taps, V_f a
 * diagonal phase ramp and w circularly symmetric complex Gaussian noise.
 *
 * Phase ramp convention: V_f uses the centered exponent
 *   [V_f]_nn = exp(j*pi*(2n - 1 - N) * f),  n = 1..N,
 * which differs from exp(j*2*pi*f*n) only by a global phase that the least
 * squares channel estimate absorbs. With D = diag(2n - 1 - N) the exact
 * derivative identity dV/df = j*pi*D*V then holds, so the Fisher
 * information code and the synthesis code share the same matrices.
 */

/// Toeplitz convolution matrix: entry (i, k) = x[i - k], zero outside
/// [0, N-1]. Column k is the training sequence delayed by k samples.
inline CMatrix toeplitz_matrix(const TrainingSequence& x, int taps) {
    const int n = x.length();
    if (taps < 1) throw InvalidDimensions("toeplitz_matrix: taps must be >= 1");
    if (taps > n) throw InvalidDimensions("toeplitz_matrix: taps must not exceed sequence length");
    CMatrix out = CMatrix::Zero(n, taps);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k <= i && k < taps; ++k) out(i, k) = x.samples()[i - k];
    return out;
}

/// Centered index diagonal D with entries 2n - 1 - N for n = 1..N.
/// The entries always sum to zero.
inline RVector symmetric_index_diag(int n) {
    if (n < 1) throw InvalidDimensions("symmetric_index_diag: length must be >= 1");
    RVector d(n);
    for (int i = 0; i < n; ++i) d[i] = static_cast<double>(2 * (i + 1) - 1 - n);
    return d;
}

/// Diagonal of the unitary phase ramp V_f under the centered convention.
inline CVector phase_ramp_diag(double f, int n) {
    const RVector d = symmetric_index_diag(n);
    CVector v(n);
    for (int i = 0; i < n; ++i) {
        const double phase = std::numbers::pi * d[i] * f;
        v[i] = cdouble(std::cos(phase), std::sin(phase));
    }
    return v;
}

inline CMatrix phase_ramp(double f, int n) {
    return CMatrix(phase_ramp_diag(f, n).asDiagonal());
}

/// Draw a circularly symmetric complex Gaussian vector with per-sample
/// variance noise_var (real and imaginary parts get noise_var/2 each).
inline CVector complex_noise(int n, double noise_var, Rng& rng) {
    CVector w(n);
    for (int i = 0; i < n; ++i) w[i] = rng.complex_normal(noise_var);
    return w;
}

/// Listening phase synthesis: y = V_f X h + w.
inline CVector synth_listening(const TrainingSequence& x, const ChannelResponse& h,
                               NormalizedFrequency f, double noise_var, Rng& rng) {
    if (noise_var < 0.0 || !std::isfinite(noise_var))
        throw InvalidParameter("synth_listening: noise_var must be finite and >= 0");
    const CMatrix xm = toeplitz_matrix(x, h.length());
    CVector y = phase_ramp_diag(f.value(), x.length()).cwiseProduct(xm * h.taps());
    if (noise_var > 0.0) y += complex_noise(x.length(), noise_var, rng);
    return y;
}

/// Cooperation phase synthesis: superposition of the ramped source and
/// relay preambles plus destination noise.
inline CVector synth_cooperation(const TrainingSequence& x_sd, const TrainingSequence& x_rd,
                                 const ChannelResponse& h_sd, const ChannelResponse& h_rd,
                                 NormalizedFrequency f_sd, NormalizedFrequency f_rd,
                                 double noise_var, Rng& rng) {
    if (x_sd.length() != x_rd.length())
        throw InvalidDimensions("synth_cooperation: training sequences must share a length");
    if (h_sd.length() != h_rd.length())
        throw InvalidDimensions("synth_cooperation: channels must share a tap count");
    if (noise_var < 0.0 || !std::isfinite(noise_var))
        throw InvalidParameter("synth_cooperation: noise_var must be finite and >= 0");
    const int n = x_sd.length();
    CVector y =
        phase_ramp_diag(f_sd.value(), n).cwiseProduct(toeplitz_matrix(x_sd, h_sd.length()) * h_sd.taps()) +
        phase_ramp_diag(f_rd.value(), n).cwiseProduct(toeplitz_matrix(x_rd, h_rd.length()) * h_rd.taps());
    if (noise_var > 0.0) y += complex_noise(n, noise_var, rng);
    return y;
}

/// Draw the three node oscillator deviations i.i.d. N(0, sigma_f_sq).
inline NodeOffsets draw_offsets(const OffsetPrior& prior, Rng& rng) {
    if (!prior.informative())
        throw UnsupportedDraw("draw_offsets: the flat prior is a limit, not a distribution");
    const double sigma = std::sqrt(prior.sigma_f_sq());
    NodeOffsets q;
    q.q_s = sigma * rng.normal();
    q.q_r = sigma * rng.normal();
    q.q_d = sigma * rng.normal();
    return q;
}

}  // namespace coopsync

#endif  // COOPSYNC_MODEL_HPP
