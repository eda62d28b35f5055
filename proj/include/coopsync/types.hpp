#ifndef COOPSYNC_TYPES_HPP
#define COOPSYNC_TYPES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>

#include "coopsync/errors.hpp"

namespace coopsync {

using cdouble = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/**
 * Known constant-modulus preamble. Every sample must have unit magnitude;
 * the estimators and the sequence-design criterion both rely on it.
 */
class TrainingSequence {
  public:
    explicit TrainingSequence(CVector samples) : samples_(std::move(samples)) {
        if (samples_.size() < 2)
            throw InvalidDimensions("TrainingSequence: need at least 2 samples");
        for (Eigen::Index n = 0; n < samples_.size(); ++n) {
            if (std::abs(std::abs(samples_[n]) - 1.0) > 1e-12)
                throw InvalidParameter("TrainingSequence: samples must be unit modulus");
        }
    }

    static TrainingSequence all_ones(int n) { return TrainingSequence(CVector::Ones(n)); }

    const CVector& samples() const { return samples_; }
    int length() const { return static_cast<int>(samples_.size()); }

  private:
    CVector samples_;
};

/// Sample-spaced channel impulse response, P taps per link. An all-zero
/// response is legal and models an absent signal.
class ChannelResponse {
  public:
    explicit ChannelResponse(CVector taps) : taps_(std::move(taps)) {
        if (taps_.size() < 1) throw InvalidDimensions("ChannelResponse: need at least 1 tap");
    }

    static ChannelResponse flat(cdouble gain) {
        CVector t(1);
        t[0] = gain;
        return ChannelResponse(std::move(t));
    }

    const CVector& taps() const { return taps_; }
    int length() const { return static_cast<int>(taps_.size()); }

  private:
    CVector taps_;
};

/// Frequency offset normalized by the sample rate, cycles/sample.
/// Must stay inside the Nyquist-unambiguous range (-0.5, 0.5).
class NormalizedFrequency {
  public:
    NormalizedFrequency() : value_(0.0) {}
    explicit NormalizedFrequency(double cycles_per_sample) : value_(cycles_per_sample) {
        if (!std::isfinite(value_) || std::abs(value_) >= 0.5)
            throw InvalidParameter("NormalizedFrequency: |f| must be finite and < 0.5");
    }

    double value() const { return value_; }

  private:
    double value_;
};

/**
 * Oscillator prior. Each node's operating frequency is f_o + q with
 * q ~ N(0, sigma_f_sq); a link offset (difference of two node draws) then
 * has variance 2*sigma_f_sq, and links sharing a node are correlated with
 * covariance of magnitude sigma_f_sq. sigma_f_sq = +infinity is the
 * no-prior sentinel used by the bounds and estimators, never sampled.
 */
class OffsetPrior {
  public:
    explicit OffsetPrior(double sigma_f_sq) : sigma_f_sq_(sigma_f_sq) {
        if (std::isnan(sigma_f_sq_) || sigma_f_sq_ < 0.0)
            throw InvalidParameter("OffsetPrior: sigma_f_sq must be >= 0 or +inf");
    }

    static OffsetPrior none() { return OffsetPrior(kInfinity); }

    double sigma_f_sq() const { return sigma_f_sq_; }
    double link_variance() const { return 2.0 * sigma_f_sq_; }
    bool informative() const { return std::isfinite(sigma_f_sq_); }

  private:
    double sigma_f_sq_;
};

/**
 * Per-node oscillator deviations (cycles/sample).
 *
 * Link convention used throughout: a link offset is the receiver's
 * oscillator deviation minus the transmitter's,
 *
 *   f_sd = q_d - q_s,   f_sr = q_r - q_s,   f_rd (unadjusted) = q_d - q_r,
 *
 * so that the relay adjustment rule f_tx = f_r - gamma * f_sr_hat yields
 * f_rd = (q_d - q_r) + gamma * f_sr_hat. With this sign choice the link
 * covariances match the analytic frequency covariance used by the bounds
 * (checked by Monte Carlo in the model tests).
 */
struct NodeOffsets {
    double q_s = 0.0;
    double q_r = 0.0;
    double q_d = 0.0;

    double f_sd() const { return q_d - q_s; }
    double f_sr() const { return q_r - q_s; }
    double f_rd_unadjusted() const { return q_d - q_r; }
};

}  // namespace coopsync

#endif  // COOPSYNC_TYPES_HPP
