#ifndef COOPSYNC_SEQUENCES_HPP
#define COOPSYNC_SEQUENCES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "coopsync/fisher.hpp"
#include "coopsync/random.hpp"
#include "coopsync/relay_policy.hpp"
#include "coopsync/types.hpp"

namespace coopsync {

/// Binary (+1/-1) training sequence. `extrapolated` marks Sylvester
/// constructions beyond the length range the design was searched over.
struct BinarySequence {
    std::vector<int> entries;
    bool extrapolated = false;

    TrainingSequence to_training() const {
        CVector s(static_cast<Eigen::Index>(entries.size()));
        for (std::size_t i = 0; i < entries.size(); ++i) s[static_cast<Eigen::Index>(i)] = entries[i];
        return TrainingSequence(std::move(s));
    }

    std::string to_string() const {
        std::string out;
        out.reserve(entries.size());
        for (int e : entries) out.push_back(e > 0 ? '+' : '-');
        return out;
    }

    bool operator==(const BinarySequence& other) const { return entries == other.entries; }
};

/**
 * Relay training sequence built from the last column of a Sylvester
 * matrix: a_1 = [1, -1], a_n = [a_{n-1}, -a_{n-1}], and the length-2^n
 * output is [a_{n-1}; -J a_{n-1}] with J the order-reversing exchange.
 * Lengths beyond 128 are accepted but tagged extrapolated.
 */
inline BinarySequence sylvester_sequence(int n) {
    if (n < 4 || (n & (n - 1)) != 0)
        throw InvalidParameter("sylvester_sequence: length must be a power of two >= 4");
    std::vector<int> a = {1, -1};
    while (static_cast<int>(a.size()) < n / 2) {
        std::vector<int> next = a;
        for (int e : a) next.push_back(-e);
        a.swap(next);
    }
    BinarySequence out;
    out.entries = a;
    for (auto it = a.rbegin(); it != a.rend(); ++it) out.entries.push_back(-*it);
    out.extrapolated = n > 128;
    return out;
}

/**
 * Evaluation context for the sequence search: a flat-fading two-phase
 * scenario with all-ones x_l and x_sd. The criterion for a candidate x_rd
 * is the trace of the worst-case cooperation bound; candidates that drive
 * the bound degenerate score +infinity.
 */
struct SequenceCriterion {
    double snr_sd_db = 0.0;
    double snr_rd_db = 0.0;
    double snr_sr_db = 0.0;
    double sigma_f_sq = 1e-4;
    double gamma = 1.0;

    double evaluate(const BinarySequence& candidate) const {
        const int n = static_cast<int>(candidate.entries.size());
        const TrainingSequence ones = TrainingSequence::all_ones(n);
        const ChannelResponse h_sd = ChannelResponse::flat(std::sqrt(db_to_linear(snr_sd_db)));
        const ChannelResponse h_rd = ChannelResponse::flat(std::sqrt(db_to_linear(snr_rd_db)));
        const ChannelResponse h_sr = ChannelResponse::flat(std::sqrt(db_to_linear(snr_sr_db)));
        const double q = compute_q(ones, h_sr);
        const double k = compute_k(1.0, sigma_f_sq);
        const FreqCovariance rf = freq_covariance(q, k, gamma, sigma_f_sq);
        try {
            const CVector m = char_fn_diag(rf.matrix, n);
            const FimBlocks blocks = fim_cooperation(ones, candidate.to_training(), ones, h_sd,
                                                     h_rd, h_sd, 1.0, 1.0, m, rf.prior_info());
            return crb_worstcase(blocks).total();
        } catch (const SingularDesign&) {
            return kInfinity;
        } catch (const NumericalDegeneracy&) {
            return kInfinity;
        }
    }
};

namespace detail {

/// Candidate order for ties: +1 sorts before -1, matching the enumeration
/// order of the exhaustive search.
inline bool lexicographic_less(const std::vector<int>& a, const std::vector<int>& b) {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        if (a[i] != b[i]) return a[i] > b[i];
    }
    return a.size() < b.size();
}

}  // namespace detail

/**
 * Exhaustive search over all binary sequences of length N <= 16. The
 * criterion is invariant under global negation, so only the half of the
 * space with a leading +1 is enumerated; ties break lexicographically.
 */
inline BinarySequence exhaustive_search(int n, const SequenceCriterion& criterion) {
    if (n < 2) throw InvalidParameter("exhaustive_search: need length >= 2");
    if (n > 16)
        throw InvalidParameter("exhaustive_search: 2^N cost is prohibitive beyond N = 16; "
                               "use randomized_search");
    BinarySequence best;
    double best_value = kInfinity;
    const std::uint64_t half_space = std::uint64_t{1} << (n - 1);
    // counter bit j chooses entry j+1; counting order is lexicographic
    // with +1 ahead of -1, so strict improvement keeps the tie-break rule
    for (std::uint64_t code = 0; code < half_space; ++code) {
        BinarySequence cand;
        cand.entries.resize(n);
        cand.entries[0] = 1;
        for (int j = 1; j < n; ++j) cand.entries[j] = ((code >> (j - 1)) & 1) ? -1 : 1;
        const double value = criterion.evaluate(cand);
        if (value < best_value) {
            best_value = value;
            best = cand;
        }
    }
    return best;
}

/// Best of `iterations` uniform random +-1 sequences plus the Sylvester
/// candidate (when constructible); deterministic given the seed.
inline BinarySequence randomized_search(int n, long iterations, const SequenceCriterion& criterion,
                                        Rng& rng) {
    if (n < 2) throw InvalidParameter("randomized_search: need length >= 2");
    BinarySequence best;
    double best_value = kInfinity;
    const auto consider = [&](const BinarySequence& cand) {
        const double value = criterion.evaluate(cand);
        if (value < best_value ||
            (value == best_value && detail::lexicographic_less(cand.entries, best.entries))) {
            best_value = value;
            best = cand;
        }
    };
    if (n >= 4 && (n & (n - 1)) == 0) consider(sylvester_sequence(n));
    for (long it = 0; it < iterations; ++it) {
        BinarySequence cand;
        cand.entries.resize(n);
        for (int j = 0; j < n; ++j) cand.entries[j] = rng.uniform() < 0.5 ? 1 : -1;
        consider(cand);
    }
    if (best.entries.empty())
        throw InvalidParameter("randomized_search: no candidates (zero iterations and no "
                               "Sylvester construction for this length)");
    return best;
}

}  // namespace coopsync

#endif  // COOPSYNC_SEQUENCES_HPP
