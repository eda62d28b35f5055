#ifndef COOPSYNC_CSV_HPP
#define COOPSYNC_CSV_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "coopsync/montecarlo.hpp"
#include "coopsync/version.hpp"

namespace coopsync {

namespace detail {

inline std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17e", v);
    return buf;
}

}  // namespace detail

/// Reproducibility breadcrumbs written ahead of the header row.
inline void write_csv_preamble(std::ostream& os, std::uint64_t scenario_hash_value,
                               std::uint64_t seed) {
    char hash_buf[32];
    std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                  static_cast<unsigned long long>(scenario_hash_value));
    os << "# coopsync " << kVersion << "\n";
    os << "# scenario-hash: " << hash_buf << "\n";
    os << "# seed: " << seed << "\n";
}

/**
 * One row per (sweep value, estimator), ordered by sweep value first and
 * estimator name second; full-precision scientific notation throughout so
 * identical inputs produce byte-identical files.
 */
inline void emit_csv(std::ostream& os, const std::vector<MseCurve>& curves) {
    os << "sweep_param,sweep_value,estimator,mse_fsd,mse_frd,mse_total,"
          "crb_fsd,crb_frd,crb_total,bias_fsd,bias_frd,trials,failures\n";
    if (curves.empty()) return;

    struct Row {
        double sweep_value;
        std::string estimator;
        const MsePoint* point;
        const std::string* sweep_key;
    };
    std::vector<Row> rows;
    for (const auto& curve : curves)
        for (const auto& pt : curve.points)
            rows.push_back({pt.sweep_value, curve.estimator, &pt, &curve.sweep_key});
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
        return a.estimator < b.estimator;
    });

    for (const Row& row : rows) {
        const MsePoint& p = *row.point;
        os << *row.sweep_key << "," << detail::csv_number(row.sweep_value) << ","
           << row.estimator << "," << detail::csv_number(p.mse_fsd) << ","
           << detail::csv_number(p.mse_frd) << "," << detail::csv_number(p.mse_total()) << ","
           << detail::csv_number(p.crb_fsd) << "," << detail::csv_number(p.crb_frd) << ","
           << detail::csv_number(p.crb_total()) << "," << detail::csv_number(p.bias_fsd) << ","
           << detail::csv_number(p.bias_frd) << "," << p.trials << "," << p.failures << "\n";
    }
}

}  // namespace coopsync

#endif  // COOPSYNC_CSV_HPP
