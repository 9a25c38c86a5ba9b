#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

#include "farmakit/basis.hpp"

namespace farmakit {

/// One calendar day of per-minute measurements on a fixed grid, with the
/// positions that were missing in the raw file (and later interpolated).
struct RawDayRecord {
    std::string date;  // YYYY-MM-DD
    Eigen::VectorXd values;
    std::vector<bool> missing;

    /// 0 = Monday .. 6 = Sunday.
    int weekday() const;
};

struct IngestOptions {
    int grid_size = 1440;
    double max_missing_fraction = 0.2;
};

struct IngestReport {
    int days_kept = 0;
    int days_dropped = 0;
    long interpolated = 0;
    std::vector<std::string> dropped_dates;
};

/// Read a measurement CSV with header `date,minute,value` and optional
/// `lane,count` columns (count-weighted averaging across lanes). Days with
/// too many missing minutes are dropped; remaining gaps are linearly
/// interpolated, with flat extension at the edges. Records come back sorted
/// by date.
std::vector<RawDayRecord> ingest_csv(const std::string& path, const IngestOptions& options = {},
                                     IngestReport* report = nullptr);

/// Write records back in the 3-column layout, blank values at the positions
/// that were originally missing. Re-ingesting reproduces the records exactly.
void write_records_csv(const std::vector<RawDayRecord>& records, const std::string& path);

struct PreprocessReport {
    int kept = 0;
    int dropped = 0;  // removed as weekend days
    long interpolated = 0;
    std::map<int, Eigen::VectorXd> weekday_means;
    std::vector<double> window_mean_sq;  // variance screen across time windows
    double drift_ratio = 1.0;
};

struct PreprocessResult {
    FunctionSeries series;
    PreprocessReport report;
};

/// Optional weekend removal and per-weekday mean subtraction on the raw
/// grid, then least-squares smoothing onto the basis. The report carries the
/// weekday mean curves and a descriptive variance-drift screen.
PreprocessResult preprocess(const std::vector<RawDayRecord>& records, const BasisPtr& basis,
                            bool subtract_weekday_mean, bool weekdays_only);

}  // namespace farmakit
