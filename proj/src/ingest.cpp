#include "farmakit/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace farmakit {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date.
long days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

long parse_date(const std::string& date, int line_no) {
    int y = 0;
    unsigned m = 0, d = 0;
    if (std::sscanf(date.c_str(), "%d-%u-%u", &y, &m, &d) != 3 || m < 1 || m > 12 || d < 1 ||
        d > 31)
        throw std::invalid_argument("line " + std::to_string(line_no) + ": bad date '" + date +
                                    "'");
    return days_from_civil(y, m, d);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_value(const std::string& field, int line_no) {
    char* end = nullptr;
    double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0' || !std::isfinite(v))
        throw std::invalid_argument("line " + std::to_string(line_no) + ": bad number '" + field +
                                    "'");
    return v;
}

}  // namespace

int RawDayRecord::weekday() const {
    long days = parse_date(date, 0);
    return static_cast<int>(((days % 7) + 10) % 7);  // day 0 was a Thursday
}

std::vector<RawDayRecord> ingest_csv(const std::string& path, const IngestOptions& options,
                                     IngestReport* report) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::string line;
    int line_no = 0;
    bool have_header = false;
    bool with_lanes = false;

    struct Accum {
        Eigen::VectorXd weighted;
        Eigen::VectorXd weight;
    };
    std::map<std::string, Accum> days;

    while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = trim(line);
        if (stripped.empty()) continue;
        std::vector<std::string> fields = split_csv(stripped);
        if (!have_header) {
            if (fields.size() < 3 || trim(fields[0]) != "date" || trim(fields[1]) != "minute" ||
                trim(fields[2]) != "value")
                throw std::invalid_argument("line " + std::to_string(line_no) +
                                            ": expected header date,minute,value");
            with_lanes = fields.size() >= 5;
            have_header = true;
            continue;
        }
        if (fields.size() < 3)
            throw std::invalid_argument("line " + std::to_string(line_no) + ": too few fields");
        const std::string date = trim(fields[0]);
        parse_date(date, line_no);
        const std::string minute_field = trim(fields[1]);
        char* end = nullptr;
        long minute = std::strtol(minute_field.c_str(), &end, 10);
        if (minute_field.empty() || end == minute_field.c_str() || *end != '\0')
            throw std::invalid_argument("line " + std::to_string(line_no) + ": bad minute '" +
                                        minute_field + "'");
        if (minute < 0 || minute >= options.grid_size)
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": minute out of range 0.." +
                                        std::to_string(options.grid_size - 1));
        Accum& acc = days[date];
        if (acc.weighted.size() == 0) {
            acc.weighted = Eigen::VectorXd::Zero(options.grid_size);
            acc.weight = Eigen::VectorXd::Zero(options.grid_size);
        }
        std::string value_field = trim(fields[2]);
        if (value_field.empty()) continue;  // missing measurement
        double value = parse_value(value_field, line_no);
        double weight = 1.0;
        if (with_lanes && fields.size() >= 5) {
            std::string count_field = trim(fields[4]);
            if (!count_field.empty()) weight = parse_value(count_field, line_no);
            if (weight < 0)
                throw std::invalid_argument("line " + std::to_string(line_no) +
                                            ": negative vehicle count");
        }
        acc.weighted[minute] += weight * value;
        acc.weight[minute] += weight;
    }
    if (!have_header) throw std::invalid_argument(path + ": empty file");
    if (days.empty()) throw std::invalid_argument(path + ": no data rows");

    IngestReport local;
    std::vector<RawDayRecord> out;
    for (auto& [date, acc] : days) {
        RawDayRecord rec;
        rec.date = date;
        rec.values = Eigen::VectorXd::Zero(options.grid_size);
        rec.missing.assign(options.grid_size, false);
        int missing_count = 0;
        for (int t = 0; t < options.grid_size; ++t) {
            if (acc.weight[t] > 0.0) {
                rec.values[t] = acc.weighted[t] / acc.weight[t];
            } else {
                rec.missing[t] = true;
                ++missing_count;
            }
        }
        if (missing_count > options.max_missing_fraction * options.grid_size) {
            ++local.days_dropped;
            local.dropped_dates.push_back(date);
            continue;
        }
        // Linear interpolation of interior gaps, flat extension at the edges.
        int prev = -1;
        for (int t = 0; t < options.grid_size; ++t) {
            if (rec.missing[t]) continue;
            if (prev < 0) {
                for (int s = 0; s < t; ++s) rec.values[s] = rec.values[t];
            } else if (prev != t - 1) {
                double left = rec.values[prev];
                double right = rec.values[t];
                for (int s = prev + 1; s < t; ++s)
                    rec.values[s] =
                        left + (right - left) * static_cast<double>(s - prev) / (t - prev);
            }
            prev = t;
        }
        if (prev < 0) {  // cannot happen past the drop rule, kept as a guard
            ++local.days_dropped;
            local.dropped_dates.push_back(date);
            continue;
        }
        for (int s = prev + 1; s < options.grid_size; ++s) rec.values[s] = rec.values[prev];
        local.interpolated += missing_count;
        ++local.days_kept;
        out.push_back(std::move(rec));
    }
    if (report != nullptr) *report = local;
    return out;
}

void write_records_csv(const std::vector<RawDayRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "date,minute,value\n";
    char buf[40];
    for (const RawDayRecord& rec : records) {
        for (Eigen::Index t = 0; t < rec.values.size(); ++t) {
            out << rec.date << ',' << t << ',';
            if (!rec.missing[static_cast<std::size_t>(t)]) {
                std::snprintf(buf, sizeof buf, "%.17g", rec.values[t]);
                out << buf;
            }
            out << '\n';
        }
    }
}

PreprocessResult preprocess(const std::vector<RawDayRecord>& records, const BasisPtr& basis,
                            bool subtract_weekday_mean, bool weekdays_only) {
    PreprocessReport report;
    std::vector<const RawDayRecord*> kept;
    for (const RawDayRecord& rec : records) {
        if (weekdays_only && rec.weekday() >= 5) {
            ++report.dropped;
            continue;
        }
        kept.push_back(&rec);
    }
    report.kept = static_cast<int>(kept.size());
    if (kept.size() < 2) throw std::invalid_argument("preprocess: fewer than 2 usable days");

    const Eigen::Index grid = static_cast<Eigen::Index>(basis->grid().size());
    for (const RawDayRecord* rec : kept) {
        if (rec->values.size() != grid)
            throw std::invalid_argument("preprocess: day " + rec->date +
                                        " does not match the basis grid");
        for (bool m : rec->missing) report.interpolated += m ? 1 : 0;
    }

    // Per-weekday empirical means on the raw grid.
    std::map<int, Eigen::VectorXd> sums;
    std::map<int, int> counts;
    for (const RawDayRecord* rec : kept) {
        int w = rec->weekday();
        if (sums.find(w) == sums.end()) sums[w] = Eigen::VectorXd::Zero(grid);
        sums[w] += rec->values;
        counts[w] += 1;
    }
    for (auto& [w, sum] : sums) report.weekday_means[w] = sum / counts[w];

    Eigen::MatrixXd raw(kept.size(), grid);
    for (std::size_t i = 0; i < kept.size(); ++i) {
        Eigen::VectorXd row = kept[i]->values;
        if (subtract_weekday_mean) row -= report.weekday_means[kept[i]->weekday()];
        raw.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }

    FunctionSeries series = smooth_series(raw, basis, 0);

    // Descriptive variance screen: mean squared norm over four windows.
    const int windows = std::min<int>(4, series.length());
    Eigen::RowVectorXd mean = series.coeffs.colwise().mean();
    for (int w = 0; w < windows; ++w) {
        int lo = w * series.length() / windows;
        int hi = (w + 1) * series.length() / windows;
        double acc = 0.0;
        for (int i = lo; i < hi; ++i) acc += (series.coeffs.row(i) - mean).squaredNorm();
        report.window_mean_sq.push_back(acc / std::max(1, hi - lo));
    }
    double lo = *std::min_element(report.window_mean_sq.begin(), report.window_mean_sq.end());
    double hi = *std::max_element(report.window_mean_sq.begin(), report.window_mean_sq.end());
    report.drift_ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();

    return {std::move(series), std::move(report)};
}

}  // namespace farmakit
