#pragma once

#include <string>
#include <vector>

#include "farmakit/farma.hpp"
#include "farmakit/forecast.hpp"
#include "farmakit/varma.hpp"

namespace farmakit {

/// Coefficient series file: a comment line carrying the basis kind, size and
/// grid length, a `day,coeff_index,value` header, then one row per
/// coefficient. Values round-trip bit-exactly.
void write_series_csv(const FunctionSeries& series, const std::string& path);
FunctionSeries read_series_csv(const std::string& path);

/// Key-value model files. Matrices are written row-major in brackets.
void write_model(const FarmaModel& model, const std::string& path);
FarmaModel read_model(const std::string& path);

void write_varma(const VarmaModel& model, const std::string& path);
VarmaModel read_varma(const std::string& path);

/// Cross-validation table: `d,p,q,rmse,mae` rows.
void write_error_table(const ErrorTable& table, const std::string& path);
ErrorTable read_error_table(const std::string& path);

/// Bound experiment rows: `d,sigma2,gamma,empirical_mse`.
void write_bound_reports(const std::vector<BoundReport>& reports, const std::string& path);
std::vector<BoundReport> read_bound_reports(const std::string& path);

}  // namespace farmakit
