// Command-line front end: simulation, fitting, prediction, cross-validation,
// bound experiments and plot-data emission for functional time series.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "farmakit/forecast.hpp"
#include "farmakit/ingest.hpp"
#include "farmakit/io.hpp"
#include "farmakit/svg.hpp"

using namespace farmakit;

namespace {

std::vector<int> parse_range(const std::string& text) {
    std::size_t dots = text.find("..");
    if (dots == std::string::npos) return {std::stoi(text)};
    int lo = std::stoi(text.substr(0, dots));
    int hi = std::stoi(text.substr(dots + 2));
    if (hi < lo) throw CLI::ValidationError("range", "empty range " + text);
    std::vector<int> out;
    for (int v = lo; v <= hi; ++v) out.push_back(v);
    return out;
}

std::vector<std::pair<int, int>> parse_orders(const std::string& text) {
    std::vector<std::pair<int, int>> out;
    std::size_t pos = 0;
    while ((pos = text.find('(', pos)) != std::string::npos) {
        std::size_t comma = text.find(',', pos);
        std::size_t close = text.find(')', pos);
        if (comma == std::string::npos || close == std::string::npos || comma > close)
            throw CLI::ValidationError("orders", "expected pairs like (1,0),(0,1)");
        int p = std::stoi(text.substr(pos + 1, comma - pos - 1));
        int q = std::stoi(text.substr(comma + 1, close - comma - 1));
        out.emplace_back(p, q);
        pos = close + 1;
    }
    if (out.empty()) throw CLI::ValidationError("orders", "no (p,q) pairs in '" + text + "'");
    return out;
}

struct CenteredSeries {
    FunctionSeries centered;
    Eigen::RowVectorXd mean;
    EigenPtr eig;
};

CenteredSeries center_and_decompose(const FunctionSeries& series) {
    CenteredSeries out;
    out.mean = series.coeffs.colwise().mean();
    out.centered = {series.coeffs.rowwise() - out.mean, series.basis, series.start};
    out.eig = std::make_shared<EigenSystem>(eigendecompose(estimate_covariance(out.centered)));
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"functional ARMA modeling, prediction and cross-validation"};
    app.require_subcommand(1);

    // simulate
    std::string model_path, out_path, series_path;
    int n = 200, burn_in = 200;
    std::uint64_t seed = 1;
    CLI::App* sim = app.add_subcommand("simulate", "simulate a model to a coefficient series");
    sim->add_option("--model", model_path, "model file")->required();
    sim->add_option("--n", n, "number of samples")->required();
    sim->add_option("--seed", seed, "random seed");
    sim->add_option("--burn-in", burn_in, "discarded warm-up steps");
    sim->add_option("--out", out_path, "output series CSV")->required();

    // fit
    int d = 4, p = 1, q = 0, horizon = 1;
    CLI::App* fit = app.add_subcommand("fit", "fit a score-space model");
    fit->add_option("--series", series_path, "input series CSV")->required();
    fit->add_option("--d", d, "number of principal components")->required();
    fit->add_option("--p", p, "AR order")->required();
    fit->add_option("--q", q, "MA order")->required();
    fit->add_option("--out", out_path, "output model file")->required();

    // predict
    CLI::App* predict = app.add_subcommand("predict", "h-step functional prediction");
    predict->set_help_flag("--help", "print help");  // frees -h for the horizon
    predict->add_option("--series", series_path, "input series CSV")->required();
    predict->add_option("--d", d, "number of principal components")->required();
    predict->add_option("--p", p, "AR order")->required();
    predict->add_option("--q", q, "MA order")->required();
    predict->add_option("--h", horizon, "prediction horizon");
    predict->add_option("--out", out_path, "output forecast CSV")->required();

    // cv
    std::string d_range = "2..6";
    std::string orders = "(1,0),(2,0),(0,1),(0,2),(1,1),(2,1),(1,2)";
    int holdout = 10;
    double cpv = 0.8;
    bool pointwise_mae = false;
    CLI::App* cv = app.add_subcommand("cv", "rolling cross-validation over (d,p,q)");
    cv->set_help_flag("--help", "print help");  // frees -h for the horizon
    cv->add_option("--series", series_path, "input series CSV")->required();
    cv->add_option("--d", d_range, "dimension grid, e.g. 2..6 or 4; 'cpv' to use --cpv");
    cv->add_option("--orders", orders, "order grid, e.g. (1,0),(0,1)");
    cv->add_option("--holdout", holdout, "final observations held out");
    cv->add_option("--h", horizon, "prediction horizon");
    cv->add_option("--cpv", cpv, "variance threshold when --d cpv");
    cv->add_flag("--pointwise-mae", pointwise_mae, "grid-average MAE instead of quadrature");
    cv->add_option("--out", out_path, "output table CSV")->required();

    // bounds
    std::string bounds_d_range;
    int reps = 500, bounds_n = 50;
    CLI::App* bounds = app.add_subcommand("bounds", "prediction-error bound experiment");
    bounds->add_option("--model", model_path, "first-order AR model file")->required();
    bounds->add_option("--d-range", bounds_d_range, "dimension range, default 1..K");
    bounds->add_option("--reps", reps, "Monte Carlo replications");
    bounds->add_option("--n", bounds_n, "training samples per replication");
    bounds->add_option("--seed", seed, "random seed");
    bounds->add_option("--out", out_path, "output bounds CSV")->required();

    // plotdata
    std::string in_path, in2_path, kind;
    int plot_d = 4;
    CLI::App* plot = app.add_subcommand("plotdata", "emit a static SVG plot");
    plot->add_option("--in", in_path, "input file")->required();
    plot->add_option("--in2", in2_path, "second input (forecast overlay)");
    plot->add_option("--kind", kind, "eigenfunctions|forecast|cv")->required();
    plot->add_option("--d", plot_d, "eigenfunction count for kind=eigenfunctions");
    plot->add_option("--out", out_path, "output SVG")->required();

    // prep
    std::string data_path;
    int basis_k = 31, grid_size = 1440;
    bool weekdays_only = false, keep_weekday_mean = false;
    CLI::App* prep = app.add_subcommand("prep", "ingest raw measurements into a series");
    prep->add_option("--data", data_path, "raw CSV (date,minute,value[,lane,count])")->required();
    prep->add_option("--K", basis_k, "basis size");
    prep->add_option("--grid", grid_size, "measurements per day");
    prep->add_flag("--weekdays-only", weekdays_only, "drop Saturdays and Sundays");
    prep->add_flag("--keep-weekday-mean", keep_weekday_mean, "skip weekday mean subtraction");
    prep->add_option("--out", out_path, "output series CSV")->required();

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed()) {
        FarmaModel model = read_model(model_path);
        SimulationResult result = simulate(model, n, burn_in, seed);
        write_series_csv(result.series, out_path);
        std::cout << "wrote " << result.series.length() << " samples to " << out_path << "\n";
        return 0;
    }

    if (fit->parsed()) {
        FunctionSeries series = read_series_csv(series_path);
        CenteredSeries cs = center_and_decompose(series);
        ScoreSeries scores = compute_scores(cs.centered, cs.eig, d);
        VarmaModel model = fit_varma(scores, p, q);
        write_varma(model, out_path);
        std::cout << "fitted (p,q)=(" << p << ',' << q << ") on d=" << d
                  << " scores; spectral radius " << model.spectral_radius
                  << (model.stationary ? "" : " (not stationary)") << "\n";
        return 0;
    }

    if (predict->parsed()) {
        FunctionSeries series = read_series_csv(series_path);
        CenteredSeries cs = center_and_decompose(series);
        FunctionSample hat = fpca_predict(cs.centered, cs.eig, d, p, q, horizon);
        FunctionSeries forecast;
        forecast.basis = series.basis;
        forecast.start = series.start + series.length() + horizon - 1;
        forecast.coeffs = (hat.coeffs.transpose() + cs.mean).eval();
        write_series_csv(forecast, out_path);
        std::cout << "wrote 1 forecast (day " << forecast.start << ") to " << out_path << "\n";
        return 0;
    }

    if (cv->parsed()) {
        FunctionSeries series = read_series_csv(series_path);
        ForecastConfig config;
        if (d_range != "cpv") config.d_grid = parse_range(d_range);
        config.order_grid = parse_orders(orders);
        config.horizon = horizon;
        config.holdout = holdout;
        config.cpv_threshold = cpv;
        config.pointwise_mae = pointwise_mae;
        ErrorTable table = rolling_cv(series, config);
        write_error_table(table, out_path);
        if (const ErrorRow* best = table.best())
            std::cout << "best cell: d=" << best->d << " (p,q)=(" << best->p << ',' << best->q
                      << ") rmse=" << best->rmse << " mae=" << best->mae << "\n";
        else
            std::cout << "all cells failed\n";
        return 0;
    }

    if (bounds->parsed()) {
        FarmaModel model = read_model(model_path);
        std::vector<int> grid = bounds_d_range.empty()
                                    ? parse_range("1.." + std::to_string(model.dim()))
                                    : parse_range(bounds_d_range);
        std::vector<BoundReport> reports = bound_experiment(model, grid, bounds_n, reps, seed);
        write_bound_reports(reports, out_path);
        int violations = 0;
        for (const BoundReport& r : reports)
            if (r.empirical_mse > r.sigma2 + r.gamma + 3 * r.std_error) ++violations;
        std::cout << "wrote " << reports.size() << " rows to " << out_path << "; "
                  << violations << " bound violations beyond 3 standard errors\n";
        return 0;
    }

    if (plot->parsed()) {
        if (kind == "cv") {
            ErrorTable table = read_error_table(in_path);
            std::map<std::pair<int, int>, SvgSeries> lines;
            const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                     "#ff7f0e", "#8c564b", "#17becf"};
            for (const ErrorRow& row : table.rows) {
                SvgSeries& s = lines[{row.p, row.q}];
                s.x.push_back(row.d);
                s.y.push_back(row.rmse);
                s.label = "(" + std::to_string(row.p) + "," + std::to_string(row.q) + ")";
            }
            std::vector<SvgSeries> series;
            int c = 0;
            for (auto& [key, s] : lines) {
                s.color = palette[c++ % 7];
                series.push_back(std::move(s));
            }
            write_line_plot(out_path, series, "1-step prediction RMSE", "d", "RMSE");
        } else if (kind == "eigenfunctions") {
            FunctionSeries series = read_series_csv(in_path);
            CenteredSeries cs = center_and_decompose(series);
            std::vector<SvgSeries> lines;
            const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
            int count = std::min(plot_d, cs.eig->count());
            for (int j = 0; j < count; ++j) {
                FunctionSample f = cs.eig->eigenfunction(j);
                SvgSeries line;
                for (int i = 0; i <= 400; ++i) {
                    double t = i / 400.0;
                    line.x.push_back(t);
                    line.y.push_back(f.eval(t));
                }
                line.color = palette[j % 5];
                line.label = "fpc " + std::to_string(j + 1);
                lines.push_back(std::move(line));
            }
            write_line_plot(out_path, lines, "leading eigenfunctions", "t", "value");
        } else if (kind == "forecast") {
            std::vector<SvgSeries> lines;
            auto add_series = [&lines](const FunctionSeries& fs, const std::string& color,
                                       const std::string& prefix) {
                for (int i = 0; i < fs.length(); ++i) {
                    FunctionSample f = fs.sample(i);
                    SvgSeries line;
                    for (int g = 0; g <= 400; ++g) {
                        double t = g / 400.0;
                        line.x.push_back(fs.start + i + t);
                        line.y.push_back(f.eval(t));
                    }
                    line.color = color;
                    if (i == 0) line.label = prefix;
                    lines.push_back(std::move(line));
                }
            };
            add_series(read_series_csv(in_path), "#333333", "observed");
            if (!in2_path.empty()) add_series(read_series_csv(in2_path), "#d62728", "forecast");
            write_line_plot(out_path, lines, "functional series", "day", "value");
        } else {
            throw CLI::ValidationError("kind", "expected eigenfunctions|forecast|cv");
        }
        std::cout << "wrote " << out_path << "\n";
        return 0;
    }

    if (prep->parsed()) {
        IngestOptions options;
        options.grid_size = grid_size;
        IngestReport ingest_report;
        std::vector<RawDayRecord> records = ingest_csv(data_path, options, &ingest_report);
        BasisPtr basis = BasisSpec::fourier(basis_k, grid_size);
        PreprocessResult result =
            preprocess(records, basis, !keep_weekday_mean, weekdays_only);
        write_series_csv(result.series, out_path);
        std::cout << "kept " << result.report.kept << " days (" << ingest_report.days_dropped
                  << " dropped for gaps, " << result.report.dropped << " weekend), interpolated "
                  << result.report.interpolated << " values; variance drift ratio "
                  << result.report.drift_ratio << "\n";
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
