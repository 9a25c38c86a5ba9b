// Integration coverage of the command-line surface: every subcommand runs,
// outputs parse back, reruns with the same seed are byte-identical, and
// failures exit nonzero. The binary path arrives as argv[1].

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/stat.h>

#include "farmakit/farma.hpp"
#include "farmakit/io.hpp"

using namespace farmakit;

namespace {

std::string g_cli;
std::string g_dir = "/tmp/farmakit_cli_test";
int g_failures = 0;

#define EXPECT(cond, what)                                      \
    do {                                                        \
        if (!(cond)) {                                          \
            std::printf("FAIL %s (line %d)\n", what, __LINE__); \
            ++g_failures;                                       \
        }                                                       \
    } while (0)

bool run(const std::string& args) {
    return std::system((g_cli + " " + args + " > /dev/null 2>&1").c_str()) == 0;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string path(const std::string& name) { return g_dir + "/" + name; }

void write_model_fixture() {
    const int k = 7;
    BasisPtr basis = BasisSpec::fourier(k, 60);
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(k, k);
    Eigen::MatrixXd ce = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        phi(i, i) = 0.6 * std::pow(0.85, i);
        ce(i, i) = std::pow(0.7, i);
    }
    FarmaModel model({make_operator(phi, basis)}, {}, make_operator(ce, basis));
    write_model(model, path("model.txt"));
}

void write_raw_fixture() {
    // 3 weeks of 12-minute days starting Monday 2014-01-06, with one gap
    std::ofstream out(path("raw.csv"));
    out << "date,minute,value\n";
    for (int day = 0; day < 21; ++day) {
        char date[16];
        std::snprintf(date, sizeof date, "2014-01-%02d", 6 + day);
        for (int m = 0; m < 12; ++m) {
            out << date << ',' << m << ',';
            if (day != 2 || m != 5)
                out << 80.0 + 5.0 * (day % 7) + 0.5 * m * ((day % 3) - 1);
            out << '\n';
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::printf("usage: test_cli <farmakit binary>\n");
        return 1;
    }
    g_cli = argv[1];
    mkdir(g_dir.c_str(), 0755);
    write_model_fixture();
    write_raw_fixture();

    // simulate: runs, parses back, deterministic under the seed
    EXPECT(run("simulate --model " + path("model.txt") + " --n 90 --seed 7 --out " +
               path("series.csv")),
           "simulate exits 0");
    FunctionSeries series = read_series_csv(path("series.csv"));
    EXPECT(series.length() == 90, "simulate wrote 90 samples");
    EXPECT(run("simulate --model " + path("model.txt") + " --n 90 --seed 7 --out " +
               path("series2.csv")),
           "second simulate exits 0");
    EXPECT(slurp(path("series.csv")) == slurp(path("series2.csv")),
           "same seed gives identical bytes");
    EXPECT(run("simulate --model " + path("model.txt") + " --n 90 --seed 8 --out " +
               path("series3.csv")),
           "third simulate exits 0");
    EXPECT(slurp(path("series.csv")) != slurp(path("series3.csv")),
           "different seed gives a different draw");

    // fit: produces a readable stationary score model
    EXPECT(run("fit --series " + path("series.csv") + " --d 3 --p 1 --q 0 --out " +
               path("fit.txt")),
           "fit exits 0");
    VarmaModel fitted = read_varma(path("fit.txt"));
    EXPECT(fitted.d == 3 && fitted.p == 1 && fitted.q == 0, "fit orders round-trip");
    EXPECT(fitted.stationary, "fitted AR part is stationary");

    // predict: one sample, next day label
    EXPECT(run("predict --series " + path("series.csv") +
               " --d 3 --p 1 --q 0 --h 1 --out " + path("forecast.csv")),
           "predict exits 0");
    FunctionSeries forecast = read_series_csv(path("forecast.csv"));
    EXPECT(forecast.length() == 1, "predict wrote one sample");
    EXPECT(forecast.start == 90, "forecast carries the next day label");

    // cv: table parses, reruns identical
    EXPECT(run("cv --series " + path("series.csv") +
               " --d 2..4 --orders \"(1,0),(0,1)\" --holdout 5 --out " + path("table.csv")),
           "cv exits 0");
    ErrorTable table = read_error_table(path("table.csv"));
    EXPECT(table.rows.size() == 6, "cv wrote 3x2 cells");
    EXPECT(run("cv --series " + path("series.csv") +
               " --d 2..4 --orders \"(1,0),(0,1)\" --holdout 5 --out " + path("table2.csv")),
           "second cv exits 0");
    EXPECT(slurp(path("table.csv")) == slurp(path("table2.csv")), "cv output is deterministic");

    // cv with the cumulative-variance dimension choice
    EXPECT(run("cv --series " + path("series.csv") +
               " --d cpv --cpv 0.85 --orders \"(1,0),(0,1)\" --holdout 5 --out " +
               path("table_cpv.csv")),
           "cv with --d cpv exits 0");
    ErrorTable cpv_table = read_error_table(path("table_cpv.csv"));
    EXPECT(cpv_table.rows.size() == 2, "cpv grid has one dimension");

    // bounds: rows parse and respect the inequality
    EXPECT(run("bounds --model " + path("model.txt") + " --d-range 1..7 --reps 300 --n 30 "
               "--seed 5 --out " + path("bounds.csv")),
           "bounds exits 0");
    std::vector<BoundReport> reports = read_bound_reports(path("bounds.csv"));
    EXPECT(reports.size() == 7, "bounds wrote one row per dimension");
    EXPECT(reports.back().gamma == 0.0, "full dimension has zero gamma");
    for (const BoundReport& r : reports) {
        EXPECT(std::isfinite(r.empirical_mse) && r.empirical_mse > 0.0,
               "bound rows carry a positive error estimate");
        // generous Monte Carlo slack; the acceptance suite checks with
        // per-row standard errors
        EXPECT(r.empirical_mse <= 1.25 * (r.sigma2 + r.gamma),
               "empirical error respects sigma2 + gamma");
    }
    EXPECT(run("bounds --model " + path("model.txt") + " --d-range 1..7 --reps 300 --n 30 "
               "--seed 5 --out " + path("bounds2.csv")),
           "second bounds exits 0");
    EXPECT(slurp(path("bounds.csv")) == slurp(path("bounds2.csv")),
           "bounds output is deterministic");

    // prep: raw measurements to a coefficient series
    EXPECT(run("prep --data " + path("raw.csv") + " --K 5 --grid 12 --weekdays-only --out " +
               path("prepped.csv")),
           "prep exits 0");
    FunctionSeries prepped = read_series_csv(path("prepped.csv"));
    EXPECT(prepped.length() == 15, "prep kept the working days");
    EXPECT(prepped.basis->size() == 5, "prep honoured the basis size");

    // plotdata: all three kinds emit SVG
    EXPECT(run("plotdata --in " + path("table.csv") + " --kind cv --out " + path("cv.svg")),
           "plotdata cv exits 0");
    EXPECT(run("plotdata --in " + path("series.csv") + " --kind eigenfunctions --d 3 --out " +
               path("eigen.svg")),
           "plotdata eigenfunctions exits 0");
    EXPECT(run("plotdata --in " + path("forecast.csv") + " --in2 " + path("forecast.csv") +
               " --kind forecast --out " + path("fc.svg")),
           "plotdata forecast exits 0");
    EXPECT(slurp(path("cv.svg")).find("<svg") == 0, "cv plot is an SVG document");
    EXPECT(slurp(path("eigen.svg")).find("polyline") != std::string::npos,
           "eigenfunction plot has curves");

    // failures exit nonzero
    EXPECT(!run("simulate --model " + path("nosuch.txt") + " --n 10 --out " + path("x.csv")),
           "missing model file fails");
    EXPECT(!run("predict --series " + path("model.txt") +
               " --d 3 --p 1 --q 0 --out " + path("x.csv")),
           "wrong input format fails");
    EXPECT(!run("plotdata --in " + path("table.csv") + " --kind nonsense --out " + path("x.svg")),
           "unknown plot kind fails");
    EXPECT(!run("cv --series " + path("series.csv") + " --d 2..4 --orders \"()\" --holdout 5 "
               "--out " + path("x.csv")),
           "bad order grid fails");

    if (g_failures == 0) {
        std::printf("test_cli: all checks passed\n");
        return 0;
    }
    std::printf("test_cli: %d check(s) failed\n", g_failures);
    return 1;
}
