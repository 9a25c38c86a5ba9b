#include "farmakit/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace farmakit {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& s, const std::string& context) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw std::invalid_argument(context + ": bad number '" + s + "'");
    return v;
}

long to_long(const std::string& s, const std::string& context) {
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str()) throw std::invalid_argument(context + ": bad integer '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    return out;
}

void write_matrix(std::ofstream& out, const std::string& key, const Eigen::MatrixXd& m) {
    out << key << " = [";
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (r != 0 || c != 0) out << ", ";
            out << fmt(m(r, c));
        }
    out << "]\n";
}

// key = value lines with # comments; matrix values in brackets.
std::map<std::string, std::string> read_keyvalue(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ": expected key = value, got '" + s + "'");
        out[trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
    }
    return out;
}

Eigen::MatrixXd parse_matrix(const std::string& text, int rows, int cols,
                             const std::string& context) {
    std::string body = text;
    if (!body.empty() && body.front() == '[') body = body.substr(1);
    if (!body.empty() && body.back() == ']') body.pop_back();
    for (char& c : body)
        if (c == ',') c = ' ';
    std::stringstream ss(body);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            std::string tok;
            if (!(ss >> tok))
                throw std::invalid_argument(context + ": expected " +
                                            std::to_string(rows * cols) + " entries");
            m(r, c) = to_double(tok, context);
        }
    std::string extra;
    if (ss >> extra) throw std::invalid_argument(context + ": trailing entries");
    return m;
}

const std::string& require(const std::map<std::string, std::string>& kv, const std::string& key,
                           const std::string& path) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument(path + ": missing key '" + key + "'");
    return it->second;
}

}  // namespace

void write_series_csv(const FunctionSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "# basis=fourier K=" << series.basis->size() << " grid=" << series.basis->grid().size()
        << " start=" << series.start << "\n";
    out << "day,coeff_index,value\n";
    for (int i = 0; i < series.length(); ++i)
        for (int k = 0; k < series.basis->size(); ++k)
            out << (series.start + i) << ',' << k << ',' << fmt(series.coeffs(i, k)) << '\n';
}

FunctionSeries read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument(path + ": empty file");

    int k = 0, grid = 0, start = 0;
    {
        std::stringstream ss(trim(line));
        std::string tok;
        while (ss >> tok) {
            if (tok.rfind("K=", 0) == 0) k = static_cast<int>(to_long(tok.substr(2), path));
            if (tok.rfind("grid=", 0) == 0) grid = static_cast<int>(to_long(tok.substr(5), path));
            if (tok.rfind("start=", 0) == 0) start = static_cast<int>(to_long(tok.substr(6), path));
        }
    }
    if (k < 1 || grid < 1)
        throw std::invalid_argument(path + ": header must name the basis size and grid");
    if (!std::getline(in, line) || trim(line) != "day,coeff_index,value")
        throw std::invalid_argument(path + ": expected day,coeff_index,value header");

    std::map<long, Eigen::VectorXd> rows;
    std::map<long, int> filled;
    int line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = trim(line);
        if (s.empty()) continue;
        std::vector<std::string> fields = split(s, ',');
        if (fields.size() != 3)
            throw std::invalid_argument(path + " line " + std::to_string(line_no) +
                                        ": expected 3 fields");
        long day = to_long(fields[0], path);
        long idx = to_long(fields[1], path);
        if (idx < 0 || idx >= k)
            throw std::invalid_argument(path + " line " + std::to_string(line_no) +
                                        ": coefficient index out of range");
        auto it = rows.find(day);
        if (it == rows.end()) it = rows.emplace(day, Eigen::VectorXd::Zero(k)).first;
        it->second[idx] = to_double(fields[2], path);
        filled[day] += 1;
    }
    if (rows.empty()) throw std::invalid_argument(path + ": no coefficient rows");
    for (const auto& [day, count] : filled)
        if (count != k)
            throw std::invalid_argument(path + ": day " + std::to_string(day) + " has " +
                                        std::to_string(count) + " coefficients, expected " +
                                        std::to_string(k));

    long expected = rows.begin()->first;
    for (const auto& [day, _] : rows) {
        if (day != expected)
            throw std::invalid_argument(path + ": day labels are not contiguous");
        ++expected;
    }
    if (rows.begin()->first != start) start = static_cast<int>(rows.begin()->first);

    FunctionSeries series;
    series.basis = BasisSpec::fourier(k, grid);
    series.start = start;
    series.coeffs.resize(static_cast<Eigen::Index>(rows.size()), k);
    Eigen::Index r = 0;
    for (const auto& [day, coeffs] : rows) series.coeffs.row(r++) = coeffs.transpose();
    return series;
}

void write_model(const FarmaModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "kind = farma\n";
    out << "p = " << model.p() << "\n";
    out << "q = " << model.q() << "\n";
    out << "K = " << model.dim() << "\n";
    out << "basis = fourier\n";
    out << "grid = " << model.basis()->grid().size() << "\n";
    for (int i = 1; i <= model.p(); ++i)
        write_matrix(out, "phi_" + std::to_string(i), model.phis()[i - 1].mat);
    for (int j = 1; j <= model.q(); ++j)
        write_matrix(out, "theta_" + std::to_string(j), model.thetas()[j - 1].mat);
    write_matrix(out, "noise_cov", model.noise_cov().mat);
}

FarmaModel read_model(const std::string& path) {
    auto kv = read_keyvalue(path);
    if (require(kv, "kind", path) != "farma")
        throw std::invalid_argument(path + ": not a model file (kind != farma)");
    int p = static_cast<int>(to_long(require(kv, "p", path), path));
    int q = static_cast<int>(to_long(require(kv, "q", path), path));
    int k = static_cast<int>(to_long(require(kv, "K", path), path));
    int grid = static_cast<int>(to_long(require(kv, "grid", path), path));
    if (require(kv, "basis", path) != "fourier")
        throw std::invalid_argument(path + ": unsupported basis kind");
    BasisPtr basis = BasisSpec::fourier(k, grid);

    std::vector<KernelOperator> phis, thetas;
    for (int i = 1; i <= p; ++i)
        phis.push_back(make_operator(
            parse_matrix(require(kv, "phi_" + std::to_string(i), path), k, k, path), basis));
    for (int j = 1; j <= q; ++j)
        thetas.push_back(make_operator(
            parse_matrix(require(kv, "theta_" + std::to_string(j), path), k, k, path), basis));
    KernelOperator noise =
        make_operator(parse_matrix(require(kv, "noise_cov", path), k, k, path), basis);
    return FarmaModel(std::move(phis), std::move(thetas), std::move(noise));
}

void write_varma(const VarmaModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "kind = varma\n";
    out << "d = " << model.d << "\n";
    out << "p = " << model.p << "\n";
    out << "q = " << model.q << "\n";
    out << "spectral_radius = " << fmt(model.spectral_radius) << "\n";
    out << "stationary = " << (model.stationary ? 1 : 0) << "\n";
    for (int i = 1; i <= model.p; ++i)
        write_matrix(out, "Phi_" + std::to_string(i), model.Phi[i - 1]);
    for (int j = 1; j <= model.q; ++j)
        write_matrix(out, "Theta_" + std::to_string(j), model.Theta[j - 1]);
    write_matrix(out, "Sigma", model.Sigma);
}

VarmaModel read_varma(const std::string& path) {
    auto kv = read_keyvalue(path);
    if (require(kv, "kind", path) != "varma")
        throw std::invalid_argument(path + ": not a varma file");
    VarmaModel model;
    model.d = static_cast<int>(to_long(require(kv, "d", path), path));
    model.p = static_cast<int>(to_long(require(kv, "p", path), path));
    model.q = static_cast<int>(to_long(require(kv, "q", path), path));
    model.spectral_radius = to_double(require(kv, "spectral_radius", path), path);
    model.stationary = to_long(require(kv, "stationary", path), path) != 0;
    for (int i = 1; i <= model.p; ++i)
        model.Phi.push_back(
            parse_matrix(require(kv, "Phi_" + std::to_string(i), path), model.d, model.d, path));
    for (int j = 1; j <= model.q; ++j)
        model.Theta.push_back(
            parse_matrix(require(kv, "Theta_" + std::to_string(j), path), model.d, model.d, path));
    model.Sigma = parse_matrix(require(kv, "Sigma", path), model.d, model.d, path);
    return model;
}

void write_error_table(const ErrorTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "d,p,q,rmse,mae\n";
    for (const ErrorRow& row : table.rows)
        out << row.d << ',' << row.p << ',' << row.q << ',' << fmt(row.rmse) << ','
            << fmt(row.mae) << '\n';
}

ErrorTable read_error_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "d,p,q,rmse,mae")
        throw std::invalid_argument(path + ": expected d,p,q,rmse,mae header");
    ErrorTable table;
    while (std::getline(in, line)) {
        std::string s = trim(line);
        if (s.empty()) continue;
        std::vector<std::string> fields = split(s, ',');
        if (fields.size() != 5) throw std::invalid_argument(path + ": expected 5 fields");
        ErrorRow row;
        row.d = static_cast<int>(to_long(fields[0], path));
        row.p = static_cast<int>(to_long(fields[1], path));
        row.q = static_cast<int>(to_long(fields[2], path));
        row.rmse = to_double(fields[3], path);
        row.mae = to_double(fields[4], path);
        row.failed = !std::isfinite(row.rmse);
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_bound_reports(const std::vector<BoundReport>& reports, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "d,sigma2,gamma,empirical_mse\n";
    for (const BoundReport& r : reports)
        out << r.d << ',' << fmt(r.sigma2) << ',' << fmt(r.gamma) << ',' << fmt(r.empirical_mse)
            << '\n';
}

std::vector<BoundReport> read_bound_reports(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "d,sigma2,gamma,empirical_mse")
        throw std::invalid_argument(path + ": expected d,sigma2,gamma,empirical_mse header");
    std::vector<BoundReport> out;
    while (std::getline(in, line)) {
        std::string s = trim(line);
        if (s.empty()) continue;
        std::vector<std::string> fields = split(s, ',');
        if (fields.size() != 4) throw std::invalid_argument(path + ": expected 4 fields");
        BoundReport r;
        r.d = static_cast<int>(to_long(fields[0], path));
        r.sigma2 = to_double(fields[1], path);
        r.gamma = to_double(fields[2], path);
        r.empirical_mse = to_double(fields[3], path);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace farmakit
