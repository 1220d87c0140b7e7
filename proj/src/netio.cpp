#include "dlsc/netio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <set>
#include <sstream>
#include <system_error>

#include "dlsc/errors.hpp"

namespace dlsc {

namespace {

std::vector<std::string_view> split_ws(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t k = 0;
    while (k < line.size()) {
        while (k < line.size() && (line[k] == ' ' || line[k] == '\t' || line[k] == '\r')) ++k;
        const std::size_t start = k;
        while (k < line.size() && line[k] != ' ' && line[k] != '\t' && line[k] != '\r') ++k;
        if (k > start) out.push_back(line.substr(start, k - start));
    }
    return out;
}

std::vector<std::string_view> split_tabs(std::string_view line)
{
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t k = 0; k <= line.size(); ++k) {
        if (k == line.size() || line[k] == '\t') {
            out.push_back(line.substr(start, k - start));
            start = k + 1;
        }
    }
    return out;
}

bool skippable(std::string_view line)
{
    for (char c : line) {
        if (c == '#') return true;
        if (c != ' ' && c != '\t' && c != '\r') return false;
    }
    return true;
}

long parse_int(std::string_view tok, std::size_t line, const char* what)
{
    long v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw ParseError(line, std::string("expected an integer ") + what + ", got '" + std::string(tok) + "'");
    }
    return v;
}

double parse_double(std::string_view tok, std::size_t line)
{
    if (tok == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (tok == "inf") return std::numeric_limits<double>::infinity();
    if (tok == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw ParseError(line, "expected a number, got '" + std::string(tok) + "'");
    }
    return v;
}

// shortest representation that reads back to the same double
std::string fmt(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::string clean(std::string s)
{
    for (char& c : s) {
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

} // namespace

DynamicNetwork parse_network(std::istream& in)
{
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string_view> tok;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        tok = split_ws(line);
        break;
    }
    if (tok.empty()) throw ParseError(lineno + 1, "missing header at end of input");
    if (tok.size() != 4) throw ParseError(lineno, "header must be `n T directed|undirected binary|rank`");
    const long n = parse_int(tok[0], lineno, "n");
    const long T = parse_int(tok[1], lineno, "T");
    if (n < 1 || T < 1) throw ParseError(lineno, "n and T must be positive");
    bool directed = true;
    if (tok[2] == "undirected") {
        directed = false;
    } else if (tok[2] != "directed") {
        throw ParseError(lineno, "direction must be 'directed' or 'undirected'");
    }
    bool binary = true;
    if (tok[3] == "rank") {
        binary = false;
    } else if (tok[3] != "binary") {
        throw ParseError(lineno, "payload must be 'binary' or 'rank'");
    }
    if (!binary && !directed) throw ParseError(lineno, "rank payloads are directed");
    if (!binary && n < 2) throw ParseError(lineno, "rank payloads need n >= 2");

    const int ni = static_cast<int>(n);
    const int Ti = static_cast<int>(T);
    DynamicNetwork net = binary ? DynamicNetwork::binary(ni, Ti, directed) : DynamicNetwork::ranked(ni, Ti);
    std::vector<char> seen_rows(binary ? 0 : static_cast<std::size_t>(n * T), 0);
    std::vector<int> ranks(binary ? 0 : static_cast<std::size_t>(n - 1));

    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        tok = split_ws(line);
        const std::size_t want = binary ? 3 : static_cast<std::size_t>(n + 1);
        if (tok.size() != want) {
            throw ParseError(lineno, "expected " + std::to_string(want) + " fields, got " + std::to_string(tok.size()));
        }
        const long t = parse_int(tok[0], lineno, "time");
        const long i = parse_int(tok[1], lineno, "actor");
        if (t < 1 || t > T) throw ParseError(lineno, "time index out of range");
        if (i < 0 || i >= n) throw ParseError(lineno, "actor index out of range");
        const int tt = static_cast<int>(t - 1);
        if (binary) {
            const long j = parse_int(tok[2], lineno, "actor");
            if (j < 0 || j >= n) throw ParseError(lineno, "actor index out of range");
            if (i == j) throw ParseError(lineno, "self loop");
            if (net.y(tt, static_cast<int>(i), static_cast<int>(j)) > 0.5) throw ParseError(lineno, "duplicate edge");
            net.set_edge(tt, static_cast<int>(i), static_cast<int>(j));
        } else {
            char& seen = seen_rows[static_cast<std::size_t>(tt * n + i)];
            if (seen) throw ParseError(lineno, "duplicate rank row");
            seen = 1;
            for (long k = 0; k < n - 1; ++k) ranks[k] = static_cast<int>(parse_int(tok[k + 2], lineno, "rank"));
            try {
                net.set_ranks(tt, static_cast<int>(i), ranks);
            } catch (const InvalidInput& e) {
                throw ParseError(lineno, e.what());
            }
        }
    }
    if (!binary) {
        for (std::size_t k = 0; k < seen_rows.size(); ++k) {
            if (!seen_rows[k]) {
                throw ParseError(lineno, "truncated: no rank row for t=" + std::to_string(k / n + 1) +
                                             " i=" + std::to_string(k % n));
            }
        }
    }
    return net;
}

DynamicNetwork read_network(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return parse_network(in);
}

std::string serialize_network(const DynamicNetwork& net)
{
    std::ostringstream out;
    const int n = net.n();
    out << n << ' ' << net.T() << ' ' << (net.directed() ? "directed" : "undirected") << ' '
        << (net.is_binary() ? "binary" : "rank") << '\n';
    for (int t = 0; t < net.T(); ++t) {
        for (int i = 0; i < n; ++i) {
            if (net.is_binary()) {
                for (int j = net.directed() ? 0 : i + 1; j < n; ++j) {
                    if (i != j && net.y(t, i, j) > 0.5) out << t + 1 << ' ' << i << ' ' << j << '\n';
                }
            } else {
                out << t + 1 << ' ' << i;
                for (int j = 0; j < n; ++j) {
                    if (j != i) out << ' ' << net.rank(t, i, j);
                }
                out << '\n';
            }
        }
    }
    return out.str();
}

void write_network(const std::filesystem::path& path, const DynamicNetwork& net)
{
    write_file_atomic(path, serialize_network(net));
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_records(const std::vector<Record>& records)
{
    std::string out;
    for (const auto& r : records) {
        out += clean(r.name);
        out += '\t';
        out += fmt(r.value);
        out += '\t';
        for (std::size_t k = 0; k < r.context.size(); ++k) {
            if (k) out += ',';
            out += clean(r.context[k].first) + '=' + clean(r.context[k].second);
        }
        out += '\n';
    }
    return out;
}

std::vector<Record> parse_records(std::istream& in)
{
    std::vector<Record> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        const auto f = split_tabs(line);
        if (f.size() < 2 || f.size() > 3) throw ParseError(lineno, "record needs name, value and context");
        Record r;
        r.name = std::string(f[0]);
        r.value = parse_double(f[1], lineno);
        if (f.size() == 3 && !f[2].empty()) {
            std::string_view ctx = f[2];
            while (!ctx.empty()) {
                const auto comma = ctx.find(',');
                const std::string_view kv = ctx.substr(0, comma);
                const auto eq = kv.find('=');
                if (eq == std::string_view::npos) throw ParseError(lineno, "context entries are key=value");
                r.context.emplace_back(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
                if (comma == std::string_view::npos) break;
                ctx.remove_prefix(comma + 1);
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::string format_matrix(const Eigen::MatrixXd& m)
{
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out += '\t';
            out += fmt(m(i, j));
        }
        out += '\n';
    }
    return out;
}

Eigen::MatrixXd parse_matrix(std::istream& in)
{
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        std::vector<double> row;
        for (auto tok : split_ws(line)) row.push_back(parse_double(tok, lineno));
        if (!rows.empty() && row.size() != rows.front().size()) throw ParseError(lineno, "ragged matrix");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) return {};
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

std::string format_labels(const Eigen::MatrixXi& z)
{
    std::string out;
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        for (Eigen::Index t = 0; t < z.cols(); ++t) {
            if (t) out += '\t';
            out += std::to_string(z(i, t));
        }
        out += '\n';
    }
    return out;
}

Eigen::MatrixXi parse_labels(std::istream& in)
{
    std::vector<std::vector<int>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        std::vector<int> row;
        for (auto tok : split_ws(line)) {
            const long v = parse_int(tok, lineno, "label");
            if (v < 0) throw ParseError(lineno, "labels must be nonnegative");
            row.push_back(static_cast<int>(v));
        }
        if (!rows.empty() && row.size() != rows.front().size()) throw ParseError(lineno, "ragged label table");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(lineno, "empty label table");
    Eigen::MatrixXi z(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t t = 0; t < rows[i].size(); ++t) z(i, t) = rows[i][t];
    }
    return z;
}

namespace {
constexpr const char* kSummaryHeader =
    "geometry\tG\tengine\tloglik_at_map\tlatent_marginal_loglik\tdim_lik\tdim_prior\tedge_total\tnT\tdic\tbic1\t"
    "bic2\tbic\tok\terror";
}

std::string format_summary_table(const std::vector<FitSummary>& rows)
{
    std::string out = std::string(kSummaryHeader) + '\n';
    for (const auto& f : rows) {
        out += std::string(to_string(f.geometry)) + '\t' + std::to_string(f.G) + '\t' + clean(f.engine) + '\t' +
               fmt(f.loglik_at_map) + '\t' + fmt(f.latent_marginal_loglik) + '\t' + std::to_string(f.dim_lik) +
               '\t' + std::to_string(f.dim_prior) + '\t' + std::to_string(f.edge_total) + '\t' +
               std::to_string(f.nT) + '\t' + fmt(f.dic) + '\t' + fmt(f.bic1) + '\t' + fmt(f.bic2) + '\t' +
               fmt(f.bic) + '\t' + (f.ok ? "1" : "0") + '\t' + clean(f.error) + '\n';
    }
    return out;
}

std::vector<FitSummary> parse_summary_table(std::istream& in)
{
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line) || split_tabs(line).size() != 15) {
        throw ParseError(1, "missing or malformed summary header");
    }
    ++lineno;
    std::vector<FitSummary> out;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_tabs(line);
        if (f.size() != 15) throw ParseError(lineno, "summary rows have 15 fields");
        FitSummary s;
        try {
            s.geometry = geometry_from_string(std::string(f[0]));
        } catch (const std::exception& e) {
            throw ParseError(lineno, e.what());
        }
        s.G = static_cast<int>(parse_int(f[1], lineno, "G"));
        s.engine = std::string(f[2]);
        s.loglik_at_map = parse_double(f[3], lineno);
        s.latent_marginal_loglik = parse_double(f[4], lineno);
        s.dim_lik = static_cast<int>(parse_int(f[5], lineno, "dim_lik"));
        s.dim_prior = static_cast<int>(parse_int(f[6], lineno, "dim_prior"));
        s.edge_total = parse_int(f[7], lineno, "edge_total");
        s.nT = parse_int(f[8], lineno, "nT");
        s.dic = parse_double(f[9], lineno);
        s.bic1 = parse_double(f[10], lineno);
        s.bic2 = parse_double(f[11], lineno);
        s.bic = parse_double(f[12], lineno);
        s.ok = f[13] == "1";
        s.error = std::string(f[14]);
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace dlsc
