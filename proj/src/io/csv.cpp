#include "classo/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <system_error>

#include "classo/error.hpp"

namespace classo {

namespace {

std::string_view trim(std::string_view s) {
    const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && ws(s.front())) s.remove_prefix(1);
    while (!s.empty() && ws(s.back())) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

// A number in the sense of from_chars, allowing a leading '+'. Non-finite
// spellings (nan, inf) parse and are reported separately by the caller.
std::optional<double> parse_number(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ptr != s.data() + s.size()) return std::nullopt;
    if (ec == std::errc::result_out_of_range) return std::copysign(HUGE_VAL, s.front() == '-' ? -1.0 : 1.0);
    if (ec != std::errc()) return std::nullopt;
    return v;
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
    CsvTable table;
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    std::size_t line_no = 0;
    bool first = true;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (trim(line).empty()) continue;

        const auto fields = split_fields(line);
        if (first) {
            first = false;
            width = fields.size();
            bool numeric = true;
            for (auto f : fields) numeric = numeric && parse_number(f).has_value();
            if (!numeric) {
                for (auto f : fields) table.header.emplace_back(f);
                continue;
            }
        }
        if (fields.size() != width) {
            std::ostringstream os;
            os << "line " << line_no << " has " << fields.size() << " fields, expected " << width;
            throw ParseError(os.str(), line_no, std::min(fields.size(), width) + 1);
        }
        std::vector<double> row(width);
        for (std::size_t c = 0; c < width; ++c) {
            const auto v = parse_number(fields[c]);
            if (!v) {
                std::ostringstream os;
                os << "line " << line_no << ", field " << c + 1 << ": '" << fields[c] << "' is not a number";
                throw ParseError(os.str(), line_no, c + 1);
            }
            if (!std::isfinite(*v)) throw NonFiniteValue(line_no, c + 1);
            row[c] = *v;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("no numeric rows", line_no, 1);

    table.values = Matrix(rows.size(), width);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t c = 0; c < width; ++c) table.values(i, c) = rows[i][c];
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

RegressionTable to_regression(const CsvTable& table, std::size_t response_col) {
    const std::size_t cols = table.values.cols();
    if (response_col >= cols) throw ConfigError("response column is out of range");
    if (cols < 2) throw ConfigError("need a response and at least one predictor column");
    RegressionTable out;
    const auto col = table.values.col(response_col);
    out.y.assign(col.begin(), col.end());
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < cols; ++c)
        if (c != response_col) keep.push_back(c);
    out.predictors = select_columns(table.values, keep);
    out.response_name = table.header.empty() ? "y" : table.header[response_col];
    for (std::size_t k = 0; k < keep.size(); ++k)
        out.predictor_names.push_back(table.header.empty() ? "x" + std::to_string(k + 1) : table.header[keep[k]]);
    return out;
}

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ec == std::errc() ? ptr : buf);
}

std::string format_csv(const Matrix& values, const std::vector<std::string>& header) {
    if (!header.empty() && header.size() != values.cols())
        throw DimensionMismatch("format_csv: header width differs from matrix");
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
    if (!header.empty()) out += '\n';
    for (std::size_t i = 0; i < values.rows(); ++i) {
        for (std::size_t c = 0; c < values.cols(); ++c) {
            if (c) out += ',';
            out += format_double(values(i, c));
        }
        out += '\n';
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw ConfigError("failed writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw ConfigError("cannot move output into place at '" + path.string() + "'");
    }
}

double center_vector(Vector& v) {
    if (v.empty()) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    for (double& x : v) x -= mean;
    return mean;
}

Vector center_columns(Matrix& m) {
    Vector means(m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c) {
        auto col = m.col(c);
        double mean = 0.0;
        for (double x : col) mean += x;
        mean /= static_cast<double>(m.rows());
        for (double& x : col) x -= mean;
        means[c] = mean;
    }
    return means;
}

Vector scale_columns(Matrix& m) {
    Vector scales(m.cols(), 1.0);
    if (m.rows() < 2) return scales;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        auto col = m.col(c);
        double mean = 0.0;
        for (double x : col) mean += x;
        mean /= static_cast<double>(m.rows());
        double ss = 0.0;
        for (double x : col) ss += (x - mean) * (x - mean);
        const double sd = std::sqrt(ss / static_cast<double>(m.rows() - 1));
        if (!(sd > 0.0)) continue;
        for (double& x : col) x /= sd;
        scales[c] = sd;
    }
    return scales;
}

}  // namespace classo
