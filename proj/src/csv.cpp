#include "kir/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kir/errors.hpp"

namespace kir {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::size_t resolve_column(const std::string& selector,
                           const std::vector<std::string>& header) {
    for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c] == selector) return c;
    // Not a header name; try a 0-based index.
    std::size_t idx = 0;
    const auto [ptr, ec] =
        std::from_chars(selector.data(), selector.data() + selector.size(), idx);
    if (ec == std::errc{} && ptr == selector.data() + selector.size() && idx < header.size())
        return idx;
    throw ParseError("column selector '" + selector + "' matches no header name or index");
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& col_name) {
    const std::string t = trim(cell);
    if (t.empty()) {
        std::ostringstream os;
        os << "missing value at row " << row << ", column '" << col_name << "'";
        throw MissingValue(os.str());
    }
    try {
        std::size_t pos = 0;
        const double v = std::stod(t, &pos);
        if (pos != t.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        std::ostringstream os;
        os << "cell at row " << row << ", column '" << col_name << "' is not numeric: '" << t
           << "'";
        throw ParseError(os.str());
    }
}

void standardize_columns(RealMatrix& m) {
    const double n = static_cast<double>(m.rows());
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const double mean = m.col(c).mean();
        const double var = (m.col(c).array() - mean).square().sum() / n;
        const double scale = std::abs(mean) * 1e-14 + 1e-300;
        if (var <= scale) {
            std::ostringstream os;
            os << "column " << c << " has zero variance; cannot standardize";
            throw ConstantColumn(os.str());
        }
        m.col(c) = (m.col(c).array() - mean) / std::sqrt(var);
    }
}

}  // namespace

SampleSet load_csv(const std::string& path, const std::vector<std::string>& x_cols,
                   const std::vector<std::string>& y_cols, const std::string& y_kind,
                   bool standardize) {
    if (x_cols.empty() || y_cols.empty())
        throw InvalidConfig("x and y column selectors must be non-empty");
    const bool y_rotation = y_kind == "so3";
    if (!y_rotation && y_kind != "real")
        throw InvalidConfig("y-kind must be 'real' or 'so3'");
    if (y_rotation && y_cols.size() != 9)
        throw InvalidConfig("so3 responses need exactly 9 y columns in row-major order");

    std::ifstream in(path);
    if (!in) throw ParseError("cannot open CSV file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw ParseError("CSV file is empty (header row required)");
    std::vector<std::string> header = split_line(line);
    for (auto& h : header) h = trim(h);

    std::vector<std::size_t> xi, yi;
    for (const auto& s : x_cols) xi.push_back(resolve_column(s, header));
    for (const auto& s : y_cols) yi.push_back(resolve_column(s, header));

    std::vector<std::vector<double>> x_rows, y_rows;
    std::size_t row = 1;  // 0 is the header
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            ++row;
            continue;
        }
        const auto cells = split_line(line);
        const auto read = [&](std::size_t col) {
            if (col >= cells.size()) {
                std::ostringstream os;
                os << "missing value at row " << row << ", column '" << header[col] << "'";
                throw MissingValue(os.str());
            }
            return parse_cell(cells[col], row, header[col]);
        };
        std::vector<double> xr, yr;
        for (std::size_t c : xi) xr.push_back(read(c));
        for (std::size_t c : yi) yr.push_back(read(c));
        x_rows.push_back(std::move(xr));
        y_rows.push_back(std::move(yr));
        ++row;
    }
    if (x_rows.empty()) throw EmptySample("CSV file contains no data rows");

    const auto n = static_cast<Eigen::Index>(x_rows.size());
    RealMatrix x(n, static_cast<Eigen::Index>(xi.size()));
    for (Eigen::Index r = 0; r < n; ++r)
        for (std::size_t c = 0; c < xi.size(); ++c)
            x(r, static_cast<Eigen::Index>(c)) = x_rows[static_cast<std::size_t>(r)][c];
    if (standardize) standardize_columns(x);

    if (y_rotation) {
        std::vector<Rotation3> ys;
        ys.reserve(static_cast<std::size_t>(n));
        for (std::size_t r = 0; r < static_cast<std::size_t>(n); ++r) {
            std::array<double, 9> entries{};
            for (std::size_t c = 0; c < 9; ++c) entries[c] = y_rows[r][c];
            ys.push_back(Rotation3::from_row_major(entries));
        }
        return SampleSet(PointSet::reals(std::move(x)), PointSet::rotations(std::move(ys)));
    }

    RealMatrix y(n, static_cast<Eigen::Index>(yi.size()));
    for (Eigen::Index r = 0; r < n; ++r)
        for (std::size_t c = 0; c < yi.size(); ++c)
            y(r, static_cast<Eigen::Index>(c)) = y_rows[static_cast<std::size_t>(r)][c];
    if (standardize) standardize_columns(y);
    return SampleSet(PointSet::reals(std::move(x)), PointSet::reals(std::move(y)));
}

void save_csv(const std::string& path, const SampleSet& sample) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");

    const auto write_value = [&](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf;
    };

    const Eigen::Index xd = sample.x.dim();
    const bool y_rotation = sample.y.kind() == PointKind::Rotation;
    const Eigen::Index yd = y_rotation ? 9 : sample.y.dim();
    for (Eigen::Index c = 0; c < xd; ++c) out << "x" << c << ",";
    for (Eigen::Index c = 0; c < yd; ++c) out << "y" << c << (c + 1 < yd ? "," : "");
    out << "\n";

    for (std::size_t i = 0; i < sample.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        for (Eigen::Index c = 0; c < xd; ++c) {
            write_value(sample.x.real_matrix()(r, c));
            out << ",";
        }
        if (y_rotation) {
            const auto entries = sample.y.rotation_list()[i].row_major();
            for (std::size_t c = 0; c < 9; ++c) {
                write_value(entries[c]);
                if (c + 1 < 9) out << ",";
            }
        } else {
            for (Eigen::Index c = 0; c < yd; ++c) {
                write_value(sample.y.real_matrix()(r, c));
                if (c + 1 < yd) out << ",";
            }
        }
        out << "\n";
    }
}

}  // namespace kir
