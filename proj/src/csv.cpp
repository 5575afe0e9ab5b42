#include "ridge/csv.hpp"

#include <fstream>
#include <sstream>

namespace ridge {

namespace {

bool parse_row(const std::string& line, std::vector<double>& out) {
    out.clear();
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        // trim whitespace
        const auto b = cell.find_first_not_of(" \t\r");
        if (b == std::string::npos) return false;
        const auto e = cell.find_last_not_of(" \t\r");
        cell = cell.substr(b, e - b + 1);
        try {
            size_t used = 0;
            const double v = std::stod(cell, &used);
            if (used != cell.size()) return false;
            out.push_back(v);
        } catch (...) {
            return false;
        }
    }
    return !out.empty();
}

}  // namespace

PointCloud read_point_cloud_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot open " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        if (!parse_row(line, row)) {
            if (lineno == 1 && rows.empty()) continue;  // header
            throw InvalidInputError(path + ":" + std::to_string(lineno) +
                                    ": cannot parse numeric row");
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw InvalidInputError(path + ":" + std::to_string(lineno) +
                                    ": inconsistent column count");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InvalidInputError(path + ": no data rows");

    Matrix m(static_cast<long>(rows.size()), static_cast<long>(rows.front().size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<long>(i), static_cast<long>(j)) = rows[i][j];
    return PointCloud::from_matrix(std::move(m));
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("cannot write " + path);
    out.precision(17);
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    if (!header.empty()) out << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

void write_point_cloud_csv(const std::string& path, const Matrix& points,
                           const std::string& column_prefix) {
    std::vector<std::string> header;
    for (long j = 0; j < points.cols(); ++j)
        header.push_back(column_prefix + std::to_string(j + 1));
    std::vector<std::vector<double>> rows(points.rows());
    for (long i = 0; i < points.rows(); ++i) {
        rows[i].resize(points.cols());
        for (long j = 0; j < points.cols(); ++j) rows[i][j] = points(i, j);
    }
    write_csv(path, header, rows);
}

}  // namespace ridge
