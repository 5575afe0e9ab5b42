#ifndef RIDGE_CSV_HPP
#define RIDGE_CSV_HPP

#include <string>
#include <vector>

#include "ridge/types.hpp"

namespace ridge {

// Reads a point cloud from CSV: one row per point, d numeric columns,
// '.' decimal separator. A single non-numeric first row is treated as a
// header and skipped. Errors name the file and line.
PointCloud read_point_cloud_csv(const std::string& path);

// Writes rows with an optional header line; 17 significant digits.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_point_cloud_csv(const std::string& path, const Matrix& points,
                           const std::string& column_prefix = "x");

}  // namespace ridge

#endif
