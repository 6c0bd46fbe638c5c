#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace graphpred {

// MatrixMarket array format: header, dimensions line, then entries in
// column-major order as decimal text. Values are printed with 17 significant
// digits so a write/read round trip is exact.

std::string to_matrix_market(const Eigen::MatrixXd& m);
Eigen::MatrixXd parse_matrix_market(std::istream& in);

void write_matrix_market(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_market(const std::filesystem::path& path);

}  // namespace graphpred
