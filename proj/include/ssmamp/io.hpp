#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ssmamp {

// "SSMAMP01" binary layout: 8-byte magic, u32 rows, u32 cols (little
// endian), then rows*cols float64 little endian, row major. Vectors are
// stored as n x 1 matrices.
inline constexpr char kMatrixMagic[9] = "SSMAMP01";

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

void write_vector(const std::filesystem::path& path, const Eigen::VectorXd& v);
Eigen::VectorXd read_vector(const std::filesystem::path& path);

// Plain "key = value" manifests, one entry per line, '#' comments.
void write_manifest(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, std::string>>& entries);
std::map<std::string, std::string> read_manifest(const std::filesystem::path& path);

// Minimal CSV helpers for the trajectory tables (numbers are written with
// enough digits to round-trip).
std::string format_double(double x);
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

} // namespace ssmamp
