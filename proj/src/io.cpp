#include "ssmamp/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ssmamp {

namespace {

void put_u32_le(std::ostream& os, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(b, 4);
}

std::uint32_t get_u32_le(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

void put_f64_le(std::ostream& os, double x) {
    const auto u = std::bit_cast<std::uint64_t>(x);
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((u >> (8 * i)) & 0xFF);
    os.write(b, 8);
}

double get_f64_le(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(u);
}

[[noreturn]] void io_fail(const std::filesystem::path& path, const std::string& what) {
    throw std::runtime_error("io: " + what + ": " + path.string());
}

} // namespace

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    std::ofstream os(path, std::ios::binary);
    if (!os) io_fail(path, "cannot open for writing");
    os.write(kMatrixMagic, 8);
    put_u32_le(os, static_cast<std::uint32_t>(m.rows()));
    put_u32_le(os, static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) put_f64_le(os, m(i, j));
    if (!os) io_fail(path, "write failed");
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) io_fail(path, "cannot open for reading");
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMatrixMagic, 8) != 0) io_fail(path, "bad magic");
    const std::uint32_t rows = get_u32_le(is);
    const std::uint32_t cols = get_u32_le(is);
    Eigen::MatrixXd m(rows, cols);
    for (std::uint32_t i = 0; i < rows; ++i)
        for (std::uint32_t j = 0; j < cols; ++j) m(i, j) = get_f64_le(is);
    if (!is) io_fail(path, "truncated matrix data");
    return m;
}

void write_vector(const std::filesystem::path& path, const Eigen::VectorXd& v) {
    write_matrix(path, v);
}

Eigen::VectorXd read_vector(const std::filesystem::path& path) {
    const Eigen::MatrixXd m = read_matrix(path);
    if (m.cols() != 1) io_fail(path, "expected a single-column vector file");
    return m.col(0);
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
    std::ofstream os(path);
    if (!os) io_fail(path, "cannot open for writing");
    for (const auto& [k, v] : entries) os << k << " = " << v << "\n";
    if (!os) io_fail(path, "write failed");
}

std::map<std::string, std::string> read_manifest(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) io_fail(path, "cannot open for reading");
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) out[key] = value;
    }
    return out;
}

std::string format_double(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) io_fail(path, "cannot open for reading");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

} // namespace ssmamp
