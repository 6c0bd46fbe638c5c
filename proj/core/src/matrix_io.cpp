#include "graphpred/matrix_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace graphpred {

namespace {

constexpr const char* kHeader = "%%MatrixMarket matrix array real general";

std::string format_entry(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

}  // namespace

std::string to_matrix_market(const Eigen::MatrixXd& m) {
    std::string out(kHeader);
    out += '\n';
    out += std::to_string(m.rows());
    out += ' ';
    out += std::to_string(m.cols());
    out += '\n';
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            out += format_entry(m(i, j));
            out += '\n';
        }
    }
    return out;
}

Eigen::MatrixXd parse_matrix_market(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("matrix market: empty input");
    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || object != "matrix")
        throw std::runtime_error("matrix market: bad header: " + line);
    if (format != "array" || field != "real" || symmetry != "general")
        throw std::runtime_error(
            "matrix market: only 'array real general' is supported, got: " + line);

    // skip comment lines
    do {
        if (!std::getline(in, line))
            throw std::runtime_error("matrix market: missing dimensions line");
    } while (!line.empty() && line[0] == '%');

    std::istringstream dims(line);
    Eigen::Index rows = -1, cols = -1;
    dims >> rows >> cols;
    if (rows < 1 || cols < 1)
        throw std::runtime_error("matrix market: bad dimensions line: " + line);

    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            double value;
            if (!(in >> value))
                throw std::runtime_error("matrix market: truncated entry list");
            m(i, j) = value;
        }
    }
    return m;
}

void write_matrix_market(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("matrix market: cannot open for writing: " +
                                 path.string());
    out << to_matrix_market(m);
    if (!out)
        throw std::runtime_error("matrix market: write failed: " + path.string());
}

Eigen::MatrixXd read_matrix_market(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("matrix market: cannot open: " + path.string());
    try {
        return parse_matrix_market(in);
    } catch (const std::runtime_error& err) {
        throw std::runtime_error(std::string(err.what()) + " (" + path.string() + ")");
    }
}

}  // namespace graphpred
