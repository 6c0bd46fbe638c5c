#include "doctest.h"

#include <Eigen/Dense>

#include <filesystem>
#include <random>
#include <sstream>

#include "graphpred/matrix_io.hpp"
#include "graphpred/rng.hpp"

using namespace graphpred;

TEST_CASE("matrix market text round-trips exactly") {
    std::mt19937_64 gen(1);
    for (const auto [rows, cols] : {std::pair<Eigen::Index, Eigen::Index>{1, 1},
                                    {3, 5},
                                    {7, 2},
                                    {4, 4}}) {
        Eigen::MatrixXd m = gaussian_matrix(rows, cols, gen);
        m(0, 0) = 0.1 + 0.2;  // not exactly representable as short decimal
        std::istringstream in(to_matrix_market(m));
        const Eigen::MatrixXd back = parse_matrix_market(in);
        REQUIRE(back.rows() == rows);
        REQUIRE(back.cols() == cols);
        CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("matrix market serialization is byte-stable") {
    std::mt19937_64 gen(2);
    const Eigen::MatrixXd m = gaussian_matrix(6, 3, gen);
    CHECK(to_matrix_market(m) == to_matrix_market(m));
}

TEST_CASE("matrix market file round-trip") {
    const auto path = std::filesystem::temp_directory_path() /
                      "graphpred_io_test.mtx";
    std::mt19937_64 gen(3);
    const Eigen::MatrixXd m = gaussian_matrix(5, 5, gen);
    write_matrix_market(path, m);
    const Eigen::MatrixXd back = read_matrix_market(path);
    CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
    std::filesystem::remove(path);
}

TEST_CASE("parser accepts comments and rejects malformed input") {
    std::istringstream with_comment(
        "%%MatrixMarket matrix array real general\n"
        "% produced elsewhere\n"
        "2 2\n1\n2\n3\n4\n");
    const Eigen::MatrixXd m = parse_matrix_market(with_comment);
    CHECK(m(0, 0) == 1.0);
    CHECK(m(1, 0) == 2.0);  // column-major entry order
    CHECK(m(0, 1) == 3.0);
    CHECK(m(1, 1) == 4.0);

    std::istringstream bad_banner("%%NotMatrixMarket nope\n1 1\n0\n");
    CHECK_THROWS_AS(parse_matrix_market(bad_banner), std::runtime_error);

    std::istringstream coordinate(
        "%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 0\n");
    CHECK_THROWS_AS(parse_matrix_market(coordinate), std::runtime_error);

    std::istringstream truncated(
        "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n");
    CHECK_THROWS_AS(parse_matrix_market(truncated), std::runtime_error);

    CHECK_THROWS_AS(read_matrix_market("/nonexistent/path/m.mtx"),
                    std::runtime_error);
}
