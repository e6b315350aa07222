#ifndef CRSLEARN_MATRIX_HPP
#define CRSLEARN_MATRIX_HPP

#include <cstdint>
#include <cstddef>
#include <span>
#include <vector>

namespace crslearn {

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

    bool operator==(const Matrix& o) const = default;
};

/// Dense row-major matrix over {0,1}. Adjacency matrices and RB masks.
struct BinMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> data;

    BinMatrix() = default;
    BinMatrix(std::size_t r, std::size_t c, std::uint8_t fill = 0) : rows(r), cols(c), data(r * c, fill) {}

    std::uint8_t& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    std::uint8_t operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<std::uint8_t> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    std::span<const std::uint8_t> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

    std::size_t count_ones() const {
        std::size_t n = 0;
        for (auto b : data) n += b;
        return n;
    }

    bool operator==(const BinMatrix& o) const = default;
};

}  // namespace crslearn

#endif
