#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace subdiff {

/// Dense row-major 2D array of doubles.
///
/// Used throughout for fields sampled on (time x space) grids: entry (i, j)
/// is the value at time node i and space node j.
class Array2D {
public:
    Array2D() = default;

    Array2D(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    /// Pointer to the start of row i (contiguous, cols() entries).
    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Dense 3D array, layout (i, j, k) -> ((i * nj) + j) * nk + k.
///
/// Only used for fully assembled space-time fields, which can be large;
/// prefer the per-mode representation unless physical-space values are
/// actually needed.
class Array3D {
public:
    Array3D() = default;

    Array3D(std::size_t ni, std::size_t nj, std::size_t nk, double fill = 0.0)
        : ni_(ni), nj_(nj), nk_(nk), data_(ni * nj * nk, fill) {}

    std::size_t ni() const { return ni_; }
    std::size_t nj() const { return nj_; }
    std::size_t nk() const { return nk_; }

    double& operator()(std::size_t i, std::size_t j, std::size_t k) {
        return data_[(i * nj_ + j) * nk_ + k];
    }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[(i * nj_ + j) * nk_ + k];
    }

    const std::vector<double>& data() const { return data_; }

private:
    std::size_t ni_ = 0, nj_ = 0, nk_ = 0;
    std::vector<double> data_;
};

} // namespace subdiff
