#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace subdiff {

/// Uniform time grid on [0, T] with nt nodes, t_i = i * dt, dt = T / (nt - 1).
struct TimeGrid {
    double T = 1.0;
    int nt = 2;

    TimeGrid() = default;
    TimeGrid(double T_, int nt_) : T(T_), nt(nt_) {
        if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: T must be positive");
        if (nt < 2) throw std::invalid_argument("TimeGrid: nt must be at least 2");
    }

    double dt() const { return T / (nt - 1); }
    double t(int i) const { return T * i / (nt - 1); }
};

/// Uniform space grid on [0, 1] with nx nodes, x_j = j * dx.
/// Endpoints carry homogeneous Dirichlet data in every solver below.
struct SpaceGrid {
    int nx = 3;

    SpaceGrid() = default;
    explicit SpaceGrid(int nx_) : nx(nx_) {
        if (nx < 3) throw std::invalid_argument("SpaceGrid: nx must be at least 3");
    }

    double dx() const { return 1.0 / (nx - 1); }
    double x(int j) const { return static_cast<double>(j) / (nx - 1); }
};

/// Uniform grid on [0, pi] used for the sine-series direction.
///
/// ny must be odd (composite Simpson quadrature needs an even interval
/// count) and at least 5.
struct YGrid {
    int ny = 5;

    YGrid() = default;
    explicit YGrid(int ny_) : ny(ny_) {
        if (ny < 5) throw std::invalid_argument("YGrid: ny must be at least 5");
        if (ny % 2 == 0) throw std::invalid_argument("YGrid: ny must be odd");
    }

    double dy() const { return std::numbers::pi / (ny - 1); }
    double y(int i) const { return std::numbers::pi * i / (ny - 1); }
};

} // namespace subdiff
