#pragma once

#include "subdiff/array.hpp"
#include "subdiff/grids.hpp"

namespace subdiff {

/// Solution values of one sine mode u_k(t, x) on the full time-space grid.
///
/// Row i holds the x-profile at time node i; columns 0 and nx-1 are the
/// Dirichlet boundary and stay zero for anything produced by the solvers.
struct ModeField {
    int k = 1;                 ///< mode index, eigenvalue is k^2
    TimeGrid tg;
    SpaceGrid sg;
    Array2D values;            ///< (nt x nx)

    ModeField() = default;
    ModeField(int k_, const TimeGrid& tg_, const SpaceGrid& sg_)
        : k(k_), tg(tg_), sg(sg_), values(tg_.nt, sg_.nx, 0.0) {
        if (k < 1) throw std::invalid_argument("ModeField: k must be positive");
    }

    double lambda() const { return static_cast<double>(k) * k; }
};

} // namespace subdiff
