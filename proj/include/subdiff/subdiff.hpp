#pragma once

/// Umbrella header: the whole library in one include.
///
/// Numerics for the inverse source problem of a time-fractional subdiffusion
/// equation on (0,1) x (0,pi): recover a separated source factor h(t,x) from
/// interior trace measurements psi(t,x) = u(t,x,l0) by sine-series
/// decomposition in y and a contractive source iteration.

#include "subdiff/array.hpp"
#include "subdiff/estimates.hpp"
#include "subdiff/fields.hpp"
#include "subdiff/forward.hpp"
#include "subdiff/fracops.hpp"
#include "subdiff/grids.hpp"
#include "subdiff/inverse.hpp"
#include "subdiff/io.hpp"
#include "subdiff/mms.hpp"
#include "subdiff/modesolver.hpp"
#include "subdiff/problem.hpp"
#include "subdiff/runner.hpp"
#include "subdiff/specfun.hpp"
#include "subdiff/spectral.hpp"
#include "subdiff/tridiag.hpp"
#include "subdiff/util.hpp"
