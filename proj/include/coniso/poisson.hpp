#pragma once

#include <functional>
#include <vector>

#include "coniso/domain.hpp"
#include "coniso/grid.hpp"

namespace coniso {

struct SolveStats {
    int iterations = 0;
    double rel_residual = 0.0;
    std::vector<double> residual_history;  // last few relative residuals
};

/// Dirichlet problem -Delta w = rhs in the rasterized domain, w = boundary
/// on the cut points of the domain boundary. Matrix-free conjugate
/// gradients with diagonal preconditioning; relative residual target
/// rel_tol. The rhs field supplies the grid; its values must be finite on
/// the rasterized interior.
ScalarField solve_poisson(const PlanarDomain& dom, const ScalarField& rhs,
                          const std::function<double(double, double)>& boundary,
                          double rel_tol = 1e-10, SolveStats* stats = nullptr);

/// Harmonic extension of the boundary data: solve_poisson with zero rhs.
ScalarField harmonic_extension(const PlanarDomain& dom, const GridSpec& g,
                               const std::function<double(double, double)>& boundary,
                               double rel_tol = 1e-10, SolveStats* stats = nullptr);

}  // namespace coniso
