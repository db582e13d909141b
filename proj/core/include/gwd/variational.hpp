#pragma once

/// @file variational.hpp
/// The reduced asymptotic action: Lagrangian density evaluated with grid
/// stencils, trapezoidal action, and centered finite-difference Gateaux
/// derivatives used as an independent stationarity oracle on solver output.

#include "gwd/einstein.hpp"

namespace gwd {

enum class VariationDirection { U, V, M, Y, T };

struct ActionEvaluation {
  GridFunction density;
  double action = 0.0;
};

/// Requires all five fields; an absent T is treated as the zero function.
ActionEvaluation lagrangian_density(
    const FieldSet& fields, BoundaryMode eta_mode = BoundaryMode::OneSided);

/// [S(fields + step*probe*e_dir) - S(fields - step*probe*e_dir)] / (2 step).
/// The probe must vanish on every boundary face (it otherwise invalidates the
/// integration by parts the oracle relies on).
double variational_residual(const FieldSet& fields, VariationDirection dir,
                            const GridFunction& probe, double step,
                            BoundaryMode eta_mode = BoundaryMode::OneSided);

/// Smooth interior probe supported well away from all faces, for seeded
/// stationarity sweeps.
GridFunction random_interior_probe(const Grid3& grid, std::uint64_t seed);

}  // namespace gwd
