#pragma once

/// @file manufactured.hpp
/// Analytic machinery for verifying the reduced-system solvers: exact
/// residual evaluation of the field equations on analytic fields, induced
/// sources for manufactured-solution runs, exact solution families, and the
/// convergence studies shared by the CLI and the acceptance suite.

#include <map>
#include <string>
#include <vector>

#include "gwd/einstein.hpp"
#include "gwd/fields.hpp"
#include "gwd/grid.hpp"

namespace gwd {

struct AnalyticFieldSet {
  AnalyticField3 U, V, M, Y;
  AnalyticField3 T;  // defaults to the T = 0 gauge when empty
};

/// Pointwise residuals of the field equations evaluated with exact
/// derivatives (dual numbers), no grid involved.
struct EinsteinResiduals {
  double eq1 = 0, eq2 = 0, eq3 = 0, eq4 = 0, eq5 = 0;
  double ee_q = 0, ee_p = 0, ee_u = 0;  // marched (U+V+M), (U+V), U equations
  double y_ode = 0;
  double phi = 0, psi = 0;
};

EinsteinResiduals einstein_residuals(const AnalyticFieldSet& f, double theta,
                                     double eta, double v);

/// Coefficients of the linear Y ODE, Y'' = c1 Y' + c0 Y + r, with exact
/// derivatives of the analytic (U, V, M) at one point.
struct YodeCoefficients {
  double c1 = 0, c0 = 0, r = 0;
};
YodeCoefficients yode_coefficients(const AnalyticFieldSet& f, double theta,
                                   double eta, double v);

FieldSet sample_fields(const AnalyticFieldSet& f, const Grid3& g);
GridFunction sample_field(const AnalyticField3& f, const Grid3& g);

BoundaryData boundary_from(const AnalyticFieldSet& f);

/// Attach the sources induced by the analytic fields so they become an exact
/// solution of the marched equations.
void attach_mms_sources(const AnalyticFieldSet& f, EvolveOptions& opt);

double max_error(const GridFunction& num, const AnalyticField3& exact);

/// The manufactured field set used by the Einstein convergence study:
/// eta-dependence kept linear so a fixed transverse resolution does not
/// pollute the (theta, v) refinement ladder.
AnalyticFieldSet mms_einstein_fields();

/// Constraint-compatible pulse data: given V0(theta, eta) with M0 = 0, the
/// theta-constraint becomes E'' = -(V0_theta)^2 E / 4 with U0 = -2 ln E,
/// integrated per eta column. v0_theta must supply the exact theta-derivative.
BoundaryData constraint_pulse_data(
    std::function<double(double, double)> v0,
    std::function<double(double, double)> v0_theta, double theta_lo);

// ---------------------------------------------------------------------------
// Convergence studies

struct StudyResult {
  std::string name;
  std::vector<double> spacings;  // theta spacing per refinement level
  std::map<std::string, std::vector<double>> errors;
  std::map<std::string, double> observed_order;
};

StudyResult einstein_mms_study(int levels, int base_n = 33, int n_eta = 33);
StudyResult colliding_exact_study(int levels, int base_n = 33);
StudyResult hs_exact_study(int levels, int base_n = 33);
StudyResult parabolic_exact_study(int levels);
StudyResult constraint_pulse_study(int levels, int base_n = 33,
                                   int base_n_eta = 17);

}  // namespace gwd
