#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace wl {

/// Constant perpendicular field B in units hbar = m = q = 1.
struct LandauParams {
  double b = 1.0;
  int level = 0;

  double energy() const { return (level + 0.5) * b; }
  void validate() const;
};

/// Laguerre polynomial L_n(xi) by the three-term recurrence.
double laguerre(int n, double xi);

/// Integral kernel P_l(x, y) of the l-th Landau-level projection.
std::complex<double> landau_kernel(const LandauParams& params, const Eigen::Vector2d& x,
                                   const Eigen::Vector2d& y);

/// Integrated density of states of the Landau Hamiltonian (left-continuous).
double landau_staircase(double b, double energy);

/// Tr[1_Λ(0) P_l 1_Λ(0)] computed as the Hilbert–Schmidt integral
/// ∫_{Λ(0)} dx ∫_{R^2} dy |P_l(x, y)|^2 with tensor Gauss–Legendre rules
/// (polar coordinates around x, radial panels refined until stable).
double landau_cell_trace(const LandauParams& params, double tolerance = 1e-12);

struct StaircasePoint {
  double energy;
  double ids;
};

std::vector<StaircasePoint> staircase_curve(double b, const std::vector<double>& energies);
void write_staircase_csv(std::ostream& out, const std::vector<StaircasePoint>& curve);

}  // namespace wl
