#include "wegnerlab/landau.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "wegnerlab/error.hpp"
#include "wegnerlab/io.hpp"
#include "wegnerlab/quadrature.hpp"

namespace wl {

void LandauParams::validate() const {
  require(b > 0.0 && std::isfinite(b), "field strength B must be positive");
  require(level >= 0, "Landau level index must be >= 0");
}

double laguerre(int n, double xi) {
  require(n >= 0, "Laguerre index must be >= 0");
  require(xi >= 0.0, "Laguerre argument must be >= 0");
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 1.0 - xi;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - xi) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

std::complex<double> landau_kernel(const LandauParams& params, const Eigen::Vector2d& x,
                                   const Eigen::Vector2d& y) {
  const double b = params.b;
  const double r2 = (x - y).squaredNorm();
  const double phase = 0.5 * b * (x[1] * y[0] - x[0] * y[1]);
  const double mod = b / (2.0 * std::numbers::pi) * std::exp(-0.25 * b * r2) *
                     laguerre(params.level, 0.5 * b * r2);
  return std::polar(mod, phase);
}

double landau_staircase(double b, double energy) {
  require(b > 0.0 && std::isfinite(b), "field strength B must be positive");
  if (!(energy > 0.5 * b)) return 0.0;
  long long n = std::max<long long>(0, static_cast<long long>(std::floor(energy / b - 0.5)) - 2);
  while ((n + 0.5) * b < energy) ++n;
  return b / (2.0 * std::numbers::pi) * static_cast<double>(n);
}

double landau_cell_trace(const LandauParams& params, double tolerance) {
  params.validate();
  const QuadratureRule cell = mapped(gauss_legendre(3), -0.5, 0.5);
  const QuadratureRule angle = mapped(gauss_legendre(16), 0.0, 2.0 * std::numbers::pi);
  const QuadratureRule panel = gauss_legendre(20);
  // |P(x, y)|^2 carries e^{-B r^2 / 2} times a polynomial of degree 2l in B r^2 / 2
  const double r_max = std::sqrt(2.0 * (60.0 + 8.0 * params.level) / params.b);

  auto radial_sweep = [&](int panels) {
    double total = 0.0;
    for (Eigen::Index a = 0; a < cell.nodes.size(); ++a)
      for (Eigen::Index c = 0; c < cell.nodes.size(); ++c) {
        const Eigen::Vector2d x(cell.nodes[a], cell.nodes[c]);
        const double wx = cell.weights[a] * cell.weights[c];
        double inner = 0.0;
        for (int p = 0; p < panels; ++p) {
          const QuadratureRule rad = mapped(panel, r_max * p / panels, r_max * (p + 1) / panels);
          for (Eigen::Index i = 0; i < rad.nodes.size(); ++i)
            for (Eigen::Index j = 0; j < angle.nodes.size(); ++j) {
              const double r = rad.nodes[i];
              const Eigen::Vector2d y =
                  x + r * Eigen::Vector2d(std::cos(angle.nodes[j]), std::sin(angle.nodes[j]));
              inner += rad.weights[i] * angle.weights[j] * r * std::norm(landau_kernel(params, x, y));
            }
        }
        total += wx * inner;
      }
    return total;
  };

  int panels = 4;
  double previous = radial_sweep(panels);
  for (int round = 0; round < 8; ++round) {
    panels *= 2;
    const double current = radial_sweep(panels);
    if (std::abs(current - previous) <= tolerance * std::max(1.0, std::abs(current))) return current;
    previous = current;
  }
  throw Error(ErrorKind::numerical, "Landau cell trace quadrature did not converge");
}

std::vector<StaircasePoint> staircase_curve(double b, const std::vector<double>& energies) {
  std::vector<StaircasePoint> out;
  out.reserve(energies.size());
  for (double e : energies) out.push_back({e, landau_staircase(b, e)});
  return out;
}

void write_staircase_csv(std::ostream& out, const std::vector<StaircasePoint>& curve) {
  out << "E,N\n";
  for (const auto& p : curve) out << fmt_double(p.energy) << ',' << fmt_double(p.ids) << '\n';
}

}  // namespace wl
