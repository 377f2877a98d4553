#include "kplab/profiles.hpp"

#include <random>

namespace kplab {

std::string profile_name(ProfileKind k) {
  switch (k) {
    case ProfileKind::Zero: return "zero";
    case ProfileKind::Gaussian: return "gaussian";
    case ProfileKind::Algebraic: return "algebraic";
  }
  return "unknown";
}

ProfileKind parse_profile(const std::string& name) {
  if (name == "zero") return ProfileKind::Zero;
  if (name == "gaussian") return ProfileKind::Gaussian;
  if (name == "algebraic") return ProfileKind::Algebraic;
  throw std::invalid_argument("unknown profile '" + name + "'");
}

double unit_from_bits(std::uint64_t bits) { return double(bits >> 11) * 0x1.0p-53; }

namespace {

Field gaussian(GridPtr grid, double sx, double sy) {
  const RealArray x = grid->x_coords(), y = grid->y_coords();
  const RealArray v = (-(x.square() / (2.0 * sx * sx)) - y.square() / (2.0 * sy * sy)).exp();
  return to_spectral(grid, v, 0.0);
}

Field algebraic(GridPtr grid, std::uint64_t seed) {
  const Grid& g = *grid;
  std::mt19937_64 rng(seed);
  Field f(grid, 0.0);
  const double cutoff = 2.0 / 3.0 * g.resolved_radius();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int pi = (g.nx - i) % g.nx, pj = (g.ny - j) % g.ny;
      // Visit each conjugate pair once, in a fixed order.
      if (pj < j || (pj == j && pi < i)) continue;
      const double k2 = g.kx[i] * g.kx[i] + g.ky[j] * g.ky[j];
      const double phase = 2.0 * M_PI * unit_from_bits(rng());
      if (k2 == 0.0 || std::sqrt(k2) > cutoff || i == g.nx / 2 || j == g.ny / 2) continue;
      const std::complex<double> c = std::pow(1.0 + k2, -3.0) * std::polar(1.0, phase);
      f.coeffs(i, j) = c;
      f.coeffs(pi, pj) = std::conj(c);
    }
  }
  return f;
}

}  // namespace

Field make_profile(GridPtr grid, const ProfileSpec& spec) {
  if (!(spec.eps >= 0.0)) throw std::invalid_argument("profile amplitude must be non-negative");
  Field f(grid, 0.0);
  switch (spec.kind) {
    case ProfileKind::Zero: return f;
    case ProfileKind::Gaussian:
      if (!(spec.sigma_x > 0.0) || !(spec.sigma_y > 0.0)) throw std::invalid_argument("sigma must be positive");
      f = gaussian(grid, spec.sigma_x, spec.sigma_y);
      break;
    case ProfileKind::Algebraic: f = algebraic(grid, spec.seed); break;
  }
  const double n = sobolev_norm(f);
  if (n > 0.0) f.coeffs *= spec.eps / n;
  return f;
}

}  // namespace kplab
