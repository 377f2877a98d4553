#pragma once

// Periodic spectral discretization of the sheared computational box.
//
// Fields are stored as Fourier coefficients of w(t, x', y) = v(t, x' + t y, y),
// i.e. in the frame that moves with the free-streaming transport y d/dx. The
// physical frequency of a stored mode (kx, ky) at time t is (kx, ky - t kx);
// every norm and derivative in the library goes through that map.
//
// Conventions: arrays are nx-by-ny with index (i, j) <-> (x_i, y_j),
// x_i = -lx + i dx. The forward transform is mean preserving, so coeffs(0,0)
// is the spatial mean, and all continuum norms carry the box area 4 lx ly.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>

namespace kplab {

using RealArray = Eigen::ArrayXXd;
using ComplexArray = Eigen::ArrayXXcd;

constexpr int kMinModes = 8;
constexpr int kMaxSobolevIndex = 8;
constexpr int kMaxDerivativeOrder = 8;

struct Grid {
  int nx = 0;
  int ny = 0;
  double lx = 0.0;
  double ly = 0.0;
  Eigen::ArrayXd kx;  // FFT ordering, kx[m] = pi m / lx
  Eigen::ArrayXd ky;

  double dx() const { return 2.0 * lx / nx; }
  double dy() const { return 2.0 * ly / ny; }
  double x(int i) const { return -lx + i * dx(); }
  double y(int j) const { return -ly + j * dy(); }
  double area() const { return 4.0 * lx * ly; }
  double kx_max() const { return M_PI * (nx / 2) / lx; }
  double ky_max() const { return M_PI * (ny / 2) / ly; }
  // Radius of the largest disc of physical frequencies the grid resolves.
  double resolved_radius() const { return std::min(kx_max(), ky_max()); }
  Eigen::Index size() const { return Eigen::Index(nx) * ny; }

  RealArray x_coords() const;  // nx-by-ny array of x_i
  RealArray y_coords() const;  // nx-by-ny array of y_j

  bool operator==(const Grid& o) const {
    return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly;
  }
};

using GridPtr = std::shared_ptr<const Grid>;

/// Builds a grid with wavenumber tables in standard FFT ordering.
/// Throws std::invalid_argument for odd sizes, sizes below 8 or non-positive
/// box lengths.
GridPtr make_grid(int nx, int ny, double lx, double ly);

/// One time slice of a solution in the sheared spectral representation.
struct Field {
  GridPtr grid;
  double t = 0.0;
  ComplexArray coeffs;

  Field() = default;
  Field(GridPtr g, double time);
  Field(GridPtr g, double time, ComplexArray c);

  const Grid& g() const { return *grid; }
  static Field zeros(GridPtr g, double time) { return Field(std::move(g), time); }
};

// Pointwise algebra used by the solvers and the diagnostics.
Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& a);

/// Physical samples (at time t) to the sheared spectral representation.
/// For t != 0 each row y_j is shifted by t y_j in x before the y transform.
Field to_spectral(GridPtr grid, const RealArray& samples, double t = 0.0);

/// Physical samples v(x_i, y_j) at time f.t.
RealArray to_physical(const Field& f);

/// Samples of the sheared function w(x'_i, y_j). Products of fields are formed
/// on these samples.
RealArray to_sheared_samples(const Field& f);
Field from_sheared_samples(GridPtr grid, const RealArray& samples, double t);

/// Physical frequency along y of every stored mode, ky - t kx.
RealArray sheared_ky(const Grid& g, double t);

/// Physical-coordinate derivative d_x^l d_y^n. Nyquist rows/columns are
/// zeroed when the order is non-zero.
Field derivative(const Field& f, int l, int n);

/// H^s norm with the box-area factor (s = 0 gives the continuum L2 norm).
double sobolev_norm(const Field& f, int s = 4);
double sobolev_norm_squared(const Field& f, int s = 4);

/// ||d_y f||_{H^s}^2, the integrand of the dissipation functionals.
double dissipation_density(const Field& f, int s = 4);

/// Fraction of the H^4 energy carried by modes whose physical frequency lies
/// in the outer `band` of the resolved region,
/// hypot(kx / kx_max, (ky - t kx) / ky_max) >= 1 - band.
double tail_mass(const Field& f, double band);

/// 2/3-rule mask: true for modes kept by dealiasing.
Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> dealias_mask(const Grid& g);
void apply_dealias(Field& f);

/// Pointwise (1 + delta^2 (x^2 + y^2))^(power/2), power = +1 or -1.
RealArray weight_multiply(const Grid& g, const RealArray& samples, double delta, int power);

/// L2 norm of physical samples with the continuum area factor.
inline double l2_norm(const Grid& g, const RealArray& samples) {
  return std::sqrt(samples.square().sum() * g.dx() * g.dy());
}

}  // namespace kplab
