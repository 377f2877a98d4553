#include "kplab/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace kplab {

namespace {

// FFTW planning is not thread safe; execution on new arrays is. Plans are made
// once per shape with FFTW_UNALIGNED so they can run on any Eigen buffer.
class PlanCache {
 public:
  enum Kind { Forward2d, Backward2d, ForwardX, BackwardX, ForwardY, BackwardY };

  fftw_plan get(Kind kind, int nx, int ny) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_tuple(int(kind), nx, ny);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    ComplexArray scratch(nx, ny);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = nullptr;
    switch (kind) {
      // Column-major nx-by-ny: x is the fastest index, so FFTW sees (ny, nx).
      case Forward2d: plan = fftw_plan_dft_2d(ny, nx, p, p, FFTW_FORWARD, flags); break;
      case Backward2d: plan = fftw_plan_dft_2d(ny, nx, p, p, FFTW_BACKWARD, flags); break;
      case ForwardX:
      case BackwardX: {
        int n[] = {nx};
        plan = fftw_plan_many_dft(1, n, ny, p, nullptr, 1, nx, p, nullptr, 1, nx,
                                  kind == ForwardX ? FFTW_FORWARD : FFTW_BACKWARD, flags);
        break;
      }
      case ForwardY:
      case BackwardY: {
        int n[] = {ny};
        plan = fftw_plan_many_dft(1, n, nx, p, nullptr, nx, 1, p, nullptr, nx, 1,
                                  kind == ForwardY ? FFTW_FORWARD : FFTW_BACKWARD, flags);
        break;
      }
    }
    if (!plan) throw std::runtime_error("fftw: failed to create plan");
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& kv : plans_) fftw_destroy_plan(kv.second);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plans() {
  static PlanCache cache;
  return cache;
}

void run(PlanCache::Kind kind, ComplexArray& a) {
  auto* p = reinterpret_cast<fftw_complex*>(a.data());
  fftw_execute_dft(plans().get(kind, int(a.rows()), int(a.cols())), p, p);
}

void check_shape(const Grid& g, const RealArray& samples) {
  if (samples.rows() != g.nx || samples.cols() != g.ny)
    throw std::invalid_argument("sample array shape does not match grid");
}

// Multiplies column j (fixed y_j) by exp(sign * i kx t y_j).
void shear_phase(const Grid& g, ComplexArray& a, double t, double sign) {
  for (int j = 0; j < g.ny; ++j) {
    const double s = sign * t * g.y(j);
    for (int i = 0; i < g.nx; ++i) a(i, j) *= std::polar(1.0, g.kx[i] * s);
  }
}

Eigen::ArrayXd wavenumbers(int n, double l) {
  Eigen::ArrayXd k(n);
  for (int m = 0; m < n; ++m) k[m] = M_PI * (m < n / 2 ? m : m - n) / l;
  return k;
}

}  // namespace

RealArray Grid::x_coords() const {
  RealArray a(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) a(i, j) = x(i);
  return a;
}

RealArray Grid::y_coords() const {
  RealArray a(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) a(i, j) = y(j);
  return a;
}

GridPtr make_grid(int nx, int ny, double lx, double ly) {
  if (nx < kMinModes || ny < kMinModes || nx % 2 || ny % 2)
    throw std::invalid_argument("grid sizes must be even and at least 8");
  if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("box lengths must be positive");
  auto g = std::make_shared<Grid>();
  g->nx = nx;
  g->ny = ny;
  g->lx = lx;
  g->ly = ly;
  g->kx = wavenumbers(nx, lx);
  g->ky = wavenumbers(ny, ly);
  return g;
}

Field::Field(GridPtr g, double time) : grid(std::move(g)), t(time) {
  coeffs = ComplexArray::Zero(grid->nx, grid->ny);
}

Field::Field(GridPtr g, double time, ComplexArray c) : grid(std::move(g)), t(time), coeffs(std::move(c)) {
  if (coeffs.rows() != grid->nx || coeffs.cols() != grid->ny)
    throw std::invalid_argument("coefficient array shape does not match grid");
}

Field operator+(const Field& a, const Field& b) { return Field(a.grid, a.t, a.coeffs + b.coeffs); }
Field operator-(const Field& a, const Field& b) { return Field(a.grid, a.t, a.coeffs - b.coeffs); }
Field operator*(double s, const Field& a) { return Field(a.grid, a.t, s * a.coeffs); }

Field to_spectral(GridPtr grid, const RealArray& samples, double t) {
  const Grid& g = *grid;
  check_shape(g, samples);
  ComplexArray a = samples.cast<std::complex<double>>();
  if (t == 0.0) {
    run(PlanCache::Forward2d, a);
  } else {
    run(PlanCache::ForwardX, a);
    shear_phase(g, a, t, +1.0);
    run(PlanCache::ForwardY, a);
  }
  a /= double(g.size());
  return Field(std::move(grid), t, std::move(a));
}

RealArray to_physical(const Field& f) {
  const Grid& g = f.g();
  ComplexArray a = f.coeffs;
  if (f.t == 0.0) {
    run(PlanCache::Backward2d, a);
  } else {
    run(PlanCache::BackwardY, a);
    shear_phase(g, a, f.t, -1.0);
    run(PlanCache::BackwardX, a);
  }
  return a.real();
}

RealArray to_sheared_samples(const Field& f) {
  ComplexArray a = f.coeffs;
  run(PlanCache::Backward2d, a);
  return a.real();
}

Field from_sheared_samples(GridPtr grid, const RealArray& samples, double t) {
  check_shape(*grid, samples);
  ComplexArray a = samples.cast<std::complex<double>>();
  run(PlanCache::Forward2d, a);
  a /= double(grid->size());
  return Field(std::move(grid), t, std::move(a));
}

RealArray sheared_ky(const Grid& g, double t) {
  RealArray k(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) k(i, j) = g.ky[j] - t * g.kx[i];
  return k;
}

Field derivative(const Field& f, int l, int n) {
  if (l < 0 || n < 0) throw std::invalid_argument("derivative orders must be non-negative");
  if (l + n > kMaxDerivativeOrder) throw std::out_of_range("derivative order exceeds resolution-safety cap");
  if (l == 0 && n == 0) return f;
  const Grid& g = f.g();
  const std::complex<double> I(0.0, 1.0);
  Field out(f.grid, f.t);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i == g.nx / 2 || j == g.ny / 2) continue;  // Nyquist has no conjugate partner
      const std::complex<double> mx = I * g.kx[i];
      const std::complex<double> my = I * (g.ky[j] - f.t * g.kx[i]);
      std::complex<double> m(1.0, 0.0);
      for (int p = 0; p < l; ++p) m *= mx;
      for (int p = 0; p < n; ++p) m *= my;
      out.coeffs(i, j) = m * f.coeffs(i, j);
    }
  }
  return out;
}

namespace {

RealArray sobolev_weight(const Grid& g, double t, int s) {
  RealArray w(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double ky = g.ky[j] - t * g.kx[i];
      w(i, j) = std::pow(1.0 + g.kx[i] * g.kx[i] + ky * ky, s);
    }
  }
  return w;
}

}  // namespace

double sobolev_norm_squared(const Field& f, int s) {
  if (s < 0 || s > kMaxSobolevIndex) throw std::out_of_range("Sobolev index outside [0, 8]");
  const Grid& g = f.g();
  return (sobolev_weight(g, f.t, s) * f.coeffs.abs2()).sum() * g.area();
}

double sobolev_norm(const Field& f, int s) { return std::sqrt(sobolev_norm_squared(f, s)); }

double dissipation_density(const Field& f, int s) {
  const Grid& g = f.g();
  const RealArray ky = sheared_ky(g, f.t);
  return (sobolev_weight(g, f.t, s) * ky.square() * f.coeffs.abs2()).sum() * g.area();
}

double tail_mass(const Field& f, double band) {
  if (!(band > 0.0 && band < 1.0)) throw std::invalid_argument("band must lie in (0, 1)");
  const Grid& g = f.g();
  const double r0 = 1.0 - band;
  const double sx = 1.0 / g.kx_max(), sy = 1.0 / g.ky_max();
  const RealArray energy = sobolev_weight(g, f.t, 4) * f.coeffs.abs2();
  double total = 0.0, tail = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double ky = g.ky[j] - f.t * g.kx[i];
      total += energy(i, j);
      if (std::hypot(g.kx[i] * sx, ky * sy) >= r0) tail += energy(i, j);
    }
  }
  return total > 0.0 ? tail / total : 0.0;
}

Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> dealias_mask(const Grid& g) {
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> m(g.nx, g.ny);
  const double cx = 2.0 / 3.0 * g.kx_max(), cy = 2.0 / 3.0 * g.ky_max();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) m(i, j) = std::abs(g.kx[i]) <= cx && std::abs(g.ky[j]) <= cy;
  return m;
}

void apply_dealias(Field& f) {
  const auto m = dealias_mask(f.g());
  f.coeffs = m.select(f.coeffs, std::complex<double>(0.0, 0.0));
}

RealArray weight_multiply(const Grid& g, const RealArray& samples, double delta, int power) {
  check_shape(g, samples);
  if (delta < 0.0) throw std::invalid_argument("delta must be non-negative");
  if (power != 1 && power != -1) throw std::invalid_argument("weight power must be +1 or -1");
  if (delta == 0.0) return samples;
  const RealArray r2 = g.x_coords().square() + g.y_coords().square();
  const RealArray bracket = (1.0 + delta * delta * r2).sqrt();
  return power > 0 ? RealArray(samples * bracket) : RealArray(samples / bracket);
}

}  // namespace kplab
