#include <doctest.h>

#include "kplab/spectral.hpp"

#include <random>

using namespace kplab;

namespace {

RealArray sample(const Grid& g, double (*fn)(double, double)) {
  RealArray s(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) s(i, j) = fn(g.x(i), g.y(j));
  return s;
}

RealArray random_samples(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RealArray s(g.nx, g.ny);
  for (Eigen::Index k = 0; k < s.size(); ++k) s(k) = u(rng);
  return s;
}

}  // namespace

TEST_CASE("make_grid wavenumber tables") {
  auto g = make_grid(8, 8, M_PI, M_PI);
  const double expect[8] = {0, 1, 2, 3, -4, -3, -2, -1};
  for (int m = 0; m < 8; ++m) CHECK(g->kx[m] == doctest::Approx(expect[m]));

  auto h = make_grid(8, 8, 2 * M_PI, 2 * M_PI);
  CHECK(h->kx[1] - h->kx[0] == doctest::Approx(0.5));
  CHECK(h->ky[2] == doctest::Approx(1.0));

  CHECK_THROWS_AS(make_grid(7, 8, M_PI, M_PI), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(6, 8, M_PI, M_PI), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(8, 8, 0.0, M_PI), std::invalid_argument);
}

TEST_CASE("transform of a constant and of cos x") {
  auto g = make_grid(16, 16, M_PI, M_PI);
  RealArray c = RealArray::Constant(16, 16, 2.5);
  Field fc = to_spectral(g, c);
  CHECK(fc.coeffs(0, 0).real() == doctest::Approx(2.5));
  CHECK(fc.coeffs.abs().sum() - std::abs(fc.coeffs(0, 0)) < 1e-14);

  Field f = to_spectral(g, sample(*g, [](double x, double) { return std::cos(x); }));
  int nonzero = 0;
  for (Eigen::Index k = 0; k < f.coeffs.size(); ++k) {
    if (std::abs(f.coeffs(k)) > 1e-12) {
      ++nonzero;
      CHECK(std::abs(f.coeffs(k)) == doctest::Approx(0.5));
    }
  }
  CHECK(nonzero == 2);
  CHECK(std::abs(f.coeffs(1, 0)) == doctest::Approx(0.5));
  CHECK(std::abs(f.coeffs(15, 0)) == doctest::Approx(0.5));
}

TEST_CASE("round trip and shape errors") {
  auto g = make_grid(32, 16, 3.0, 2.0);
  RealArray s = random_samples(*g, 7);
  for (double t : {0.0, 0.7, -1.3}) {
    RealArray back = to_physical(to_spectral(g, s, t));
    CHECK((back - s).abs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(to_spectral(g, RealArray::Zero(16, 16)), std::invalid_argument);
}

TEST_CASE("Parseval: s = 0 norm equals the sample L2 norm") {
  auto g = make_grid(32, 32, 2.0, 5.0);
  RealArray s = random_samples(*g, 3);
  const double direct = std::sqrt(s.square().sum() * g->dx() * g->dy());
  CHECK(sobolev_norm(to_spectral(g, s), 0) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(sobolev_norm(to_spectral(g, s, 0.4), 0) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("H4 norm of cos x") {
  auto g = make_grid(16, 16, M_PI, M_PI);
  Field f = to_spectral(g, sample(*g, [](double x, double) { return std::cos(x); }));
  CHECK(sobolev_norm_squared(f, 4) == doctest::Approx(32.0 * M_PI * M_PI).epsilon(1e-12));
  CHECK(sobolev_norm(Field::zeros(g, 0.0)) == 0.0);
  CHECK_THROWS_AS(sobolev_norm(f, 9), std::out_of_range);
}

TEST_CASE("derivative in the sheared frame matches finite differences") {
  // stored mode (kx, ky) = (1, 0) at t = 2 is v = cos(x - 2 y) in physical coordinates
  auto g = make_grid(64, 64, M_PI, M_PI);
  const double t = 2.0;
  RealArray v(64, 64);
  for (int j = 0; j < 64; ++j)
    for (int i = 0; i < 64; ++i) v(i, j) = std::cos(g->x(i) - t * g->y(j));
  Field f = to_spectral(g, v, t);
  for (int j = 0; j < 64; ++j)
    for (int i = 0; i < 64; ++i) {
      const bool mode = j == 0 && (i == 1 || i == 63);
      CHECK(std::abs(f.coeffs(i, j)) == doctest::Approx(mode ? 0.5 : 0.0).epsilon(1e-12));
    }

  // fourth-order periodic difference in y on the physical samples
  RealArray fd(64, 64);
  const double h = g->dy();
  for (int j = 0; j < 64; ++j)
    for (int i = 0; i < 64; ++i) {
      auto at = [&](int dj) { return v(i, (j + dj + 64) % 64); };
      fd(i, j) = (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h);
    }
  RealArray dy = to_physical(derivative(f, 0, 1));
  CHECK((dy - fd).abs().maxCoeff() < 1e-4);
  const auto ratio = derivative(f, 0, 1).coeffs(1, 0) / f.coeffs(1, 0);
  CHECK(ratio.real() == doctest::Approx(0.0));
  CHECK(ratio.imag() == doctest::Approx(-2.0));

  Field same = derivative(f, 0, 0);
  CHECK((same.coeffs - f.coeffs).abs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(derivative(f, 5, 4), std::out_of_range);
}

TEST_CASE("derivative at t = 0 reduces to plain multipliers") {
  auto g = make_grid(64, 64, 6.0, 6.0);
  RealArray s = sample(*g, [](double x, double y) { return std::exp(-x * x - 2 * y * y); });
  RealArray exact = sample(*g, [](double x, double y) { return -2 * x * -4 * y * std::exp(-x * x - 2 * y * y); });
  RealArray d = to_physical(derivative(to_spectral(g, s), 1, 1));
  CHECK((d - exact).abs().maxCoeff() < 1e-9);
}

TEST_CASE("tail mass") {
  auto g = make_grid(32, 32, M_PI, M_PI);
  Field low(g, 0.0);
  low.coeffs(1, 0) = 1.0;
  CHECK(tail_mass(low, 0.25) == 0.0);
  CHECK(tail_mass(Field::zeros(g, 0.0), 0.25) == 0.0);

  // H4-flat white noise: the tail mass is the fraction of modes in the band
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 2 * M_PI);
  Field w(g, 0.0);
  int in_band = 0;
  for (int j = 0; j < 32; ++j)
    for (int i = 0; i < 32; ++i) {
      const double kx = g->kx[i], ky = g->ky[j];
      const double weight = std::pow(1 + kx * kx + ky * ky, 4);
      w.coeffs(i, j) = std::polar(1.0 / std::sqrt(weight), u(rng));
      if (std::hypot(kx / g->kx_max(), ky / g->ky_max()) >= 0.75) ++in_band;
    }
  CHECK(tail_mass(w, 0.25) == doctest::Approx(double(in_band) / (32 * 32)).epsilon(1e-12));
  CHECK(tail_mass(w, 0.25) > 0.4);
}

TEST_CASE("dealias mask keeps the inner two thirds") {
  auto g = make_grid(12, 12, M_PI, M_PI);
  auto m = dealias_mask(*g);
  CHECK(m(0, 0));
  CHECK(m(3, 3));
  CHECK(m(4, 0));
  CHECK_FALSE(m(5, 0));
  CHECK_FALSE(m(6, 6));
}

TEST_CASE("weight_multiply") {
  auto g = make_grid(8, 8, 2.0, 2.0);
  RealArray s = random_samples(*g, 5);
  CHECK((weight_multiply(*g, s, 0.0, -1) - s).abs().maxCoeff() == 0.0);
  RealArray pair = weight_multiply(*g, weight_multiply(*g, s, 0.3, -1), 0.3, 1);
  CHECK((pair - s).abs().maxCoeff() < 1e-14);
  RealArray one = RealArray::Ones(8, 8);
  RealArray w = weight_multiply(*g, one, 1.0, -1);
  CHECK(g->x(6) == doctest::Approx(1.0));
  CHECK(g->y(4) == doctest::Approx(0.0));
  CHECK(w(6, 4) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("derivatives compose exactly") {
  auto g = make_grid(32, 32, 3.0, 3.0);
  Field f = to_spectral(g, random_samples(*g, 9), 0.6);
  Field a = derivative(derivative(f, 1, 0), 0, 1);
  Field b = derivative(f, 1, 1);
  CHECK((a.coeffs - b.coeffs).abs().maxCoeff() <= 1e-15 * b.coeffs.abs().maxCoeff());
}

TEST_CASE("inverse weight is bounded by one and decreasing in radius") {
  auto g = make_grid(16, 16, 5.0, 5.0);
  RealArray w = weight_multiply(*g, RealArray::Ones(16, 16), 0.4, -1);
  CHECK(w.maxCoeff() <= 1.0);
  RealArray r2 = g->x_coords().square() + g->y_coords().square();
  for (Eigen::Index a = 0; a < w.size(); ++a)
    for (Eigen::Index b = 0; b < w.size(); ++b)
      if (r2(a) < r2(b)) CHECK(w(a) >= w(b));
}
