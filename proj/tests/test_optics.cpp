#include <cmath>

#include "doctest.h"
#include "ghostlab/optics.hpp"

using namespace ghostlab;

TEST_CASE("mask application is a pointwise product") {
  FieldGrid f(8, 1.0);
  for (auto& v : f.values) v = Complex(2.0, 0.0);
  TransmissionMask t = identity_mask(8, 1, 1.0, 1.0);
  t.values.at(3) = Complex(0.0, 0.5);
  FieldGrid g = apply_mask(f, t);
  CHECK(g.at(3) == Complex(0.0, 1.0));
  CHECK(g.at(4) == Complex(2.0, 0.0));
}

TEST_CASE("focal plane of a plane wave concentrates at the axis") {
  FieldGrid f(128, 1e-5);
  for (auto& v : f.values) v = 1.0;
  FieldGrid F = to_focal_plane(f, 0.5e-6, 0.1);
  double total = 0.0;
  for (auto& v : F.values) total += std::norm(v);
  CHECK(std::norm(F.at(64)) / total > 0.999);
  // energy preserved (unitary transform)
  CHECK(total == doctest::Approx(128.0).epsilon(1e-12));
}

TEST_CASE("focal plane single slit has its first zero at lambda F / W") {
  const int n = 4096;
  const double p = 5e-6, wl = 0.5e-6, F = 0.2;
  const double W = 400e-6;
  FieldGrid f(n, p);
  for (int i = 0; i < n; ++i) {
    double x = (i - n / 2) * p;
    f.at(i) = std::abs(x) <= W / 2 ? 1.0 : 0.0;
  }
  FieldGrid out = to_focal_plane(f, wl, F);
  Axis ax = focal_plane_axis(n, p, wl, F);
  // lambda F / W = 250um; find the first minimum right of center
  double dxf = ax.spacing();
  int k0 = n / 2;
  int kzero = int(std::round(wl * F / W / dxf));
  double at_zero = std::norm(out.at(k0 + kzero));
  CHECK(at_zero / std::norm(out.at(k0)) < 1e-3);
}

TEST_CASE("image relay inverts at unit magnification") {
  FieldGrid f(64, 1.0);
  f.at(32 + 5) = Complex(3.0, 1.0);
  FieldGrid g = image_relay(f, 1.0);
  CHECK(g.at(32 - 5) == Complex(3.0, 1.0));
  CHECK(std::abs(g.at(32 + 5)) == doctest::Approx(0.0));
}

TEST_CASE("image relay maps x to -x/m with amplitude scaling") {
  // feature at +30 sites should land near -30/m sites
  const double m = 1.2;
  FieldGrid f(256, 1.0);
  f.at(128 + 30) = Complex(1.0, 0.0);
  FieldGrid g = image_relay(f, m);
  int expect = 128 - int(std::round(30.0 / m));
  double peak = 0.0;
  int at = -1;
  for (int i = 0; i < 256; ++i)
    if (std::abs(g.at(i)) > peak) {
      peak = std::abs(g.at(i));
      at = i;
    }
  CHECK(std::abs(at - expect) <= 1);
  CHECK(peak == doctest::Approx(m));
}
