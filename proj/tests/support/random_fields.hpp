#pragma once

// Seeded smooth random fields: sums of a few low-frequency trigonometric
// modes with random amplitudes and phases.

#include <cmath>
#include <random>
#include <vector>

#include "minkembed/grid.hpp"
#include "minkembed/hypersurface.hpp"

namespace testsupport {

class SmoothRandom {
 public:
  explicit SmoothRandom(unsigned seed) : rng_(seed) {}

  // Field of the given shape; every component is an independent mode sum.
  minkembed::TensorField field(const minkembed::GridChart& chart, std::vector<std::size_t> shape, double amplitude) {
    std::size_t comps = 1;
    for (auto s : shape) comps *= s;
    const std::size_t m = chart.dim();
    std::uniform_real_distribution<double> amp(-amplitude, amplitude), phase(0.0, 6.283185307179586),
        freq(0.5, 2.5);
    struct Mode {
      double a, phi;
      std::vector<double> k;
    };
    std::vector<std::vector<Mode>> modes(comps);
    for (auto& cm : modes)
      for (int t = 0; t < 3; ++t) {
        Mode md{amp(rng_), phase(rng_), std::vector<double>(m)};
        for (auto& k : md.k) k = freq(rng_);
        cm.push_back(md);
      }
    return minkembed::TensorField::sample(chart, std::move(shape), [&](auto x, auto out) {
      for (std::size_t c = 0; c < comps; ++c) {
        double v = 0.0;
        for (const auto& md : modes[c]) {
          double arg = md.phi;
          for (std::size_t a = 0; a < m; ++a) arg += md.k[a] * x[a];
          v += md.a * std::sin(arg);
        }
        out[c] = v;
      }
    });
  }

  // Random rigged operators with the required symmetries.
  minkembed::RiggedOperators rigged(const minkembed::GridChart& chart) {
    const std::size_t n = chart.dim();
    auto gamma = field(chart, {n, n, n}, 1.0);
    auto k = field(chart, {n, n}, 1.0);
    for (std::size_t pt = 0; pt < chart.points(); ++pt)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          k(pt, j * n + i) = k(pt, i * n + j);
          for (std::size_t s = 0; s < n; ++s) gamma(pt, (s * n + j) * n + i) = gamma(pt, (s * n + i) * n + j);
        }
    return {chart, std::move(gamma), std::move(k), field(chart, {n, n}, 1.0), field(chart, {n}, 1.0)};
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testsupport
