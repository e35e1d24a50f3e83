#pragma once

#include <cmath>
#include <cstdint>

#include "fracdeg/point.hpp"

namespace fracdeg {

// splitmix64: tiny, seedable, identical output on every platform.  The
// standard <random> distributions are implementation-defined, which would
// break byte-for-byte reproducibility of experiment outputs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

  Pt point_in(const Box& box) {
    Pt x(box.dim());
    for (int i = 0; i < box.dim(); ++i) x[i] = uniform(box.lo[i], box.hi[i]);
    return x;
  }

  // Uniform direction on the euclidean unit sphere (Box-Muller based).
  Pt direction(int dim) {
    Pt d(dim);
    double n2 = 0.0;
    do {
      for (int i = 0; i < dim; ++i) {
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 < 1e-300) u1 = 1e-300;
        d[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
      }
      n2 = d.norm2();
    } while (n2 < 1e-12);
    return (1.0 / n2) * d;
  }

 private:
  std::uint64_t state_;
};

}  // namespace fracdeg
