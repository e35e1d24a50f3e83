#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace fracdeg {

// Everything in this library lives in R^n for small n; a fixed-capacity
// vector avoids heap traffic in the evaluation loops.
inline constexpr int kMaxDim = 8;

class Pt {
 public:
  Pt() = default;
  explicit Pt(int dim, double fill = 0.0) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Pt: dimension out of range");
    c_.fill(0.0);
    for (int i = 0; i < dim; ++i) c_[i] = fill;
  }
  Pt(std::initializer_list<double> xs) : dim_(static_cast<int>(xs.size())) {
    if (dim_ < 1 || dim_ > kMaxDim) throw std::invalid_argument("Pt: dimension out of range");
    c_.fill(0.0);
    int i = 0;
    for (double x : xs) c_[i++] = x;
  }

  int dim() const { return dim_; }
  double operator[](int i) const { return c_[static_cast<size_t>(i)]; }
  double& operator[](int i) { return c_[static_cast<size_t>(i)]; }

  Pt& operator+=(const Pt& o) {
    for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Pt& operator-=(const Pt& o) {
    for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Pt& operator*=(double s) {
    for (int i = 0; i < dim_; ++i) c_[i] *= s;
    return *this;
  }
  friend Pt operator+(Pt a, const Pt& b) { return a += b; }
  friend Pt operator-(Pt a, const Pt& b) { return a -= b; }
  friend Pt operator*(double s, Pt a) { return a *= s; }
  friend Pt operator*(Pt a, double s) { return a *= s; }
  friend bool operator==(const Pt& a, const Pt& b) {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i)
      if (a.c_[i] != b.c_[i]) return false;
    return true;
  }

  double sup_norm() const {
    double m = 0.0;
    for (int i = 0; i < dim_; ++i) m = std::max(m, std::fabs(c_[i]));
    return m;
  }
  double norm2() const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += c_[i] * c_[i];
    return std::sqrt(s);
  }
  double dot(const Pt& o) const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += c_[i] * o.c_[i];
    return s;
  }

  std::string str() const;

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

inline double sup_dist(const Pt& a, const Pt& b) { return (a - b).sup_norm(); }
inline double euclid_dist(const Pt& a, const Pt& b) { return (a - b).norm2(); }

// Axis-aligned box [lo, hi]; the workhorse for interval classification.
struct Box {
  Pt lo, hi;

  int dim() const { return lo.dim(); }
  Pt center() const { return 0.5 * (lo + hi); }
  Pt extent() const { return hi - lo; }
  double volume() const {
    double v = 1.0;
    for (int i = 0; i < dim(); ++i) v *= hi[i] - lo[i];
    return v;
  }
  double max_side() const {
    double m = 0.0;
    for (int i = 0; i < dim(); ++i) m = std::max(m, hi[i] - lo[i]);
    return m;
  }
  bool contains(const Pt& x) const {
    for (int i = 0; i < dim(); ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }
  Box expanded(double margin) const {
    Box b = *this;
    for (int i = 0; i < dim(); ++i) {
      b.lo[i] -= margin;
      b.hi[i] += margin;
    }
    return b;
  }
  // Child 2^n-tree octant selected by bitmask (bit i set = upper half on axis i).
  Box child(unsigned mask) const {
    Box b = *this;
    const Pt mid = center();
    for (int i = 0; i < dim(); ++i) {
      if (mask >> i & 1u)
        b.lo[i] = mid[i];
      else
        b.hi[i] = mid[i];
    }
    return b;
  }
};

}  // namespace fracdeg
