#pragma once

#include <vector>

#include "fracdeg/mapping.hpp"

namespace fracdeg {

// A continuous map sampled on a regular grid, together with the modulus of
// continuity certificate that every rigorous bound downstream leans on.
// Evaluation between nodes is piecewise-linear on the Kuhn decomposition, the
// same interpolant the degree engine sums over.
class GridFunction : public Mapping {
 public:
  GridFunction(RegularGrid grid, std::vector<Pt> values, Modulus modulus);

  static GridFunction sample(const Mapping& f, const SupCube& cube, int subdivisions);
  static GridFunction sample(const Mapping& f, const SupCube& cube, int subdivisions,
                             Modulus modulus);

  const RegularGrid& grid() const { return grid_; }
  const Pt& value(std::int64_t node) const { return values_[static_cast<size_t>(node)]; }
  const std::vector<Pt>& values() const { return values_; }

  int dim() const override { return grid_.dim(); }
  std::string name() const override { return name_; }
  SupCube domain() const override { return grid_.cube(); }
  Pt eval(const Pt& x) const override;
  Modulus modulus() const override { return modulus_; }

  // Max sampled ratio ||f(x)-f(y)|| / slack(||x-y||) over random node pairs;
  // values <= 1 mean the certificate held on this sample.
  double spot_check_modulus(int pairs, std::uint64_t seed) const;

  // Largest sup-distance between values at lattice neighbors (exact on the
  // sampled data); the per-cell oscillation of the interpolant is at most
  // dim() times this.
  double max_edge_oscillation() const { return edge_osc_; }

  // ||f - interpolant||_inf bound: measured against the source at sampling
  // time (with a safety factor) when available, else the modulus fallback.
  double pl_error_bound() const;

  // ||f(x) - f(node)|| bound for x within half a spacing of a node.
  double node_cover_slack() const;

  void set_pl_defect(double defect) { pl_defect_ = defect; }
  // raise the edge-oscillation bound (a larger bound is still valid); used to
  // share one certificate across a family of sampled maps
  void set_edge_oscillation_floor(double v) { edge_osc_ = std::max(edge_osc_, v); }
  void set_name(std::string n) { name_ = std::move(n); }

 private:
  void compute_edge_oscillation();

  RegularGrid grid_;
  std::vector<Pt> values_;
  Modulus modulus_;
  double edge_osc_ = 0.0;
  double pl_defect_ = -1.0;  // < 0: no measured defect available
  std::string name_ = "grid-fn";
};

}  // namespace fracdeg
