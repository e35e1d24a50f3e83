#pragma once

#include <functional>
#include <vector>

#include "fracdeg/grid_function.hpp"
#include "fracdeg/testmaps.hpp"

namespace fracdeg {

// Tri-state certification: the classical degree identities have hard hypotheses
// (y not in f(boundary)) that numerics can only certify with modulus slack,
// so every check reports whether its hypotheses were actually established.
enum class CertStatus { kCertified, kInconclusive, kFailed };
std::string to_string(CertStatus s);

struct RefineGridError : std::runtime_error {
  RefineGridError(const std::string& what, int required_subdivisions)
      : std::runtime_error(what), required_subdivisions(required_subdivisions) {}
  int required_subdivisions;  // estimated resolution that would certify the query
};

struct DegreeReport {
  int value = 0;
  Pt target;
  SupCube domain;
  double boundary_gap = 0.0;  // dist(y, f(boundary)) estimate after modulus slack
  int resolution = 0;
  CertStatus status = CertStatus::kInconclusive;
};

// Piecewise-linear degree on the Kuhn decomposition of a sampled map: the
// degree of the PL interpolant equals the signed count of simplices whose
// affine image contains the target, and the interpolant inherits the degree
// of f once the uniform error is below the boundary gap.
class DegreeSolver {
 public:
  using CellPredicate = std::function<bool(const Box& cell_box)>;

  DegreeSolver(const GridFunction& f, const SupCube& domain);
  // `include` selects the covered cells; `relevant` marks cells meeting the
  // queried region (skipped-but-relevant cells form the fringe whose image
  // must avoid the target).  Defaults: covered = inside domain, relevant =
  // meets domain.
  DegreeSolver(const GridFunction& f, const SupCube& domain, CellPredicate include,
               CellPredicate relevant = {});

  // Throws RefineGridError when the boundary gap cannot be certified.
  DegreeReport degree(const Pt& y) const;

  // Gap components, exposed for the calling checks: smallest sampled distance
  // from y to the image of the covered region's boundary (resp. the skipped
  // fringe cells), minus modulus slack.
  double boundary_gap(const Pt& y) const;
  double fringe_gap(const Pt& y) const;
  bool has_fringe() const { return !fringe_nodes_.empty(); }

  const GridFunction& f() const { return f_; }
  const SupCube& domain() const { return domain_; }

 private:
  int sign_sum(const Pt& y, bool& tie) const;
  void build(const CellPredicate& include, const CellPredicate& relevant);

  const GridFunction& f_;
  SupCube domain_;
  double h_;
  std::vector<std::int64_t> included_cells_;
  double boundary_face_osc_ = 0.0;  // value diameter of the worst boundary face
  std::vector<std::int64_t> boundary_nodes_;  // nodes on the covered region's boundary
  std::vector<std::int64_t> fringe_nodes_;    // nodes of skipped cells meeting the domain
  // image-space uniform bins over candidate simplices (cell * nfact + perm)
  Box image_bbox_;
  int bins_per_axis_ = 1;
  std::vector<std::vector<std::int64_t>> bins_;
  std::vector<std::array<int, kMaxDim>> perms_;
  std::vector<int> perm_signs_;
};

DegreeReport degree(const GridFunction& f, const SupCube& domain, const Pt& y);

struct AdditivityReport {
  CertStatus status = CertStatus::kInconclusive;
  int deg_whole = 0, deg_first = 0, deg_second = 0;
  bool equal = false;
  double separation_gap = 0.0;
};
AdditivityReport degree_additivity_check(const GridFunction& f, const SupCube& U,
                                         const SupCube& U1, const SupCube& U2, const Pt& y);

struct StabilityReport {
  CertStatus status = CertStatus::kInconclusive;
  int deg_f = 0, deg_g = 0;
  bool equal = false;
  double sup_difference = 0.0;  // sampled, inflated by both moduli
  double gap = 0.0;
};
StabilityReport degree_stability_check(const GridFunction& f, const GridFunction& g,
                                       const SupCube& domain, const Pt& y);

struct CovOptions {
  int lhs_cells = 64;    // composite-Gauss cells per axis for the domain integral
  int lhs_order = 4;
  int rhs_cells = 48;    // quadrature cells per axis over the image box
  int rhs_order = 3;
  int grid_n = 256;      // resolution of the sampled map used for degree queries
  double max_failure_weight = 1e-3;
};

struct CovReport {
  double lhs = 0.0;  // integral of J_f(x) psi(f(x)) over G
  double rhs = 0.0;  // integral of deg(f,G,y) psi(y) over the image box
  double difference = 0.0;
  double failure_weight = 0.0;
};

// Change of variables through the degree for a C^1 map with pointwise
// Jacobian.  psi must vanish near f(boundary of G); uncertifiable degree
// queries carrying more than max_failure_weight of the |psi| mass abort.
CovReport degree_change_of_variables(const Mapping& f, const SupCube& G, const BumpFn& psi,
                                     const CovOptions& opt = {});

struct SplitReport {
  CertStatus status = CertStatus::kInconclusive;
  int deg_total = 0, deg_side_a = 0, deg_side_b = 0;
  bool multiplicity_flag = false;  // both sides carry a preimage
  double slab_gap = 0.0;
};

// Splits U by the hyperplane and compares degrees on the two open sides; a
// nonzero degree on both certifies two preimages separated by H.
SplitReport hyperplane_split_test(const GridFunction& f, const SupCube& U, const Pt& y,
                                  const Hyperplane& H);

}  // namespace fracdeg
