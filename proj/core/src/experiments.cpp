#include "fracdeg/experiments.hpp"

#include <cmath>

#include "fracdeg/degree.hpp"
#include "fracdeg/io.hpp"
#include "fracdeg/jacobian.hpp"
#include "fracdeg/seminorm.hpp"
#include "fracdeg/testmaps.hpp"

namespace fracdeg {

namespace {

Pt to_pt(const std::vector<double>& v, int expect) {
  if (static_cast<int>(v.size()) != expect)
    throw std::invalid_argument("expected " + std::to_string(expect) + " coordinates");
  Pt x(expect);
  for (int i = 0; i < expect; ++i) x[i] = v[static_cast<size_t>(i)];
  return x;
}

std::string fmt(double v) { return CsvWriter::num(v); }

// deepest generation whose image cube still contains y (capped)
int image_descent_level(const CantorMapSpec& spec, const Pt& y, int cap) {
  Pt zi(spec.n);
  for (int k = 1; k <= cap; ++k) {
    const double ri_prev = spec.image_radius(k - 1);
    VertexLabel label = 0;
    bool strict = true;
    for (int i = 0; i < spec.n; ++i) {
      const double d = y[i] - zi[i];
      if (d > 0.0) label |= 1u << i;
      if (d == 0.0 || std::fabs(d) >= ri_prev) strict = false;
    }
    if (!strict) return k - 1;
    for (int i = 0; i < spec.n; ++i)
      zi[i] += 0.5 * ri_prev * ((label >> i & 1u) ? 1.0 : -1.0);
    if (sup_dist(y, zi) >= spec.image_radius(k)) return k - 1;
  }
  return cap;
}

struct Outputs {
  RunManifest manifest;
  std::vector<std::filesystem::path> files;
  const ExperimentConfig* config = nullptr;

  void add_csv(const std::filesystem::path& dir, const std::string& name, const CsvWriter& csv) {
    const auto path = dir / name;
    csv.save(path);
    files.push_back(path);
  }
  void finish(const ExperimentConfig& cfg) {
    manifest.set("command", cfg.command);
    manifest.set("map", cfg.map_name);
    manifest.set("threads", std::to_string(cfg.threads));
    manifest.set("seed", std::to_string(cfg.seed));
    write_text_file(cfg.out_dir / "config.txt", cfg.echo());
    manifest.add_file(cfg.out_dir / "config.txt");
    for (const auto& f : files) manifest.add_file(f);
    manifest.save(cfg.out_dir / "manifest.txt");
  }
};

PairingOptions pairing_options(const ExperimentConfig& cfg) {
  PairingOptions po;
  po.threads = cfg.threads;
  return po;
}

void run_construct(const ExperimentConfig& cfg, Outputs& out) {
  const CantorMapSpec& spec = cfg.cantor;
  PiecewiseRadialMap map(spec);

  CsvWriter csv({"level", "side", "measure", "exact"});
  for (int k = 1; k <= spec.truncation_level; ++k) {
    for (ConstructionSide side : {ConstructionSide::kDomain, ConstructionSide::kImage}) {
      const LevelMeasure m = level_union_measure(spec, side, k);
      csv.row({CsvWriter::num(std::int64_t(k)),
               side == ConstructionSide::kDomain ? "domain" : "image", fmt(m.value),
               m.exact ? m.exact->str() : ""});
    }
  }
  out.add_csv(cfg.out_dir, "level_measures.csv", csv);

  const int px = cfg.raster;
  std::vector<std::uint16_t> img(static_cast<size_t>(px) * px, 0);
  if (spec.variant == CantorVariant::kLusinN) {
    // raster of the image-side generation depth: bright = inside the
    // generation-K image cubes (the fat Cantor set carrier)
    for (int row = 0; row < px; ++row) {
      for (int col = 0; col < px; ++col) {
        Pt y{-1.0 + 2.0 * (col + 0.5) / px, 1.0 - 2.0 * (row + 0.5) / px};
        const int level = image_descent_level(spec, y, spec.truncation_level);
        img[static_cast<size_t>(row) * px + col] =
            static_cast<std::uint16_t>(65535.0 * level / spec.truncation_level);
      }
    }
  } else {
    // sign map of the pointwise Jacobian: bright = positive, dim = negative
    for (int row = 0; row < px; ++row) {
      for (int col = 0; col < px; ++col) {
        Pt x{-1.0 + 2.0 * (col + 0.5) / px, 1.0 - 2.0 * (row + 0.5) / px};
        std::uint16_t value = 0;
        try {
          const Differential d = map.analytic_differential(x);
          value = d.jacobian > 0.0 ? 65535 : 20000;
        } catch (const UndefinedDerivative&) {
        }
        img[static_cast<size_t>(row) * px + col] = value;
      }
    }
  }
  const auto pgm = cfg.out_dir / (spec.variant == CantorVariant::kLusinN
                                      ? "image_cantor_set.pgm"
                                      : "jacobian_sign_map.pgm");
  std::filesystem::create_directories(cfg.out_dir);
  write_pgm16(pgm, px, px, img);
  out.files.push_back(pgm);
}

void run_evaluate(const ExperimentConfig& cfg, Outputs& out) {
  auto map = resolve_map(cfg);
  const Pt x = to_pt(cfg.point, map->dim());
  const Pt fx = map->eval(x);
  CsvWriter csv({"map", "x", "f_x", "jacobian", "region", "level"});
  std::string jac = "undefined", region = "-", level = "-";
  if (auto* cantor = dynamic_cast<const PiecewiseRadialMap*>(map.get())) {
    try {
      const Differential d = cantor->analytic_differential(x);
      jac = fmt(d.jacobian);
      region = d.tag.kind == RegionKind::kAnnulus ? "annulus" : "core";
      level = CsvWriter::num(std::int64_t(d.tag.level));
    } catch (const UndefinedDerivative&) {
    }
  } else if (auto j = map->pointwise_jacobian(x)) {
    jac = fmt(*j);
  }
  csv.row({map->name(), x.str(), fx.str(), jac, region, level});
  out.add_csv(cfg.out_dir, "evaluate.csv", csv);
}

void run_seminorm(const ExperimentConfig& cfg, Outputs& out) {
  auto map = resolve_map(cfg);
  SeminormParams params;
  params.s = cfg.s;
  params.p = cfg.p;
  params.method = cfg.method == "mc" ? SeminormMethod::kMonteCarlo : SeminormMethod::kGrid;
  params.grid_n = std::max(8, cfg.resolution / 8);
  params.seed = cfg.seed;
  params.threads = cfg.threads;
  const SupCube dom = map->domain();
  const SeminormEstimate est = gagliardo_seminorm(*map, dom, params);
  CsvWriter csv({"resolution", "estimate", "method", "s", "p", "domain"});
  for (const auto& [res, value] : est.history)
    csv.row({CsvWriter::num(std::int64_t(res)), fmt(value), est.method, fmt(cfg.s), fmt(cfg.p),
             "Q(" + dom.center.str() + "," + fmt(dom.half_side) + ")"});
  out.add_csv(cfg.out_dir, "seminorm.csv", csv);
}

void run_degree(const ExperimentConfig& cfg, Outputs& out) {
  auto map = resolve_map(cfg);
  const Pt y = to_pt(cfg.target, map->dim());
  GridFunction g = GridFunction::sample(*map, map->domain(), cfg.resolution);
  CsvWriter csv({"map", "y", "domain", "degree", "boundary_gap", "resolution", "status"});
  try {
    const DegreeReport rep = degree(g, map->domain(), y);
    csv.row({map->name(), y.str(), "Q(0,1)", CsvWriter::num(std::int64_t(rep.value)),
             fmt(rep.boundary_gap), CsvWriter::num(std::int64_t(rep.resolution)),
             to_string(rep.status)});
  } catch (const RefineGridError& e) {
    csv.row({map->name(), y.str(), "Q(0,1)", "", "", CsvWriter::num(std::int64_t(cfg.resolution)),
             "refine:" + std::to_string(e.required_subdivisions)});
  }
  out.add_csv(cfg.out_dir, "degree.csv", csv);
}

void run_cov_check(const ExperimentConfig& cfg, Outputs& out) {
  auto map = resolve_map(cfg);
  BumpFn psi;
  psi.center = to_pt(std::vector<double>(cfg.psi.begin(), cfg.psi.end() - 1), map->dim());
  psi.radius = cfg.psi.back();
  CsvWriter csv({"map", "psi_center", "psi_radius", "lhs", "rhs", "difference", "relative",
                 "status"});
  if (cfg.use_cantor) {
    CovCheckOptions opt;
    opt.pairing = pairing_options(cfg);
    opt.grid_n = cfg.resolution;
    const CovCheckReport rep = change_of_variables_check(map, map->domain(), psi, opt);
    csv.row({map->name(), psi.center.str(), fmt(psi.radius), fmt(rep.lhs), fmt(rep.rhs),
             fmt(rep.difference), fmt(rep.rhs != 0.0 ? rep.difference / rep.rhs : 0.0),
             to_string(rep.status)});
  } else {
    CovOptions opt;
    opt.grid_n = cfg.resolution;
    const CovReport rep = degree_change_of_variables(*map, map->domain(), psi, opt);
    csv.row({map->name(), psi.center.str(), fmt(psi.radius), fmt(rep.lhs), fmt(rep.rhs),
             fmt(rep.difference), fmt(rep.rhs != 0.0 ? rep.difference / rep.rhs : 0.0),
             "certified"});
  }
  out.add_csv(cfg.out_dir, "cov_check.csv", csv);
}

void run_verify_cn(const ExperimentConfig& cfg, Outputs& out) {
  auto map = resolve_map(cfg);
  const int n = map->dim();
  const SupCube U(to_pt(std::vector<double>(cfg.u_spec.begin(), cfg.u_spec.end() - 1), n),
                  cfg.u_spec.back());
  CnOptions opt;
  opt.pairing = pairing_options(cfg);
  opt.measure_grid_n = cfg.resolution;
  const CnReport rep = ciarlet_necas_check(*map, U, opt);
  CsvWriter csv({"map", "u", "jacobian_measure", "image_lower", "image_upper", "ratio",
                 "verdict"});
  csv.row({map->name(), "Q(" + U.center.str() + "," + fmt(U.half_side) + ")",
           fmt(rep.jacobian_measure), fmt(rep.image.lower), fmt(rep.image.upper),
           fmt(rep.ratio), to_string(rep.verdict)});
  out.add_csv(cfg.out_dir, "verify_cn.csv", csv);
}

void run_verify_lusin(const ExperimentConfig& cfg, Outputs& out) {
  CantorMapSpec spec = cfg.cantor;
  spec.variant = CantorVariant::kLusinN;
  LusinOptions opt;
  opt.pairing = pairing_options(cfg);
  const LusinMassReport rep = lusin_mass_experiment(spec, opt);
  CsvWriter csv({"level", "pointwise_integral", "closed_form", "difference"});
  for (const LusinLevelRow& row : rep.rows)
    csv.row({CsvWriter::num(std::int64_t(row.level)), fmt(row.analytic_regions),
             fmt(row.closed_form), fmt(row.analytic_regions - row.closed_form)});
  out.add_csv(cfg.out_dir, "lusin_levels.csv", csv);

  CsvWriter summary({"jacobian_total", "pointwise_limit", "singular_gap", "expected_gap"});
  const double expected = std::pow(1.0 - 1.0 / spec.A, spec.n);
  summary.row({fmt(rep.jacobian_total), fmt(rep.pointwise_limit), fmt(rep.singular_gap),
               fmt(expected)});
  out.add_csv(cfg.out_dir, "lusin_summary.csv", summary);
}

void run_verify_orientation(const ExperimentConfig& cfg, Outputs& out) {
  CantorMapSpec spec = cfg.cantor;
  const OrientationReport rep =
      orientation_experiment(spec, 100000, 100, cfg.resolution, cfg.seed);
  CsvWriter csv({"samples", "resolved", "positive", "positive_fraction",
                 "all_degree_minus_one"});
  csv.row({CsvWriter::num(rep.samples), CsvWriter::num(rep.resolved),
           CsvWriter::num(rep.positive), fmt(rep.positive_fraction),
           rep.all_degree_minus_one ? "true" : "false"});
  out.add_csv(cfg.out_dir, "orientation.csv", csv);

  CsvWriter degs({"target_index", "degree"});
  for (size_t i = 0; i < rep.degrees.size(); ++i)
    degs.row({CsvWriter::num(std::int64_t(i)), CsvWriter::num(std::int64_t(rep.degrees[i]))});
  out.add_csv(cfg.out_dir, "orientation_degrees.csv", degs);
}

void run_cn_stability(const ExperimentConfig& cfg, Outputs& out) {
  CantorMapSpec spec = cfg.cantor;
  const int n = spec.n;
  const SupCube U(to_pt(std::vector<double>(cfg.u_spec.begin(), cfg.u_spec.end() - 1), n),
                  cfg.u_spec.back());
  CnOptions opt;
  opt.pairing = pairing_options(cfg);
  opt.measure_grid_n = cfg.resolution;
  const CnStabilityReport rep = cn_stability_experiment(spec, cfg.levels, U, opt);
  CsvWriter csv({"level", "verdict", "jacobian_measure", "image_lower", "image_upper",
                 "image_midpoint"});
  for (const CnStabilityRow& row : rep.rows)
    csv.row({CsvWriter::num(std::int64_t(row.level)), to_string(row.verdict),
             fmt(row.jacobian_measure), fmt(row.image.lower), fmt(row.image.upper),
             fmt(row.image_midpoint)});
  out.add_csv(cfg.out_dir, "cn_stability.csv", csv);

  CsvWriter gaps({"gap_index", "gap", "cauchy_ok"});
  for (size_t i = 0; i < rep.gaps.size(); ++i)
    gaps.row({CsvWriter::num(std::int64_t(i)), fmt(rep.gaps[i]),
              rep.cauchy_ok ? "true" : "false"});
  out.add_csv(cfg.out_dir, "cn_stability_gaps.csv", gaps);
}

void run_preimages(const ExperimentConfig& cfg, Outputs& out) {
  auto map = resolve_map(cfg);
  const Pt y = to_pt(cfg.target, map->dim());
  Modulus mod = map->modulus();
  if (auto* cantor = dynamic_cast<const PiecewiseRadialMap*>(map.get()))
    mod = Modulus{1.0, cantor->analytic_lipschitz()};
  GridFunction g = GridFunction::sample(*map, map->domain(), cfg.resolution, mod);
  CsvWriter csv({"map", "y", "epsilon", "count"});
  csv.row({map->name(), y.str(), fmt(cfg.epsilon),
           CsvWriter::num(std::int64_t(preimage_count(g, y, cfg.epsilon)))});
  out.add_csv(cfg.out_dir, "preimages.csv", csv);
}

}  // namespace

std::string ExperimentConfig::echo() const {
  std::string s;
  s += "command=" + command + "\n";
  s += "map=" + map_name + "\n";
  if (use_cantor) s += cantor.to_config();
  s += "resolution=" + std::to_string(resolution) + "\n";
  s += "raster=" + std::to_string(raster) + "\n";
  s += "s=" + CsvWriter::num(this->s) + "\n";
  s += "p=" + CsvWriter::num(p) + "\n";
  s += "method=" + method + "\n";
  s += "epsilon=" + CsvWriter::num(epsilon) + "\n";
  s += "seed=" + std::to_string(seed) + "\n";
  s += "threads=" + std::to_string(threads) + "\n";
  auto list = [](const std::vector<double>& v) {
    std::string r;
    for (size_t i = 0; i < v.size(); ++i) r += (i ? "," : "") + CsvWriter::num(v[i]);
    return r;
  };
  s += "target=" + list(target) + "\n";
  s += "point=" + list(point) + "\n";
  s += "u=" + list(u_spec) + "\n";
  s += "psi=" + list(psi) + "\n";
  s += "levels=";
  for (size_t i = 0; i < levels.size(); ++i)
    s += (i ? "," : "") + std::to_string(levels[i]);
  s += "\n";
  return s;
}

std::shared_ptr<Mapping> resolve_map(const ExperimentConfig& cfg) {
  if (cfg.use_cantor) return make_cantor_map(cfg.cantor);
  return make_test_map(cfg.map_name, 2);
}

int run_experiment(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  Outputs out;
  if (cfg.command == "construct")
    run_construct(cfg, out);
  else if (cfg.command == "evaluate")
    run_evaluate(cfg, out);
  else if (cfg.command == "seminorm")
    run_seminorm(cfg, out);
  else if (cfg.command == "degree")
    run_degree(cfg, out);
  else if (cfg.command == "cov-check")
    run_cov_check(cfg, out);
  else if (cfg.command == "verify-cn")
    run_verify_cn(cfg, out);
  else if (cfg.command == "verify-lusin")
    run_verify_lusin(cfg, out);
  else if (cfg.command == "verify-orientation")
    run_verify_orientation(cfg, out);
  else if (cfg.command == "cn-stability")
    run_cn_stability(cfg, out);
  else if (cfg.command == "preimages")
    run_preimages(cfg, out);
  else
    throw std::invalid_argument("unknown command: " + cfg.command);
  out.finish(cfg);
  return 0;
}

}  // namespace fracdeg
