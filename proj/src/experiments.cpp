#include "kleinsolv/experiments.hpp"

#include "kleinsolv/dataset.hpp"
#include "kleinsolv/dynamics.hpp"
#include "kleinsolv/errors.hpp"
#include "kleinsolv/group.hpp"
#include "kleinsolv/regions.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace kleinsolv::cli {

namespace {

using data::Cell;
using data::Dataset;
using data::format_double;
using group::GroupContext;
using group::GroupElement;
using linalg::CVec;
using linalg::IntMatrix;
using linalg::Mat;
using linalg::Vec;
using regions::HyperbolicSplitting;

// ---- small JSON rendering helpers (17 significant digits throughout) ----

std::string jnum(double v) { return format_double(v); }

std::string jbool(bool b) { return b ? "true" : "false"; }

std::string jstr(const std::string& s) { return "\"" + s + "\""; }

std::string jvec(const Vec& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + jnum(v[i]);
  return s + "]";
}

std::string jmat(const Mat& m) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    s += i ? ", [" : "[";
    for (Eigen::Index j = 0; j < m.cols(); ++j) s += (j ? ", " : "") + jnum(m(i, j));
    s += "]";
  }
  return s + "]";
}

std::string jspectrum(const linalg::SpectrumReport& rep) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < rep.eigenvalues.size(); ++i) {
    s += i ? ", {" : "{";
    s += "\"re\": " + jnum(rep.eigenvalues[i].real());
    s += ", \"im\": " + jnum(rep.eigenvalues[i].imag());
    s += ", \"stable\": " + jbool(rep.stable[static_cast<size_t>(i)]);
    s += "}";
  }
  return s + "]";
}

// ---- sources ----

IntMatrix preset_matrix(const std::string& name) {
  if (name == "cat2") return IntMatrix::from_rows({{2, 1}, {1, 1}});
  // companion matrix of x^3 - x - 1: one eigenvalue outside the unit circle,
  // a complex pair inside, det = 1
  if (name == "cat3") return IntMatrix::from_rows({{0, 1, 0}, {0, 0, 1}, {1, 1, 0}});
  throw ConfigError("unknown preset: '" + name + "'");
}

std::optional<IntMatrix> source_toral(const ExperimentConfig& cfg) {
  std::optional<IntMatrix> b;
  if (cfg.preset) b = preset_matrix(*cfg.preset);
  else if (cfg.toral) b = cfg.toral;
  // reject non-hyperbolic inputs before any heavy computation
  if (b) dynamics::check_hyperbolic_toral(*b, cfg.tol);
  return b;
}

GroupContext source_context(const ExperimentConfig& cfg, const std::optional<IntMatrix>& b) {
  if (b) {
    const linalg::RealLog rl = linalg::logm(b->to_real());
    return GroupContext::disconnected(rl.log, *b, rl.power);
  }
  return GroupContext::connected(*cfg.generator);
}

// ---- output plumbing ----

void emit(const ExperimentConfig& cfg, const std::string& document, const std::string& summary,
          std::ostream& out) {
  if (cfg.output.empty()) {
    out << document;
  } else {
    data::write_file_atomic(cfg.output, document);
    out << summary << "\n";
  }
}

std::string render_dataset(const ExperimentConfig& cfg, const Dataset& d) {
  return cfg.format == "csv" ? data::to_csv(d) : data::to_json(d);
}

// ---- grid axes ----

struct Axis {
  char kind = 'r';  // 'r' = Re z, 's' = stable imaginary, 'u' = unstable imaginary
  int index = 0;
};

Axis parse_axis(const std::string& text, const HyperbolicSplitting& s) {
  Axis a;
  std::string rest;
  if (text.rfind("re", 0) == 0) {
    a.kind = 'r';
    rest = text.substr(2);
  } else if (text.rfind("ims", 0) == 0) {
    a.kind = 's';
    rest = text.substr(3);
  } else if (text.rfind("imu", 0) == 0) {
    a.kind = 'u';
    rest = text.substr(3);
  } else {
    throw ConfigError("bad axis '" + text + "' (expected re<k>, ims<k> or imu<k>)");
  }
  try {
    size_t pos = 0;
    a.index = std::stoi(rest, &pos);
    if (pos != rest.size()) throw std::invalid_argument(rest);
  } catch (const std::exception&) {
    throw ConfigError("bad axis index in '" + text + "'");
  }
  const int limit = a.kind == 'r' ? s.dim() : a.kind == 's' ? s.dim_stable() : s.dim_unstable();
  if (a.index < 0 || a.index >= limit)
    throw ConfigError("axis '" + text + "' is out of range for this splitting");
  return a;
}

void run_rows(int rows, int threads, const std::function<void(int)>& body) {
  if (threads <= 1) {
    for (int r = 0; r < rows; ++r) body(r);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  const int workers = std::min(threads, rows);
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int r = next.fetch_add(1); r < rows; r = next.fetch_add(1)) body(r);
    });
  for (auto& t : pool) t.join();
}

// ---- commands ----

void cmd_split(const ExperimentConfig& cfg, std::ostream& out) {
  const auto b = source_toral(cfg);
  const GroupContext ctx = source_context(cfg, b);
  const HyperbolicSplitting s = regions::build_splitting(ctx.generator, cfg.tol);

  std::ostringstream os;
  os << "{\n";
  os << "  \"kind\": \"split\",\n";
  os << "  \"dim\": " << s.dim() << ",\n";
  os << "  \"stable_dim\": " << s.dim_stable() << ",\n";
  os << "  \"unstable_dim\": " << s.dim_unstable() << ",\n";
  os << "  \"margin\": " << jnum(s.spectrum.margin) << ",\n";
  os << "  \"eigenvalues\": " << jspectrum(s.spectrum) << ",\n";
  if (b) {
    os << "  \"toral_eigenvalues\": " << jspectrum(dynamics::check_hyperbolic_toral(*b, cfg.tol))
       << ",\n";
    os << "  \"log_power\": " << ctx.power << ",\n";
  }
  os << "  \"basis_stable\": " << jmat(s.split.basis_stable) << ",\n";
  os << "  \"basis_unstable\": " << jmat(s.split.basis_unstable) << ",\n";
  os << "  \"proj_stable\": " << jmat(s.split.proj_stable) << ",\n";
  os << "  \"proj_unstable\": " << jmat(s.split.proj_unstable);
  if (s.metric_stable) {
    os << ",\n  \"lyapunov_stable\": {\"C\": " << jnum(s.metric_stable->growth_constant)
       << ", \"lambda\": " << jnum(s.metric_stable->decay_rate)
       << ", \"P\": " << jmat(s.metric_stable->p) << "}";
  }
  if (s.metric_unstable) {
    os << ",\n  \"lyapunov_unstable\": {\"C\": " << jnum(s.metric_unstable->growth_constant)
       << ", \"lambda\": " << jnum(s.metric_unstable->decay_rate)
       << ", \"P\": " << jmat(s.metric_unstable->p) << "}";
  }
  os << "\n}\n";
  std::ostringstream summary;
  summary << "{\"kind\": \"split\", \"stable_dim\": " << s.dim_stable()
          << ", \"unstable_dim\": " << s.dim_unstable() << "}";
  emit(cfg, os.str(), summary.str(), out);
}

void cmd_classify_grid(const ExperimentConfig& cfg, std::ostream& out) {
  const auto b = source_toral(cfg);
  const GroupContext ctx = source_context(cfg, b);
  const HyperbolicSplitting s = regions::build_splitting(ctx.generator, cfg.tol);

  const auto plane = [&] {
    const auto comma = cfg.plane.find(',');
    if (comma == std::string::npos) throw ConfigError("plane must name two axes");
    return std::pair{parse_axis(cfg.plane.substr(0, comma), s),
                     parse_axis(cfg.plane.substr(comma + 1), s)};
  }();
  if (plane.first.kind == plane.second.kind && plane.first.index == plane.second.index)
    throw ConfigError("plane axes must differ");

  Vec base_re = Vec::Zero(s.dim());
  Vec base_cs = Vec::Zero(s.dim_stable());
  Vec base_cu = Vec::Zero(s.dim_unstable());
  auto slot = [&](const Axis& a) -> double& {
    return a.kind == 'r' ? base_re[a.index] : a.kind == 's' ? base_cs[a.index] : base_cu[a.index];
  };
  for (const auto& [name, value] : cfg.fixed_coords) {
    const Axis a = parse_axis(name, s);
    if ((a.kind == plane.first.kind && a.index == plane.first.index) ||
        (a.kind == plane.second.kind && a.index == plane.second.index))
      throw ConfigError("cannot fix a plane axis");
    slot(a) = value;
  }

  const Mat escape_map = b ? b->to_real() : ctx.flow(1.0);
  const int res = cfg.resolution;
  const double cell = (cfg.window_hi - cfg.window_lo) / res;

  struct CellResult {
    regions::Classification c;
    long escape = 0;
  };
  std::vector<CellResult> cells(static_cast<size_t>(res) * static_cast<size_t>(res));

  run_rows(res, cfg.threads, [&](int iy) {
    Vec re = base_re, cs = base_cs, cu = base_cu;
    const double a2 = cfg.window_lo + iy * cell;
    for (int ix = 0; ix < res; ++ix) {
      const double a1 = cfg.window_lo + ix * cell;
      re = base_re;
      cs = base_cs;
      cu = base_cu;
      (plane.first.kind == 'r'    ? re[plane.first.index]
       : plane.first.kind == 's'  ? cs[plane.first.index]
                                  : cu[plane.first.index]) = a1;
      (plane.second.kind == 'r'   ? re[plane.second.index]
       : plane.second.kind == 's' ? cs[plane.second.index]
                                  : cu[plane.second.index]) = a2;
      CVec z(s.dim());
      z.real() = re;
      z.imag() = s.split.basis_stable * cs + s.split.basis_unstable * cu;
      CellResult r;
      r.c = regions::classify_chart(z, s, cfg.tol);
      if (cfg.escape) {
        CVec w = z;
        long k = 0;
        while (k < cfg.escape_limit && w.norm() <= cfg.escape_radius) {
          CVec next(w.size());
          next.real() = escape_map * w.real();
          next.imag() = escape_map * w.imag();
          w = next;
          ++k;
        }
        r.escape = k;
      }
      cells[static_cast<size_t>(iy) * res + ix] = r;
    }
  });

  Dataset d;
  d.kind = "classify-grid";
  d.meta = {{"plane", Cell{cfg.plane}},
            {"res", Cell{static_cast<int64_t>(res)}},
            {"window_lo", Cell{cfg.window_lo}},
            {"window_hi", Cell{cfg.window_hi}},
            {"tol", Cell{cfg.tol}}};
  d.columns = {"ix", "iy", "a1", "a2", "label", "boundary"};
  if (cfg.escape) d.columns.push_back("escape");
  std::map<std::string, long> counts;
  long boundary_hits = 0;
  for (int iy = 0; iy < res; ++iy)
    for (int ix = 0; ix < res; ++ix) {
      const auto& r = cells[static_cast<size_t>(iy) * res + ix];
      std::vector<Cell> row{Cell{static_cast<int64_t>(ix)},
                            Cell{static_cast<int64_t>(iy)},
                            Cell{cfg.window_lo + ix * cell},
                            Cell{cfg.window_lo + iy * cell},
                            Cell{std::string(regions::to_string(r.c.label))},
                            Cell{static_cast<int64_t>(r.c.boundary_hit ? 1 : 0)}};
      if (cfg.escape) row.push_back(Cell{static_cast<int64_t>(r.escape)});
      d.rows.push_back(std::move(row));
      ++counts[regions::to_string(r.c.label)];
      boundary_hits += r.c.boundary_hit ? 1 : 0;
    }

  std::ostringstream summary;
  summary << "{\"kind\": \"classify-grid\", \"cells\": " << res * res
          << ", \"boundary_hits\": " << boundary_hits << ", \"labels\": {";
  bool first = true;
  for (const auto& [name, count] : counts) {
    summary << (first ? "" : ", ") << jstr(name) << ": " << count;
    first = false;
  }
  summary << "}}";
  emit(cfg, render_dataset(cfg, d), summary.str(), out);
}

void cmd_orbit(const ExperimentConfig& cfg, std::ostream& out) {
  const auto b = source_toral(cfg);
  if (!b) throw ConfigError("orbit requires an integer matrix source (preset or B)");
  const Vec x0 = cfg.x0 ? *cfg.x0 : dynamics::generic_point(b->dim());
  if (x0.size() != b->dim()) throw ConfigError("x0 has the wrong dimension");

  const auto orbit = dynamics::torus_orbit(*b, x0, cfg.n_max);

  Dataset d;
  d.kind = "orbit";
  d.meta = {{"n_max", Cell{static_cast<int64_t>(cfg.n_max)}}, {"x0", Cell{jvec(x0)}}};
  d.columns = {"n"};
  for (int i = 0; i < b->dim(); ++i) d.columns.push_back("x" + std::to_string(i));
  for (size_t n = 0; n < orbit.size(); ++n) {
    std::vector<Cell> row{Cell{static_cast<int64_t>(n)}};
    for (int i = 0; i < b->dim(); ++i) row.push_back(Cell{orbit[n][i]});
    d.rows.push_back(std::move(row));
  }

  std::ostringstream summary;
  if (cfg.epsilon > 0.0) {
    const auto rep = dynamics::density_report(orbit, cfg.epsilon);
    d.meta.emplace_back("epsilon", Cell{rep.epsilon});
    d.meta.emplace_back("boxes_total", Cell{static_cast<int64_t>(rep.boxes_total)});
    d.meta.emplace_back("boxes_hit", Cell{static_cast<int64_t>(rep.boxes_hit)});
    d.meta.emplace_back("coverage", Cell{rep.coverage});
    d.meta.emplace_back("max_gap", Cell{rep.max_gap});
    summary << "{\"kind\": \"orbit\", \"points\": " << orbit.size()
            << ", \"epsilon\": " << jnum(rep.epsilon)
            << ", \"boxes_total\": " << rep.boxes_total << ", \"boxes_hit\": " << rep.boxes_hit
            << ", \"coverage\": " << jnum(rep.coverage) << ", \"max_gap\": " << jnum(rep.max_gap)
            << "}";
  } else {
    summary << "{\"kind\": \"orbit\", \"points\": " << orbit.size() << "}";
  }
  emit(cfg, render_dataset(cfg, d), summary.str(), out);
}

void cmd_fixed_points(const ExperimentConfig& cfg, std::ostream& out) {
  const auto b = source_toral(cfg);
  if (!b) throw ConfigError("fixed-points requires an integer matrix source (preset or B)");
  const Vec target = cfg.target ? *cfg.target : dynamics::generic_point(b->dim());
  if (target.size() != b->dim()) throw ConfigError("target has the wrong dimension");

  const auto sweep = dynamics::fixed_point_sweep(*b, target, cfg.n_max);

  Dataset d;
  d.kind = "fixed-points";
  d.meta = {{"n_max", Cell{static_cast<int64_t>(cfg.n_max)}},
            {"target", Cell{jvec(target)}},
            {"bound_constant", Cell{sweep.bound_constant}},
            {"all_bounds_ok", Cell{static_cast<int64_t>(sweep.all_bounds_ok ? 1 : 0)}}};
  d.columns = {"n"};
  for (int i = 0; i < b->dim(); ++i) d.columns.push_back("b" + std::to_string(i));
  for (int i = 0; i < b->dim(); ++i) d.columns.push_back("x" + std::to_string(i));
  d.columns.insert(d.columns.end(), {"residual", "distance", "tile_distance", "bound_ok"});
  for (const auto& r : sweep.records) {
    std::vector<Cell> row{Cell{static_cast<int64_t>(r.rec.n)}};
    for (const auto& z : r.rec.b) row.push_back(Cell{z});
    for (int i = 0; i < b->dim(); ++i) row.push_back(Cell{r.rec.x[i]});
    row.push_back(Cell{r.rec.residual});
    row.push_back(Cell{r.distance});
    row.push_back(Cell{r.tile_distance});
    row.push_back(Cell{static_cast<int64_t>(r.bound_ok ? 1 : 0)});
    d.rows.push_back(std::move(row));
  }

  std::ostringstream summary;
  summary << "{\"kind\": \"fixed-points\", \"records\": " << sweep.records.size()
          << ", \"bound_constant\": " << jnum(sweep.bound_constant)
          << ", \"all_bounds_ok\": " << jbool(sweep.all_bounds_ok) << ", \"best_distance\": "
          << jnum(sweep.records.empty() ? 0.0 : sweep.records.front().distance) << "}";
  emit(cfg, render_dataset(cfg, d), summary.str(), out);
}

void cmd_lattice_check(const ExperimentConfig& cfg, std::ostream& out) {
  const auto b = source_toral(cfg);
  const Mat m = b ? linalg::logm(b->to_real()).log : *cfg.generator;
  const Mat sigma = cfg.sigma ? *cfg.sigma : Mat(Mat::Identity(m.rows(), m.cols()));

  const auto check = dynamics::check_lattice_condition(m, sigma, cfg.step, cfg.lattice_tol);

  std::ostringstream os;
  os << "{\n  \"kind\": \"lattice-check\",\n";
  os << "  \"passed\": " << jbool(check.passed) << ",\n";
  os << "  \"h\": " << jnum(cfg.step) << ",\n";
  os << "  \"max_deviation\": " << jnum(check.max_deviation);
  if (!check.failure.empty()) os << ",\n  \"failure\": " << jstr(check.failure);
  if (check.spec) {
    os << ",\n  \"toral\": " << check.spec->toral.to_string();
    os << ",\n  \"residual\": " << jnum(check.spec->residual);
  }
  os << "\n}\n";

  std::ostringstream summary;
  summary << "{\"kind\": \"lattice-check\", \"passed\": " << jbool(check.passed)
          << ", \"max_deviation\": " << jnum(check.max_deviation) << "}";
  emit(cfg, os.str(), summary.str(), out);
}

void cmd_norm_scan(const ExperimentConfig& cfg, std::ostream& out) {
  const auto b = source_toral(cfg);
  dynamics::NormScan scan = b ? dynamics::norm_bound_scan(*b, cfg.scan_lo, cfg.scan_hi)
                              : dynamics::norm_bound_scan(linalg::expm(*cfg.generator, 1.0),
                                                          cfg.scan_lo, cfg.scan_hi);

  Dataset d;
  d.kind = "norm-scan";
  d.meta = {{"sup", Cell{scan.sup}},
            {"limit_norm", Cell{scan.limit_norm}},
            {"tail_stabilized", Cell{static_cast<int64_t>(scan.tail_stabilized ? 1 : 0)}},
            {"stabilized_at", Cell{static_cast<int64_t>(scan.stabilized_at)}}};
  d.columns = {"n", "value"};
  for (const auto& [n, v] : scan.values)
    d.rows.push_back({Cell{static_cast<int64_t>(n)}, Cell{v}});

  std::ostringstream summary;
  summary << "{\"kind\": \"norm-scan\", \"sup\": " << jnum(scan.sup)
          << ", \"limit_norm\": " << jnum(scan.limit_norm)
          << ", \"tail_stabilized\": " << jbool(scan.tail_stabilized)
          << ", \"stabilized_at\": " << scan.stabilized_at << "}";
  emit(cfg, render_dataset(cfg, d), summary.str(), out);
}

void cmd_psi_check(const ExperimentConfig& cfg, std::ostream& out) {
  const auto b = source_toral(cfg);
  const GroupContext ctx = source_context(cfg, b);
  const HyperbolicSplitting s = regions::build_splitting(ctx.generator, cfg.tol);
  if (s.dim_stable() == 0) throw NumericError("stable subspace is trivial");

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> box(-2.0, 2.0);
  auto rand_vec = [&](int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = box(rng);
    return v;
  };
  auto rand_sphere = [&] {
    while (true) {
      Vec c = rand_vec(s.dim_stable());
      const double v = s.metric_stable->value(c);
      if (v > 1e-9) return Vec(s.split.basis_stable * (c / std::sqrt(v)));
    }
  };

  double max_forward = 0, max_backward = 0, max_equivariance = 0;
  for (long k = 0; k < cfg.samples; ++k) {
    const GroupElement g{rand_vec(s.dim()), box(rng)};
    const Vec x = rand_sphere();
    const Vec y = s.split.basis_unstable * rand_vec(s.dim_unstable());

    const CVec z = regions::psi_minus(g, x, y, ctx, s);
    const auto pre = regions::psi_minus_inv(z, ctx, s);
    double err = (pre.g.b - g.b).norm();
    err = std::max(err, std::abs(pre.g.t - g.t));
    err = std::max(err, (pre.x - x).norm());
    err = std::max(err, (pre.y - y).norm());
    max_forward = std::max(max_forward, err);

    CVec w(s.dim());
    do {
      w.real() = rand_vec(s.dim());
      w.imag() = rand_vec(s.dim());
    } while ((s.split.proj_stable * w.imag()).norm() < 1e-3);
    const auto wpre = regions::psi_minus_inv(w, ctx, s);
    max_backward =
        std::max(max_backward, (regions::psi_minus(wpre.g, wpre.x, wpre.y, ctx, s) - w).norm());

    const GroupElement h{rand_vec(s.dim()), box(rng)};
    const CVec lhs = regions::psi_minus(group::compose(g, h, ctx), x, y, ctx, s);
    const CVec rhs = group::act_affine(g, regions::psi_minus(h, x, y, ctx, s), ctx);
    max_equivariance = std::max(max_equivariance, (lhs - rhs).norm());
  }

  std::ostringstream os;
  os << "{\n  \"kind\": \"psi-check\",\n";
  os << "  \"samples\": " << cfg.samples << ",\n";
  os << "  \"max_forward\": " << jnum(max_forward) << ",\n";
  os << "  \"max_backward\": " << jnum(max_backward) << ",\n";
  os << "  \"max_equivariance\": " << jnum(max_equivariance) << ",\n";
  os << "  \"roundtrip_ok\": " << jbool(max_forward < 1e-8 && max_backward < 1e-8) << ",\n";
  os << "  \"equivariance_ok\": " << jbool(max_equivariance < 1e-9) << "\n}\n";

  std::ostringstream summary;
  summary << "{\"kind\": \"psi-check\", \"roundtrip_ok\": "
          << jbool(max_forward < 1e-8 && max_backward < 1e-8)
          << ", \"equivariance_ok\": " << jbool(max_equivariance < 1e-9) << "}";
  emit(cfg, os.str(), summary.str(), out);
}

void cmd_witness(const ExperimentConfig& cfg, std::ostream& out) {
  const auto b = source_toral(cfg);
  const GroupContext ctx = source_context(cfg, b);
  const HyperbolicSplitting s = regions::build_splitting(ctx.generator, cfg.tol);
  if (s.dim_stable() == 0 || s.dim_unstable() == 0)
    throw NumericError("witness requires both regions to be nonempty");

  CVec z1, z2;
  if (cfg.z1) {
    z1 = *cfg.z1;
  } else {
    z1 = CVec::Zero(s.dim());
    z1.imag() = s.split.basis_unstable.col(0);
  }
  if (cfg.z2) {
    z2 = *cfg.z2;
  } else {
    z2 = CVec::Zero(s.dim());
    z2.imag() = s.split.basis_stable.col(0);
  }
  if (z1.size() != s.dim() || z2.size() != s.dim()) throw ConfigError("witness point dimension");

  const auto table = regions::divergence_witness(z1, z2, cfg.n_max, ctx, s);

  Dataset d;
  d.kind = "witness";
  d.meta = {{"settled_at", Cell{static_cast<int64_t>(table.settled_at)}}};
  d.columns = {"n"};
  for (int i = 0; i < s.dim(); ++i) d.columns.push_back("w_re" + std::to_string(i));
  for (int i = 0; i < s.dim(); ++i) d.columns.push_back("w_im" + std::to_string(i));
  for (int i = 0; i < s.dim(); ++i) d.columns.push_back("gw_re" + std::to_string(i));
  for (int i = 0; i < s.dim(); ++i) d.columns.push_back("gw_im" + std::to_string(i));
  d.columns.insert(d.columns.end(), {"dist_to_z2", "dist_to_z1"});
  for (const auto& row : table.rows) {
    std::vector<Cell> cells{Cell{static_cast<int64_t>(row.n)}};
    for (int i = 0; i < s.dim(); ++i) cells.push_back(Cell{row.w[i].real()});
    for (int i = 0; i < s.dim(); ++i) cells.push_back(Cell{row.w[i].imag()});
    for (int i = 0; i < s.dim(); ++i) cells.push_back(Cell{row.gw[i].real()});
    for (int i = 0; i < s.dim(); ++i) cells.push_back(Cell{row.gw[i].imag()});
    cells.push_back(Cell{row.dist_to_z2});
    cells.push_back(Cell{row.dist_to_z1});
    d.rows.push_back(std::move(cells));
  }

  std::ostringstream summary;
  summary << "{\"kind\": \"witness\", \"rows\": " << table.rows.size()
          << ", \"settled_at\": " << table.settled_at << ", \"final_dist_to_z2\": "
          << jnum(table.rows.empty() ? 0.0 : table.rows.back().dist_to_z2) << "}";
  emit(cfg, render_dataset(cfg, d), summary.str(), out);
}

} // namespace

void run(const ExperimentConfig& cfg, std::ostream& out) {
  if (cfg.command == "split") return cmd_split(cfg, out);
  if (cfg.command == "classify-grid") return cmd_classify_grid(cfg, out);
  if (cfg.command == "orbit") return cmd_orbit(cfg, out);
  if (cfg.command == "fixed-points") return cmd_fixed_points(cfg, out);
  if (cfg.command == "lattice-check") return cmd_lattice_check(cfg, out);
  if (cfg.command == "norm-scan") return cmd_norm_scan(cfg, out);
  if (cfg.command == "psi-check") return cmd_psi_check(cfg, out);
  if (cfg.command == "witness") return cmd_witness(cfg, out);
  throw ConfigError("unknown command: '" + cfg.command + "'");
}

} // namespace kleinsolv::cli
