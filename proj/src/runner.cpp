#include "helm/runner.hpp"

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "helm/errors.hpp"
#include "helm/parallel.hpp"
#include "helm/special.hpp"

namespace helm {
namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

double parse_double(const KeyValue& kv) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(kv.value, &pos);
    if (pos != kv.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ParseError(kv.where + ": cannot parse '" + kv.value + "' as a number for key '" +
                     kv.key + "'");
  }
}

int parse_int(const KeyValue& kv) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(kv.value, &pos);
    if (pos != kv.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ParseError(kv.where + ": cannot parse '" + kv.value + "' as an integer for key '" +
                     kv.key + "'");
  }
}

bool parse_bool(const KeyValue& kv) {
  if (kv.value == "true" || kv.value == "1" || kv.value == "on") return true;
  if (kv.value == "false" || kv.value == "0" || kv.value == "off") return false;
  throw ParseError(kv.where + ": cannot parse '" + kv.value + "' as a boolean for key '" +
                   kv.key + "'");
}

std::vector<double> parse_double_list(const KeyValue& kv) {
  std::vector<double> out;
  std::stringstream ss(kv.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_double({kv.key, item, kv.where}));
  }
  if (out.empty()) throw ParseError(kv.where + ": empty list for key '" + kv.key + "'");
  return out;
}

std::vector<int> parse_int_list(const KeyValue& kv) {
  std::vector<int> out;
  for (double v : parse_double_list(kv)) {
    if (v != std::floor(v))
      throw ParseError(kv.where + ": expected integers for key '" + kv.key + "'");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

RefractionModel parse_refraction(const KeyValue& kv) {
  const std::string& v = kv.value;
  if (v == "gaussian_pair") return RefractionModel::gaussian_pair();
  const auto colon = v.find(':');
  const std::string head = v.substr(0, colon);
  if (head == "constant" || head == "angular") {
    if (colon == std::string::npos)
      throw ParseError(kv.where + ": '" + head + "' needs a parameter, e.g. '" + head + ":0.1'");
    const double p = parse_double({kv.key, v.substr(colon + 1), kv.where});
    if (head == "constant") {
      if (!(p > 0)) throw ValidationError(kv.where + ": constant index must be positive");
      return RefractionModel::constant(p);
    }
    if (p < 0 || !(2.0 - p > 0))
      throw ValidationError(kv.where + ": angular:a requires 0 <= a < 2 for positivity");
    return RefractionModel::angular_linear(p);
  }
  throw ParseError(kv.where + ": unknown refraction '" + v +
                   "' (expected constant:N, gaussian_pair, angular:A)");
}

void atomic_write(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
  const fs::path tmp = path.string() + ".partial";
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    writer(out);
    out.flush();
    if (!out) throw Error("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, path);
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ':' || c == '.') c = '-';
  return s;
}

std::string format_double(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

void write_trace_csv(const CgmRun& run, std::ostream& out) {
  out.precision(12);
  out << "m,J,grad_norm,rho,gamma\n";
  for (const auto& it : run.history)
    out << it.m << "," << it.J << "," << it.grad_norm << "," << it.rho << "," << it.gamma
        << "\n";
}

TriMesh build_refined(const DomainSpec& spec, double h, int refine) {
  TriMesh mesh = build_mesh(spec, h);
  for (int i = 0; i < refine; ++i) mesh = refine_uniform(mesh);
  return mesh;
}

int run_solve(const RunConfig& cfg, std::ostream& log) {
  const double R = cfg.R.front();
  const int j = cfg.j.front();
  const double k = cfg.k.front();
  const TriMesh mesh = build_refined(DomainSpec{cfg.shape, cfg.r_hat, R}, cfg.h, cfg.refine);
  HelmholtzProblem problem;
  problem.mesh = &mesh;
  problem.k = k;
  problem.refraction = cfg.refraction;
  problem.inner_data = [j](const Eigen::Vector2d& x) {
    return Cplx(std::cos(j * std::atan2(x.y(), x.x())), 0.0);
  };
  problem.outer_kind = cfg.outer;
  CgmConfig cgm;
  cgm.epsilon = cfg.epsilon;
  cgm.max_iterations = cfg.max_iterations;
  cgm.restart_interval = cfg.restart;
  const FunctionalConfig fc{cfg.weighted_resolved()};
  const CgmRun run = minimize(problem, fc, cgm);

  const std::string stem = "field_" + shape_name(cfg.shape) + "_j" + std::to_string(j) + "_k" +
                           sanitize(format_double(k)) + "_R" + sanitize(format_double(R));
  atomic_write(fs::path(cfg.out_dir) / (stem + ".csv"),
               [&](std::ostream& o) { write_field_csv(run.u_star, mesh, o); });
  if (cfg.vtk)
    atomic_write(fs::path(cfg.out_dir) / (stem + ".vtk"),
                 [&](std::ostream& o) { write_field_vtk(run.u_star, mesh, o); });
  if (cfg.trace)
    atomic_write(fs::path(cfg.out_dir) / ("trace_" + stem.substr(6) + ".csv"),
                 [&](std::ostream& o) { write_trace_csv(run, o); });

  log << "solve: " << shape_name(cfg.shape) << " R=" << R << " j=" << j << " k=" << k
      << " refraction=" << cfg.refraction.tag() << (fc.weighted ? " weighted" : " unweighted")
      << "\n";
  log << "  vertices=" << mesh.vertex_count() << " triangles=" << mesh.triangle_count() << "\n";
  log << "  iterations=" << run.iterations << " converged=" << (run.converged ? "yes" : "no")
      << " J=" << run.final_J << "\n";
  if (cfg.refraction.is_constant() && cfg.refraction.parameter() == 1.0) {
    const ModeSolution oracle{j, k, cfg.r_hat};
    const RegionMask full = region_mask(mesh, Region::FullDomain);
    const ErrorReport rep =
        error_norms(run.u_star, oracle, mesh, full, Region::FullDomain, k, cfg.refraction, fc);
    log << "  vs exact: L2_rel=" << rep.L2_rel << " H1_rel=" << rep.H1_rel
        << " dJ_rel=" << rep.dJ_rel << "\n";
  }
  return run.converged ? 0 : 2;
}

int run_study(const RunConfig& cfg, std::ostream& log) {
  StudySpec spec;
  spec.shapes = {cfg.shape};
  spec.js = cfg.j;
  spec.ks = cfg.k;
  spec.Rs = cfg.R;
  spec.refraction = cfg.refraction;
  spec.r_hat = cfg.r_hat;
  spec.h = cfg.h;
  spec.weighted = cfg.weighted_resolved();
  spec.outer = cfg.outer;
  spec.cgm.epsilon = cfg.epsilon;
  spec.cgm.max_iterations = cfg.max_iterations;
  spec.cgm.restart_interval = cfg.restart;
  spec.R_ref = cfg.R_ref;
  spec.on_row = [&](const StudyRow& row, const CgmRun& run) {
    log << "  row " << shape_name(row.shape) << " j=" << row.j << " k=" << row.k
        << " R=" << row.R << " L2_rel(ann)=" << row.annulus_unit.L2_rel
        << " iters=" << row.iterations << " (" << row.wall_time << " s)\n";
    if (cfg.trace) {
      const std::string stem = "trace_" + shape_name(row.shape) + "_j" + std::to_string(row.j) +
                               "_k" + sanitize(format_double(row.k)) + "_R" +
                               sanitize(format_double(row.R));
      atomic_write(fs::path(cfg.out_dir) / (stem + ".csv"),
                   [&](std::ostream& o) { write_trace_csv(run, o); });
    }
  };
  const std::vector<StudyRow> rows = convergence_study(spec);
  atomic_write(fs::path(cfg.out_dir) / "study.csv",
               [&](std::ostream& o) { write_study_csv(rows, o); });

  // gnuplot-ready error-vs-R curves (lin-log presentation)
  for (int j : cfg.j)
    for (double k : cfg.k) {
      auto curve = [&](const char* field, auto getter) {
        std::ostringstream name;
        name << "curve_" << shape_name(cfg.shape) << "_" << sanitize(cfg.refraction.tag()) << "_j"
             << j << "_k" << sanitize(format_double(k)) << "_" << field << ".dat";
        atomic_write(fs::path(cfg.out_dir) / name.str(), [&](std::ostream& o) {
          o.precision(12);
          for (const auto& row : rows)
            if (row.j == j && row.k == k) o << row.R << " " << getter(row) << "\n";
        });
      };
      curve("L2rel", [](const StudyRow& r) { return r.annulus_unit.L2_rel; });
      curve("H1rel", [](const StudyRow& r) { return r.annulus_unit.H1_rel; });
    }
  log << "study: wrote " << rows.size() << " rows to " << (fs::path(cfg.out_dir) / "study.csv")
      << "\n";
  return 0;
}

int run_exact(const RunConfig& cfg, std::ostream& log) {
  const int j = cfg.j.front();
  const double k = cfg.k.front();
  const double R = cfg.R.front();
  const ModeSolution mode{j, k, cfg.r_hat};
  atomic_write(fs::path(cfg.out_dir) / "exact.csv", [&](std::ostream& o) {
    o.precision(17);
    o << "r,theta,x,y,re,im\n";
    for (int ir = 0; ir < cfg.exact_nr; ++ir) {
      const double r =
          cfg.r_hat + (R - cfg.r_hat) * ir / std::max(1, cfg.exact_nr - 1);
      for (int it = 0; it < cfg.exact_ntheta; ++it) {
        const double theta = 2.0 * std::numbers::pi * it / cfg.exact_ntheta;
        const Eigen::Vector2d x(r * std::cos(theta), r * std::sin(theta));
        const Cplx u = exact_mode(mode, x);
        o << r << "," << theta << "," << x.x() << "," << x.y() << "," << u.real() << ","
          << u.imag() << "\n";
      }
    }
  });
  log << "exact: sampled mode j=" << j << " k=" << k << " on [" << cfg.r_hat << ", " << R
      << "] to exact.csv\n";
  return 0;
}

int run_mesh(const RunConfig& cfg, std::ostream& log) {
  const double R = cfg.R.front();
  const TriMesh mesh = build_refined(DomainSpec{cfg.shape, cfg.r_hat, R}, cfg.h, cfg.refine);
  const MeshQuality q = mesh_quality(mesh);
  const std::string name = "mesh_" + shape_name(cfg.shape) + "_R" + sanitize(format_double(R)) +
                           "_h" + sanitize(format_double(cfg.h)) + ".txt";
  atomic_write(fs::path(cfg.out_dir) / name, [&](std::ostream& o) { write_mesh(mesh, o); });
  log << "mesh: " << shape_name(cfg.shape) << " R=" << R << " h=" << cfg.h << " -> " << name
      << "\n";
  log << "  vertices=" << mesh.vertex_count() << " triangles=" << q.triangle_count
      << " min_angle=" << q.min_angle_deg << " deg max_edge=" << q.max_edge << "\n";
  return 0;
}

int run_scan(const RunConfig& cfg, std::ostream& log) {
  CgmConfig cgm;
  cgm.epsilon = cfg.epsilon;
  cgm.max_iterations = cfg.max_iterations;
  cgm.restart_interval = cfg.restart;
  const auto curves = divergence_scan(cfg.scan_a, cfg.R, cfg.k.front(), cfg.j.front(), cfg.r_hat,
                                      cfg.h, cgm, [&](const ScanCurve& c) {
                                        log << "  a=" << c.a << " J(R) = ";
                                        for (double jv : c.J) log << jv << " ";
                                        log << (c.bounded ? "[bounded]" : "[growing]") << "\n";
                                      });
  atomic_write(fs::path(cfg.out_dir) / "scan.csv",
               [&](std::ostream& o) { write_scan_csv(curves, o); });
  atomic_write(fs::path(cfg.out_dir) / "scan_classes.txt", [&](std::ostream& o) {
    for (const auto& c : curves)
      o << "a=" << c.a << " " << (c.bounded ? "bounded" : "growing") << "\n";
  });
  log << "scan: wrote scan.csv and scan_classes.txt\n";
  return 0;
}

} // namespace

std::vector<KeyValue> parse_kv_text(std::istream& in) {
  std::vector<KeyValue> kvs;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(n) + ": expected 'key = value', got '" + line +
                       "'");
    KeyValue kv;
    kv.key = trim(line.substr(0, eq));
    kv.value = trim(line.substr(eq + 1));
    kv.where = "line " + std::to_string(n);
    if (kv.key.empty() || kv.value.empty())
      throw ParseError(kv.where + ": empty key or value in '" + line + "'");
    kvs.push_back(std::move(kv));
  }
  return kvs;
}

Command parse_command(const std::string& name) {
  if (name == "solve") return Command::Solve;
  if (name == "study") return Command::Study;
  if (name == "exact") return Command::Exact;
  if (name == "mesh") return Command::Mesh;
  if (name == "scan") return Command::Scan;
  throw ParseError("unknown command '" + name + "' (expected solve|study|exact|mesh|scan)");
}

RunConfig parse_config(const std::string& command, const std::vector<KeyValue>& kvs) {
  RunConfig cfg;
  cfg.command = parse_command(command);
  for (const auto& kv : kvs) {
    if (kv.key == "shape") {
      if (kv.value == "annulus")
        cfg.shape = Shape::Annulus;
      else if (kv.value == "ellipse")
        cfg.shape = Shape::EllipseHole;
      else if (kv.value == "square")
        cfg.shape = Shape::SquareHole;
      else
        throw ParseError(kv.where + ": unknown shape '" + kv.value + "'");
    } else if (kv.key == "r_hat") {
      cfg.r_hat = parse_double(kv);
    } else if (kv.key == "R") {
      cfg.R = parse_double_list(kv);
    } else if (kv.key == "j") {
      cfg.j = parse_int_list(kv);
    } else if (kv.key == "k") {
      cfg.k = parse_double_list(kv);
    } else if (kv.key == "h") {
      cfg.h = parse_double(kv);
    } else if (kv.key == "refine") {
      cfg.refine = parse_int(kv);
    } else if (kv.key == "refraction") {
      cfg.refraction = parse_refraction(kv);
    } else if (kv.key == "weighted") {
      if (kv.value == "auto")
        cfg.weighted = WeightChoice::Auto;
      else
        cfg.weighted = parse_bool(kv) ? WeightChoice::On : WeightChoice::Off;
    } else if (kv.key == "outer_bc") {
      if (kv.value == "neumann")
        cfg.outer = OuterKind::Neumann;
      else if (kv.value == "dirichlet")
        cfg.outer = OuterKind::Dirichlet;
      else
        throw ParseError(kv.where + ": unknown outer_bc '" + kv.value + "'");
    } else if (kv.key == "epsilon") {
      cfg.epsilon = parse_double(kv);
    } else if (kv.key == "max_iterations") {
      cfg.max_iterations = parse_int(kv);
    } else if (kv.key == "restart") {
      cfg.restart = parse_int(kv);
    } else if (kv.key == "R_ref") {
      cfg.R_ref = parse_double(kv);
    } else if (kv.key == "scan_a") {
      cfg.scan_a = parse_double_list(kv);
    } else if (kv.key == "out") {
      cfg.out_dir = kv.value;
    } else if (kv.key == "trace") {
      cfg.trace = parse_bool(kv);
    } else if (kv.key == "vtk") {
      cfg.vtk = parse_bool(kv);
    } else if (kv.key == "seed") {
      cfg.seed = static_cast<unsigned>(parse_int(kv));
    } else if (kv.key == "exact_nr") {
      cfg.exact_nr = parse_int(kv);
    } else if (kv.key == "exact_ntheta") {
      cfg.exact_ntheta = parse_int(kv);
    } else {
      throw ParseError(kv.where + ": unknown key '" + kv.key + "'");
    }
  }

  if (!(cfg.r_hat > 0)) throw ValidationError("r_hat must be positive");
  for (double R : cfg.R)
    if (!(R > cfg.r_hat))
      throw ValidationError("R = " + std::to_string(R) + " must exceed r_hat = " +
                            std::to_string(cfg.r_hat));
  if (!(cfg.h > 0)) throw ValidationError("h must be positive");
  if (!(cfg.epsilon > 0)) throw ValidationError("epsilon must be positive");
  if (cfg.max_iterations < 1) throw ValidationError("max_iterations must be at least 1");
  if (cfg.refine < 0) throw ValidationError("refine must be nonnegative");
  if (cfg.refraction.lower_bound() <= 0)
    throw ValidationError("refraction model is not positive (lower bound " +
                          std::to_string(cfg.refraction.lower_bound()) + ")");
  for (int j : cfg.j)
    if (j < 0) throw ValidationError("j must be nonnegative");
  for (double k : cfg.k)
    if (!(k > 0)) throw ValidationError("k must be positive");
  for (double a : cfg.scan_a)
    if (a < 0 || !(a < 2)) throw ValidationError("scan_a entries must satisfy 0 <= a < 2");
  return cfg;
}

int run(const RunConfig& cfg, std::ostream& log) {
  init_threads();
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  try {
    switch (cfg.command) {
      case Command::Solve:
        return run_solve(cfg, log);
      case Command::Study:
        return run_study(cfg, log);
      case Command::Exact:
        return run_exact(cfg, log);
      case Command::Mesh:
        return run_mesh(cfg, log);
      case Command::Scan:
        return run_scan(cfg, log);
    }
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

} // namespace helm
