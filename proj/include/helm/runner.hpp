#pragma once

// Configuration parsing (flat key = value) and command orchestration for
// the helm-open CLI.

#include <iosfwd>
#include <string>
#include <vector>

#include "helm/analysis.hpp"
#include "helm/cgm.hpp"
#include "helm/geometry.hpp"
#include "helm/refraction.hpp"

namespace helm {

enum class Command { Solve, Study, Exact, Mesh, Scan };

enum class WeightChoice { Auto, On, Off }; // Auto: weighted iff variable n

struct RunConfig {
  Command command = Command::Solve;
  Shape shape = Shape::Annulus;
  double r_hat = 0.5;
  std::vector<double> R = {2.0};
  std::vector<int> j = {0};
  std::vector<double> k = {1.0};
  double h = 0.1;
  int refine = 0;
  RefractionModel refraction = RefractionModel::constant(1.0);
  WeightChoice weighted = WeightChoice::Auto;
  OuterKind outer = OuterKind::Neumann;
  double epsilon = 1e-8;
  int max_iterations = 500;
  int restart = 50;
  double R_ref = 8.0;
  std::vector<double> scan_a = {0.0, 0.1, 0.8};
  std::string out_dir = ".";
  bool trace = false;
  bool vtk = false;
  unsigned seed = 42;
  int exact_nr = 33;
  int exact_ntheta = 64;

  bool weighted_resolved() const {
    if (weighted == WeightChoice::Auto) return !refraction.is_constant();
    return weighted == WeightChoice::On;
  }
};

struct KeyValue {
  std::string key, value;
  std::string where; // "line N" or "flag --key", for diagnostics
};

// Parses `key = value` lines ('#' comments, blank lines allowed).
std::vector<KeyValue> parse_kv_text(std::istream& in);

// Applies defaults, then the key/value pairs in order (later wins).
// ParseError on unknown keys or unparseable values, ValidationError on
// semantic violations.
RunConfig parse_config(const std::string& command, const std::vector<KeyValue>& kvs);

Command parse_command(const std::string& name);

// Executes the command; writes artifacts under config.out_dir. Returns the
// process exit status (0 on success).
int run(const RunConfig& config, std::ostream& log);

} // namespace helm
