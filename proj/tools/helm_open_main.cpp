// helm-open: exterior Helmholtz solves with an optimized artificial
// boundary condition. Subcommands: solve, study, exact, mesh, scan.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "helm/errors.hpp"
#include "helm/runner.hpp"

namespace {

struct FlagSpec {
  const char* key;
  const char* help;
};

// Flags mirror config-file keys one to one; flags override the file.
constexpr FlagSpec kFlags[] = {
    {"shape", "annulus | ellipse | square"},
    {"r_hat", "inner circle radius (default 0.5)"},
    {"R", "outer size, comma list for studies (default 2)"},
    {"j", "angular mode of the inner data cos(j theta), comma list"},
    {"k", "wavenumber, comma list"},
    {"h", "target mesh spacing (default 0.1)"},
    {"refine", "uniform refinement levels (default 0)"},
    {"refraction", "constant:N | gaussian_pair | angular:A"},
    {"weighted", "auto | true | false (default auto)"},
    {"outer_bc", "neumann | dirichlet (default neumann)"},
    {"epsilon", "CG stopping tolerance (default 1e-8)"},
    {"max_iterations", "CG iteration cap (default 500)"},
    {"restart", "CG restart interval (default 50)"},
    {"R_ref", "self-reference radius for variable n (default 8)"},
    {"scan_a", "comma list of angular amplitudes for scan"},
    {"seed", "seed for randomized diagnostics (default 42)"},
    {"exact_nr", "radial samples for the exact command"},
    {"exact_ntheta", "angular samples for the exact command"},
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"helm-open: exterior Helmholtz solver with optimized artificial boundary data"};
  app.require_subcommand(1);

  std::vector<std::string> commands = {"solve", "study", "exact", "mesh", "scan"};
  std::string config_path, out_dir;
  bool trace = false, vtk = false;
  std::map<std::string, std::string> flag_values;

  for (const auto& name : commands) {
    CLI::App* sub = app.add_subcommand(
        name, name == "solve"   ? "single CGM solve"
              : name == "study" ? "convergence study over (j, k, R)"
              : name == "exact" ? "sample the exact mode solution to CSV"
              : name == "mesh"  ? "generate and write a mesh"
                                : "guided-mode divergence scan over a");
    sub->add_option("--config", config_path, "flat key = value config file");
    sub->add_option("--out", out_dir, "output directory (default .)");
    sub->add_flag("--trace", trace, "write per-iteration CGM history CSV");
    sub->add_flag("--vtk", vtk, "also write legacy-VTK fields");
    for (const auto& f : kFlags)
      sub->add_option("--" + std::string(f.key), flag_values[f.key], f.help);
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    std::vector<helm::KeyValue> kvs;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) {
        std::cerr << "error: cannot open config file '" << config_path << "'\n";
        return 1;
      }
      kvs = helm::parse_kv_text(f);
    }
    for (const auto& f : kFlags) {
      const auto it = flag_values.find(f.key);
      if (it != flag_values.end() && !it->second.empty())
        kvs.push_back({f.key, it->second, "flag --" + std::string(f.key)});
    }
    if (!out_dir.empty()) kvs.push_back({"out", out_dir, "flag --out"});
    if (trace) kvs.push_back({"trace", "true", "flag --trace"});
    if (vtk) kvs.push_back({"vtk", "true", "flag --vtk"});

    const helm::RunConfig cfg = helm::parse_config(command, kvs);
    return helm::run(cfg, std::cout);
  } catch (const helm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
