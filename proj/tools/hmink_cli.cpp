// hmink: batch front end for profiles, the Q iteration, bound evaluation, flows and the double
// disk. Data files carry no timestamps; run metadata goes to <out>.manifest.json.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "hmink/hmcf.hpp"
#include "hmink/inequalities.hpp"
#include "hmink/io.hpp"
#include "hmink/profiles.hpp"
#include "hmink/q_iteration.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

enum Exit : int { kOk = 0, kUsage = 1, kNoConvergence = 2, kInfeasible = 3, kFlowFailure = 4 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Manifest {
  std::string command;
  ordered_json params = ordered_json::object();
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void write(const fs::path& path) const {
    ordered_json j;
    j["command"]      = command;
    j["version"]      = kVersion;
    j["parameters"]   = params;
    j["outputs"]      = outputs;
    j["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    hmink::io::write_atomic(path, j.dump(2) + "\n");
  }
};

fs::path sibling(const fs::path& out, const std::string& suffix) {
  auto p = out;
  p += suffix;
  return p;
}

void emit(Manifest& man, const fs::path& path, const std::string& content) {
  hmink::io::write_atomic(path, content);
  man.outputs.push_back(path.string());
}

// -- profiles ---------------------------------------------------------------------------------

struct ProfilesArgs {
  double a     = -1.0;
  double r_max = 3.0;
  int n        = 301;
  std::string out;
};

int cmd_profiles(const ProfilesArgs& args) {
  if (args.r_max <= 0.0 || !std::isfinite(args.r_max)) { throw UsageError("--r-max must be > 0"); }
  if (args.n < 2) { throw UsageError("--n must be >= 2"); }
  const hmink::SpaceForm sf{args.a};
  const auto n = static_cast<std::size_t>(args.n);
  std::vector<double> r(n), V(n), S(n), M(n), e(n), x(n);
  hmink::parallel_for(
      n,
      [&](std::size_t k) {
        r[k] = args.r_max * static_cast<double>(k) / static_cast<double>(n - 1);
        V[k] = hmink::sphere_volume(r[k], sf);
        S[k] = hmink::sphere_area(r[k], sf);
        M[k] = hmink::sphere_tmc(r[k], sf);
        e[k] = hmink::eta(V[k], sf);
        x[k] = hmink::xi(V[k], sf);
      },
      hmink::thread_count_from_env());
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(e[k] - S[k]) > 1e-9 * std::max(1.0, S[k])) {
      throw hmink::Error(fmt::format("self-test failed: eta(V) = {} but S = {} at r = {}", e[k],
                                     S[k], r[k]));
    }
  }
  hmink::io::Table t;
  t.add("r", std::move(r));
  t.add("V", std::move(V));
  t.add("S", std::move(S));
  t.add("M", std::move(M));
  t.add("eta_of_V", std::move(e));
  t.add("xi_of_V", std::move(x));

  Manifest man{.command = "profiles"};
  man.params = {{"a", args.a}, {"r_max", args.r_max}, {"n", args.n}};
  if (args.out.empty()) {
    std::cout << t.to_csv();
    return kOk;
  }
  emit(man, args.out, t.to_csv());
  man.write(sibling(args.out, ".manifest.json"));
  return kOk;
}

// -- qiter ------------------------------------------------------------------------------------

struct QiterArgs {
  hmink::IterationConfig cfg;
  double a = -1.0;
  std::string out;
  std::string json;
};

int cmd_qiter(QiterArgs args) {
  if (args.out.empty()) { throw UsageError("--out is required"); }
  args.cfg.sf      = hmink::SpaceForm{args.a};
  args.cfg.threads = hmink::thread_count_from_env();
  const auto report = hmink::run_iteration(args.cfg);

  Manifest man{.command = "qiter"};
  man.params = {{"a", args.a},
                {"x_max", args.cfg.x_max},
                {"n_points", args.cfg.n_points},
                {"sup_tol", args.cfg.sup_tol},
                {"max_n", args.cfg.max_n},
                {"grid_power", args.cfg.grid_power}};
  const fs::path json = args.json.empty() ? sibling(args.out, ".json") : fs::path(args.json);
  emit(man, args.out, hmink::io::iterates_table(report).to_csv());
  emit(man, json, hmink::io::iteration_json(report) + "\n");
  man.write(sibling(args.out, ".manifest.json"));
  if (!report.converged) {
    std::cerr << fmt::format("not converged after {} iterates, gap {:.3g} > {:.3g}\n",
                             report.n_final, report.gaps.back(), args.cfg.sup_tol);
    return kNoConvergence;
  }
  return kOk;
}

// -- bounds -----------------------------------------------------------------------------------

struct BoundsArgs {
  double S = 0.0;
  double V = 0.0;
  double a = -1.0;
  std::string json;
};

int cmd_bounds(const BoundsArgs& args) {
  const hmink::SpaceForm sf{args.a};
  const auto report = hmink::evaluate_bounds(args.S, args.V, sf);
  auto doc          = ordered_json::parse(hmink::io::bounds_json(report));
  if (report.feasible && args.a == -1.0) {
    const auto c = hmink::compare_sharp_vs_bgl(args.S, args.V);
    doc["comparison"] = {{"f1", c.f1}, {"f2", c.f2}, {"gap", c.gap}, {"equality", c.equality}};
  }
  const std::string text = doc.dump(2) + "\n";
  std::cout << text;
  if (!args.json.empty()) {
    Manifest man{.command = "bounds"};
    man.params = {{"S", args.S}, {"V", args.V}, {"a", args.a}};
    emit(man, args.json, text);
    man.write(sibling(args.json, ".manifest.json"));
  }
  return report.feasible ? kOk : kInfeasible;
}

// -- flow -------------------------------------------------------------------------------------

struct FlowArgs {
  std::string shape = "sphere";
  double r0         = 1.0;
  double eps        = 0.05;
  int mode          = 2;
  double a          = -1.0;
  hmink::FlowConfig cfg;
  std::string out;
  std::string json;
  std::string surface;
};

int cmd_flow(FlowArgs args) {
  if (args.out.empty()) { throw UsageError("--out is required"); }
  const hmink::SpaceForm sf{args.a};
  args.cfg.validate();
  const auto initial = args.shape == "sphere"
                           ? hmink::make_sphere(args.r0, sf, args.cfg.n_grid)
                           : hmink::make_perturbed_sphere(args.r0, args.eps, args.mode, sf,
                                                          args.cfg.n_grid);

  Manifest man{.command = "flow"};
  man.params = {{"shape", args.shape},      {"r0", args.r0},
                {"eps", args.eps},          {"mode", args.mode},
                {"a", args.a},              {"dt", args.cfg.dt},
                {"t_max", args.cfg.t_max},  {"n", args.cfg.n_grid},
                {"record_every", args.cfg.record_every},
                {"stop_radius", args.cfg.stop_radius}};
  const fs::path json = args.json.empty() ? sibling(args.out, ".audit.json") : fs::path(args.json);

  auto write_surface = [&](const hmink::AxisymmetricSurface& s) {
    if (!args.surface.empty()) { emit(man, args.surface, hmink::io::surface_table(s).to_csv()); }
  };

  try {
    const auto result = hmink::run_flow(initial, args.cfg);
    emit(man, args.out, hmink::io::trace_table(result.trace).to_csv());
    write_surface(result.final_surface);
    int code = kOk;
    if (result.trace.size() >= 3) {
      const auto audit = hmink::monotone_audit(result.trace);
      emit(man, json, hmink::io::audit_json(audit) + "\n");
      code = audit.passed ? kOk : kFlowFailure;
    } else {
      std::cerr << "fewer than 3 records; audit skipped\n";
      code = kFlowFailure;
    }
    man.write(sibling(args.out, ".manifest.json"));
    return code;
  } catch (const hmink::FlowError& e) {
    emit(man, args.out, hmink::io::trace_table(e.trace()).to_csv());
    write_surface(e.last_surface());
    man.write(sibling(args.out, ".manifest.json"));
    std::cerr << e.what() << "\n";
    return kFlowFailure;
  }
}

// -- disk -------------------------------------------------------------------------------------

struct DiskArgs {
  double rho_max = 3.0;
  int n          = 300;
  double angle   = std::numbers::pi;
  std::string out;
  std::string json;
};

int cmd_disk(const DiskArgs& args) {
  if (args.out.empty()) { throw UsageError("--out is required"); }
  if (!(args.rho_max > 0.0)) { throw UsageError("--rho-max must be > 0"); }
  if (args.n < 1) { throw UsageError("--n must be >= 1"); }
  const auto n = static_cast<std::size_t>(args.n);
  std::vector<double> rho(n), S(n), M(n), bound(n), violated(n);
  for (std::size_t k = 0; k < n; ++k) {
    rho[k]      = args.rho_max * static_cast<double>(k + 1) / static_cast<double>(n);
    const auto d = hmink::double_disk(rho[k], args.angle);
    S[k]        = d.S;
    M[k]        = *d.M;
    bound[k]    = hmink::bound_santalo(d.S, d.sf);
    violated[k] = M[k] < bound[k] ? 1.0 : 0.0;
  }
  hmink::io::Table t;
  t.add("rho", std::move(rho));
  t.add("S", std::move(S));
  t.add("M", std::move(M));
  t.add("santalo_bound", std::move(bound));
  t.add("violated", std::move(violated));

  ordered_json side;
  side["edge_angle"] = args.angle;
  const auto c       = hmink::santalo_threshold_cosh(args.angle);
  if (c && *c > 1.0) {
    side["rho_star"]      = std::acosh(*c);
    side["cosh_rho_star"] = *c;
  } else if (c) {
    side["rho_star"]      = 0.0;
    side["cosh_rho_star"] = *c;
  } else {
    side["rho_star"]      = nullptr;
    side["cosh_rho_star"] = nullptr;
  }

  Manifest man{.command = "disk"};
  man.params = {{"rho_max", args.rho_max}, {"n", args.n}, {"angle", args.angle}};
  const fs::path json = args.json.empty() ? sibling(args.out, ".json") : fs::path(args.json);
  emit(man, args.out, t.to_csv());
  emit(man, json, side.dump(2) + "\n");
  man.write(sibling(args.out, ".manifest.json"));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hmink: isoperimetric profiles, total mean curvature bounds and harmonic mean "
               "curvature flow in hyperbolic space"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "key=value file with defaults; flags override");
  app.require_subcommand(1);

  ProfilesArgs pa;
  auto* profiles = app.add_subcommand("profiles", "tabulate geodesic sphere quantities");
  profiles->add_option("--a", pa.a, "curvature a <= 0")->capture_default_str();
  profiles->add_option("--r-max", pa.r_max, "largest radius")->capture_default_str();
  profiles->add_option("--n", pa.n, "number of rows")->capture_default_str();
  profiles->add_option("--out", pa.out, "CSV path (stdout when omitted)");

  QiterArgs qa;
  auto* qiter = app.add_subcommand("qiter", "run the monotone Q iteration");
  qiter->add_option("--a", qa.a)->capture_default_str();
  qiter->add_option("--x-max", qa.cfg.x_max)->capture_default_str();
  qiter->add_option("--n-points", qa.cfg.n_points)->capture_default_str();
  qiter->add_option("--sup-tol", qa.cfg.sup_tol)->capture_default_str();
  qiter->add_option("--max-n", qa.cfg.max_n)->capture_default_str();
  qiter->add_option("--grid-power", qa.cfg.grid_power, "1 = uniform grid")->capture_default_str();
  qiter->add_option("--out", qa.out, "iterates CSV")->required();
  qiter->add_option("--json", qa.json, "report path (default <out>.json)");

  BoundsArgs ba;
  auto* bounds = app.add_subcommand("bounds", "evaluate every bound at (S, V)");
  bounds->add_option("--S", ba.S, "area")->required();
  bounds->add_option("--V", ba.V, "volume")->required();
  bounds->add_option("--a", ba.a)->capture_default_str();
  bounds->add_option("--json", ba.json, "also write the report here");

  FlowArgs fa;
  auto* flow = app.add_subcommand("flow", "run harmonic mean curvature flow and audit it");
  flow->add_option("--shape", fa.shape)->check(CLI::IsMember({"sphere", "perturbed"}))->capture_default_str();
  flow->add_option("--r0", fa.r0)->capture_default_str();
  flow->add_option("--eps", fa.eps)->capture_default_str();
  flow->add_option("--mode", fa.mode)->capture_default_str();
  flow->add_option("--a", fa.a)->capture_default_str();
  flow->add_option("--dt", fa.cfg.dt)->capture_default_str();
  flow->add_option("--t-max", fa.cfg.t_max)->capture_default_str();
  flow->add_option("--n", fa.cfg.n_grid)->capture_default_str();
  flow->add_option("--record-every", fa.cfg.record_every)->capture_default_str();
  flow->add_option("--stop-radius", fa.cfg.stop_radius)->capture_default_str();
  flow->add_option("--out", fa.out, "trace CSV")->required();
  flow->add_option("--json", fa.json, "audit path (default <out>.audit.json)");
  flow->add_option("--surface", fa.surface, "final surface CSV (u, rho)");

  DiskArgs da;
  auto* disk = app.add_subcommand("disk", "double disk against the sphere bound");
  disk->add_option("--rho-max", da.rho_max)->capture_default_str();
  disk->add_option("--n", da.n)->capture_default_str();
  disk->add_option("--angle", da.angle, "edge angle")->capture_default_str();
  disk->add_option("--out", da.out, "CSV path")->required();
  disk->add_option("--json", da.json, "sidecar path (default <out>.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*profiles) { return cmd_profiles(pa); }
    if (*qiter) { return cmd_qiter(qa); }
    if (*bounds) { return cmd_bounds(ba); }
    if (*flow) { return cmd_flow(fa); }
    if (*disk) { return cmd_disk(da); }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const hmink::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kUsage;
  } catch (const hmink::ConvexityError& e) {
    std::cerr << "construction error: " << e.what() << "\n";
    return kUsage;
  } catch (const hmink::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
