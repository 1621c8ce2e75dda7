// apwave: steady almost-periodic gravity water waves with constant vorticity.
//
// Subcommands: freqset check|gen, dispersion, branch, verify,
// demo nonuniqueness|almostperiodic, profile.  Every command reads inputs,
// computes, writes files into --output-dir, and exits:
//   0 success, 1 I/O error, 2 invalid input, 3 mathematical refusal
//   (resonance or non-convergence).

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <numbers>

#include "apwave/serialize.hpp"

namespace fs = std::filesystem;
using namespace apwave;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitRefused = 3;

struct ParamFlags {
  double gamma = 0.0;
  double g = 9.8;
  double h = 1.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--gamma", gamma, "constant vorticity (1/s)")
        ->capture_default_str();
    cmd->add_option("--g", g, "gravitational acceleration (m/s^2)")
        ->capture_default_str();
    cmd->add_option("--depth", h, "conformal mean depth (m)")
        ->capture_default_str();
  }

  WaveParams params() const {
    WaveParams p{gamma, g, h};
    p.validate();
    return p;
  }
};

AdmissiblePair load_pair(const std::string& path) {
  const json j = json::parse(read_text_file(path));
  return pair_from_json(j);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw std::ios_base::failure("cannot create output directory '" + dir +
                                 "': " + ec.message());
}

ModeId parse_k0(const std::string& spec, const AdmissiblePair& pair) {
  // Format "cos:0,2" or "sin:1".
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("--k0 expects kind:coeffs, e.g. cos:0,2");
  const std::string kind_s = spec.substr(0, colon);
  std::vector<int> coeffs;
  std::stringstream ss(spec.substr(colon + 1));
  std::string tok;
  while (std::getline(ss, tok, ',')) coeffs.push_back(std::stoi(tok));
  ModeId m;
  m.vec = FreqVector(coeffs);
  m.kind = (kind_s == "cos") ? ModeKind::Cos
           : (kind_s == "sin") ? ModeKind::Sin
                               : ModeKind::Excluded;
  if (!m.vec.is_canonical())
    throw std::invalid_argument("--k0 vector must be canonical (first nonzero "
                                "coefficient positive)");
  if (classify(pair, m.vec) != m.kind)
    throw std::invalid_argument("--k0 " + spec +
                                " is not a " + kind_s + " mode of this pair");
  m.freq = pair.basis->frequency(m.vec);
  return m;
}

int run_freqset(const std::string& sub, const std::string& pair_path,
                const std::string& outdir, const std::string& fmt) {
  const AdmissiblePair pair = load_pair(pair_path);
  if (sub == "check") {
    const ValidationReport rep = check_admissible(pair);
    json out;
    out["pair"] = pair_to_json(pair);
    out["valid"] = rep.valid;
    json viol = json::array();
    for (const auto& v : rep.violations)
      viol.push_back({{"law", v.law}, {"witness", v.witness}});
    out["violations"] = viol;
    std::cout << json_dump(out);
    if (!outdir.empty()) {
      ensure_dir(outdir);
      write_text_file(outdir + "/freqset_check.json", json_dump(out));
    }
    return rep.valid ? kExitOk : kExitInvalid;
  }
  // gen
  const ValidationReport rep = check_structure(pair);
  if (!rep.valid) {
    std::cerr << "invalid pair: " << rep.summary() << "\n";
    return kExitInvalid;
  }
  const auto modes = enumerate_modes(pair);
  if (fmt == "csv") {
    const std::string csv = modes_csv(modes);
    std::cout << csv;
    if (!outdir.empty()) {
      ensure_dir(outdir);
      write_text_file(outdir + "/modes.csv", csv);
    }
  } else {
    json out;
    out["pair"] = pair_to_json(pair);
    json arr = json::array();
    for (const auto& m : modes) arr.push_back(mode_to_json(m));
    out["modes"] = arr;
    std::cout << json_dump(out);
    if (!outdir.empty()) {
      ensure_dir(outdir);
      write_text_file(outdir + "/modes.json", json_dump(out));
    }
  }
  return kExitOk;
}

int run_dispersion(const ParamFlags& pf, const std::string& pair_path,
                   const std::string& outdir) {
  const WaveParams p = pf.params();
  const AdmissiblePair pair = load_pair(pair_path);
  const auto modes = enumerate_modes(pair);
  const std::string csv = dispersion_csv(p, modes);
  std::cout << csv;
  if (!outdir.empty()) {
    ensure_dir(outdir);
    write_text_file(outdir + "/dispersion.csv", csv);
  }
  return kExitOk;
}

struct BranchFlags {
  std::string pair_path;
  std::string k0_spec = "cos:1";
  std::string root = "+";
  double s_max = 1e-2;
  int n_steps = 20;
  double cutoff = 0.0;
  double newton_tol = 1e-11;
  int newton_max_iter = 25;
  double resonance_tol = 1e-6;
  bool include_negative = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--pair", pair_path, "frequency-pair definition file (JSON)")
        ->required();
    cmd->add_option("--k0", k0_spec, "kernel mode, kind:coeffs (e.g. cos:0,2)")
        ->capture_default_str();
    cmd->add_option("--root", root, "dispersion root: + or -")
        ->check(CLI::IsMember({"+", "-"}))
        ->capture_default_str();
    cmd->add_option("--s-max", s_max, "largest pinned amplitude (m)")
        ->capture_default_str();
    cmd->add_option("--steps", n_steps, "number of continuation steps")
        ->capture_default_str();
    cmd->add_option("--cutoff", cutoff,
                    "solution band cutoff (rad/m); 0 keeps the pair's cutoff")
        ->capture_default_str();
    cmd->add_option("--newton-tol", newton_tol, "Newton residual tolerance (B2)")
        ->capture_default_str();
    cmd->add_option("--newton-max-iter", newton_max_iter, "Newton iteration cap")
        ->capture_default_str();
    cmd->add_option("--resonance-tol", resonance_tol,
                    "multiplier magnitude treated as resonant")
        ->capture_default_str();
    cmd->add_flag("--both-signs", include_negative,
                  "also continue toward negative amplitudes");
  }

  BranchConfig config() const {
    BranchConfig cfg;
    cfg.pair = load_pair(pair_path);
    cfg.root_sign = (root == "+") ? +1 : -1;
    cfg.s_max = s_max;
    cfg.n_steps = n_steps;
    cfg.cutoff = cutoff;
    cfg.newton_tol = newton_tol;
    cfg.newton_max_iter = newton_max_iter;
    cfg.resonance_tol = resonance_tol;
    cfg.include_negative = include_negative;
    cfg.k0 = parse_k0(k0_spec, cfg.effective_pair());
    cfg.validate();
    return cfg;
  }
};

int run_branch(const ParamFlags& pf, const BranchFlags& bf,
               const std::string& outdir) {
  const WaveParams p = pf.params();
  const BranchConfig cfg = bf.config();

  BranchFile file;
  file.params = p;
  file.config = cfg;
  file.points = continue_branch(p, cfg);
  file.lambda_star = file.points.front().lambda;
  for (const auto& pt : file.points)
    if (pt.s == 0.0) file.lambda_star = pt.lambda;

  ensure_dir(outdir);
  write_text_file(outdir + "/branch.json", json_dump(branch_to_json(file)));
  write_text_file(outdir + "/branch.csv", branch_csv(file));
  std::cout << "branch: " << file.points.size() << " points, lambda* = "
            << format_double(file.lambda_star) << "\n";
  return kExitOk;
}

struct VerifyFlags {
  std::string branch_path;
  int every = 1;
  int ny = 201;
  VerifyThresholds thresholds;

  void attach(CLI::App* cmd) {
    cmd->add_option("--branch", branch_path, "branch file (JSON)")->required();
    cmd->add_option("--every", every, "verify every n-th point")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--ny", ny, "vertical grid levels (spacing h/(ny-1))")
        ->check(CLI::Range(3, 4001))
        ->capture_default_str();
    cmd->add_option("--bernoulli-tol", thresholds.bernoulli,
                    "max dynamic-condition residual")
        ->capture_default_str();
    cmd->add_option("--xi-tol", thresholds.xi_boundary,
                    "max xi boundary residual")
        ->capture_default_str();
    cmd->add_option("--order-min", thresholds.order_min,
                    "min Laplacian convergence order")
        ->capture_default_str();
    cmd->add_option("--order-max", thresholds.order_max,
                    "max Laplacian convergence order")
        ->capture_default_str();
    cmd->add_option("--cr-tol", thresholds.cauchy_riemann,
                    "max Cauchy-Riemann residual (centered differences)")
        ->capture_default_str();
  }
};

int run_verify(const VerifyFlags& vf, const std::string& outdir) {
  const BranchFile bf =
      branch_from_json(json::parse(read_text_file(vf.branch_path)));
  const BasisPtr basis = bf.config.effective_pair().basis;
  const GridSpec grid = default_verify_grid(bf.params, basis, vf.ny);

  json out;
  out["branch"] = vf.branch_path;
  out["thresholds"] = {{"bernoulli", vf.thresholds.bernoulli},
                       {"xi_boundary", vf.thresholds.xi_boundary},
                       {"order_min", vf.thresholds.order_min},
                       {"order_max", vf.thresholds.order_max},
                       {"cauchy_riemann", vf.thresholds.cauchy_riemann}};
  json reports = json::array();
  bool all_pass = true;
  for (std::size_t i = 0; i < bf.points.size(); i += vf.every) {
    const BranchPoint& pt = bf.points[i];
    const FlowField field = build_field(bf.params, pt, grid);
    const VerificationReport rep = verify_system(bf.params, field, pt);
    const bool ok = rep.pass(vf.thresholds);
    all_pass = all_pass && ok;
    json rj = report_to_json(rep);
    rj["s"] = pt.s;
    rj["pass"] = ok;
    reports.push_back(rj);
    std::cout << (ok ? "pass" : "FAIL") << "  s=" << format_double(pt.s) << "  "
              << rep.summary() << "\n";
  }
  out["all_pass"] = all_pass;
  out["reports"] = reports;
  if (!outdir.empty()) {
    ensure_dir(outdir);
    write_text_file(outdir + "/verify.json", json_dump(out));
  }
  return all_pass ? kExitOk : kExitInvalid;
}

std::vector<double> profile_xs(const BasisPtr& basis, int samples) {
  const double window = 2.0 * std::numbers::pi / basis->generators.front();
  std::vector<double> xs(samples);
  for (int i = 0; i < samples; ++i)
    xs[i] = -window + 2.0 * window * i / (samples - 1);
  return xs;
}

int run_demo(const std::string& which, const ParamFlags& pf, DemoOptions opts,
             const std::string& outdir) {
  const WaveParams p = pf.params();
  ensure_dir(outdir);
  if (which == "nonuniqueness") {
    const NonuniquenessReport rep = nonuniqueness_demo(p, opts);
    write_text_file(outdir + "/nonuniqueness.json",
                    json_dump(nonuniqueness_to_json(rep)));
    const auto xs = profile_xs(rep.cos_branch.front().w.basis(), 801);
    write_text_file(outdir + "/profile_cos.csv",
                    profile_csv(emit_profile(p, rep.cos_branch.back(), xs)));
    write_text_file(outdir + "/profile_sin.csv",
                    profile_csv(emit_profile(p, rep.sin_branch.back(), xs)));
    std::cout << "nonuniqueness: lambda* = " << format_double(rep.lambda_star)
              << ", sin evenness defect "
              << (rep.sin_defect_ok ? "ok" : "VIOLATED") << ", cos branch "
              << (rep.cos_even_exact ? "exactly even" : "NOT even") << "\n";
    return kExitOk;
  }
  // almostperiodic
  const AlmostPeriodicReport rep = almost_periodic_demo(p, opts);
  write_text_file(outdir + "/almost_periodic.json",
                  json_dump(almost_periodic_to_json(rep)));
  const auto xs = profile_xs(rep.branch.front().w.basis(), 1601);
  write_text_file(outdir + "/profile_almost_periodic.csv",
                  profile_csv(emit_profile(p, rep.branch.back(), xs)));
  std::cout << "almost-periodic: lambda* = " << format_double(rep.lambda_star)
            << ", certificate = " << rep.certificate << "\n";
  return kExitOk;
}

int run_profile(const std::string& branch_path, int index, int samples,
                double x_min, double x_max, const std::string& outdir) {
  const BranchFile bf =
      branch_from_json(json::parse(read_text_file(branch_path)));
  if (index < 0) index = static_cast<int>(bf.points.size()) - 1;
  if (index >= static_cast<int>(bf.points.size()))
    throw std::invalid_argument("profile: point index out of range");
  const BranchPoint& pt = bf.points[static_cast<std::size_t>(index)];

  std::vector<double> xs(samples);
  if (x_min == 0.0 && x_max == 0.0) {
    const auto window_xs = profile_xs(bf.config.effective_pair().basis, samples);
    xs = window_xs;
  } else {
    for (int i = 0; i < samples; ++i)
      xs[static_cast<std::size_t>(i)] =
          x_min + (x_max - x_min) * i / (samples - 1);
  }
  const std::string csv = profile_csv(emit_profile(bf.params, pt, xs));
  std::cout << csv;
  if (!outdir.empty()) {
    ensure_dir(outdir);
    write_text_file(outdir + "/profile.csv", csv);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"steady almost-periodic gravity water waves with constant "
               "vorticity: dispersion, local bifurcation branches, and "
               "residual verification"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI/TOML file");

  std::string outdir;
  app.add_option("-o,--output-dir", outdir, "directory for emitted files");

  // freqset
  auto* freqset = app.add_subcommand("freqset", "validate or enumerate a pair");
  freqset->configurable();
  freqset->require_subcommand(1);
  std::string pair_path, gen_fmt = "json";
  auto* fs_check = freqset->add_subcommand("check", "run the admissibility laws");
  fs_check->configurable();
  fs_check->add_option("--pair", pair_path, "pair definition file")->required();
  auto* fs_gen = freqset->add_subcommand("gen", "enumerate modes");
  fs_gen->configurable();
  fs_gen->add_option("--pair", pair_path, "pair definition file")->required();
  fs_gen->add_option("--format", gen_fmt, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  // dispersion
  auto* disp = app.add_subcommand("dispersion",
                                  "bifurcation values over the pair's modes");
  disp->configurable();
  ParamFlags disp_params;
  disp_params.attach(disp);
  std::string disp_pair;
  disp->add_option("--pair", disp_pair, "pair definition file")->required();

  // branch
  auto* branch = app.add_subcommand("branch", "continue one local branch");
  branch->configurable();
  ParamFlags branch_params;
  branch_params.attach(branch);
  BranchFlags branch_flags;
  branch_flags.attach(branch);

  // verify
  auto* verify = app.add_subcommand("verify",
                                    "re-check a branch against the original system");
  verify->configurable();
  VerifyFlags verify_flags;
  verify_flags.attach(verify);

  // demo
  auto* demo = app.add_subcommand("demo", "canned demonstrations");
  demo->configurable();
  demo->require_subcommand(1);
  auto* demo_nu = demo->add_subcommand("nonuniqueness",
                                       "two waves at one bifurcation value");
  demo_nu->configurable();
  auto* demo_ap = demo->add_subcommand("almostperiodic",
                                       "branch on the (1, sqrt 5) lattice");
  demo_ap->configurable();
  ParamFlags demo_params;
  demo_params.gamma = 1.0;
  DemoOptions demo_opts;
  for (CLI::App* d : {demo_nu, demo_ap}) {
    demo_params.attach(d);
    d->add_option("--s-max", demo_opts.s_max, "largest pinned amplitude")
        ->capture_default_str();
    d->add_option("--steps", demo_opts.n_steps, "continuation steps")
        ->capture_default_str();
    d->add_option("--cutoff", demo_opts.cutoff, "band cutoff (0 = default)")
        ->capture_default_str();
  }

  // profile
  auto* profile = app.add_subcommand("profile", "surface profile CSV");
  profile->configurable();
  std::string profile_branch;
  int profile_index = -1, profile_samples = 801;
  double profile_xmin = 0.0, profile_xmax = 0.0;
  profile->add_option("--branch", profile_branch, "branch file")->required();
  profile->add_option("--index", profile_index,
                      "point index (-1 = last point)")
      ->capture_default_str();
  profile->add_option("--samples", profile_samples, "sample count")
      ->check(CLI::Range(2, 1000000))
      ->capture_default_str();
  profile->add_option("--x-min", profile_xmin, "window start (0,0 = auto)");
  profile->add_option("--x-max", profile_xmax, "window end");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fs_check->parsed()) return run_freqset("check", pair_path, outdir, "");
    if (fs_gen->parsed()) return run_freqset("gen", pair_path, outdir, gen_fmt);
    if (disp->parsed()) return run_dispersion(disp_params, disp_pair, outdir);
    if (branch->parsed()) {
      if (outdir.empty()) {
        std::cerr << "branch: --output-dir is required\n";
        return kExitInvalid;
      }
      return run_branch(branch_params, branch_flags, outdir);
    }
    if (verify->parsed()) return run_verify(verify_flags, outdir);
    if (demo_nu->parsed()) {
      if (outdir.empty()) {
        std::cerr << "demo: --output-dir is required\n";
        return kExitInvalid;
      }
      return run_demo("nonuniqueness", demo_params, demo_opts, outdir);
    }
    if (demo_ap->parsed()) {
      if (outdir.empty()) {
        std::cerr << "demo: --output-dir is required\n";
        return kExitInvalid;
      }
      return run_demo("almostperiodic", demo_params, demo_opts, outdir);
    }
    if (profile->parsed())
      return run_profile(profile_branch, profile_index, profile_samples,
                         profile_xmin, profile_xmax, outdir);
  } catch (const ResonanceError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitRefused;
  } catch (const ConvergenceError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitRefused;
  } catch (const ContinuationError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitRefused;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitRefused;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitInvalid;
}
