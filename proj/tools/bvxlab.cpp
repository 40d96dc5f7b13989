// bvxlab: run presets or scenario files, list the catalog, run the
// acceptance suite, inspect snapshots.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bvx/acceptance.hpp"
#include "bvx/error.hpp"
#include "bvx/experiments.hpp"
#include "bvx/snapshot.hpp"

namespace {

enum Exit { ok = 0, usage = 1, validation = 2, numerical = 3, acceptance = 4 };

int exit_code(bvx::ErrorKind k) {
  using bvx::ErrorKind;
  switch (k) {
    case ErrorKind::unknown_experiment:
      return usage;
    case ErrorKind::parse_error:
    case ErrorKind::validation_error:
    case ErrorKind::invalid_spec:
    case ErrorKind::corrupt_file:
    case ErrorKind::version_mismatch:
    case ErrorKind::io_error:
      return validation;
    default:
      return numerical;
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw bvx::Error(bvx::ErrorKind::io_error, "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool is_preset(const std::string& name) {
  for (const auto& e : bvx::catalog())
    if (e.name == name) return true;
  return false;
}

int cmd_run(const std::string& target, const std::string& out, bool assert_checks, std::optional<std::uint64_t> seed,
            int threads) {
  bvx::Scenario sc;
  if (is_preset(target)) {
    sc = bvx::preset(target);
  } else if (std::filesystem::exists(target)) {
    sc = bvx::parse_scenario(read_text(target));
  } else {
    sc = bvx::preset(target);  // throws unknown-experiment with the catalog
  }
  bvx::RunOptions opt;
  opt.out_dir = out.empty() ? (sc.output.directory.empty() ? "out/" + sc.experiment : sc.output.directory) : out;
  opt.seed = seed;
  opt.threads = threads;
  opt.progress = &std::cerr;
  const bvx::ExperimentResult r = bvx::run_experiment(sc, opt);
  for (const auto& f : r.fits)
    std::cout << "fit " << f.series << " " << f.model << " exponent " << f.exponent << "\n";
  for (const auto& c : r.checks)
    std::cout << "check " << c.name << " = " << c.value << " [" << c.lo << ", " << c.hi << "] "
              << (c.pass ? "pass" : "FAIL") << "\n";
  std::cout << "wrote " << opt.out_dir << " (" << r.wall_seconds << " s)\n";
  return assert_checks && !r.passed() ? acceptance : ok;
}

int cmd_catalog() {
  for (const auto& e : bvx::catalog()) std::cout << e.name << "\t" << e.summary << "\n";
  return ok;
}

int cmd_verify(const std::vector<int>& only, const std::string& out, int threads) {
  bvx::AcceptanceOptions opt;
  opt.only = only;
  opt.threads = threads;
  opt.work_dir = out.empty() ? std::filesystem::temp_directory_path().string() : out;
  if (!out.empty()) std::filesystem::create_directories(out);
  opt.out = &std::cout;
  const auto results = bvx::run_acceptance(opt);
  int failed = 0;
  for (const auto& r : results) failed += !r.pass;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed ? acceptance : ok;
}

int cmd_inspect(const std::string& path) {
  const bvx::SnapshotHeader h = bvx::read_snapshot_header(path);
  const bvx::SimState s = bvx::load_snapshot(path);
  std::cout << "version " << h.version << "\n"
            << "grid L=" << h.grid.L << " N=" << h.grid.N << " Nv=" << h.grid.Nv << " bc="
            << (h.grid.bc == bvx::Boundary::periodic ? "periodic" : "stress_free")
            << " dealias=" << h.grid.dealias_fraction << "\n"
            << "physics Omega=" << h.physics.Omega << " Gamma=" << h.physics.Gamma << " nu=" << h.physics.nu << "\n"
            << "t=" << h.t << " frame=" << (h.frame == bvx::FrameTag::stationary ? "stationary" : "rotating")
            << " formulation=" << (h.formulation == bvx::Formulation::full ? "full" : "background_perturbation")
            << "\n"
            << "background A=" << h.background.A << " B1=" << h.background.B1 << " B2=" << h.background.B2 << "\n";
  const bvx::SpectralField vt = bvx::baroclinic_part(s.v);
  std::cout << "L2=" << bvx::l2_norm(s.v) << " barotropic_L2=" << bvx::l2_norm(bvx::vertical_mean(s.v))
            << " baroclinic_L2=" << bvx::l2_norm(vt) << " baroclinic_H1=" << bvx::h1_norm(vt) << "\n";
  const bvx::Moments m = bvx::moments(s.v);
  std::cout << "moments A=" << m.A << " B1=" << m.B1 << " B2=" << m.B2 << "\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bvxlab: rotating stratified Boussinesq laboratory"};
  app.require_subcommand(1);
  std::string out;
  bool assert_checks = false;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string target;
  auto* run = app.add_subcommand("run", "run a preset or a scenario file");
  run->add_option("target", target, "preset name or scenario file")->required();
  run->add_option("--out", out, "output directory");
  run->add_flag("--assert", assert_checks, "exit 4 when a preset threshold is violated");
  run->add_option("--seed", seed, "override init.seed");
  run->add_option("--threads", threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_subcommand("catalog", "list the preset experiments");
  std::vector<int> only;
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--only", only, "criterion numbers")->check(CLI::Range(1, 10));
  verify->add_option("--out", out, "scratch directory");
  verify->add_option("--threads", threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
  std::string snap;
  auto* inspect = app.add_subcommand("inspect", "print a snapshot header and norms");
  inspect->add_option("snapshot", snap, "snapshot file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : usage;
  }
  try {
    if (*run) return cmd_run(target, out, assert_checks, seed, threads);
    if (*verify) return cmd_verify(only, out, threads);
    if (*inspect) return cmd_inspect(snap);
    return cmd_catalog();
  } catch (const bvx::Error& e) {
    std::cerr << "bvxlab: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "bvxlab: " << e.what() << "\n";
    return numerical;
  }
}
