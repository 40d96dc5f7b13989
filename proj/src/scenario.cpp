#include "bvx/scenario.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "bvx/biotsavart.hpp"
#include "bvx/error.hpp"
#include "bvx/snapshot.hpp"
#include "strings.hpp"

namespace bvx {

namespace {

using detail::fmt17;
using detail::split;
using detail::trim;

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  throw Error(ErrorKind::parse_error, "line " + std::to_string(line) + ": " + msg);
}

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::validation_error, msg); }

double to_double(const std::string& v, int line) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || !std::isfinite(x)) parse_fail(line, "expected a number, got '" + v + "'");
  return x;
}

long to_int(const std::string& v, int line) {
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0') parse_fail(line, "expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& v, int line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  parse_fail(line, "expected true/false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& v, int line) {
  std::vector<double> out;
  for (const auto& p : split(v, ',')) out.push_back(to_double(p, line));
  if (out.empty()) parse_fail(line, "expected a comma-separated list");
  return out;
}

template <class E>
E to_enum(const std::string& v, int line, const std::vector<std::pair<const char*, E>>& names) {
  std::string all;
  for (const auto& [n, e] : names) {
    if (v == n) return e;
    all += all.empty() ? n : std::string(", ") + n;
  }
  parse_fail(line, "unknown value '" + v + "' (expected one of " + all + ")");
}

const std::vector<std::pair<const char*, InitType>> kInitNames = {
    {"vortex", InitType::vortex},
    {"vortex_plus_perturbation", InitType::vortex_plus_perturbation},
    {"random_baroclinic", InitType::random_baroclinic},
    {"single_mode", InitType::single_mode},
    {"from_snapshot", InitType::from_snapshot},
    {"wave_packet", InitType::wave_packet},
};
const std::vector<std::pair<const char*, Perturbation>> kPertNames = {
    {"none", Perturbation::none}, {"dipole", Perturbation::dipole}, {"random", Perturbation::random}};
const std::vector<std::pair<const char*, Branch>> kBranchNames = {
    {"g", Branch::g}, {"+", Branch::plus}, {"-", Branch::minus}};
const std::vector<std::pair<const char*, Boundary>> kBcNames = {
    {"periodic", Boundary::periodic}, {"stress_free", Boundary::stress_free}};
const std::vector<std::pair<const char*, Formulation>> kFormNames = {
    {"full", Formulation::full}, {"background_perturbation", Formulation::background_perturbation}};
const std::vector<std::pair<const char*, DecayModel>> kModelNames = {
    {"algebraic", DecayModel::algebraic}, {"exponential", DecayModel::exponential}};

template <class E>
std::string name_of(E e, const std::vector<std::pair<const char*, E>>& names) {
  for (const auto& [n, v] : names)
    if (v == e) return n;
  return "?";
}

using Setter = std::function<void(Scenario&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"experiment", [](Scenario& s, const std::string& v, int) { s.experiment = v; }},
      {"formulation", [](Scenario& s, const std::string& v, int l) { s.formulation = to_enum(v, l, kFormNames); }},
      {"grid.L", [](Scenario& s, const std::string& v, int l) { s.grid.L = to_double(v, l); }},
      {"grid.N", [](Scenario& s, const std::string& v, int l) { s.grid.N = static_cast<int>(to_int(v, l)); }},
      {"grid.Nv", [](Scenario& s, const std::string& v, int l) { s.grid.Nv = static_cast<int>(to_int(v, l)); }},
      {"grid.bc", [](Scenario& s, const std::string& v, int l) { s.grid.bc = to_enum(v, l, kBcNames); }},
      {"grid.dealias", [](Scenario& s, const std::string& v, int l) { s.grid.dealias_fraction = to_double(v, l); }},
      {"physics.Omega", [](Scenario& s, const std::string& v, int l) { s.physics.Omega = to_double(v, l); }},
      {"physics.Gamma", [](Scenario& s, const std::string& v, int l) { s.physics.Gamma = to_double(v, l); }},
      {"physics.nu", [](Scenario& s, const std::string& v, int l) { s.physics.nu = to_double(v, l); }},
      {"init.type", [](Scenario& s, const std::string& v, int l) { s.init.type = to_enum(v, l, kInitNames); }},
      {"init.A", [](Scenario& s, const std::string& v, int l) { s.init.A = to_double(v, l); }},
      {"init.B1", [](Scenario& s, const std::string& v, int l) { s.init.B1 = to_double(v, l); }},
      {"init.B2", [](Scenario& s, const std::string& v, int l) { s.init.B2 = to_double(v, l); }},
      {"init.perturbation",
       [](Scenario& s, const std::string& v, int l) { s.init.perturbation = to_enum(v, l, kPertNames); }},
      {"init.perturbation_amplitude",
       [](Scenario& s, const std::string& v, int l) { s.init.perturbation_amplitude = to_double(v, l); }},
      {"init.seed",
       [](Scenario& s, const std::string& v, int l) {
         const long x = to_int(v, l);
         if (x < 0) parse_fail(l, "seed must be nonnegative");
         s.init.seed = static_cast<std::uint64_t>(x);
       }},
      {"init.k_min", [](Scenario& s, const std::string& v, int l) { s.init.k_min = to_double(v, l); }},
      {"init.k_max", [](Scenario& s, const std::string& v, int l) { s.init.k_max = to_double(v, l); }},
      {"init.amplitude", [](Scenario& s, const std::string& v, int l) { s.init.amplitude = to_double(v, l); }},
      {"init.remove_geostrophic",
       [](Scenario& s, const std::string& v, int l) { s.init.remove_geostrophic = to_bool(v, l); }},
      {"init.barotropic_amplitude",
       [](Scenario& s, const std::string& v, int l) { s.init.barotropic_amplitude = to_double(v, l); }},
      {"init.mode",
       [](Scenario& s, const std::string& v, int l) {
         const auto parts = split(v, ',');
         if (parts.size() != 3) parse_fail(l, "init.mode expects three integers m1, m2, n");
         for (int i = 0; i < 3; ++i) s.init.mode[i] = static_cast<int>(to_int(parts[i], l));
       }},
      {"init.branch", [](Scenario& s, const std::string& v, int l) { s.init.branch = to_enum(v, l, kBranchNames); }},
      {"init.path", [](Scenario& s, const std::string& v, int) { s.init.path = v; }},
      {"init.sigma", [](Scenario& s, const std::string& v, int l) { s.init.sigma = to_double(v, l); }},
      {"init.vertical_mode",
       [](Scenario& s, const std::string& v, int l) { s.init.vertical_mode = static_cast<int>(to_int(v, l)); }},
      {"init.R", [](Scenario& s, const std::string& v, int l) { s.init.band_R = to_double(v, l); }},
      {"time.T", [](Scenario& s, const std::string& v, int l) { s.time.T = to_double(v, l); }},
      {"time.dt", [](Scenario& s, const std::string& v, int l) { s.time.dt = to_double(v, l); }},
      {"time.cfl", [](Scenario& s, const std::string& v, int l) { s.time.cfl = to_double(v, l); }},
      {"time.linear_only", [](Scenario& s, const std::string& v, int l) { s.time.linear_only = to_bool(v, l); }},
      {"output.cadence", [](Scenario& s, const std::string& v, int l) { s.output.cadence = to_double(v, l); }},
      {"output.directory", [](Scenario& s, const std::string& v, int) { s.output.directory = v; }},
      {"output.series", [](Scenario& s, const std::string& v, int) { s.output.series = split(v, ','); }},
      {"output.snapshots", [](Scenario& s, const std::string& v, int l) { s.output.snapshots = to_bool(v, l); }},
      {"analysis.fits",
       [](Scenario& s, const std::string& v, int l) {
         s.fits.clear();
         for (const auto& item : split(v, ',')) {
           const auto parts = split(item, ':');
           if (parts.size() != 2 && parts.size() != 4)
             parse_fail(l, "fit '" + item + "' must read series:model or series:model:t0:t1");
           FitRequest f;
           f.series = parts[0];
           f.model = to_enum(parts[1], l, kModelNames);
           if (parts.size() == 4) {
             f.t0 = to_double(parts[2], l);
             f.t1 = to_double(parts[3], l);
           }
           s.fits.push_back(f);
         }
       }},
      {"split.R", [](Scenario& s, const std::string& v, int l) { s.split_R = to_double(v, l); }},
      {"sweep.Omegas", [](Scenario& s, const std::string& v, int l) { s.sweep.Omegas = to_list(v, l); }},
      {"sweep.horizons", [](Scenario& s, const std::string& v, int l) { s.sweep.horizons = to_list(v, l); }},
      {"sweep.dt", [](Scenario& s, const std::string& v, int l) { s.sweep.dt = to_double(v, l); }},
      {"sweep.R", [](Scenario& s, const std::string& v, int l) { s.sweep.R = to_double(v, l); }},
      {"sweep.keep_geostrophic",
       [](Scenario& s, const std::string& v, int l) { s.sweep.keep_geostrophic = to_bool(v, l); }},
  };
  return table;
}

const std::set<std::string> kRequired = {"grid.L", "grid.N", "grid.Nv", "physics.Gamma", "time.T"};

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : ", ") + fmt17(x);
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  Scenario sc;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view l = raw;
    if (const auto h = l.find('#'); h != std::string_view::npos) l = l.substr(0, h);
    l = trim(l);
    if (l.empty()) continue;
    const auto eq = l.find('=');
    if (eq == std::string_view::npos) parse_fail(line, "expected 'section.key = value'");
    const std::string key(trim(l.substr(0, eq)));
    const std::string value(trim(l.substr(eq + 1)));
    if (key.empty()) parse_fail(line, "missing key");
    const auto it = setters().find(key);
    if (it == setters().end()) parse_fail(line, "unknown key '" + key + "'");
    if (!seen.insert(key).second) parse_fail(line, "duplicate key '" + key + "'");
    it->second(sc, value, line);
  }
  for (const auto& k : kRequired)
    if (!seen.count(k)) invalid("missing required key " + k);
  validate_scenario(sc);
  return sc;
}

void validate_scenario(Scenario& sc) {
  try {
    sc.grid.validate();
    sc.physics.validate();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::invalid_spec) throw;
    std::string msg = e.what();
    invalid(msg.substr(msg.find(": ") + 2));
  }
  const InitSpec& in = sc.init;
  if (!(sc.time.T > 0.0)) invalid("time.T must be positive");
  if (sc.time.dt < 0.0) invalid("time.dt must be nonnegative");
  if (!(sc.time.cfl > 0.0 && sc.time.cfl <= 0.5)) invalid("time.cfl must lie in (0, 0.5]");
  const double cad = sc.cadence();
  if (!(cad > 0.0)) invalid("output.cadence must be positive");
  const double nout = sc.time.T / cad;
  if (std::abs(nout - std::round(nout)) > 1e-9 * nout) invalid("time.T must be a multiple of output.cadence");

  const bool vortex_init = in.type == InitType::vortex || in.type == InitType::vortex_plus_perturbation;
  if (vortex_init && in.A != 0.0 && sc.formulation == Formulation::full)
    invalid("vortex with A != 0 requires formulation = background_perturbation: nonzero total vorticity is not "
            "representable on the periodic box");
  if (sc.grid.bc == Boundary::stress_free && (in.B1 != 0.0 || in.B2 != 0.0) &&
      (vortex_init || sc.formulation == Formulation::background_perturbation))
    invalid("the vortex family with B != 0 has x3-independent u3, theta and violates stress-free walls");
  if (in.type == InitType::random_baroclinic || in.perturbation == Perturbation::random) {
    if (!(in.k_min >= 0.0 && in.k_max > in.k_min)) invalid("init.k_min/k_max must satisfy 0 <= k_min < k_max");
    if (in.amplitude < 0.0 || in.barotropic_amplitude < 0.0) invalid("init amplitudes must be nonnegative");
  }
  if (in.type == InitType::single_mode) {
    if (in.mode[0] == 0 && in.mode[1] == 0 && in.mode[2] == 0) invalid("init.mode must be nonzero");
    if (std::abs(in.mode[0]) > sc.grid.N / 2 - 1 || std::abs(in.mode[1]) > sc.grid.N / 2 - 1 ||
        std::abs(in.mode[2]) > sc.grid.Nv / 2 - 1)
      invalid("init.mode outside the grid");
    if (in.branch != Branch::g && sc.physics.Gamma == 0.0) invalid("eigenmode branches need Gamma != 0");
  }
  if (in.type == InitType::from_snapshot && in.path.empty()) invalid("init.path is required for from_snapshot");
  if (in.type == InitType::wave_packet) {
    if (!(in.sigma > 0.0)) invalid("init.sigma must be positive");
    if (in.vertical_mode == 0) invalid("init.vertical_mode must be nonzero");
    if (!(in.band_R > 0.0)) invalid("init.R must be positive");
  }
  if ((in.remove_geostrophic || sc.experiment == "dispersive_sweep") && sc.physics.Gamma == 0.0)
    invalid("the geostrophic projector needs Gamma != 0");
  if (sc.split_R < 0.0) invalid("split.R must be nonnegative");
  for (const auto& f : sc.fits)
    if (f.t0 >= 0.0 && !(f.t1 > f.t0)) invalid("fit window for " + f.series + " must satisfy t0 < t1");
  if (!(sc.sweep.dt > 0.0) || !(sc.sweep.R > 0.0)) invalid("sweep.dt and sweep.R must be positive");

  sc.warnings.clear();
  const double need = 8.0 * std::sqrt(1.0 + sc.time.T);
  if (sc.grid.L < need)
    sc.warnings.push_back("box L = " + fmt17(sc.grid.L) + " is below 8 sqrt(1+T) = " + fmt17(need) +
                          "; the truncated vortex tail is not negligible");
}

std::string to_text(const Scenario& sc) {
  std::ostringstream o;
  const InitSpec& in = sc.init;
  o << "experiment = " << sc.experiment << "\n";
  o << "formulation = " << name_of(sc.formulation, kFormNames) << "\n";
  o << "grid.L = " << fmt17(sc.grid.L) << "\ngrid.N = " << sc.grid.N << "\ngrid.Nv = " << sc.grid.Nv << "\n";
  o << "grid.bc = " << name_of(sc.grid.bc, kBcNames) << "\ngrid.dealias = " << fmt17(sc.grid.dealias_fraction)
    << "\n";
  o << "physics.Omega = " << fmt17(sc.physics.Omega) << "\nphysics.Gamma = " << fmt17(sc.physics.Gamma)
    << "\nphysics.nu = " << fmt17(sc.physics.nu) << "\n";
  o << "init.type = " << name_of(in.type, kInitNames) << "\n";
  o << "init.A = " << fmt17(in.A) << "\ninit.B1 = " << fmt17(in.B1) << "\ninit.B2 = " << fmt17(in.B2) << "\n";
  o << "init.perturbation = " << name_of(in.perturbation, kPertNames)
    << "\ninit.perturbation_amplitude = " << fmt17(in.perturbation_amplitude) << "\n";
  o << "init.seed = " << in.seed << "\ninit.k_min = " << fmt17(in.k_min) << "\ninit.k_max = " << fmt17(in.k_max)
    << "\ninit.amplitude = " << fmt17(in.amplitude) << "\n";
  o << "init.remove_geostrophic = " << (in.remove_geostrophic ? "true" : "false")
    << "\ninit.barotropic_amplitude = " << fmt17(in.barotropic_amplitude) << "\n";
  o << "init.mode = " << in.mode[0] << ", " << in.mode[1] << ", " << in.mode[2]
    << "\ninit.branch = " << name_of(in.branch, kBranchNames) << "\n";
  if (!in.path.empty()) o << "init.path = " << in.path << "\n";
  o << "init.sigma = " << fmt17(in.sigma) << "\ninit.vertical_mode = " << in.vertical_mode
    << "\ninit.R = " << fmt17(in.band_R) << "\n";
  o << "time.T = " << fmt17(sc.time.T) << "\ntime.dt = " << fmt17(sc.time.dt) << "\ntime.cfl = " << fmt17(sc.time.cfl)
    << "\ntime.linear_only = " << (sc.time.linear_only ? "true" : "false") << "\n";
  o << "output.cadence = " << fmt17(sc.cadence()) << "\n";
  if (!sc.output.directory.empty()) o << "output.directory = " << sc.output.directory << "\n";
  if (!sc.output.series.empty()) {
    o << "output.series = ";
    for (std::size_t i = 0; i < sc.output.series.size(); ++i) o << (i ? ", " : "") << sc.output.series[i];
    o << "\n";
  }
  o << "output.snapshots = " << (sc.output.snapshots ? "true" : "false") << "\n";
  if (!sc.fits.empty()) {
    o << "analysis.fits = ";
    for (std::size_t i = 0; i < sc.fits.size(); ++i) {
      const auto& f = sc.fits[i];
      o << (i ? ", " : "") << f.series << ":" << name_of(f.model, kModelNames);
      if (f.t0 >= 0.0) o << ":" << fmt17(f.t0) << ":" << fmt17(f.t1);
    }
    o << "\n";
  }
  o << "split.R = " << fmt17(sc.split_R) << "\n";
  o << "sweep.Omegas = " << fmt_list(sc.sweep.Omegas) << "\nsweep.horizons = " << fmt_list(sc.sweep.horizons)
    << "\nsweep.dt = " << fmt17(sc.sweep.dt) << "\nsweep.R = " << fmt17(sc.sweep.R)
    << "\nsweep.keep_geostrophic = " << (sc.sweep.keep_geostrophic ? "true" : "false") << "\n";
  return o.str();
}

double rms(const SpectralField& s) { return std::sqrt(mean_square(s)); }

namespace {

void finish(SpectralField& s) {
  apply_dealias(s);
  enforce_hermitian(s);
  enforce_parity(s, kStateParity);
}

void zero_outside_shell(SpectralField& s, double k_min, double k_max, bool include_k3) {
  const Grid& g = s.grid();
  for_each_mode(g, s.nz(), [&](std::size_t idx, int, int, int, const Wavevector& k) {
    const double m = std::sqrt(include_k3 ? k.norm2() : k.kh2());
    if (m < k_min || m > k_max || m == 0.0)
      for (int c = 0; c < s.ncomp(); ++c) s.component(c)[idx] = 0.0;
  });
}

PhysicalField gaussian_noise(const GridPtr& grid, int ncomp, Layout layout, std::mt19937_64& rng) {
  PhysicalField p(grid, ncomp, layout);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (double& x : p.values()) x = nd(rng);
  return p;
}

/// Mean-zero barotropic velocity from a random band-limited vorticity.
SpectralField random_barotropic(const GridPtr& grid, std::mt19937_64& rng, double k_min, double k_max,
                                double amplitude) {
  SpectralField w = to_spectral(gaussian_noise(grid, 1, Layout::plane, rng));
  zero_outside_shell(w, std::max(k_min, 1e-300), k_max, false);
  apply_dealias(w);
  enforce_hermitian(w);
  SpectralField u = velocity2d_from_vorticity(w);
  SpectralField out(grid, 4);
  const double r = rms(u);
  if (r > 0.0) u *= amplitude / r;
  SpectralField plane4(grid, 4, Layout::plane);
  for (int c = 0; c < 2; ++c) std::copy(u.component(c).begin(), u.component(c).end(), plane4.component(c).begin());
  embed_plane(plane4, out);
  return out;
}

SpectralField dipole(const GridPtr& grid, double eps_A) {
  SpectralField phi(grid, 1, Layout::plane);
  {
    PhysicalField p(grid, 1, Layout::plane);
    p.fill([](int, double x1, double x2, double) { return oseen(x1, x2).phi0; });
    phi = to_spectral(p);
  }
  SpectralField w(grid, 1, Layout::plane);
  const Grid& g = *grid;
  for_each_mode(g, 1, [&](std::size_t idx, int, int, int, const Wavevector& k) {
    w.component(0)[idx] = eps_A * cplx(0.0, k.k1) * phi.component(0)[idx];
  });
  apply_dealias(w);
  enforce_hermitian(w);
  const SpectralField u = velocity2d_from_vorticity(w);
  SpectralField plane4(grid, 4, Layout::plane);
  for (int c = 0; c < 2; ++c) std::copy(u.component(c).begin(), u.component(c).end(), plane4.component(c).begin());
  SpectralField out(grid, 4);
  embed_plane(plane4, out);
  return out;
}

SpectralField single_mode(const GridPtr& grid, const PhysParams& params, const InitSpec& in) {
  const Grid& g = *grid;
  int m1 = in.mode[0], m2 = in.mode[1], n = in.mode[2];
  const bool flip = m1 < 0;
  if (flip) {
    m1 = -m1;
    m2 = -m2;
    n = -n;
  }
  const int j2 = (m2 + g.n()) % g.n();
  const int iz = (n + g.nv()) % g.nv();
  const Wavevector k{g.dk() * in.mode[0], g.dk() * in.mode[1], g.dkz() * in.mode[2]};
  if (k.norm2() == 0.0) invalid("init.mode must be nonzero");
  const ModeFrame f = mode_frame(k, params, g.bc());
  Vec4 a = in.branch == Branch::g ? f.a_g : in.branch == Branch::plus ? f.a_plus : f.a_minus;
  // Only k1 >= 0 is stored; the mode at -k carries the conjugate vector.
  if (flip)
    for (auto& x : a) x = std::conj(x);
  SpectralField s(grid, 4);
  for (int c = 0; c < 4; ++c) s.at(c, iz, j2, m1) = a[c];
  if (m1 == 0) {
    // Conjugate partner inside the stored half plane.
    const int j2p = (g.n() - j2) % g.n(), izp = (g.nv() - iz) % g.nv();
    for (int c = 0; c < 4; ++c) s.at(c, izp, j2p, 0) = std::conj(a[c]);
  }
  enforce_parity(s, kStateParity);
  enforce_hermitian(s);
  if (!g.keep(iz, j2, m1, g.nv())) invalid("init.mode is removed by the dealias mask");
  const double r = rms(s);
  if (r == 0.0) invalid("init.mode has no representable content under the boundary parity");
  s *= in.amplitude / r;
  return s;
}

SpectralField wave_packet(const GridPtr& grid, const PhysParams& params, const InitSpec& in) {
  const Grid& g = *grid;
  const double s2 = 2.0 * in.sigma * in.sigma;
  const double kz = (g.bc() == Boundary::periodic ? 2.0 : 1.0) * std::numbers::pi * in.vertical_mode;
  PhysicalField p(grid, 4);
  const bool periodic = g.bc() == Boundary::periodic;
  p.fill([&](int c, double x1, double x2, double x3) {
    const double env = std::exp(-(x1 * x1 + x2 * x2) / s2);
    // u1 even and theta odd about the walls in the stress-free case
    if (c == 0) return env * (periodic ? std::sin(kz * x3) : std::cos(kz * x3));
    if (c == 3) return env * (periodic ? std::cos(kz * x3) : std::sin(kz * x3));
    return 0.0;
  });
  SpectralField s = helmholtz_project(band_project(to_spectral(p), in.band_R));
  s = baroclinic_part(s);
  finish(s);
  if (in.remove_geostrophic) s = ageostrophic_part(s, params);
  const double r = rms(s);
  if (r == 0.0) invalid("wave packet is empty after band projection");
  s *= in.amplitude / r;
  return s;
}

}  // namespace

SpectralField random_baroclinic(const GridPtr& grid, const PhysParams& params, std::uint64_t seed, double k_min,
                                double k_max, double amplitude, bool remove_geostrophic) {
  std::mt19937_64 rng(seed);
  SpectralField s = to_spectral(gaussian_noise(grid, 4, Layout::volume, rng));
  enforce_parity(s, kStateParity);
  zero_outside_shell(s, k_min, k_max, true);
  s = baroclinic_part(helmholtz_project(s));
  finish(s);
  if (remove_geostrophic) s = ageostrophic_part(s, params);
  const double r = rms(s);
  if (r == 0.0) throw Error(ErrorKind::validation_error, "random band contains no baroclinic modes on this grid");
  s *= amplitude / r;
  return s;
}

SimState initial_state(const Scenario& sc, const GridPtr& grid) {
  const InitSpec& in = sc.init;
  SimState st;
  st.params = sc.physics;
  st.formulation = sc.formulation;
  const VortexParams vp{in.A, in.B1, in.B2, sc.physics.Gamma};
  const bool background = sc.formulation == Formulation::background_perturbation;
  if (background) st.background = vp;

  switch (in.type) {
    case InitType::vortex:
      st.v = background ? SpectralField(grid, 4) : sample_vortex(grid, vp, 0.0, true);
      break;
    case InitType::vortex_plus_perturbation: {
      st.v = background ? SpectralField(grid, 4) : sample_vortex(grid, vp, 0.0, true);
      if (in.perturbation == Perturbation::dipole) {
        st.v += dipole(grid, in.perturbation_amplitude * in.A);
      } else if (in.perturbation == Perturbation::random) {
        st.v += random_baroclinic(grid, sc.physics, in.seed, in.k_min, in.k_max,
                                  in.perturbation_amplitude * in.amplitude, in.remove_geostrophic);
      }
      break;
    }
    case InitType::random_baroclinic: {
      st.v = random_baroclinic(grid, sc.physics, in.seed, in.k_min, in.k_max, in.amplitude, in.remove_geostrophic);
      if (in.barotropic_amplitude > 0.0) {
        std::mt19937_64 rng(in.seed ^ 0x9e3779b97f4a7c15ULL);
        st.v += random_barotropic(grid, rng, in.k_min, in.k_max, in.barotropic_amplitude);
      }
      break;
    }
    case InitType::single_mode:
      st.v = single_mode(grid, sc.physics, in);
      break;
    case InitType::wave_packet:
      st.v = wave_packet(grid, sc.physics, in);
      break;
    case InitType::from_snapshot: {
      SimState loaded = load_snapshot(in.path);
      const GridSpec& a = loaded.v.grid().spec();
      const GridSpec& b = grid->spec();
      if (a.L != b.L || a.N != b.N || a.Nv != b.Nv || a.bc != b.bc || a.dealias_fraction != b.dealias_fraction)
        invalid("snapshot grid does not match the scenario grid");
      if (loaded.formulation != sc.formulation) invalid("snapshot formulation does not match the scenario");
      SpectralField v(grid, 4);
      std::copy(loaded.v.data().begin(), loaded.v.data().end(), v.data().begin());
      v.set_frame(loaded.v.frame());
      st.v = std::move(v);
      st.t = loaded.t;
      st.background = loaded.background;
      break;
    }
  }
  return st;
}

}  // namespace bvx
