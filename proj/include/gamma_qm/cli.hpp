#pragma once

// Commands behind the gamma-qm executable. Each command validates its
// configuration, computes a sweep, and writes CSV (and optionally SVG) files.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "gamma_qm/analytic.hpp"
#include "gamma_qm/io.hpp"
#include "gamma_qm/numeric.hpp"
#include "gamma_qm/verification.hpp"

namespace gqm::cli {

inline constexpr const char* kVersion = "0.1.0";

enum class Command { well1d, well2d, barrier, free, evolve, verify };

inline const std::map<std::string, Command>& command_names() {
  static const std::map<std::string, Command> m{{"well1d", Command::well1d}, {"well2d", Command::well2d},
                                                {"barrier", Command::barrier}, {"free", Command::free},
                                                {"evolve", Command::evolve}, {"verify", Command::verify}};
  return m;
}

inline std::optional<Command> parse_command(const std::string& s) {
  const auto it = command_names().find(s);
  if (it == command_names().end()) return std::nullopt;
  return it->second;
}

inline std::string to_string(Command c) {
  for (const auto& [k, v] : command_names())
    if (v == c) return k;
  return "?";
}

/// Invalid user input; the executable maps it to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Command command = Command::verify;
  /// Empty selects the command's default list.
  std::vector<double> gammas;
  double mass = 1.0;
  double hbar = 1.0;
  double L = 1.0;
  double V0 = 18.0;
  double a = 1.0;
  int n = 10;
  /// 0 selects the command's default resolution.
  std::size_t grid = 0;
  std::string out = "out";
  bool svg = false;
  bool quick = false;
  // free
  double k = 5.0;
  // evolve
  double x_max = 40.0;
  double x0 = 8.0;
  double sigma = 1.0;
  double k0 = 1.0;
  double dt = 2e-4;
  std::size_t steps = 1000;
  // verify
  std::string inject_fault;
  /// Keys given on the command line or in a config file; everything else is a default.
  std::set<std::string> explicit_keys;
};

inline std::vector<double> default_gammas(Command c) {
  switch (c) {
    case Command::well2d: return {1.0};
    case Command::evolve: return {0.0, 0.5};
    default: return {-0.5, 0.0, 0.5};
  }
}

inline std::size_t default_grid(Command c) {
  switch (c) {
    case Command::well1d: return 4000;
    case Command::well2d: return verify::kDensityGrid;
    case Command::barrier: return 400;
    case Command::free: return 401;
    case Command::evolve: return 4001;
    case Command::verify: return 4000;
  }
  return 4000;
}

namespace detail {

inline std::string num(double v) { return io::format_short(v); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

inline void require_positive(double v, const char* flag) {
  require(std::isfinite(v) && v > 0.0, std::string(flag) + " must be a positive finite number (got " + num(v) + ")");
}

inline void require_domain(double gamma, double x, const char* what) {
  require(std::isfinite(gamma), "--gamma must be finite");
  if (!in_intrinsic_domain(x, gamma)) {
    throw ConfigError("--gamma " + num(gamma) + " puts the singular point x = -1/gamma = " + num(-1.0 / gamma) +
                      " inside " + what + "; choose gamma > " + num(-1.0 / x));
  }
}

inline const char* origin(const RunConfig& c, const std::string& key) {
  return c.explicit_keys.count(key) ? "" : " (default)";
}

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + num(v[i]);
  return s;
}

inline std::string gamma_tag(double g) { return "g" + num(g); }

/// Metadata common to every file, listing each parameter the command reads.
inline std::vector<std::pair<std::string, std::string>> metadata(const RunConfig& c,
                                                                 std::initializer_list<const char*> keys) {
  std::vector<std::pair<std::string, std::string>> md{{"generator", std::string("gamma-qm ") + kVersion},
                                                      {"command", to_string(c.command)}};
  for (const char* k : keys) {
    const std::string key = k;
    std::string v;
    if (key == "gamma") v = join(c.gammas);
    else if (key == "mass") v = num(c.mass);
    else if (key == "hbar") v = num(c.hbar);
    else if (key == "L") v = num(c.L);
    else if (key == "V0") v = num(c.V0);
    else if (key == "a") v = num(c.a);
    else if (key == "n") v = std::to_string(c.n);
    else if (key == "grid") v = std::to_string(c.grid);
    else if (key == "k") v = num(c.k);
    else if (key == "x_max") v = num(c.x_max);
    else if (key == "x0") v = num(c.x0);
    else if (key == "sigma") v = num(c.sigma);
    else if (key == "k0") v = num(c.k0);
    else if (key == "dt") v = num(c.dt);
    else if (key == "steps") v = std::to_string(c.steps);
    md.emplace_back(key, v + origin(c, key));
  }
  return md;
}

struct Writer {
  const RunConfig& cfg;
  std::vector<std::filesystem::path> files;

  void csv(const std::string& name, const io::CsvTable& t) {
    const auto p = std::filesystem::path(cfg.out) / (name + ".csv");
    io::write_csv(p, t);
    files.push_back(p);
  }
  template <class Plot>
  void svg(const std::string& name, const Plot& plot) {
    if (!cfg.svg) return;
    const auto p = std::filesystem::path(cfg.out) / (name + ".svg");
    io::write_text(p, io::to_svg(plot));
    files.push_back(p);
  }
};

/// Sweep of gamma*L over [-0.9, 2] in steps of 0.05.
inline std::vector<double> inset_gammas(double L) {
  std::vector<double> g;
  for (int i = -18; i <= 40; ++i) g.push_back(0.05 * i / L);
  return g;
}

}  // namespace detail

/// Fills defaults and rejects parameters no command could run with.
inline RunConfig validate(RunConfig c) {
  using detail::require;
  if (c.gammas.empty()) c.gammas = default_gammas(c.command);
  if (c.grid == 0) c.grid = default_grid(c.command);
  detail::require_positive(c.mass, "--mass");
  detail::require_positive(c.hbar, "--hbar");
  detail::require_positive(c.L, "--L");
  detail::require_positive(c.V0, "--V0");
  detail::require_positive(c.a, "--a");
  require(c.n >= 1, "--n must be at least 1 (got " + std::to_string(c.n) + ")");
  require(c.grid >= 3, "--grid must be at least 3");
  require(!c.out.empty(), "--out must name a directory");

  switch (c.command) {
    case Command::well1d: {
      for (double g : c.gammas) detail::require_domain(g, c.L, "the well [0, L]");
      const std::size_t need = 20 * static_cast<std::size_t>(std::max(c.n, 20)) + 2;
      require(c.grid >= need, "--grid " + std::to_string(c.grid) + " is too coarse: well1d solves up to " +
                                  std::to_string(std::max(c.n, 20)) + " states on grids of N and N/2 points, which needs N >= " +
                                  std::to_string(need));
      break;
    }
    case Command::well2d:
      for (double g : c.gammas) detail::require_domain(g, c.L, "the box [0, L]");
      require(c.grid >= 201, "--grid must be at least 201 to resolve the (20,20) state");
      break;
    case Command::barrier:
      for (double g : c.gammas) detail::require_domain(g, c.a, "the barrier [0, a]");
      require(c.grid >= 10, "--grid (energy samples) must be at least 10");
      break;
    case Command::free:
      for (double g : c.gammas) detail::require_domain(g, c.L, "the sampled interval [0, L]");
      detail::require_positive(c.k, "--k");
      break;
    case Command::evolve:
      for (double g : c.gammas) detail::require_domain(g, c.x_max, "the box [0, x-max]");
      detail::require_positive(c.x_max, "--x-max");
      detail::require_positive(c.sigma, "--sigma");
      detail::require_positive(c.dt, "--dt");
      require(std::isfinite(c.k0), "--k0 must be finite");
      require(c.x0 > 0.0 && c.x0 < c.x_max, "--x0 must lie inside (0, x-max)");
      require(c.steps >= 1, "--steps must be at least 1");
      require(c.grid >= 11, "--grid must be at least 11");
      break;
    case Command::verify:
      require(c.inject_fault.empty() || c.inject_fault == "normalization",
              "--inject-fault accepts only 'normalization' (got '" + c.inject_fault + "')");
      break;
  }
  return c;
}

struct RunResult {
  int exit_code = 0;
  std::vector<std::filesystem::path> files;
};

// ---------------------------------------------------------------------------

inline RunResult cmd_well1d(const RunConfig& c, std::ostream& log) {
  detail::Writer w{c, {}};
  const BoundStateOptions opts{.richardson = true};
  const std::string scheme = "three-point in u, Richardson-combined with a grid of N/2 points";

  // (i) E_n for each gamma
  io::CsvTable spec_t;
  spec_t.metadata = detail::metadata(c, {"gamma", "L", "mass", "hbar", "n", "grid"});
  spec_t.metadata.emplace_back("numeric", scheme);
  spec_t.columns = {"n"};
  std::vector<std::vector<double>> ea, en;
  for (double g : c.gammas) {
    const std::string t = detail::gamma_tag(g);
    spec_t.columns.insert(spec_t.columns.end(), {"E_analytic_" + t, "E_numeric_" + t, "rel_err_" + t});
    const WellSpec s = WellSpec::make(g, c.L, c.mass, c.hbar);
    const auto sol = solve_bound_states(PotentialSpec::infinite_well(s), static_cast<std::size_t>(c.n), c.grid, opts);
    std::vector<double> a;
    for (int k = 1; k <= c.n; ++k) a.push_back(well_energy(k, s));
    ea.push_back(std::move(a));
    en.push_back(sol.energies);
  }
  double worst = 0.0;
  for (int k = 0; k < c.n; ++k) {
    std::vector<double> row{static_cast<double>(k + 1)};
    for (std::size_t j = 0; j < c.gammas.size(); ++j) {
      const double rel = std::abs(en[j][k] - ea[j][k]) / ea[j][k];
      worst = std::max(worst, rel);
      row.insert(row.end(), {ea[j][k], en[j][k], rel});
    }
    spec_t.add_row(std::move(row));
  }
  w.csv("well1d_spectrum", spec_t);
  io::LinePlot p1{"Infinite well spectrum", "n", "E_n", {}, true};
  for (std::size_t j = 0; j < c.gammas.size(); ++j) {
    io::Series s{"gamma = " + detail::num(c.gammas[j]), {}, ea[j]};
    for (int k = 1; k <= c.n; ++k) s.x.push_back(k);
    p1.series.push_back(std::move(s));
  }
  w.svg("well1d_spectrum", p1);
  log << "well1d: max relative error of numeric E_n = " << io::format_short(worst) << '\n';

  // (ii) E_1..E_3 and (iii) <x> for n in {1,2,3,20} across gamma
  const auto sweep = detail::inset_gammas(c.L);
  const std::vector<int> e_states{1, 2, 3}, x_states{1, 2, 3, 20};
  io::CsvTable et, xt;
  et.metadata = detail::metadata(c, {"L", "mass", "hbar", "grid"});
  et.metadata.emplace_back("gamma_sweep", "gamma*L from -0.9 to 2 in steps of 0.05");
  et.metadata.emplace_back("numeric", scheme);
  xt.metadata = et.metadata;
  xt.metadata.back().second = "three-point in u on N points, <x> by trapezoid over the normalized eigenvector";
  et.columns = {"gamma"};
  xt.columns = {"gamma"};
  for (int k : e_states) {
    const auto s = std::to_string(k);
    et.columns.insert(et.columns.end(), {"E" + s + "_analytic", "E" + s + "_numeric", "E" + s + "_rel_err"});
  }
  for (int k : x_states) {
    const auto s = std::to_string(k);
    xt.columns.insert(xt.columns.end(), {"mean_x" + s + "_analytic", "mean_x" + s + "_numeric", "mean_x" + s + "_rel_err"});
  }
  std::vector<io::Series> es(e_states.size()), xs(x_states.size());
  for (double g : sweep) {
    const WellSpec s = WellSpec::make(g, c.L, c.mass, c.hbar);
    const auto pot = PotentialSpec::infinite_well(s);
    const auto sol = solve_bound_states(pot, 3, c.grid, opts);
    std::vector<double> erow{g}, xrow{g};
    for (std::size_t i = 0; i < e_states.size(); ++i) {
      const double a = well_energy(e_states[i], s);
      erow.insert(erow.end(), {a, sol.energies[i], std::abs(sol.energies[i] - a) / a});
      es[i].x.push_back(g);
      es[i].y.push_back(a);
    }
    const auto states = solve_bound_states(pot, 20, c.grid);
    for (std::size_t i = 0; i < x_states.size(); ++i) {
      const double a = well_mean_x(x_states[i], s);
      const double m = expectations(states.states[x_states[i] - 1], s.frame).mean_x;
      xrow.insert(xrow.end(), {a, m, std::abs(m - a) / a});
      xs[i].x.push_back(g);
      xs[i].y.push_back(a);
    }
    et.add_row(std::move(erow));
    xt.add_row(std::move(xrow));
  }
  w.csv("well1d_energy_vs_gamma", et);
  w.csv("well1d_mean_x", xt);
  for (std::size_t i = 0; i < e_states.size(); ++i) es[i].name = "n = " + std::to_string(e_states[i]);
  for (std::size_t i = 0; i < x_states.size(); ++i) xs[i].name = "n = " + std::to_string(x_states[i]);
  w.svg("well1d_energy_vs_gamma", io::LinePlot{"Well energies versus gamma", "gamma", "E_n", es, true});
  w.svg("well1d_mean_x", io::LinePlot{"Mean position versus gamma", "gamma", "<x>", xs, false});
  return {0, std::move(w.files)};
}

inline RunResult cmd_well2d(const RunConfig& c, std::ostream& log) {
  detail::Writer w{c, {}};
  const auto grid = Grid1D::uniform(0.0, c.L, c.grid);
  const std::vector<std::pair<int, int>> states{{1, 1}, {1, 2}, {2, 2}, {20, 20}};
  io::CsvTable summary;
  summary.metadata = detail::metadata(c, {"gamma", "L", "mass", "hbar", "grid"});
  summary.metadata.emplace_back("cell_spread", "(20,20) only: relative spread of mean density over interior cells "
                                               "bounded by every fourth nodal line");
  summary.columns = {"gamma", "nx", "ny", "total_probability", "argmax_x", "argmax_y", "cell_spread"};
  for (double g : c.gammas) {
    const WellSpec s = WellSpec::make(g, c.L, c.mass, c.hbar);
    for (auto [nx, ny] : states) {
      const auto m = well2d_density(nx, ny, s, s, grid, grid);
      std::size_t bi = 0, bj = 0;
      for (std::size_t i = 0; i < m.nx; ++i)
        for (std::size_t j = 0; j < m.ny; ++j)
          if (m(i, j) > m(bi, bj)) bi = i, bj = j;
      const double total = trapezoid_2d(m, grid, grid);
      double spread = std::nan("");
      if (nx == 20 && ny == 20) {
        const auto e = nodal_cell_edges(20, 4, s, grid);
        spread = coarse_grain_spread(m, grid, grid, e, e);
      }
      summary.add_row({g, static_cast<double>(nx), static_cast<double>(ny), total, grid[bi], grid[bj], spread});

      const std::string name = "well2d_" + detail::gamma_tag(g) + "_n" + std::to_string(nx) + "_" + std::to_string(ny);
      io::CsvTable t;
      t.metadata = detail::metadata(c, {"gamma", "L", "mass", "hbar", "grid"});
      t.metadata.emplace_back("state", "(" + std::to_string(nx) + ", " + std::to_string(ny) + ")");
      t.metadata.emplace_back("layout", "one row per grid node, x outer loop, y inner loop");
      t.columns = {"x", "y", "density"};
      t.rows.reserve(m.values.size());
      for (std::size_t i = 0; i < m.nx; ++i)
        for (std::size_t j = 0; j < m.ny; ++j) t.rows.push_back({grid[i], grid[j], m(i, j)});
      w.csv(name, t);
      w.svg(name, io::Heatmap{"|psi|^2, gamma = " + detail::num(g) + ", (" + std::to_string(nx) + ", " +
                                  std::to_string(ny) + ")",
                              m.nx, m.ny, m.values, 0.0, c.L, 0.0, c.L});
      log << "well2d: gamma = " << detail::num(g) << " (" << nx << "," << ny << ") total = " << io::format_short(total)
          << '\n';
    }
  }
  w.csv("well2d_summary", summary);
  return {0, std::move(w.files)};
}

inline RunResult cmd_barrier(const RunConfig& c, std::ostream& log) {
  detail::Writer w{c, {}};
  const double scale = std::sqrt(2.0 * c.mass * c.V0) / c.hbar;
  auto base_md = [&] {
    auto md = detail::metadata(c, {"gamma", "V0", "a", "mass", "hbar", "grid"});
    md.emplace_back("sqrt(2 m V0)/hbar", detail::num(scale));
    md.emplace_back("geometry", "barrier of height V0 on [0, a], free leads on both sides");
    return md;
  };

  io::CsvTable t;
  t.metadata = base_md();
  t.metadata.emplace_back("energies", "E/V0 = 4 i / grid for i = 1..grid");
  t.columns = {"E_over_V0"};
  std::vector<BarrierSpec> specs;
  for (double g : c.gammas) {
    specs.push_back(BarrierSpec::make(g, c.V0, c.a, c.mass, c.hbar));
    const auto tag = detail::gamma_tag(g);
    t.columns.insert(t.columns.end(), {"T_closed_" + tag, "T_transfer_" + tag, "abs_err_" + tag});
  }
  std::vector<io::Series> curves(specs.size());
  double worst = 0.0;
  for (std::size_t i = 1; i <= c.grid; ++i) {
    const double r = 4.0 * static_cast<double>(i) / static_cast<double>(c.grid);
    std::vector<double> row{r};
    for (std::size_t j = 0; j < specs.size(); ++j) {
      const double tc = barrier_transmission(r * c.V0, specs[j]);
      const double tm = transfer_matrix_transmission(r * c.V0, specs[j]);
      worst = std::max(worst, std::abs(tc - tm));
      row.insert(row.end(), {tc, tm, std::abs(tc - tm)});
      curves[j].x.push_back(r);
      curves[j].y.push_back(tc);
    }
    t.add_row(std::move(row));
  }
  w.csv("barrier_transmission", t);
  for (std::size_t j = 0; j < specs.size(); ++j) curves[j].name = "gamma = " + detail::num(c.gammas[j]);
  w.svg("barrier_transmission", io::LinePlot{"Barrier transmission", "E/V0", "T", curves, true});

  // T versus gamma at fixed energies; gamma*a over [-0.5, 0.5].
  const std::vector<double> ratios{0.25, 0.5, 0.75, 1.5};
  io::CsvTable tg;
  tg.metadata = base_md();
  tg.metadata.emplace_back("gamma_sweep", "gamma*a from -0.5 to 0.5 in steps of 0.01");
  tg.columns = {"gamma"};
  for (double r : ratios) tg.columns.push_back("T_E_over_V0=" + detail::num(r));
  std::vector<io::Series> tcurves(ratios.size());
  for (int i = -50; i <= 50; ++i) {
    const double g = 0.01 * i / c.a;
    const auto b = BarrierSpec::make(g, c.V0, c.a, c.mass, c.hbar);
    std::vector<double> row{g};
    for (std::size_t j = 0; j < ratios.size(); ++j) {
      row.push_back(transfer_matrix_transmission(ratios[j] * c.V0, b));
      tcurves[j].x.push_back(g);
      tcurves[j].y.push_back(row.back());
    }
    tg.add_row(std::move(row));
  }
  w.csv("barrier_T_vs_gamma", tg);
  for (std::size_t j = 0; j < ratios.size(); ++j) tcurves[j].name = "E/V0 = " + detail::num(ratios[j]);
  w.svg("barrier_T_vs_gamma", io::LinePlot{"Transmission versus gamma", "gamma", "T", tcurves, true});

  io::CsvTable rt;
  rt.metadata = base_md();
  rt.metadata.emplace_back("resonance", "q a' = n pi with a' = ln(1 + gamma a)/gamma");
  rt.columns = {"gamma", "a_effective", "E1_over_V0", "E2_over_V0", "E3_over_V0"};
  for (const auto& b : specs) {
    rt.add_row({b.gamma(), effective_width(b), barrier_resonance_energy(1, b) / c.V0,
                barrier_resonance_energy(2, b) / c.V0, barrier_resonance_energy(3, b) / c.V0});
  }
  w.csv("barrier_resonances", rt);
  log << "barrier: max |T_closed - T_transfer| = " << io::format_short(worst) << '\n';
  return {0, std::move(w.files)};
}

inline RunResult cmd_free(const RunConfig& c, std::ostream& log) {
  detail::Writer w{c, {}};
  const auto grid = Grid1D::uniform(0.0, c.L, c.grid);
  io::CsvTable t;
  t.metadata = detail::metadata(c, {"gamma", "k", "L", "mass", "hbar", "grid"});
  t.metadata.emplace_back("energy", detail::num(c.hbar * c.hbar * c.k * c.k / (2.0 * c.mass)));
  t.metadata.emplace_back("expected_flux", detail::num(c.hbar * c.k / c.mass) + " (hbar k / m)");
  t.metadata.emplace_back("flux", "flux_* from the exact derivative; flux_fd_* from three-point differences");
  t.columns = {"x"};
  std::vector<FreeWave> waves;
  std::vector<std::vector<double>> fd;
  std::vector<io::Series> re;
  for (double g : c.gammas) {
    const GammaFrame f(g, 0.0, c.L, c.mass, c.hbar);
    waves.push_back(free_wave(c.k, +1, f));
    waves.push_back(free_wave(c.k, -1, f));
    fd.push_back(probability_flux(waves[waves.size() - 2].sample(grid), f));
    const auto tag = detail::gamma_tag(g);
    t.columns.insert(t.columns.end(), {"re_plus_" + tag, "im_plus_" + tag, "re_minus_" + tag, "im_minus_" + tag,
                                       "flux_plus_" + tag, "flux_minus_" + tag, "flux_fd_plus_" + tag});
    re.push_back({"gamma = " + detail::num(g), {}, {}});
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<double> row{grid[i]};
    for (std::size_t j = 0; j < c.gammas.size(); ++j) {
      const auto& wp = waves[2 * j];
      const auto& wm = waves[2 * j + 1];
      const complex a = wp(grid[i]), b = wm(grid[i]);
      const double jp = wp.flux(grid[i]), jm = wm.flux(grid[i]);
      worst = std::max(worst, std::abs(jp - c.hbar * c.k / c.mass));
      row.insert(row.end(), {a.real(), a.imag(), b.real(), b.imag(), jp, jm, fd[j][i]});
      re[j].x.push_back(grid[i]);
      re[j].y.push_back(a.real());
    }
    t.add_row(std::move(row));
  }
  w.csv("free_waves", t);
  w.svg("free_waves", io::LinePlot{"Free waves, real part", "x", "Re psi", re, false});
  log << "free: max |J - hbar k/m| = " << io::format_short(worst) << '\n';
  return {0, std::move(w.files)};
}

inline RunResult cmd_evolve(const RunConfig& c, std::ostream& log) {
  detail::Writer w{c, {}};
  for (double g : c.gammas) {
    const GammaFrame f(g, 0.0, c.x_max, c.mass, c.hbar);
    const auto grid = Grid1D::uniform_in_u(g, 0.0, c.x_max, c.grid);
    const auto psi0 = gaussian_packet(grid, f, c.x0, c.sigma, c.k0);
    const auto r = time_evolve(psi0, PotentialSpec::null(f), c.dt, c.steps);
    const auto tag = detail::gamma_tag(g);
    auto md = detail::metadata(c, {"gamma", "x_max", "x0", "sigma", "k0", "dt", "steps", "grid", "mass", "hbar"});
    md[2].second = detail::num(g) + detail::origin(c, "gamma");
    md.emplace_back("initial_state", "exp(-(x-x0)^2/(4 sigma^2) + i k0 x), unit norm in dx/(1+gamma x)");
    md.emplace_back("scheme", "Crank-Nicolson in u with Dirichlet walls at 0 and x_max");
    md.emplace_back("max_deformed_drift", io::format_number(r.max_deformed_drift));
    for (const auto& warn : r.warnings) {
      md.emplace_back("warning", warn);
      log << "evolve: " << warn << '\n';
    }

    io::CsvTable snaps;
    snaps.metadata = md;
    snaps.columns = {"t", "x", "re", "im", "density"};
    for (std::size_t s = 0; s < r.snapshots.size(); ++s) {
      const auto& sn = r.snapshots[s];
      for (std::size_t i = 0; i < sn.size(); ++i) {
        snaps.rows.push_back({r.times[s], sn.grid[i], sn.amplitudes[i].real(), sn.amplitudes[i].imag(),
                              std::norm(sn.amplitudes[i])});
      }
    }
    w.csv("evolve_" + tag + "_snapshots", snaps);

    io::CsvTable norms;
    norms.metadata = md;
    norms.metadata.emplace_back("moments", "mean_x and var_x of the state rescaled to unit standard norm");
    norms.columns = {"t", "deformed_norm", "standard_norm", "flux_predicted_standard_norm", "mean_x", "var_x"};
    const bool standard = is_degenerate(g);
    if (standard) norms.columns.push_back("var_x_free_particle");
    io::Series dn{"deformed", {}, {}}, sn{"standard", {}, {}}, pn{"flux prediction", {}, {}};
    for (std::size_t s = 0; s < r.snapshots.size(); ++s) {
      auto st = r.snapshots[s];
      st.measure = NormMeasure::standard;
      const auto e = expectations(normalized(st, f), f);
      std::vector<double> row{r.times[s], r.deformed_norms[s], r.standard_norms[s], r.flux_predicted_standard_norms[s],
                              e.mean_x, e.var_x};
      if (standard) {
        const double spread = c.hbar * r.times[s] / (2.0 * c.mass * c.sigma);
        row.push_back(c.sigma * c.sigma + spread * spread);
      }
      norms.add_row(std::move(row));
      for (auto* ser : {&dn, &sn, &pn}) ser->x.push_back(r.times[s]);
      dn.y.push_back(r.deformed_norms[s]);
      sn.y.push_back(r.standard_norms[s]);
      pn.y.push_back(r.flux_predicted_standard_norms[s]);
    }
    w.csv("evolve_" + tag + "_norms", norms);
    w.svg("evolve_" + tag + "_norms", io::LinePlot{"Norms, gamma = " + detail::num(g), "t", "norm", {dn, sn, pn}, false});

    io::CsvTable cont;
    cont.metadata = md;
    cont.metadata.emplace_back("residual", "max over interior nodes of |d rho/dt + (1 + gamma x) dJ/dx|");
    cont.columns = {"step", "t", "continuity_residual"};
    for (std::size_t s = 0; s < r.continuity_residuals.size(); ++s) {
      cont.add_row({static_cast<double>(s + 1), c.dt * static_cast<double>(s + 1), r.continuity_residuals[s]});
    }
    w.csv("evolve_" + tag + "_continuity", cont);

    std::vector<io::Series> dens;
    for (std::size_t s = 0; s < r.snapshots.size(); s += std::max<std::size_t>(1, r.snapshots.size() / 4)) {
      io::Series ds{"t = " + detail::num(r.times[s]), {}, r.snapshots[s].density()};
      ds.x.assign(grid.points().begin(), grid.points().end());
      dens.push_back(std::move(ds));
    }
    w.svg("evolve_" + tag + "_density", io::LinePlot{"|psi|^2, gamma = " + detail::num(g), "x", "density", dens, false});
    log << "evolve: gamma = " << detail::num(g) << " max deformed-norm drift = " << io::format_short(r.max_deformed_drift)
        << '\n';
  }
  return {0, std::move(w.files)};
}

inline std::string format_report(const verify::Report& rep) {
  std::string s;
  char line[160];
  for (const auto& c : rep.checks) {
    std::snprintf(line, sizeof line, "[%s] %2d %-26s %7.2f s  ", c.passed ? "PASS" : "FAIL", c.id, c.name.c_str(),
                  c.seconds);
    s += line + c.detail + "\n";
  }
  std::snprintf(line, sizeof line, "%s: %zu/%zu checks passed in %.1f s\n", rep.passed() ? "OK" : "FAILED",
                static_cast<std::size_t>(std::count_if(rep.checks.begin(), rep.checks.end(),
                                                       [](const verify::CheckResult& c) { return c.passed; })),
                rep.checks.size(), rep.seconds);
  return s + line;
}

inline RunResult cmd_verify(const RunConfig& c, std::ostream& log) {
  verify::Options o;
  o.quick = c.quick;
  if (c.inject_fault == "normalization") o.normalization_fault = 1.01;
  const auto rep = verify::run_all(o);
  log << format_report(rep);
  return {rep.passed() ? 0 : 1, {}};
}

/// Validates and dispatches. ConfigError and the library's argument errors
/// escape to the caller, which maps them to exit status 2.
inline RunResult run(const RunConfig& raw, std::ostream& log) {
  const RunConfig c = validate(raw);
  switch (c.command) {
    case Command::well1d: return cmd_well1d(c, log);
    case Command::well2d: return cmd_well2d(c, log);
    case Command::barrier: return cmd_barrier(c, log);
    case Command::free: return cmd_free(c, log);
    case Command::evolve: return cmd_evolve(c, log);
    case Command::verify: return cmd_verify(c, log);
  }
  return {};
}

}  // namespace gqm::cli
