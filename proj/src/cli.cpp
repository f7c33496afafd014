#include "mbdos/cli.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mbdos/combinatorics.hpp"
#include "mbdos/genfunc.hpp"
#include "mbdos/kernels.hpp"
#include "mbdos/smooth_dos.hpp"
#include "mbdos/spectra_oracle.hpp"

namespace mbdos::cli {

namespace {

const char* const kHeaderPrefix = "# mbdos-config: ";

const std::vector<std::string> kCommands = {
    "coeffs", "dos",      "counting", "gs-energy", "bethe", "erdos-lehner",
    "exact-spectrum", "convolve", "compare", "verify", "fig"};

const std::map<std::string, std::string> kCommandHelp = {
    {"coeffs", "universal coefficients C_{l,l_V} by enumeration and generating function"},
    {"dos", "smooth many-body density on an energy grid"},
    {"counting", "smooth counting function on an energy grid"},
    {"gs-energy", "ground-state energy from the smooth counting function"},
    {"bethe", "Bethe approximation next to the smooth density"},
    {"erdos-lehner", "Erdos-Lehner approximation next to the smooth density"},
    {"exact-spectrum", "exact many-body spectrum of a model"},
    {"convolve", "Weidenmuller discrete sum for a model"},
    {"compare", "exact staircase against the smooth counting function"},
    {"verify", "built-in consistency checks"},
    {"fig", "figure presets"}};

}  // namespace

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["command"] = c.command;
  j["n"] = c.n;
  j["d"] = c.d;
  j["stat"] = c.stat;
  j["gamma"] = c.gamma;
  j["geometry"] = c.geometry;
  j["bc"] = c.bc;
  j["chi"] = c.chi;
  j["emin"] = c.emin;
  j["emax"] = c.emax;
  j["points"] = c.points;
  j["qmin"] = c.qmin;
  j["qmax"] = c.qmax;
  j["order"] = c.order;
  j["omit"] = c.omit;
  j["model"] = c.model;
  j["preset"] = c.preset;
  j["precision_bits"] = c.precision_bits;
  j["format"] = c.format;
  j["digits"] = c.digits;
  j["units"] = c.units;
  j["mass"] = c.mass;
  j["hbar"] = c.hbar;
  j["volume"] = c.volume;
  return j;
}

RunConfig from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    c.command = j.at("command").get<std::string>();
    c.n = j.at("n").get<int>();
    c.d = j.at("d").get<int>();
    c.stat = j.at("stat").get<std::string>();
    c.gamma = j.at("gamma").get<double>();
    c.geometry = j.at("geometry").get<std::string>();
    c.bc = j.at("bc").get<std::string>();
    c.chi = j.at("chi").get<int>();
    c.emin = j.at("emin").get<double>();
    c.emax = j.at("emax").get<double>();
    c.points = j.at("points").get<int>();
    c.qmin = j.at("qmin").get<double>();
    c.qmax = j.at("qmax").get<double>();
    c.order = j.at("order").get<int>();
    c.omit = j.at("omit").get<std::vector<int>>();
    c.model = j.at("model").get<std::string>();
    c.preset = j.at("preset").get<std::string>();
    c.precision_bits = j.at("precision_bits").get<unsigned>();
    c.format = j.at("format").get<std::string>();
    c.digits = j.at("digits").get<int>();
    c.units = j.at("units").get<std::string>();
    c.mass = j.at("mass").get<double>();
    c.hbar = j.at("hbar").get<double>();
    c.volume = j.at("volume").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed embedded config: ") + e.what());
  }
  return c;
}

namespace {

struct GeometrySpec {
  BilliardGeometry geom;
  bool given = false;
};

std::vector<double> split_numbers(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      throw DomainError("bad number '" + item + "'");
    }
    if (used != item.size() || !(x > 0)) throw DomainError("bad length '" + item + "'");
    v.push_back(x);
  }
  return v;
}

GeometrySpec parse_geometry(const RunConfig& c) {
  GeometrySpec g;
  if (c.geometry.empty()) return g;
  const auto colon = c.geometry.find(':');
  if (colon == std::string::npos) throw DomainError("geometry needs kind:params");
  const std::string kind = c.geometry.substr(0, colon);
  const auto p = split_numbers(c.geometry.substr(colon + 1));
  auto need = [&](std::size_t k) {
    if (p.size() != k) throw DomainError("geometry '" + kind + "' takes " + std::to_string(k) + " value(s)");
  };
  BilliardGeometry& b = g.geom;
  if (kind == "disk") {
    need(1);
    b = {2, M_PI * p[0] * p[0], 2 * M_PI * p[0], {}, 1};
  } else if (kind == "ring") {
    need(2);
    if (!(p[0] > p[1])) throw DomainError("ring needs outer radius > inner radius");
    b = {2, M_PI * (p[0] * p[0] - p[1] * p[1]), 2 * M_PI * (p[0] + p[1]), {}, 0};
  } else if (kind == "cylinder") {
    need(2);
    b = {2, p[0] * p[1], 2 * p[0], {}, 0};
  } else if (kind == "rectangle") {
    need(2);
    b = {2, p[0] * p[1], 2 * (p[0] + p[1]), {}, 0};
  } else if (kind == "segment") {
    need(1);
    b = {1, p[0], 2, {}, 0};
  } else {
    throw DomainError("unknown geometry '" + kind + "'");
  }
  b.bc = c.bc == "neumann" ? BoundaryCondition::neumann : BoundaryCondition::dirichlet;
  if (b.dimension != c.d) throw DomainError("geometry dimension does not match --d");
  g.given = true;
  return g;
}

double effective_gamma(const RunConfig& c) {
  const GeometrySpec g = parse_geometry(c);
  return g.given ? geometry_parameter(g.geom) : c.gamma;
}

double rho0(const RunConfig& c) {
  if (c.units == "natural") return 1.0;
  const GeometrySpec g = parse_geometry(c);
  BilliardGeometry geom;
  geom.dimension = c.d;
  geom.volume = g.given ? g.geom.volume : c.volume;
  if (!(geom.volume > 0)) throw DomainError("physical units need --volume or --geometry");
  return scaling_density(UnitsContext{false, c.mass, c.hbar}, geom);
}

}  // namespace

void validate(const RunConfig& c) {
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end())
    throw DomainError("unknown command '" + c.command + "'");
  check_particle_count(c.n);
  if (c.d < 1 || c.d > 12) throw DomainError("--d must be in [1, 12]");
  parse_statistics(c.stat);
  if (!(c.emin < c.emax)) throw DomainError("need emin < emax");
  if (c.points < 2) throw DomainError("need at least 2 grid points");
  if (!(c.qmin < c.qmax) || !(c.qmin > 0)) throw DomainError("need 0 < qmin < qmax");
  if (c.order < 1) throw DomainError("--order must be >= 1");
  if (c.precision_bits < kMinPrecisionBits) throw DomainError("precision must be >= 53 bits");
  if (c.format != "csv" && c.format != "json") throw DomainError("format must be csv or json");
  if (c.digits < 1 || c.digits > 100) throw DomainError("--digits must be in [1, 100]");
  if (c.units != "natural" && c.units != "physical") throw DomainError("units must be natural or physical");
  if (c.bc != "dirichlet" && c.bc != "neumann") throw DomainError("bc must be dirichlet or neumann");
  if (c.chi != 0 && c.d != 2) throw DomainError("--chi only applies to D = 2");
  for (int l : c.omit)
    if (l < 1) throw DomainError("--omit entries must be >= 1");
  if (c.command == "fig" && c.preset != "fig5" && c.preset != "fig6" && c.preset != "fig7" &&
      c.preset != "fig9")
    throw DomainError("fig preset must be one of fig5, fig6, fig7, fig9");
  parse_geometry(c);
  if (c.units == "physical") rho0(c);
}

namespace {

class Formatter {
 public:
  explicit Formatter(int digits) : digits_(digits) {}
  std::string operator()(const Real& x) const { return format_number(x, digits_); }
  std::string operator()(double x) const { return format_number(x, digits_); }
  std::string operator()(int x) const { return std::to_string(x); }

 private:
  int digits_;
};

// emin + i (emax - emin) / (points - 1), exact for representable endpoints.
std::vector<Real> grid(double lo, double hi, int points) {
  std::vector<Real> g;
  for (int i = 0; i < points; ++i) g.push_back(Real(lo) + Real(i) * (Real(hi) - Real(lo)) / (points - 1));
  return g;
}

Real coefficient_tolerance() {
  const int bits = static_cast<int>(precision_bits());
  return std::max(Real("1e-25"), pow(Real(2), -(bits - 24)));
}

Table coeffs_table(const RunConfig& c, const Formatter& fmt) {
  Table t;
  t.columns = {"l", "l_volume", "exact", "rational", "enumeration", "genfunc", "rel_diff"};
  const auto enumerated = kernels::parallel::coefficient_table(c.n, c.d);
  const auto series = genfunc_coefficient_table(c.n, c.d);
  const Real tol = coefficient_tolerance();
  for (int l = 1; l <= c.n; ++l)
    for (int lv = 0; lv <= l; ++lv) {
      const auto& a = enumerated.at(l, lv);
      const auto& b = series.at(l, lv);
      const Real diff = relative_difference(a.value(), b.value());
      std::string rational;
      if (a.is_exact()) {
        rational = a.exact().str();
        if (!b.is_exact() || a.exact() != b.exact()) t.mismatch = true;
      } else if (diff > tol) {
        t.mismatch = true;
      }
      t.rows.push_back({fmt(l), fmt(lv), a.is_exact() ? "1" : "0", rational, fmt(a.value()),
                        fmt(b.value()), fmt(diff)});
    }
  return t;
}

Table dos_table(const RunConfig& c, const Formatter& fmt, bool counting) {
  const double r0 = rho0(c);
  const DosExpansion dos = build_confined_dos(c.n, c.d, parse_statistics(c.stat),
                                              Real(effective_gamma(c)), DosOptions{c.omit});
  const auto es = grid(c.emin, c.emax, c.points);
  std::vector<Real> nat;
  for (const auto& e : es) nat.push_back(e * r0);
  Table t;
  std::vector<Real> vals;
  if (!counting) {
    t.columns = {"energy", "density"};
    vals = kernels::parallel::evaluate_grid(dos, kernels::DosQuantity::density, nat);
    for (auto& v : vals) v *= r0;
  } else if (c.order == 1) {
    t.columns = {"energy", "counting"};
    vals = kernels::parallel::evaluate_grid(dos, kernels::DosQuantity::counting, nat);
  } else {
    t.columns = {"energy", "integral_" + std::to_string(c.order)};
    for (const auto& e : nat)
      vals.push_back(dos.repeated_integral(c.order, e) / pow(Real(r0), c.order - 1));
  }
  for (std::size_t i = 0; i < es.size(); ++i) t.rows.push_back({fmt(es[i]), fmt(vals[i])});
  return t;
}

Table gs_table(const RunConfig& c, const Formatter& fmt) {
  const double r0 = rho0(c);
  const double gamma = effective_gamma(c);
  const GroundStateResult gs = gs_energy_smooth(c.n, c.d, gamma, c.chi);
  std::string closed;
  if (c.d == 2) closed = fmt(gs_energy_perimeter_closed(c.n - c.chi / 6.0, gamma) / r0);
  Table t;
  t.columns = {"n", "d", "gamma", "chi", "fermi_energy", "gs_energy", "closed_form", "provenance",
               "warning"};
  t.rows.push_back({fmt(c.n), fmt(c.d), fmt(gamma), fmt(c.chi), fmt(gs.fermi_energy / r0),
                    fmt(gs.gs_energy / r0), closed, to_string(gs.provenance),
                    gs.negative_density_warning ? "1" : "0"});
  return t;
}

Table bethe_table(const RunConfig& c, const Formatter& fmt, bool with_el) {
  const double gamma = effective_gamma(c);
  const GroundStateResult gs = gs_energy_smooth(c.n, c.d, gamma, 0);
  const double rho_f = single_particle_density(gs.fermi_energy, c.d, gamma);
  const DosExpansion dos = build_confined_dos(c.n, c.d, Statistics::fermion, Real(gamma));
  Table t;
  t.columns = {"q", "energy", "smooth", "bethe"};
  if (with_el) t.columns.push_back("erdos_lehner");
  if (!with_el) t.columns.push_back("saddle");
  t.columns.push_back("rel_dev_bethe");
  if (with_el) t.columns.push_back("rel_dev_erdos_lehner");
  for (const auto& q : grid(c.qmin, c.qmax, c.points)) {
    const double qd = q.convert_to<double>();
    const Real e = Real(gs.gs_energy) + q;
    const Real smooth = dos.density(e);
    const double b = bethe_density(c.n, qd, rho_f);
    std::vector<std::string> row{fmt(q), fmt(e), fmt(smooth), fmt(b)};
    if (with_el) {
      const double el = erdos_lehner_density(c.n, qd, rho_f);
      row.push_back(fmt(el));
      row.push_back(fmt(abs(smooth - b) / b));
      row.push_back(fmt(abs(smooth - el) / el));
    } else {
      row.push_back(gamma == 0 ? fmt(solve_saddle(c.n, e.convert_to<double>(), c.d).density)
                               : std::string());
      row.push_back(fmt(abs(smooth - b) / b));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table spectrum_table(const SpectrumList& s, const Formatter& fmt) {
  Table t;
  t.columns = {"energy", "weight_numerator", "weight_denominator"};
  for (const auto& e : s.entries())
    t.rows.push_back({fmt(e.energy), mp::numerator(e.weight).str(), mp::denominator(e.weight).str()});
  return t;
}

SpectrumModel config_model(const RunConfig& c) {
  SpectrumModel m = parse_model(c.model);
  m.mass = c.mass;
  m.hbar = c.hbar;
  return m;
}

Table spectrum_command(const RunConfig& c, const Formatter& fmt, bool convolve) {
  const SpectrumModel m = config_model(c);
  const SpectrumList levels = single_particle_levels(m, c.emax);
  const Statistics stat = parse_statistics(c.stat);
  const SpectrumList s = convolve ? weidenmuller_discrete_dos(levels, c.n, stat, c.emax)
                                  : manybody_exact_spectrum(levels, c.n, stat, c.emax);
  return spectrum_table(s, fmt);
}

struct ModelComparison {
  double rho0;
  double gamma;
  int dimension;
  SpectrumList spectrum;
};

// Exact spectrum of the model up to emax (in rho0 units).
ModelComparison model_spectrum(const RunConfig& c, double emax_nat) {
  const SpectrumModel m = config_model(c);
  const BilliardGeometry g = model_geometry(m);
  const double r0 = scaling_density(UnitsContext{false, m.mass, m.hbar}, g);
  const double e_phys = emax_nat / r0;
  const SpectrumList levels = single_particle_levels(m, e_phys);
  return {r0, geometry_parameter(g), g.dimension,
          manybody_exact_spectrum(levels, c.n, parse_statistics(c.stat), e_phys)};
}

Table compare_table(const RunConfig& c, const Formatter& fmt) {
  const ModelComparison mc = model_spectrum(c, c.emax);
  const DosExpansion dos = build_confined_dos(c.n, mc.dimension, parse_statistics(c.stat), Real(mc.gamma));
  Table t;
  t.columns = {"energy", "staircase", "smooth", "diff"};
  for (const auto& e : grid(c.emin, c.emax, c.points)) {
    const Rational st = staircase(mc.spectrum, e.convert_to<double>() / mc.rho0);
    const Real sm = dos.counting(e);
    t.rows.push_back({fmt(e), fmt(to_real(st)), fmt(sm), fmt(to_real(st) - sm)});
  }
  return t;
}

Table verify_table(const Formatter& fmt) {
  Table t;
  t.columns = {"check", "case", "value", "tolerance", "pass"};
  auto add = [&](const std::string& check, const std::string& what, const std::string& value,
                 const std::string& tol, bool ok) {
    t.rows.push_back({check, what, value, tol, ok ? "1" : "0"});
    if (!ok) t.mismatch = true;
  };
  for (int n = 2; n <= 15; ++n) {
    bool ok = true;
    std::string det;
    try {
      det = verify_cycle_gaussian(n).determinant.str();
    } catch (const OracleMismatch&) {
      ok = false;
    }
    add("cycle_gaussian", "n=" + std::to_string(n), det, "0", ok);
  }
  double worst = 0;
  bool rec_ok = true;
  for (int d = 1; d <= 3; ++d)
    for (int l = 1; l <= 12; ++l)
      for (int lv = 0; lv <= l; ++lv) {
        try {
          worst = std::max(worst, convolution_recurrence_check(d, l, lv).max_relative_error);
        } catch (const OracleMismatch&) {
          rec_ok = false;
        }
      }
  add("convolution_recurrence", "D=1..3;l<=12", fmt(worst), "1e-12", rec_ok && worst <= 1e-12);

  double sup = 0;
  for (const auto& x : grid(-5, 5, 101)) {
    const double xd = x.convert_to<double>();
    sup = std::max(sup, std::abs(cauchy_convolution(0.3, 0.5, xd) - cauchy_kernel(0.8, xd)));
  }
  add("cauchy_semigroup", "alpha=0.3;beta=0.5", fmt(sup), "1e-6", sup <= 1e-6);

  const Real tol = coefficient_tolerance();
  for (int d = 1; d <= 3; ++d) {
    Real worst_c = 0;
    bool exact_ok = true;
    for (int n = 1; n <= 12; ++n) {
      const auto a = kernels::parallel::coefficient_table(n, d);
      const auto b = genfunc_coefficient_table(n, d);
      for (int l = 1; l <= n; ++l)
        for (int lv = 0; lv <= l; ++lv) {
          if (a.at(l, lv).is_exact())
            exact_ok = exact_ok && b.at(l, lv).is_exact() && a.at(l, lv).exact() == b.at(l, lv).exact();
          else
            worst_c = std::max(worst_c, relative_difference(a.at(l, lv).value(), b.at(l, lv).value()));
        }
    }
    add("dual_route_coefficients", "D=" + std::to_string(d) + ";N<=12", fmt(worst_c), fmt(tol),
        exact_ok && worst_c <= tol);
  }

  SpectrumModel eq;
  const SpectrumList levels = single_particle_levels(eq, 14);
  for (int n = 1; n <= 4; ++n)
    for (Statistics st : {Statistics::boson, Statistics::fermion}) {
      const auto exact = manybody_exact_spectrum(levels, n, st, 14);
      const auto wm = weidenmuller_discrete_dos(levels, n, st, 14).without_zero_weights();
      bool same = exact.size() == wm.size();
      for (std::size_t i = 0; same && i < exact.size(); ++i)
        same = std::abs(exact.entries()[i].energy - wm.entries()[i].energy) <= levels.merge_tolerance() &&
               exact.entries()[i].weight == wm.entries()[i].weight;
      add("weidenmuller_vs_exact", "equidistant;N=" + std::to_string(n) + ";" + to_string(st),
          std::to_string(exact.size()), "0", same);
    }

  bool rp_ok = true;
  for (int n = 1; n <= 6; ++n) {
    const auto exact = manybody_exact_spectrum(levels, n, Statistics::fermion, 14);
    const double e_gs = n * (n - 1) / 2.0;
    for (const auto& e : exact.entries()) {
      const int ex = static_cast<int>(std::lround(e.energy - e_gs));
      if (e.weight != Rational(restricted_partition_count(ex, n))) rp_ok = false;
    }
  }
  add("restricted_partitions", "equidistant fermions N<=6", "", "0", rp_ok);
  return t;
}

Table fig_table(const RunConfig& c, const Formatter& fmt) {
  Table t;
  if (c.preset == "fig5" || c.preset == "fig6") {
    const auto fermi = build_unconfined_dos(c.n, 2, Statistics::fermion);
    const auto bose = build_unconfined_dos(c.n, 2, Statistics::boson);
    const PowerTerm* naive = fermi.term(HalfInteger(c.n));
    t.columns = {"energy", "naive", "boson", "fermion"};
    if (c.preset == "fig6") t.columns.push_back("log10_abs_fermion");
    for (const auto& e : grid(c.emin, c.emax, c.points)) {
      const Real nv = e > 0 ? naive->coefficient * pow(e, c.n - 1) : Real(0);
      const Real f = fermi.density(e);
      std::vector<std::string> row{fmt(e), fmt(nv), fmt(bose.density(e)), fmt(f)};
      if (c.preset == "fig6") row.push_back(f != 0 ? fmt(Real(log10(abs(f)))) : std::string("-inf"));
      t.rows.push_back(std::move(row));
    }
  } else if (c.preset == "fig7") {
    const ModelComparison mc = model_spectrum(c, c.emax);
    const auto unconf = build_unconfined_dos(c.n, 2, Statistics::fermion);
    const auto conf = build_confined_dos(c.n, 2, Statistics::fermion, Real(mc.gamma));
    const double shift = gs_shift_curvature(c.n, mc.gamma, 1);
    t.columns = {"energy", "unconfined", "confined", "confined_curvature_shifted", "model_staircase"};
    for (const auto& e : grid(c.emin, c.emax, c.points)) {
      const Rational st = staircase(mc.spectrum, e.convert_to<double>() / mc.rho0);
      t.rows.push_back({fmt(e), fmt(unconf.counting(e)), fmt(conf.counting(e)),
                        fmt(conf.counting(e - shift)), fmt(to_real(st))});
    }
  } else {
    const DosExpansion dos = build_unconfined_dos(c.n, 2, Statistics::fermion);
    const double e_gs = gs_energy_smooth(c.n, 2, 0).gs_energy;
    t.columns = {"q", "smooth", "bethe", "erdos_lehner", "saddle"};
    for (const auto& q : grid(c.qmin, c.qmax, c.points)) {
      const double qd = q.convert_to<double>();
      t.rows.push_back({fmt(q), fmt(dos.density(Real(e_gs) + q)), fmt(bethe_density(c.n, qd, 1.0)),
                        fmt(erdos_lehner_density(c.n, qd, 1.0)),
                        fmt(solve_saddle(c.n, e_gs + qd, 2).density)});
    }
  }
  return t;
}

bool is_json_number(const std::string& s) {
  if (s.empty()) return false;
  try {
    auto j = nlohmann::json::parse(s);
    return j.is_number();
  } catch (const nlohmann::json::exception&) {
    return false;
  }
}

}  // namespace

Table compute(const RunConfig& c) {
  validate(c);
  ScopedPrecision prec(c.precision_bits);
  const Formatter fmt(c.digits);
  if (c.command == "coeffs") return coeffs_table(c, fmt);
  if (c.command == "dos") return dos_table(c, fmt, false);
  if (c.command == "counting") return dos_table(c, fmt, true);
  if (c.command == "gs-energy") return gs_table(c, fmt);
  if (c.command == "bethe") return bethe_table(c, fmt, false);
  if (c.command == "erdos-lehner") return bethe_table(c, fmt, true);
  if (c.command == "exact-spectrum") return spectrum_command(c, fmt, false);
  if (c.command == "convolve") return spectrum_command(c, fmt, true);
  if (c.command == "compare") return compare_table(c, fmt);
  if (c.command == "verify") return verify_table(fmt);
  return fig_table(c, fmt);
}

std::string render(const RunConfig& c, const Table& t) {
  std::ostringstream os;
  const std::string config = to_json(c).dump();
  if (c.format == "csv") {
    os << kHeaderPrefix << config << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
      os << "\n";
    }
    return os.str();
  }
  os << "{\"config\":" << config << ",\"columns\":" << nlohmann::json(t.columns).dump()
     << ",\"rows\":[";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    os << (r ? "," : "") << "\n[";
    for (std::size_t i = 0; i < t.rows[r].size(); ++i) {
      const std::string& v = t.rows[r][i];
      os << (i ? "," : "") << (is_json_number(v) ? v : nlohmann::json(v).dump());
    }
    os << "]";
  }
  os << "\n]}\n";
  return os.str();
}

RunConfig config_from_artifact(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const std::string prefix = kHeaderPrefix;
  if (text.rfind(prefix, 0) == 0) {
    const auto eol = text.find('\n');
    return from_json(nlohmann::json::parse(text.substr(prefix.size(), eol - prefix.size())));
  }
  try {
    return from_json(nlohmann::json::parse(text).at("config"));
  } catch (const nlohmann::json::exception&) {
    throw DomainError("'" + path + "' carries no embedded config");
  }
}

namespace {

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--n", c.n, "particle number");
  sub->add_option("--d", c.d, "dimension");
  sub->add_option("--stat", c.stat, "boson or fermion");
  sub->add_option("--gamma", c.gamma, "surface parameter");
  sub->add_option("--geometry", c.geometry, "disk:R, ring:R1,R2, cylinder:C,L, rectangle:A,B, segment:L");
  sub->add_option("--bc", c.bc, "dirichlet or neumann");
  sub->add_option("--chi", c.chi, "Euler characteristic (D = 2)");
  sub->add_option("--emin", c.emin, "lowest grid energy");
  sub->add_option("--emax", c.emax, "highest grid energy, also the spectrum cutoff");
  sub->add_option("--points", c.points, "grid points");
  sub->add_option("--qmin", c.qmin, "lowest excitation energy Q");
  sub->add_option("--qmax", c.qmax, "highest excitation energy Q");
  sub->add_option("--order", c.order, "repeated integral order for counting");
  sub->add_option("--omit", c.omit, "cluster counts l to leave out");
  sub->add_option("--model", c.model, "equidistant:s, box1d:L, rectangle:A,B, cylinder:C,L");
  sub->add_option("--units", c.units, "natural or physical");
  sub->add_option("--mass", c.mass, "particle mass (physical units)");
  sub->add_option("--hbar", c.hbar, "hbar (physical units)");
  sub->add_option("--volume", c.volume, "volume (physical units)");
  sub->add_option("--precision", c.precision_bits, "mantissa bits");
  sub->add_option("--format", c.format, "csv or json");
  sub->add_option("--digits", c.digits, "significant digits");
  sub->add_option("--out", c.out, "output file (default stdout)");
}

int emit(const RunConfig& c, std::ostream& out, std::ostream& err) {
  Table t;
  try {
    t = compute(c);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const OracleMismatch& e) {
    err << "oracle mismatch: " << e.what() << "\n";
    return kOracleMismatch;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  }
  const std::string text = render(c, t);
  if (c.out.empty()) {
    out << text;
  } else {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << c.out << "'\n";
      return kNumeric;
    }
    f << text;
  }
  if (t.mismatch) {
    err << "oracle mismatch: see rows with failed comparisons\n";
    return kOracleMismatch;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Smooth many-body density of states"};
  app.require_subcommand(0, 1);
  std::string replay;
  std::string replay_out;
  app.add_option("--replay", replay, "re-run the config embedded in an artifact");
  app.add_option("--out", replay_out, "output file for --replay");

  RunConfig c;
  try {
    c.precision_bits = precision_bits_from_env();
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  const unsigned env_bits = c.precision_bits;
  for (const auto& name : kCommands) {
    CLI::App* sub = app.add_subcommand(name, kCommandHelp.at(name));
    add_common(sub, c);
    if (name == "fig") sub->add_option("preset", c.preset, "fig5, fig6, fig7 or fig9")->required();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  if (!replay.empty()) {
    if (!app.get_subcommands().empty()) {
      err << "error: --replay takes no subcommand\n";
      return kUsage;
    }
    RunConfig r;
    try {
      r = config_from_artifact(replay);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kUsage;
    }
    r.out = replay_out;
    return emit(r, out, err);
  }
  if (app.get_subcommands().empty()) {
    err << app.help();
    return kUsage;
  }
  c.command = app.get_subcommands().front()->get_name();
  (void)env_bits;
  if (c.command == "fig") {
    // Preset defaults unless given explicitly.
    CLI::App* sub = app.get_subcommands().front();
    auto unset = [&](const char* opt) { return sub->count(opt) == 0; };
    if (unset("--n")) c.n = c.preset == "fig7" ? 12 : c.preset == "fig9" ? 28 : c.preset == "fig6" ? 20 : 5;
    if (c.preset == "fig7") {
      if (unset("--model")) c.model = "cylinder:" + format_number(std::sqrt(M_PI), 17) + "," +
                                      format_number(1 / std::sqrt(M_PI), 17);
      if (unset("--emax")) c.emax = c.n * c.n / 2.0 + 40;
    } else if (c.preset == "fig9") {
      if (unset("--qmin")) c.qmin = 1;
      if (unset("--qmax")) c.qmax = 2.0 * c.n;
    } else if (unset("--emax")) {
      c.emax = 1.5 * c.n * c.n / 2.0;
    }
  }
  return emit(c, out, err);
}

}  // namespace mbdos::cli
