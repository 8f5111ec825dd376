#include "ringform/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "ringform/errors.hpp"

namespace ringform::app {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

// Typed access to a flat config object; remembers which keys were read so
// leftovers can be reported as unknown.
class Keys {
 public:
  explicit Keys(const Json& obj) : obj_(obj) {
    if (!obj_.is_object()) throw ConfigError("config must be a flat object of key/value pairs");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  double number(const std::string& key, double fallback) {
    const Json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) throw type_error(key, "a number");
    return v->get<double>();
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    const Json* v = find(key);
    if (!v) return fallback;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_integer()) {
      if (v->get<std::int64_t>() < 0) throw ConfigError("'" + key + "' must be non-negative");
      return static_cast<std::uint64_t>(v->get<std::int64_t>());
    }
    throw type_error(key, "a non-negative integer");
  }

  bool flag(const std::string& key, bool fallback) {
    const Json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw type_error(key, "true or false");
    return v->get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const Json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) throw type_error(key, "a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const Json* v = find(key);
    if (!v) return {};
    if (!v->is_array()) throw type_error(key, "a list of numbers");
    std::vector<double> out;
    for (const auto& x : *v) {
      if (!x.is_number()) throw type_error(key, "a list of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::vector<SphereAngles> angle_pairs(const std::string& key) {
    const Json* v = find(key);
    if (!v) return {};
    std::vector<SphereAngles> out;
    if (!v->is_array()) throw type_error(key, "a list of [psi, phi] pairs");
    for (const auto& p : *v) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        throw type_error(key, "a list of [psi, phi] pairs");
      }
      out.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return out;
  }

  void finish() const {
    std::string unknown;
    for (const auto& [k, v] : obj_.items()) {
      if (!used_.count(k)) unknown += (unknown.empty() ? "" : ", ") + k;
    }
    if (!unknown.empty()) throw ConfigError("unknown config key(s): " + unknown);
  }

 private:
  const Json* find(const std::string& key) {
    used_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  static ConfigError type_error(const std::string& key, const std::string& want) {
    return ConfigError("'" + key + "' must be " + want);
  }

  const Json& obj_;
  std::set<std::string> used_;
};

template <typename Enum>
Enum pick(const std::string& key, const std::string& value,
          const std::vector<std::pair<std::string, Enum>>& choices) {
  std::string names;
  for (const auto& [name, e] : choices) {
    if (name == value) return e;
    names += (names.empty() ? "" : ", ") + name;
  }
  throw ConfigError("'" + key + "' must be one of: " + names + " (got '" + value + "')");
}

std::size_t agent_count(Keys& keys, std::size_t fallback) {
  const auto n = keys.count("n", fallback);
  if (n < 2) throw ConfigError("n must be at least 2");
  if (n > 10000) throw ConfigError("n is unreasonably large (> 10000)");
  return static_cast<std::size_t>(n);
}

SimulateSpec parse_simulate(Keys& keys) {
  SimulateSpec s;
  SimConfig& c = s.sim;
  c.n = agent_count(keys, c.n);
  c.directed = keys.flag("directed", c.directed);
  c.law = pick<ControlLaw>("law", keys.text("law", "repulsive"),
                           {{"repulsive", ControlLaw::Repulsive},
                            {"consensus", ControlLaw::Consensus}});
  c.integrator = pick<Integrator>("integrator", keys.text("integrator", "lie-euler"),
                                  {{"lie-euler", Integrator::LieEuler},
                                   {"rk4", Integrator::AmbientRk4}});
  c.dt = keys.number("dt", c.dt);
  c.t_end = keys.number("t_end", c.t_end);
  c.seed = keys.count("seed", c.seed);
  c.init.kind = pick<InitSpec::Kind>("init", keys.text("init", "random"),
                                     {{"random", InitSpec::Kind::Random},
                                      {"omega_e", InitSpec::Kind::RandomInOmegaE},
                                      {"omega_o", InitSpec::Kind::RandomInOmegaO},
                                      {"hemisphere", InitSpec::Kind::RandomHemisphere},
                                      {"explicit", InitSpec::Kind::Explicit}});
  c.init.angles = keys.angle_pairs("init_angles");
  if (c.init.kind != InitSpec::Kind::Explicit && !c.init.angles.empty()) {
    throw ConfigError("init_angles is only used with init = \"explicit\"");
  }
  c.record_every = static_cast<std::size_t>(keys.count("record_every", c.record_every));
  c.early_stop = keys.flag("early_stop", c.early_stop);
  s.classify_tol = keys.number("classify_tol", s.classify_tol);
  if (!(s.classify_tol > 0.0)) throw ConfigError("classify_tol must be positive");
  s.plot = keys.flag("plot", s.plot);
  if (c.t_end / c.dt > 1e8) throw ConfigError("t_end / dt exceeds 1e8 steps");
  c.validate();
  return s;
}

ClassifySpec parse_classify(Keys& keys) {
  ClassifySpec s;
  s.n = agent_count(keys, s.n);
  s.directed = keys.flag("directed", false);
  if (s.directed) {
    throw ConfigError("classify-eq linearizes undirected rings only (directed = true given)");
  }
  using E = ClassifySpec::Equilibrium;
  s.equilibrium = pick<E>("equilibrium", keys.text("equilibrium", "equispaced"),
                          {{"antipodal", E::Antipodal},
                           {"cyclic", E::Cyclic},
                           {"equispaced", E::Equispaced},
                           {"custom", E::Custom}});
  const bool has_alpha = keys.has("alpha");
  const bool has_d = keys.has("d");
  s.alpha = keys.number("alpha", 0.0);
  const auto d = keys.count("d", 0);
  s.step_angles = keys.numbers("step_angles");
  s.zero_tol = keys.number("zero_tol", s.zero_tol);
  if (!(s.zero_tol > 0.0)) throw ConfigError("zero_tol must be positive");

  const auto nd = static_cast<double>(s.n);
  switch (s.equilibrium) {
    case E::Antipodal:
      if (s.n % 2 != 0) throw ConfigError("the antipodal formation needs an even n");
      s.alpha = kPi;
      break;
    case E::Cyclic:
      if (s.n % 2 == 0) throw ConfigError("the cyclic formation needs an odd n");
      s.alpha = kPi - kPi / nd;
      break;
    case E::Equispaced:
      if (has_alpha == has_d) throw ConfigError("equispaced needs exactly one of alpha or d");
      if (has_d) s.alpha = 2.0 * static_cast<double>(d) * kPi / nd;
      break;
    case E::Custom:
      if (s.step_angles.size() + 1 != s.n) {
        throw ConfigError("custom equilibrium needs n - 1 step_angles");
      }
      break;
  }
  if (s.equilibrium != E::Custom && !s.step_angles.empty()) {
    throw ConfigError("step_angles is only used with equilibrium = \"custom\"");
  }
  if (s.equilibrium != E::Equispaced && (has_alpha || has_d)) {
    throw ConfigError("alpha and d are only used with equilibrium = \"equispaced\"");
  }
  return s;
}

AuditSpec parse_audit(Keys& keys) {
  AuditSpec s;
  s.n = agent_count(keys, s.n);
  const std::string parity = keys.text("parity", s.n % 2 == 0 ? "even" : "odd");
  if (parity != "even" && parity != "odd") throw ConfigError("parity must be \"even\" or \"odd\"");
  if ((parity == "even") != (s.n % 2 == 0)) {
    throw ConfigError("parity \"" + parity + "\" does not match n = " + std::to_string(s.n));
  }
  s.samples = static_cast<std::size_t>(keys.count("samples", s.samples));
  if (s.samples == 0) throw ConfigError("samples must be positive");
  s.seed = keys.count("seed", s.seed);
  s.search.resolution = static_cast<std::size_t>(keys.count("resolution", s.search.resolution));
  s.search.angle_resolution =
      static_cast<std::size_t>(keys.count("angle_resolution", s.search.angle_resolution));
  return s;
}

std::string number17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << content;
  if (!f) throw ConfigError("failed writing " + path.string());
}

Json bound_json(const BoundCheckReport& r) {
  Json j;
  j["name"] = r.name;
  j["applicable"] = r.applicable;
  if (r.applicable) {
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["slack"] = r.slack;
    j["holds"] = r.holds;
  }
  j["nu"] = r.nu ? Json(*r.nu) : Json(nullptr);
  return j;
}

Json angles_json(const SystemState& s) {
  Json out = Json::array();
  for (const auto& a : s.angles()) out.push_back({a.psi, a.phi});
  return out;
}

Json config_echo(const SimConfig& c) {
  Json j;
  j["n"] = c.n;
  j["directed"] = c.directed;
  j["law"] = to_string(c.law);
  j["integrator"] = to_string(c.integrator);
  j["dt"] = c.dt;
  j["t_end"] = c.t_end;
  j["seed"] = c.seed;
  static const char* kinds[] = {"random", "omega_e", "omega_o", "hemisphere", "explicit"};
  j["init"] = kinds[static_cast<int>(c.init.kind)];
  j["record_every"] = c.record_every;
  j["early_stop"] = c.early_stop;
  return j;
}

void say(std::ostream* log, const std::string& line) {
  if (log) *log << line << '\n';
}

Json run_simulate(const SimulateSpec& spec, const fs::path& out, std::ostream* log) {
  const Trajectory tr = simulate(spec.sim);
  std::ostringstream csv;
  write_trajectory_csv(tr, csv);
  write_file(out / "trajectory.csv", csv.str());
  Json summary = simulation_summary(spec, tr);
  write_file(out / "summary.json", summary.dump(2) + "\n");
  if (spec.plot) {
    const std::string title = "n = " + std::to_string(spec.sim.n) + ", " +
                              (spec.sim.directed ? "directed" : "undirected") + " ring, " +
                              to_string(spec.sim.law) + ", seed " + std::to_string(spec.sim.seed);
    write_file(out / "paths.svg", render_paths_svg(tr, title));
  }
  say(log, "seed " + std::to_string(spec.sim.seed) + ": " +
               summary["formation"]["kind"].get<std::string>() + " at t = " +
               std::to_string(tr.times.back()) + " (W = " + std::to_string(tr.W.back()) + ")");
  return summary;
}

Json run_sweep(const SweepSpec& spec, const fs::path& out, std::ostream* log) {
  if (spec.seed_count == 0) throw ConfigError("seed_count must be positive");
  Json runs = Json::array();
  std::map<std::string, std::size_t> counts;
  for (std::size_t k = 0; k < spec.seed_count; ++k) {
    SimulateSpec member = spec.base;
    member.sim.seed = spec.seed_first + k;
    const fs::path dir = out / ("seed_" + std::to_string(member.sim.seed));
    fs::create_directories(dir);
    const Json s = run_simulate(member, dir, log);
    const std::string kind = s["formation"]["kind"];
    ++counts[kind];
    runs.push_back({{"seed", member.sim.seed},
                    {"formation", kind},
                    {"final_W", s["final_W"]},
                    {"final_time", s["final_time"]},
                    {"convergence_time", s["convergence_time"]}});
  }
  Json summary;
  summary["verb"] = "sweep";
  summary["config"] = config_echo(spec.base.sim);
  summary["seed_first"] = spec.seed_first;
  summary["seed_count"] = spec.seed_count;
  summary["formation_counts"] = Json::object();
  for (const auto& [k, c] : counts) summary["formation_counts"][k] = c;
  summary["runs"] = runs;
  write_file(out / "summary.json", summary.dump(2) + "\n");
  return summary;
}

Json run_classify(const ClassifySpec& spec, const fs::path& out, std::ostream* log) {
  using E = ClassifySpec::Equilibrium;
  SystemState state;
  if (spec.equilibrium == E::Custom) {
    state = make_great_circle({Vec3::UnitZ(), Vec3::UnitX(), spec.step_angles});
  } else {
    state = make_equispaced_circle(spec.n, spec.alpha, Vec3::UnitZ(), Vec3::UnitX());
  }
  const RingGraph g(spec.n, false);
  EquilibriumReport r;
  try {
    r = classify_equilibrium(state, g, spec.zero_tol);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("requested configuration cannot be classified: ") + e.what());
  }

  Json summary;
  summary["verb"] = "classify-eq";
  summary["n"] = spec.n;
  static const char* names[] = {"antipodal", "cyclic", "equispaced", "custom"};
  summary["equilibrium"] = names[static_cast<int>(spec.equilibrium)];
  if (spec.equilibrium != E::Custom) summary["alpha_rad"] = spec.alpha;
  summary["agents_rad"] = angles_json(state);
  summary["residual"] = r.residual;
  summary["circle_axis"] = {r.circle_axis.x(), r.circle_axis.y(), r.circle_axis.z()};
  summary["spectra"] = {spectrum_json(r.psi), spectrum_json(r.phi)};
  summary["n_zero"] = r.n_zero;
  summary["n_negative"] = r.n_negative;
  summary["n_positive"] = r.n_positive;
  summary["verdict"] = to_string(r.verdict);
  if (spec.equilibrium != E::Custom) {
    summary["circulant_eigenvalues"] = circulant_eigenvalues(spec.alpha, spec.n);
  }
  write_file(out / "summary.json", summary.dump(2) + "\n");
  say(log, "verdict " + to_string(r.verdict) + ": " + std::to_string(r.n_zero) + " zero, " +
               std::to_string(r.n_negative) + " negative, " + std::to_string(r.n_positive) +
               " positive");
  return summary;
}

Json run_audit(const AuditSpec& spec, const fs::path& out, std::ostream* log) {
  std::ostringstream csv;
  csv << "sample,seed,bound,applicable,lhs,rhs,slack,holds,nu\n";
  std::map<std::string, Json> per_bound;
  bool all_hold = true;
  for (std::size_t k = 0; k < spec.samples; ++k) {
    const std::uint64_t seed = spec.seed + k;
    const auto s = random_state(spec.n, seed, InitConstraint::None);
    for (const auto& r : check_bounds(s, spec.search)) {
      csv << k << ',' << seed << ',' << r.name << ',' << (r.applicable ? 1 : 0) << ',';
      if (r.applicable) {
        csv << number17(r.lhs) << ',' << number17(r.rhs) << ',' << number17(r.slack) << ','
            << (r.holds ? 1 : 0);
      } else {
        csv << ",,,";
      }
      csv << ',' << (r.nu ? number17(*r.nu) : "") << '\n';

      auto& b = per_bound[r.name];
      if (b.is_null()) b = {{"applicable", 0}, {"holds", 0}, {"min_slack", nullptr}};
      if (!r.applicable) continue;
      b["applicable"] = b["applicable"].get<std::size_t>() + 1;
      b["holds"] = b["holds"].get<std::size_t>() + (r.holds ? 1 : 0);
      if (b["min_slack"].is_null() || r.slack < b["min_slack"].get<double>()) {
        b["min_slack"] = r.slack;
      }
      all_hold = all_hold && r.holds;
    }
  }
  write_file(out / "bounds.csv", csv.str());

  Json summary;
  summary["verb"] = "bound-audit";
  summary["n"] = spec.n;
  summary["parity"] = spec.n % 2 == 0 ? "even" : "odd";
  summary["samples"] = spec.samples;
  summary["seed"] = spec.seed;
  summary["holds_tolerance"] = kBoundSlackTol;
  summary["all_applicable_hold"] = all_hold;
  summary["bounds"] = Json::object();
  for (const auto& [name, b] : per_bound) summary["bounds"][name] = b;
  write_file(out / "summary.json", summary.dump(2) + "\n");
  say(log, std::string("bound audit: ") + (all_hold ? "all applicable bounds hold" : "VIOLATION"));
  return summary;
}

}  // namespace

Verb parse_verb(const std::string& name) {
  return pick<Verb>("verb", name,
                    {{"simulate", Verb::Simulate},
                     {"sweep", Verb::Sweep},
                     {"classify-eq", Verb::ClassifyEquilibrium},
                     {"bound-audit", Verb::BoundAudit}});
}

std::string to_string(Verb v) {
  switch (v) {
    case Verb::Simulate: return "simulate";
    case Verb::Sweep: return "sweep";
    case Verb::ClassifyEquilibrium: return "classify-eq";
    case Verb::BoundAudit: return "bound-audit";
  }
  return "simulate";
}

Json load_config(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path.string());
  try {
    return Json::parse(f, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw ConfigError("malformed config " + path.string() + ": " + e.what());
  }
}

ExperimentSpec parse_spec(Verb verb, const Json& config,
                          std::optional<std::uint64_t> seed_override) {
  Keys keys(config);
  ExperimentSpec spec;
  switch (verb) {
    case Verb::Simulate: {
      auto s = parse_simulate(keys);
      if (seed_override) s.sim.seed = *seed_override;
      spec = s;
      break;
    }
    case Verb::Sweep: {
      SweepSpec s;
      s.seed_count = static_cast<std::size_t>(keys.count("seed_count", 1));
      if (s.seed_count == 0) throw ConfigError("seed_count must be positive");
      s.base = parse_simulate(keys);
      s.seed_first = seed_override.value_or(s.base.sim.seed);
      spec = s;
      break;
    }
    case Verb::ClassifyEquilibrium:
      spec = parse_classify(keys);
      break;
    case Verb::BoundAudit: {
      auto s = parse_audit(keys);
      if (seed_override) s.seed = *seed_override;
      spec = s;
      break;
    }
  }
  keys.finish();
  return spec;
}

void write_trajectory_csv(const Trajectory& tr, std::ostream& out) {
  if (tr.size() == 0) return;
  const std::size_t n = tr.states.front().size();
  out << "t_s";
  for (std::size_t i = 1; i <= n; ++i) out << ",psi_" << i << "_rad";
  for (std::size_t i = 1; i <= n; ++i) out << ",phi_" << i << "_rad";
  out << ",W_rad,V";
  for (std::size_t i = 1; i <= n; ++i) out << ",omega_" << i << "_rad_per_s";
  out << '\n';
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const auto angles = tr.states[k].angles();
    out << number17(tr.times[k]);
    for (const auto& a : angles) out << ',' << number17(a.psi);
    for (const auto& a : angles) out << ',' << number17(a.phi);
    out << ',' << number17(tr.W[k]) << ',' << number17(tr.V[k]);
    for (double w : tr.omega_norms[k]) out << ',' << number17(w);
    out << '\n';
  }
}

Json spectrum_json(const SpectrumReport& r) {
  Json j;
  j["matrix"] = r.matrix_name;
  j["eigenvalues"] = r.eigenvalues;
  j["n_zero"] = r.n_zero;
  j["n_negative"] = r.n_negative;
  j["n_positive"] = r.n_positive;
  j["verdict"] = to_string(r.verdict);
  return j;
}

Json simulation_summary(const SimulateSpec& spec, const Trajectory& tr) {
  const SimConfig& c = spec.sim;
  const RingGraph g(c.n, c.directed);
  const SystemState& last = tr.states.back();
  const auto& omega = tr.omega_norms.back();
  const FormationClass cls = classify_formation(last, g, omega, spec.classify_tol);

  Json j;
  j["verb"] = "simulate";
  j["config"] = config_echo(c);
  j["formation"] = {{"kind", to_string(cls.kind)}, {"residual", cls.residual}};
  j["stop_reason"] = to_string(tr.stop_reason);
  j["steps"] = tr.steps;
  j["final_time"] = tr.times.back();
  j["final_W"] = tr.W.back();
  j["final_V"] = tr.V.back();
  double mean = 0.0;
  for (double w : omega) mean += w;
  j["mean_final_omega"] = mean / static_cast<double>(omega.size());
  j["max_final_omega"] = *std::max_element(omega.begin(), omega.end());
  j["max_norm_drift"] = tr.max_norm_drift;

  // Earliest recorded time after which W stays within classify_tol of its
  // final value.
  Json conv = nullptr;
  if (cls.kind != FormationKind::Other) {
    std::size_t k = tr.size();
    while (k > 0 && std::abs(tr.W[k - 1] - tr.W.back()) <= spec.classify_tol) --k;
    conv = tr.times[k < tr.size() ? k : tr.size() - 1];
  }
  j["convergence_time"] = conv;

  Json bounds = Json::array();
  for (const auto& r : check_bounds(last)) bounds.push_back(bound_json(r));
  j["bounds"] = bounds;

  // Linearization only for static equilibria of the repulsive undirected loop.
  Json spectrum = nullptr;
  std::string why;
  if (c.directed) {
    why = "directed ring";
  } else if (c.law != ControlLaw::Repulsive) {
    why = "consensus law";
  } else {
    try {
      const auto r = classify_equilibrium(last, g);
      spectrum = {{"psi", spectrum_json(r.psi)},
                  {"phi", spectrum_json(r.phi)},
                  {"verdict", to_string(r.verdict)},
                  {"residual", r.residual}};
    } catch (const DomainError& e) {
      why = e.what();
    }
  }
  j["spectrum"] = spectrum;
  if (spectrum.is_null()) j["spectrum_skipped"] = why;
  j["final_state_rad"] = angles_json(last);
  return j;
}

std::string render_paths_svg(const Trajectory& tr, const std::string& title) {
  constexpr double kWidth = 1000.0, kHeight = 640.0, kRadius = 210.0;
  constexpr double kCy = 310.0;
  constexpr double kCx[2] = {250.0, 750.0};
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

  // Panel 0 looks down from +z, panel 1 up from -z (x mirrored).
  const auto project = [&](const Vec3& p, int panel) {
    const double x = panel == 0 ? p.x() : -p.x();
    return std::pair<double, double>{kCx[panel] + kRadius * x, kCy - kRadius * p.y()};
  };
  const auto num = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return std::string(buf);
  };
  const auto pt = [&](double x, double y) { return num(x) + "," + num(y); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
    << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight)
    << "\" font-family=\"sans-serif\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << num(kWidth / 2) << "\" y=\"32\" text-anchor=\"middle\" font-size=\"18\">"
    << title << "</text>\n";

  for (int panel = 0; panel < 2; ++panel) {
    const double cx = kCx[panel];
    s << "<g class=\"hemisphere\" id=\"" << (panel == 0 ? "north" : "south") << "\">\n";
    s << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(kCy) << "\" r=\"" << num(kRadius)
      << "\" fill=\"#f7f7f7\" stroke=\"black\"/>\n";
    for (int lat : {30, 60}) {
      const double r = kRadius * std::cos(lat * kPi / 180.0);
      s << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(kCy) << "\" r=\"" << num(r)
        << "\" fill=\"none\" stroke=\"#cccccc\"/>\n";
      s << "<text x=\"" << num(cx + 4) << "\" y=\"" << num(kCy - r - 3)
        << "\" font-size=\"11\" fill=\"#777777\">" << (panel == 0 ? "" : "-") << lat
        << "&#176;</text>\n";
    }
    for (int lon = 0; lon < 360; lon += 30) {
      const double a = lon * kPi / 180.0;
      const auto [x, y] = project(Vec3(std::cos(a), std::sin(a), 0.0), panel);
      s << "<line x1=\"" << num(cx) << "\" y1=\"" << num(kCy) << "\" x2=\"" << num(x)
        << "\" y2=\"" << num(y) << "\" stroke=\"#dddddd\"/>\n";
      if (lon % 90 == 0) {
        const auto [lx, ly] = project(Vec3(1.08 * std::cos(a), 1.08 * std::sin(a), 0.0), panel);
        s << "<text x=\"" << num(lx) << "\" y=\"" << num(ly + 4)
          << "\" text-anchor=\"middle\" font-size=\"12\">" << lon << "&#176;</text>\n";
      }
    }
    s << "<text x=\"" << num(cx) << "\" y=\"" << num(kCy + kRadius + 40)
      << "\" text-anchor=\"middle\" font-size=\"14\">"
      << (panel == 0 ? "northern hemisphere (viewed from +z)"
                     : "southern hemisphere (viewed from -z)")
      << "</text>\n";
    s << "</g>\n";
  }

  if (tr.size() > 0) {
    const std::size_t n = tr.states.front().size();
    const std::size_t stride = std::max<std::size_t>(1, (tr.size() + 1499) / 1500);
    for (std::size_t i = 0; i < n; ++i) {
      const char* color = palette[i % 10];
      s << "<g class=\"agent\" id=\"agent-" << i + 1 << "\" stroke=\"" << color << "\">\n";
      std::string points;
      int current = -1;
      const auto flush = [&] {
        if (points.find(' ') != std::string::npos) {
          s << "<polyline fill=\"none\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n";
        }
        points.clear();
      };
      for (std::size_t k = 0; k < tr.size(); k += stride) {
        const Vec3& p = tr.states[k][i].vec();
        const int panel = p.z() >= 0.0 ? 0 : 1;
        if (panel != current) flush();
        current = panel;
        const auto [x, y] = project(p, panel);
        points += (points.empty() ? "" : " ") + pt(x, y);
      }
      const Vec3& last = tr.states.back()[i].vec();
      const int last_panel = last.z() >= 0.0 ? 0 : 1;
      if (last_panel != current) flush();
      const auto [ex, ey] = project(last, last_panel);
      points += (points.empty() ? "" : " ") + pt(ex, ey);
      flush();

      // Start: five-pointed star. End: open circle.
      const Vec3& first = tr.states.front()[i].vec();
      const auto [sx, sy] = project(first, first.z() >= 0.0 ? 0 : 1);
      std::string star;
      for (int m = 0; m < 10; ++m) {
        const double r = m % 2 == 0 ? 8.0 : 3.2;
        const double a = -kPi / 2 + m * kPi / 5;
        star += (m == 0 ? "" : " ") + pt(sx + r * std::cos(a), sy + r * std::sin(a));
      }
      s << "<polygon class=\"start\" points=\"" << star << "\" fill=\"" << color << "\"/>\n";
      char end[160];
      std::snprintf(end, sizeof end,
                    "<circle class=\"end\" cx=\"%.2f\" cy=\"%.2f\" r=\"5\" fill=\"white\" "
                    "stroke-width=\"2\"/>\n",
                    ex, ey);
      s << end;
      s << "</g>\n";
      s << "<text x=\"" << 20 + 80 * (i % 12) << "\" y=\"" << kHeight - 14 - 18 * (i / 12)
        << "\" font-size=\"12\" fill=\"" << color << "\">agent " << i + 1 << "</text>\n";
    }
  }
  s << "</svg>\n";
  return s.str();
}

Json run(const ExperimentSpec& spec, const fs::path& out_dir, std::ostream* log) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + out_dir.string());
  return std::visit(
      [&](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SimulateSpec>) return run_simulate(s, out_dir, log);
        if constexpr (std::is_same_v<T, SweepSpec>) return run_sweep(s, out_dir, log);
        if constexpr (std::is_same_v<T, ClassifySpec>) return run_classify(s, out_dir, log);
        if constexpr (std::is_same_v<T, AuditSpec>) return run_audit(s, out_dir, log);
      },
      spec);
}

}  // namespace ringform::app
