#include "glc/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "glc/experiments.hpp"
#include "glc/fieldio.hpp"
#include "glc/identity.hpp"
#include "glc/parallel.hpp"

namespace glc {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& section,
                std::initializer_list<const char*> keys) {
  if (!j.is_object())
    throw std::invalid_argument("config: section '" + section + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : keys)
      if (key == k) {
        known = true;
        break;
      }
    if (!known)
      throw std::invalid_argument("config: unknown key '" +
                                  (section.empty() ? key : section + "." + key) + "'");
  }
}

template <class T>
void get_if(const json& j, const char* key, T& target) {
  if (j.contains(key)) j.at(key).get_to(target);
}

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig c;
  check_keys(j, "",
             {"experiment", "seed", "output", "domain", "grid", "operator", "potential",
              "weights", "solver", "hum", "control", "ensemble", "identity", "mms"});
  if (!j.contains("seed"))
    throw std::invalid_argument("config: 'seed' is required (no wall-clock defaults)");
  j.at("seed").get_to(c.seed);
  get_if(j, "experiment", c.experiment);
  get_if(j, "output", c.output);

  if (j.contains("domain")) {
    const json& d = j.at("domain");
    check_keys(d, "domain", {"dimension", "lo", "hi", "horizon", "omega", "omega0"});
    get_if(d, "dimension", c.domain.dimension);
    get_if(d, "lo", c.domain.lo);
    get_if(d, "hi", c.domain.hi);
    get_if(d, "horizon", c.domain.horizon);
    get_if(d, "omega", c.domain.omega);
    get_if(d, "omega0", c.domain.omega0);
  }
  if (j.contains("grid")) {
    const json& d = j.at("grid");
    check_keys(d, "grid", {"nx", "ny", "nt"});
    get_if(d, "nx", c.grid.nx);
    get_if(d, "ny", c.grid.ny);
    get_if(d, "nt", c.grid.nt);
  }
  if (j.contains("operator")) {
    const json& d = j.at("operator");
    check_keys(d, "operator", {"b", "a_preset", "a_scale"});
    get_if(d, "b", c.op.b);
    get_if(d, "a_preset", c.op.a_preset);
    get_if(d, "a_scale", c.op.a_scale);
  }
  if (j.contains("potential")) {
    const json& d = j.at("potential");
    check_keys(d, "potential", {"preset", "r"});
    get_if(d, "preset", c.potential.preset);
    get_if(d, "r", c.potential.r);
  }
  if (j.contains("weights")) {
    const json& d = j.at("weights");
    check_keys(d, "weights", {"lambda", "mu", "lambda_list", "mu_list"});
    get_if(d, "lambda", c.weights.lambda);
    get_if(d, "mu", c.weights.mu);
    get_if(d, "lambda_list", c.weights.lambda_list);
    get_if(d, "mu_list", c.weights.mu_list);
  }
  if (j.contains("solver")) {
    const json& d = j.at("solver");
    check_keys(d, "solver", {"theta_scheme", "linear_tol", "max_linear_iters"});
    get_if(d, "theta_scheme", c.solver.theta_scheme);
    get_if(d, "linear_tol", c.solver.linear_tol);
    get_if(d, "max_linear_iters", c.solver.max_linear_iters);
  }
  if (j.contains("hum")) {
    const json& d = j.at("hum");
    check_keys(d, "hum", {"epsilon", "cg_tol", "cg_max_iters", "record_history"});
    get_if(d, "epsilon", c.hum.epsilon);
    get_if(d, "cg_tol", c.hum.cg_tol);
    get_if(d, "cg_max_iters", c.hum.cg_max_iters);
    get_if(d, "record_history", c.hum.record_history);
  }
  if (j.contains("control")) {
    const json& d = j.at("control");
    check_keys(d, "control",
               {"y0_preset", "y0_amplitude", "f_preset", "f_coeff", "loop_max_iters", "loop_tol",
                "damping"});
    get_if(d, "y0_preset", c.control.y0_preset);
    get_if(d, "y0_amplitude", c.control.y0_amplitude);
    get_if(d, "f_preset", c.control.f_preset);
    get_if(d, "f_coeff", c.control.f_coeff);
    get_if(d, "loop_max_iters", c.control.loop_max_iters);
    get_if(d, "loop_tol", c.control.loop_tol);
    get_if(d, "damping", c.control.damping);
  }
  if (j.contains("ensemble")) {
    const json& d = j.at("ensemble");
    check_keys(d, "ensemble", {"size", "single_mode", "r_list"});
    get_if(d, "size", c.ensemble.size);
    get_if(d, "single_mode", c.ensemble.single_mode);
    get_if(d, "r_list", c.ensemble.r_list);
  }
  if (j.contains("identity")) {
    const json& d = j.at("identity");
    check_keys(d, "identity", {"configs", "points", "m_list"});
    get_if(d, "configs", c.identity.configs);
    get_if(d, "points", c.identity.points);
    get_if(d, "m_list", c.identity.m_list);
  }
  if (j.contains("mms")) {
    const json& d = j.at("mms");
    check_keys(d, "mms", {"nx", "nt"});
    get_if(d, "nx", c.mms.nx);
    get_if(d, "nt", c.mms.nt);
  }
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("config: cannot open " + path);
  json j;
  try {
    is >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: JSON parse error in " + path + ": " + e.what());
  }
  return parse_config(j);
}

json config_to_json(const RunConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["seed"] = c.seed;
  j["output"] = c.output;
  j["domain"] = {{"dimension", c.domain.dimension}, {"lo", c.domain.lo},
                 {"hi", c.domain.hi},               {"horizon", c.domain.horizon},
                 {"omega", c.domain.omega},         {"omega0", c.domain.omega0}};
  j["grid"] = {{"nx", c.grid.nx}, {"ny", c.grid.ny}, {"nt", c.grid.nt}};
  j["operator"] = {{"b", c.op.b}, {"a_preset", c.op.a_preset}, {"a_scale", c.op.a_scale}};
  j["potential"] = {{"preset", c.potential.preset}, {"r", c.potential.r}};
  j["weights"] = {{"lambda", c.weights.lambda},
                  {"mu", c.weights.mu},
                  {"lambda_list", c.weights.lambda_list},
                  {"mu_list", c.weights.mu_list}};
  j["solver"] = {{"theta_scheme", c.solver.theta_scheme},
                 {"linear_tol", c.solver.linear_tol},
                 {"max_linear_iters", c.solver.max_linear_iters}};
  j["hum"] = {{"epsilon", c.hum.epsilon},
              {"cg_tol", c.hum.cg_tol},
              {"cg_max_iters", c.hum.cg_max_iters},
              {"record_history", c.hum.record_history}};
  j["control"] = {{"y0_preset", c.control.y0_preset},
                  {"y0_amplitude", c.control.y0_amplitude},
                  {"f_preset", c.control.f_preset},
                  {"f_coeff", c.control.f_coeff},
                  {"loop_max_iters", c.control.loop_max_iters},
                  {"loop_tol", c.control.loop_tol},
                  {"damping", c.control.damping}};
  j["ensemble"] = {{"size", c.ensemble.size},
                   {"single_mode", c.ensemble.single_mode},
                   {"r_list", c.ensemble.r_list}};
  j["identity"] = {{"configs", c.identity.configs},
                   {"points", c.identity.points},
                   {"m_list", c.identity.m_list}};
  j["mms"] = {{"nx", c.mms.nx}, {"nt", c.mms.nt}};
  return j;
}

void apply_override(RunConfig& c, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("override must look like key=value: " + assignment);
  std::string path = assignment.substr(0, eq);
  std::string val = assignment.substr(eq + 1);

  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t dot = path.find('.', start);
    if (dot == std::string::npos) {
      parts.push_back(path.substr(start));
      break;
    }
    parts.push_back(path.substr(start, dot - start));
    start = dot + 1;
  }

  json j = config_to_json(c);
  json* node = &j;
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i]))
      throw std::invalid_argument("override: unknown key '" + path + "'");
    node = &(*node)[parts[i]];
  }
  const std::string& key = parts.back();
  if (!node->contains(key)) throw std::invalid_argument("override: unknown key '" + path + "'");
  json& tgt = (*node)[key];
  try {
    if (tgt.is_string()) {
      tgt = val;
    } else if (tgt.is_boolean()) {
      tgt = (val == "true" || val == "1");
    } else if (tgt.is_number_float()) {
      tgt = std::stod(val);
    } else if (tgt.is_number_unsigned()) {
      tgt = std::stoull(val);
    } else if (tgt.is_number_integer()) {
      tgt = std::stoll(val);
    } else if (tgt.is_array()) {
      json arr = json::array();
      size_t pos = 0;
      bool ints = !tgt.empty() && tgt[0].is_number_integer();
      while (pos < val.size()) {
        size_t comma = val.find(',', pos);
        std::string item = val.substr(pos, comma == std::string::npos ? std::string::npos
                                                                      : comma - pos);
        if (ints)
          arr.push_back(std::stoll(item));
        else
          arr.push_back(std::stod(item));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      tgt = arr;
    } else {
      throw std::invalid_argument("override: unsupported value type for '" + path + "'");
    }
  } catch (const std::logic_error&) {
    throw std::invalid_argument("override: cannot parse value for '" + path + "'");
  }
  c = parse_config(j);
}

void emit_report(const RunReport& report, const std::string& prefix) {
  std::filesystem::path p(prefix);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());

  json j;
  j["config"] = config_to_json(report.config);
  j["experiment"] = report.config.experiment;
  j["version"] = report.version;
  j["wall_time_s"] = report.wall_time_s;
  j["payload"] = report.payload;
  std::ofstream os(prefix + ".json");
  if (!os) throw std::runtime_error("emit_report: cannot write " + prefix + ".json");
  os << j.dump(2) << "\n";

  for (const CsvTable& t : report.tables) {
    std::string path = prefix + "." + t.name + ".csv";
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr) throw std::runtime_error("emit_report: cannot write " + path);
    for (size_t i = 0; i < t.columns.size(); ++i)
      std::fprintf(f, "%s%s", t.columns[i].c_str(), i + 1 < t.columns.size() ? "," : "\n");
    for (const auto& row : t.rows) {
      for (size_t i = 0; i < row.size(); ++i)
        std::fprintf(f, "%.17g%s", row[i], i + 1 < row.size() ? "," : "\n");
    }
    std::fclose(f);
  }
}

namespace {

DomainSpec domain_from(const RunConfig& c) {
  DomainSpec d;
  d.dimension = c.domain.dimension;
  d.lo = c.domain.lo;
  d.hi = c.domain.hi;
  d.horizon = c.domain.horizon;
  auto unpack = [&](const std::vector<double>& v, Box& box, const char* name) {
    if (static_cast<int>(v.size()) != 2 * d.dimension)
      throw std::invalid_argument(std::string("config: ") + name +
                                  " needs 2*dimension entries (lo0, hi0[, lo1, hi1])");
    box.lo.clear();
    box.hi.clear();
    for (int i = 0; i < d.dimension; ++i) {
      box.lo.push_back(v[static_cast<size_t>(2 * i)]);
      box.hi.push_back(v[static_cast<size_t>(2 * i + 1)]);
    }
  };
  unpack(c.domain.omega, d.omega, "domain.omega");
  unpack(c.domain.omega0, d.omega0, "domain.omega0");
  d.validate();
  return d;
}

Grid grid_from(const RunConfig& c, const DomainSpec& d) {
  return d.dimension == 1 ? Grid::make(d, c.grid.nx, c.grid.nt)
                          : Grid::make(d, c.grid.nx, c.grid.ny, c.grid.nt);
}

SpatialOp spatial_from(const RunConfig& c, const Grid& g) {
  if (c.op.a_preset == "identity")
    return SpatialOp(g, coeff_identity(g.dim(), c.op.a_scale), false);
  if (c.op.a_preset == "anisotropic") {
    if (g.dim() == 1) return SpatialOp(g, coeff_identity(1, 2.0 * c.op.a_scale), false);
    return SpatialOp(
        g, coeff_constant(2, {c.op.a_scale, 0.3 * c.op.a_scale, 0.3 * c.op.a_scale, 2.0 * c.op.a_scale}),
        false);
  }
  throw std::invalid_argument("config: unknown operator.a_preset '" + c.op.a_preset + "'");
}

PotentialField potential_from(const RunConfig& c, const Grid& g) {
  if (c.potential.preset == "zero") return PotentialField(g);
  if (c.potential.preset == "uniform") return uniform_potential(g, c.potential.r);
  throw std::invalid_argument("config: unknown potential.preset '" + c.potential.preset + "'");
}

std::vector<Complex> y0_from(const RunConfig& c, const Grid& g) {
  std::vector<Complex> y0(static_cast<size_t>(g.num_nodes()));
  const double pi = 3.14159265358979323846;
  double x[2];
  int mode = 1;
  if (c.control.y0_preset == "sin")
    mode = 1;
  else if (c.control.y0_preset == "sin2")
    mode = 2;
  else
    throw std::invalid_argument("config: unknown control.y0_preset '" + c.control.y0_preset + "'");
  for (int i = 0; i < g.num_nodes(); ++i) {
    g.node_coords(i, x);
    double v = std::sin(mode * pi * (x[0] - g.domain.lo[0]) / g.domain.extent(0));
    if (g.dim() == 2) v *= std::sin(mode * pi * (x[1] - g.domain.lo[1]) / g.domain.extent(1));
    y0[static_cast<size_t>(i)] = c.control.y0_amplitude * v;
  }
  return y0;
}

Nonlinearity nonlin_from(const RunConfig& c) {
  if (c.control.f_preset == "zero") return nonlin_zero();
  if (c.control.f_preset == "linear") return nonlin_linear(c.control.f_coeff);
  if (c.control.f_preset == "slog14") return nonlin_s_logpow(0.25);
  if (c.control.f_preset == "slog1") return nonlin_s_logpow(1.0);
  throw std::invalid_argument("config: unknown control.f_preset '" + c.control.f_preset + "'");
}

SchemeConfig scheme_from(const RunConfig& c) {
  SchemeConfig s{c.solver.theta_scheme, c.solver.linear_tol, c.solver.max_linear_iters};
  s.validate();
  return s;
}

HUMConfig hum_from(const RunConfig& c) {
  HUMConfig h{c.hum.epsilon, c.hum.cg_tol, c.hum.cg_max_iters, c.hum.record_history};
  h.validate();
  return h;
}

void run_verify_identity(const RunConfig& c, RunReport& rep) {
  const int n = c.identity.configs;
  if (n < 1 || c.identity.points < 1 || c.identity.m_list.empty())
    throw std::invalid_argument("config: identity.{configs,points,m_list} must be positive");
  struct Row {
    double m, r2a2, s2a2, r1a6, s1a6, r1a8, s1a8;
  };
  std::vector<Row> rows(static_cast<size_t>(n));
  parallel_for(n, [&](int id) {
    Rng rng(Rng::mix(c.seed, static_cast<std::uint64_t>(id)));
    int m = c.identity.m_list[static_cast<size_t>(id) % c.identity.m_list.size()];
    RandomIdentityConfig rc = random_identity_config(m, rng);
    auto pts = sample_points(m + 1, c.identity.points, rng);
    ResidualResult rid = check_identity(rc.spec, rc.v, pts);
    auto [a6, a8] = check_factorization_parts(rc.spec, rc.v, pts);
    rows[static_cast<size_t>(id)] =
        Row{static_cast<double>(m), rid.residual, rid.scale, a6.residual, a6.scale, a8.residual,
            a8.scale};
  });
  CsvTable t;
  t.name = "residuals";
  t.columns = {"config_id", "m", "res_2a2", "scale_2a2", "res_1a6", "scale_1a6",
               "res_1a8",   "scale_1a8"};
  double worst = 0.0;
  for (int id = 0; id < n; ++id) {
    const Row& r = rows[static_cast<size_t>(id)];
    t.rows.push_back({static_cast<double>(id), r.m, r.r2a2, r.s2a2, r.r1a6, r.s1a6, r.r1a8,
                      r.s1a8});
    worst = std::max({worst, r.r2a2 / r.s2a2, r.r1a6 / r.s1a6, r.r1a8 / r.s1a8});
  }
  rep.tables.push_back(std::move(t));
  rep.payload["configs"] = n;
  rep.payload["max_relative_residual"] = worst;
  rep.payload["tolerance"] = 1e-9;
  rep.payload["pass"] = worst <= 1e-9;
  if (worst > 1e-9) throw std::runtime_error("verify-identity: residual above 1e-9 * scale");
}

void run_carleman_sweep(const RunConfig& c, RunReport& rep) {
  DomainSpec d = domain_from(c);
  Grid g = grid_from(c, d);
  SpatialOp a = spatial_from(c, g);
  PotentialField q = potential_from(c, g);
  CarlemanSweepConfig cfg;
  cfg.mu_list = c.weights.mu_list;
  cfg.lambda_list = c.weights.lambda_list;
  cfg.ensemble_size = c.ensemble.size;
  cfg.rng_seed = c.seed;
  cfg.b = c.op.b;
  auto rows = carleman_sweep(g, a, q.is_zero() ? nullptr : &q, cfg, scheme_from(c));
  CsvTable t;
  t.name = "sweep";
  t.columns = {"mu", "lambda", "samples_used", "C_emp"};
  double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
  for (const auto& r : rows) {
    t.rows.push_back({r.mu, r.lambda, static_cast<double>(r.samples_used), r.c_emp});
    cmin = std::min(cmin, r.c_emp);
    cmax = std::max(cmax, r.c_emp);
  }
  rep.tables.push_back(std::move(t));
  rep.payload["c_emp_min"] = cmin;
  rep.payload["c_emp_max"] = cmax;
  rep.payload["max_over_min"] = cmax / cmin;
}

void run_observability(const RunConfig& c, RunReport& rep) {
  DomainSpec d = domain_from(c);
  Grid g = grid_from(c, d);
  PotentialField q = potential_from(c, g);
  EnsembleSpec es{c.ensemble.size, c.seed, c.ensemble.single_mode, 4};
  ObservabilityReport r = observability_estimate(g, c.op.b, q, es, scheme_from(c));
  CsvTable t;
  t.name = "ratios";
  t.columns = {"sample_id", "r", "ratio"};
  for (size_t i = 0; i < r.ratios.size(); ++i)
    t.rows.push_back({static_cast<double>(i), r.r, r.ratios[i]});
  rep.tables.push_back(std::move(t));
  rep.payload["c_obs"] = r.c_obs;
  rep.payload["r"] = r.r;
  if (g.dim() == 1 && c.ensemble.single_mode) {
    double q_const = 0.0;
    if (c.potential.preset == "uniform" && c.potential.r != 0.0) {
      PotentialField unit = PotentialField::constant(g, Complex(1.0, 0.0));
      q_const = -c.potential.r / unit.norm_r();
    }
    rep.payload["oracle_ratio"] = oracle_observability_ratio(g, c.op.b, q_const, 1);
  }
}

void run_constant_vs_potential(const RunConfig& c, RunReport& rep) {
  DomainSpec d = domain_from(c);
  Grid g = grid_from(c, d);
  EnsembleSpec es{c.ensemble.size, c.seed, c.ensemble.single_mode, 4};
  PotentialFitReport r = constant_vs_potential(g, c.op.b, c.ensemble.r_list, es, scheme_from(c));
  CsvTable t;
  t.name = "ratios";
  t.columns = {"sample_id", "r", "ratio"};
  for (const auto& per : r.per_r)
    for (size_t i = 0; i < per.ratios.size(); ++i)
      t.rows.push_back({static_cast<double>(i), per.r, per.ratios[i]});
  rep.tables.push_back(std::move(t));
  json cs = json::array();
  bool nondecreasing = true;
  for (size_t i = 0; i < r.per_r.size(); ++i) {
    cs.push_back({{"r", r.per_r[i].r}, {"c_obs", r.per_r[i].c_obs}});
    if (i > 0 && r.per_r[i].c_obs < r.per_r[i - 1].c_obs * (1.0 - 1e-12)) nondecreasing = false;
  }
  rep.payload["c_obs_by_r"] = cs;
  rep.payload["fit_slope"] = r.slope;
  rep.payload["fit_intercept"] = r.intercept;
  rep.payload["ln_c_obs_nondecreasing"] = nondecreasing;
}

void run_null_control(const RunConfig& c, RunReport& rep, const std::string& prefix) {
  DomainSpec d = domain_from(c);
  Grid g = grid_from(c, d);
  SpatialOp a = spatial_from(c, g);
  PotentialField q = potential_from(c, g);
  std::vector<Complex> y0 = y0_from(c, g);
  HumResult res = hum_null_control(y0, g, c.op.b, a, q.is_zero() ? nullptr : &q, hum_from(c),
                                   scheme_from(c));
  double y0n = 0.0;
  for (const auto& z : y0) y0n += std::norm(z);
  y0n = std::sqrt(y0n * g.cell_volume());
  rep.payload["terminal_norm"] = res.report.terminal_norm;
  rep.payload["terminal_over_y0"] = res.report.terminal_norm / y0n;
  rep.payload["control_cost"] = res.report.control_cost;
  rep.payload["cg_iters"] = res.report.cg_iters;
  rep.payload["functional_value"] = res.report.functional_value;
  rep.payload["cg_residual"] = res.cg_residual;
  double bound = std::sqrt(2.0 * c.hum.epsilon * res.report.functional_value) +
                 c.hum.cg_tol * res.free_terminal_norm + 1e-12 * y0n;
  rep.payload["duality_bound"] = bound;
  rep.payload["duality_bound_holds"] = res.report.terminal_norm <= bound;
  if (c.hum.record_history) {
    CsvTable t;
    t.name = "cg_history";
    t.columns = {"iter", "rel_residual"};
    for (size_t i = 0; i < res.cg_history.size(); ++i)
      t.rows.push_back({static_cast<double>(i + 1), res.cg_history[i]});
    rep.tables.push_back(std::move(t));
  }
  write_field_binary(res.u, prefix + ".control.bin");
  if (!(res.report.terminal_norm <= bound))
    throw std::runtime_error("null-control: duality bound violated");
}

void run_semilinear(const RunConfig& c, RunReport& rep, const std::string& prefix) {
  DomainSpec d = domain_from(c);
  Grid g = grid_from(c, d);
  SpatialOp a = spatial_from(c, g);
  Nonlinearity f = nonlin_from(c);
  GrowthReport gr = growth_check(f);
  f.growth_ok = gr.pass;
  SemilinearOptions loop{c.control.loop_max_iters, c.control.damping, c.control.loop_tol};
  std::vector<Complex> y0 = y0_from(c, g);
  SemilinearResult res =
      semilinear_null_control(y0, g, c.op.b, a, f, hum_from(c), loop, scheme_from(c));
  double y0n = 0.0;
  for (const auto& z : y0) y0n += std::norm(z);
  y0n = std::sqrt(y0n * g.cell_volume());

  CsvTable t;
  t.name = "iterations";
  t.columns = {"iter", "delta", "terminal_norm", "cg_iters"};
  for (const auto& it : res.log)
    t.rows.push_back({static_cast<double>(it.iter), it.delta, it.terminal_norm,
                      static_cast<double>(it.cg_iters)});
  rep.tables.push_back(std::move(t));

  rep.payload["growth_check_pass"] = gr.pass;
  rep.payload["growth_ratios"] = gr.ratios;
  rep.payload["converged"] = res.converged;
  rep.payload["iterations"] = res.log.size();
  rep.payload["terminal_norm"] = res.report.terminal_norm;
  rep.payload["terminal_over_y0"] = res.report.terminal_norm / y0n;
  rep.payload["control_cost"] = res.report.control_cost;
  write_field_binary(res.u, prefix + ".control.bin");
  if (!res.converged)
    throw std::runtime_error("semilinear-control: fixed point did not converge");
}

void run_mms(const RunConfig& c, RunReport& rep) {
  DomainSpec d = domain_from(c);
  const double pi = 3.14159265358979323846;
  const double L = d.extent(0);
  const double lo = d.lo[0];
  const double b = c.op.b;
  const double scale = c.op.a_scale;
  if (c.op.a_preset != "identity")
    throw std::invalid_argument("mms: only the identity coefficient preset has an analytic source");
  const double ly = d.dimension == 2 ? d.extent(1) : 1.0;
  const double lo1 = d.dimension == 2 ? d.lo[1] : 0.0;
  const int dim = d.dimension;
  auto sol = [=](double t, const double* x) {
    double v = std::sin(pi * (x[0] - lo) / L);
    if (dim == 2) v *= std::sin(pi * (x[1] - lo1) / ly);
    return Complex(1.0, 0.5) * std::exp(-t) * v;
  };
  double lap = (pi / L) * (pi / L) + (dim == 2 ? (pi / ly) * (pi / ly) : 0.0);
  auto src = [=](double t, const double* x) {
    // g = (1+ib) y_t - scale * laplace y  for y = e^{-t} (1 + i/2) sin...
    return (Complex(-1.0, -b) + scale * lap) * sol(t, x);
  };
  MmsCase mms{sol, src, b, coeff_identity(dim, scale), false};
  MmsResult r = mms_order(d, mms, c.mms.nx, c.mms.nt, scheme_from(c));
  CsvTable t;
  t.name = "orders";
  t.columns = {"direction", "level", "error"};
  for (int k = 0; k < 3; ++k) {
    t.rows.push_back({0.0, static_cast<double>(k), r.err_space[static_cast<size_t>(k)]});
    t.rows.push_back({1.0, static_cast<double>(k), r.err_time[static_cast<size_t>(k)]});
  }
  rep.tables.push_back(std::move(t));
  rep.payload["order_space"] = r.order_space;
  rep.payload["order_time"] = r.order_time;
  rep.payload["monotone"] = r.monotone;
}

}  // namespace

RunReport run_experiment(const RunConfig& config) {
  static const std::vector<std::string> kKnown = {
      "verify-identity", "carleman-sweep",   "observability", "constant-vs-potential",
      "null-control",    "semilinear-control", "mms"};
  bool known = false;
  for (const auto& k : kKnown) known = known || (k == config.experiment);
  if (!known)
    throw std::invalid_argument("config: unknown experiment '" + config.experiment + "'");

  RunReport rep;
  rep.config = config;
  auto t0 = std::chrono::steady_clock::now();
  if (config.experiment == "verify-identity")
    run_verify_identity(config, rep);
  else if (config.experiment == "carleman-sweep")
    run_carleman_sweep(config, rep);
  else if (config.experiment == "observability")
    run_observability(config, rep);
  else if (config.experiment == "constant-vs-potential")
    run_constant_vs_potential(config, rep);
  else if (config.experiment == "null-control")
    run_null_control(config, rep, config.output);
  else if (config.experiment == "semilinear-control")
    run_semilinear(config, rep, config.output);
  else if (config.experiment == "mms")
    run_mms(config, rep);
  auto t1 = std::chrono::steady_clock::now();
  rep.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
  return rep;
}

}  // namespace glc
