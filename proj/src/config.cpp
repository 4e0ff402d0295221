#include "fdbeam/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fdbeam {

using nlohmann::json;

namespace {

json geometry_to_json(const ArrayGeometry& g) {
  return {{"rows", g.rows},
          {"cols", g.cols},
          {"spacing", g.spacing},
          {"origin", {g.origin.x(), g.origin.y(), g.origin.z()}}};
}

ArrayGeometry geometry_from_json(const json& j) {
  ArrayGeometry g;
  g.rows = j.value("rows", g.rows);
  g.cols = j.value("cols", g.cols);
  g.spacing = j.value("spacing", g.spacing);
  if (j.contains("origin")) {
    const auto& o = j.at("origin");
    if (!o.is_array() || o.size() != 3) throw FormatError("config: geometry origin must be [x, y, z]");
    g.origin = {o[0].get<double>(), o[1].get<double>(), o[2].get<double>()};
  }
  g.validate();
  return g;
}

json grid_to_json(const DirectionGrid& g) {
  return {{"az_deg", {rad2deg(g.az_start), rad2deg(g.az_stop), rad2deg(g.az_step)}},
          {"el_deg", {rad2deg(g.el_start), rad2deg(g.el_stop), rad2deg(g.el_step)}}};
}

DirectionGrid grid_from_json(const json& j) {
  auto triple = [&](const char* key) {
    const auto& t = j.at(key);
    if (!t.is_array() || t.size() != 3) throw FormatError(std::string("config: ") + key + " must be [start, stop, step]");
    return std::array<double, 3>{deg2rad(t[0].get<double>()), deg2rad(t[1].get<double>()), deg2rad(t[2].get<double>())};
  };
  const auto az = triple("az_deg");
  const auto el = triple("el_deg");
  DirectionGrid g{az[0], az[1], az[2], el[0], el[1], el[2]};
  coverage_grid(g);  // throws on a lattice that does not tile
  return g;
}

json model_to_json(const SIChannelModel& m) {
  struct Visitor {
    json operator()(const RayleighModel&) const { return {{"type", "rayleigh"}}; }
    json operator()(const SphericalNearField& s) const {
      return {{"type", "spherical"}, {"separation_wavelengths", s.separation_wavelengths}};
    }
    json operator()(const FarFieldRays& f) const {
      return {{"type", "farfield"}, {"min_rays", f.min_rays}, {"max_rays", f.max_rays}};
    }
    json operator()(const RicianMixture& r) const {
      return {{"type", "rician"},
              {"kappa", r.kappa},
              {"separation_wavelengths", r.near_field.separation_wavelengths},
              {"min_rays", r.far_field.min_rays},
              {"max_rays", r.far_field.max_rays}};
    }
  };
  return std::visit(Visitor{}, m);
}

SIChannelModel model_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  auto rays = [&] {
    FarFieldRays f;
    f.min_rays = j.value("min_rays", f.min_rays);
    f.max_rays = j.value("max_rays", f.max_rays);
    if (f.min_rays < 1 || f.max_rays < f.min_rays) throw FormatError("config: need 1 <= min_rays <= max_rays");
    return f;
  };
  auto near = [&] {
    SphericalNearField s;
    s.separation_wavelengths = j.value("separation_wavelengths", s.separation_wavelengths);
    if (!(s.separation_wavelengths > 0.0)) throw FormatError("config: separation must be positive");
    return s;
  };
  if (type == "rayleigh") return RayleighModel{};
  if (type == "spherical") return near();
  if (type == "farfield") return rays();
  if (type == "rician") {
    RicianMixture r;
    // Either a linear "kappa" or "kappa_db"; a null kappa_db stands for kappa = 0 (pure far field).
    if (j.contains("kappa") && j.contains("kappa_db")) throw FormatError("config: give kappa or kappa_db, not both");
    if (j.contains("kappa")) {
      r.kappa = j.at("kappa").get<double>();
    } else {
      r.kappa = j.contains("kappa_db") && j.at("kappa_db").is_null() ? 0.0 : db_to_pow(j.value("kappa_db", 0.0));
    }
    if (!(r.kappa >= 0.0)) throw FormatError("config: kappa must be nonnegative");
    r.near_field = near();
    r.far_field = rays();
    return r;
  }
  throw FormatError("config: unknown si_model type '" + type + "'");
}

template <typename T>
std::vector<T> list_of(const json& j, const char* key, const std::vector<T>& fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array()) return {v.get<T>()};
  return v.get<std::vector<T>>();
}

std::vector<std::optional<double>> optional_list(const json& j, const char* key,
                                                 const std::vector<std::optional<double>>& fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  std::vector<std::optional<double>> out;
  auto one = [](const json& e) -> std::optional<double> {
    if (e.is_null()) return std::nullopt;
    return e.get<double>();
  };
  if (!v.is_array()) {
    out.push_back(one(v));
  } else {
    for (const auto& e : v) out.push_back(one(e));
  }
  return out;
}

json optional_list_to_json(const std::vector<std::optional<double>>& v) {
  json out = json::array();
  for (const auto& e : v) out.push_back(e ? json(*e) : json(nullptr));
  return out;
}

StepRule step_rule_from_string(const std::string& s) {
  if (s == "accelerated") return StepRule::accelerated;
  if (s == "diminishing") return StepRule::diminishing;
  throw FormatError("config: unknown step_rule '" + s + "'");
}

}  // namespace

void ExperimentConfig::validate() const {
  geometry_tx.validate();
  geometry_rx.validate();
  coverage_grid(grid_tx);
  coverage_grid(grid_rx);
  if (dense_n_az < 2 || dense_n_el < 2) throw FormatError("config: dense grid needs at least 2 points per axis");
  if (axes.delta_db.empty() || axes.sigma_db.empty() || axes.b_phs.empty() || axes.b_amp.empty() ||
      axes.eps_tilde_db.empty() || axes.eps_eval_db.empty()) {
    throw FormatError("config: every sweep axis needs at least one value");
  }
  for (double d : axes.delta_db) {
    if (!(d <= 0.0)) throw FormatError("config: delta_db values must be <= 0");
  }
  for (int b : axes.b_phs) {
    if (b < 0 || b > 30) throw FormatError("config: b_phs out of range");
  }
  for (int b : axes.b_amp) {
    if (b < 0 || b > 30) throw FormatError("config: b_amp out of range");
  }
  if (!(lsb_db > 0.0)) throw FormatError("config: lsb_db must be positive");
  if (trials < 1) throw FormatError("config: trials must be >= 1");
  if (passes < 1) throw FormatError("config: passes must be >= 1");
  if (eval.n_error_draws < 1) throw FormatError("config: n_error_draws must be >= 1");
  if (link.n_user_draws < 1) throw FormatError("config: n_user_draws must be >= 1");
  if (benchmark.nbar < 1) throw FormatError("config: benchmark nbar must be >= 1");
  solver.validate();
}

ExperimentConfig config_from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("config: invalid JSON: ") + e.what());
  }
  try {
    static const std::vector<std::string> known = {
        "geometry_tx", "geometry_rx", "grid_tx", "grid_rx", "dense_grid", "si_model", "axes",        "quantization",
        "solver",      "passes",      "benchmark", "eval", "link",       "trials",   "master_seed", "benchmark_only"};
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
        throw FormatError("config: unknown key '" + it.key() + "'");
      }
    }
    ExperimentConfig c;
    if (j.contains("geometry_tx")) c.geometry_tx = geometry_from_json(j.at("geometry_tx"));
    c.geometry_rx = j.contains("geometry_rx") ? geometry_from_json(j.at("geometry_rx")) : c.geometry_tx;
    if (j.contains("grid_tx")) c.grid_tx = grid_from_json(j.at("grid_tx"));
    c.grid_rx = j.contains("grid_rx") ? grid_from_json(j.at("grid_rx")) : c.grid_tx;
    if (j.contains("dense_grid")) {
      c.dense_n_az = j.at("dense_grid").value("n_az", c.dense_n_az);
      c.dense_n_el = j.at("dense_grid").value("n_el", c.dense_n_el);
    }
    if (j.contains("si_model")) c.si_model = model_from_json(j.at("si_model"));
    if (j.contains("axes")) {
      const auto& a = j.at("axes");
      c.axes.delta_db = list_of(a, "delta_db", c.axes.delta_db);
      c.axes.sigma_db = list_of(a, "sigma_db", c.axes.sigma_db);
      c.axes.b_phs = list_of(a, "b_phs", c.axes.b_phs);
      c.axes.b_amp = list_of(a, "b_amp", c.axes.b_amp);
      c.axes.eps_tilde_db = optional_list(a, "eps_tilde_db", c.axes.eps_tilde_db);
      c.axes.eps_eval_db = optional_list(a, "eps_eval_db", c.axes.eps_eval_db);
    }
    if (j.contains("quantization")) {
      const auto& q = j.at("quantization");
      c.lsb_db = q.value("lsb_db", c.lsb_db);
      if (q.contains("amp_mode")) c.amp_mode = amp_mode_from_string(q.at("amp_mode").get<std::string>());
    }
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      c.solver.max_iters = s.value("max_iters", c.solver.max_iters);
      c.solver.dykstra_iters = s.value("dykstra_iters", c.solver.dykstra_iters);
      c.solver.feas_tol = s.value("feas_tol", c.solver.feas_tol);
      c.solver.obj_tol = s.value("obj_tol", c.solver.obj_tol);
      if (s.contains("step_rule")) c.solver.step_rule = step_rule_from_string(s.at("step_rule").get<std::string>());
    }
    c.passes = j.value("passes", c.passes);
    if (j.contains("benchmark")) {
      const auto& b = j.at("benchmark");
      if (b.contains("b_phs") && !b.at("b_phs").is_null()) c.benchmark.b_phs = b.at("b_phs").get<int>();
      if (b.contains("b_amp") && !b.at("b_amp").is_null()) c.benchmark.b_amp = b.at("b_amp").get<int>();
      if (b.contains("window_layout")) c.benchmark.layout = window_layout_from_string(b.at("window_layout").get<std::string>());
      c.benchmark.nbar = b.value("nbar", c.benchmark.nbar);
    }
    if (j.contains("eval")) c.eval.n_error_draws = j.at("eval").value("n_error_draws", c.eval.n_error_draws);
    if (j.contains("link")) {
      const auto& l = j.at("link");
      c.link.snr_db = list_of(l, "snr_db", c.link.snr_db);
      c.link.inr_db = list_of(l, "inr_db", c.link.inr_db);
      c.link.n_user_draws = l.value("n_user_draws", c.link.n_user_draws);
    }
    c.trials = j.value("trials", c.trials);
    c.master_seed = j.value("master_seed", c.master_seed);
    c.benchmark_only = j.value("benchmark_only", c.benchmark_only);
    c.validate();
    return c;
  } catch (const FormatError&) {
    throw;
  } catch (const json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  } catch (const Error& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_string(ss.str());
}

std::string to_json_string(const ExperimentConfig& c) {
  json j;
  j["geometry_tx"] = geometry_to_json(c.geometry_tx);
  j["geometry_rx"] = geometry_to_json(c.geometry_rx);
  j["grid_tx"] = grid_to_json(c.grid_tx);
  j["grid_rx"] = grid_to_json(c.grid_rx);
  j["dense_grid"] = {{"n_az", c.dense_n_az}, {"n_el", c.dense_n_el}};
  j["si_model"] = model_to_json(c.si_model);
  j["axes"] = {{"delta_db", c.axes.delta_db},
               {"sigma_db", c.axes.sigma_db},
               {"b_phs", c.axes.b_phs},
               {"b_amp", c.axes.b_amp},
               {"eps_tilde_db", optional_list_to_json(c.axes.eps_tilde_db)},
               {"eps_eval_db", optional_list_to_json(c.axes.eps_eval_db)}};
  j["quantization"] = {{"lsb_db", c.lsb_db}, {"amp_mode", to_string(c.amp_mode)}};
  j["solver"] = {{"max_iters", c.solver.max_iters},
                 {"dykstra_iters", c.solver.dykstra_iters},
                 {"feas_tol", c.solver.feas_tol},
                 {"obj_tol", c.solver.obj_tol},
                 {"step_rule", c.solver.step_rule == StepRule::accelerated ? "accelerated" : "diminishing"}};
  j["passes"] = c.passes;
  j["benchmark"] = {{"b_phs", c.benchmark.b_phs ? json(*c.benchmark.b_phs) : json(nullptr)},
                    {"b_amp", c.benchmark.b_amp ? json(*c.benchmark.b_amp) : json(nullptr)},
                    {"window_layout", to_string(c.benchmark.layout)},
                    {"nbar", c.benchmark.nbar}};
  j["eval"] = {{"n_error_draws", c.eval.n_error_draws}};
  j["link"] = {{"snr_db", c.link.snr_db}, {"inr_db", c.link.inr_db}, {"n_user_draws", c.link.n_user_draws}};
  j["trials"] = c.trials;
  j["master_seed"] = c.master_seed;
  j["benchmark_only"] = c.benchmark_only;
  return j.dump(2);
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json_string(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace fdbeam
