#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "ttpark/world.hpp"

namespace ttpark {

using nlohmann::json;

namespace {

// ---- reading --------------------------------------------------------------

class Field {
 public:
  Field(const json& node, std::string path) : node_(node), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ScenarioError("field '" + path_ + "': " + what);
  }

  /// Strict objects: every key must be in `allowed`, every allowed key present.
  void expect_object(std::initializer_list<const char*> allowed) const {
    if (!node_.is_object()) fail("expected an object");
    for (const auto& [key, _] : node_.items()) {
      if (std::ranges::none_of(allowed, [&](const char* k) { return key == k; })) {
        Field(node_, join(key)).fail("unknown key");
      }
    }
    for (const char* k : allowed) {
      if (!node_.contains(k)) Field(node_, join(k)).fail("missing");
    }
  }

  Field operator[](const char* key) const { return {node_.at(key), join(key)}; }
  Field operator[](std::size_t i) const {
    return {node_.at(i), path_ + "[" + std::to_string(i) + "]"};
  }

  double number() const {
    if (!node_.is_number()) fail("expected a number");
    const double v = node_.get<double>();
    if (!std::isfinite(v)) fail("must be finite");
    return v;
  }
  std::int64_t integer() const {
    if (!node_.is_number_integer()) fail("expected an integer");
    return node_.get<std::int64_t>();
  }
  std::string string() const {
    if (!node_.is_string()) fail("expected a string");
    return node_.get<std::string>();
  }
  std::size_t array_size() const {
    if (!node_.is_array()) fail("expected an array");
    return node_.size();
  }
  template <std::size_t N>
  std::array<double, N> fixed_array() const {
    if (array_size() != N) fail("expected " + std::to_string(N) + " elements");
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = (*this)[i].number();
    return out;
  }

 private:
  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& node_;
  std::string path_;
};

BodyDims read_body(const Field& f) {
  f.expect_object({"length", "width", "rear_overhang"});
  return {f["length"].number(), f["width"].number(), f["rear_overhang"].number()};
}

VehicleParams read_vehicle(const Field& f) {
  f.expect_object({"wheelbase", "trailer_length", "hitch_offset", "tractor_body", "trailer_body",
                   "max_steer", "max_hitch", "min_speed", "max_speed"});
  VehicleParams p;
  p.wheelbase = f["wheelbase"].number();
  p.trailer_length = f["trailer_length"].number();
  p.hitch_offset = f["hitch_offset"].number();
  p.tractor_body = read_body(f["tractor_body"]);
  p.trailer_body = read_body(f["trailer_body"]);
  p.max_steer = f["max_steer"].number();
  p.max_hitch = f["max_hitch"].number();
  p.min_speed = f["min_speed"].number();
  p.max_speed = f["max_speed"].number();
  return p;
}

SearchConfig read_planner(const Field& f) {
  f.expect_object({"xy_res", "psi_bins", "psi_t_bins", "primitive_len", "substep_len", "steer_set",
                   "reverse_penalty", "switch_penalty", "steer_change_penalty", "hitch_penalty",
                   "node_budget", "heuristic_weight", "goal_tol_scale", "pose_field_res", "clearance"});
  SearchConfig c;
  c.xy_res = f["xy_res"].number();
  c.psi_bins = static_cast<int>(f["psi_bins"].integer());
  c.psi_t_bins = static_cast<int>(f["psi_t_bins"].integer());
  c.primitive_len = f["primitive_len"].number();
  c.substep_len = f["substep_len"].number();
  const Field steer = f["steer_set"];
  c.steer_set.clear();
  for (std::size_t i = 0; i < steer.array_size(); ++i) c.steer_set.push_back(steer[i].number());
  c.reverse_penalty = f["reverse_penalty"].number();
  c.switch_penalty = f["switch_penalty"].number();
  c.steer_change_penalty = f["steer_change_penalty"].number();
  c.hitch_penalty = f["hitch_penalty"].number();
  c.node_budget = f["node_budget"].integer();
  c.heuristic_weight = f["heuristic_weight"].number();
  c.goal_tol_scale = f["goal_tol_scale"].number();
  c.pose_field_res = f["pose_field_res"].number();
  c.clearance = f["clearance"].number();
  return c;
}

TrackConfig read_controller(const Field& f) {
  f.expect_object({"controller", "dt", "q_diag", "r_diag", "nmpc_horizon", "nmpc_lambda",
                   "nmpc_iters", "nmpc_step", "dare_tol", "dare_max_iters", "cruise_speed"});
  TrackConfig c;
  try {
    c.controller = controller_from_string(f["controller"].string().c_str());
  } catch (const std::invalid_argument&) {
    f["controller"].fail("expected \"lqr\" or \"nmpc\"");
  }
  c.dt = f["dt"].number();
  c.q_diag = f["q_diag"].fixed_array<4>();
  c.r_diag = f["r_diag"].fixed_array<2>();
  c.nmpc_horizon = static_cast<int>(f["nmpc_horizon"].integer());
  c.nmpc_lambda = f["nmpc_lambda"].number();
  c.nmpc_iters = static_cast<int>(f["nmpc_iters"].integer());
  c.nmpc_step = f["nmpc_step"].number();
  c.dare_tol = f["dare_tol"].number();
  c.dare_max_iters = static_cast<int>(f["dare_max_iters"].integer());
  c.cruise_speed = f["cruise_speed"].number();
  return c;
}

// ---- writing --------------------------------------------------------------

json body_json(const BodyDims& b) {
  return {{"length", b.length}, {"width", b.width}, {"rear_overhang", b.rear_overhang}};
}

json to_json(const Scenario& sc) {
  json j;
  j["bounds"] = {{"min_x", sc.bounds.min_x},
                 {"min_y", sc.bounds.min_y},
                 {"max_x", sc.bounds.max_x},
                 {"max_y", sc.bounds.max_y}};
  const auto& v = sc.vehicle;
  j["vehicle"] = {{"wheelbase", v.wheelbase},          {"trailer_length", v.trailer_length},
                  {"hitch_offset", v.hitch_offset},    {"tractor_body", body_json(v.tractor_body)},
                  {"trailer_body", body_json(v.trailer_body)}, {"max_steer", v.max_steer},
                  {"max_hitch", v.max_hitch},          {"min_speed", v.min_speed},
                  {"max_speed", v.max_speed}};
  j["start"] = {{"x", sc.start.x()}, {"y", sc.start.y()}, {"psi", sc.start.psi()},
                {"psi_t", sc.start.psi_t()}};
  j["obstacles"] = json::array();
  for (const auto& ob : sc.obstacles) {
    j["obstacles"].push_back({{"x", ob.center().x()},
                              {"y", ob.center().y()},
                              {"heading", ob.center().heading()},
                              {"length", ob.length()},
                              {"width", ob.width()}});
  }
  j["spots"] = json::array();
  for (const auto& s : sc.spots) {
    j["spots"].push_back({{"id", s.id},
                          {"x", s.goal.x()},
                          {"y", s.goal.y()},
                          {"heading", s.goal.heading()},
                          {"pos_tol", s.pos_tol},
                          {"heading_tol", s.heading_tol}});
  }
  const auto& p = sc.planner_config;
  j["planner"] = {{"xy_res", p.xy_res},
                  {"psi_bins", p.psi_bins},
                  {"psi_t_bins", p.psi_t_bins},
                  {"primitive_len", p.primitive_len},
                  {"substep_len", p.substep_len},
                  {"steer_set", p.steer_set},
                  {"reverse_penalty", p.reverse_penalty},
                  {"switch_penalty", p.switch_penalty},
                  {"steer_change_penalty", p.steer_change_penalty},
                  {"hitch_penalty", p.hitch_penalty},
                  {"node_budget", p.node_budget},
                  {"heuristic_weight", p.heuristic_weight},
                  {"goal_tol_scale", p.goal_tol_scale},
                  {"pose_field_res", p.pose_field_res},
                  {"clearance", p.clearance}};
  const auto& c = sc.controller_config;
  j["controller"] = {{"controller", to_string(c.controller)},
                     {"dt", c.dt},
                     {"q_diag", c.q_diag},
                     {"r_diag", c.r_diag},
                     {"nmpc_horizon", c.nmpc_horizon},
                     {"nmpc_lambda", c.nmpc_lambda},
                     {"nmpc_iters", c.nmpc_iters},
                     {"nmpc_step", c.nmpc_step},
                     {"dare_tol", c.dare_tol},
                     {"dare_max_iters", c.dare_max_iters},
                     {"cruise_speed", c.cruise_speed}};
  return j;
}

std::string format_number(double v) {
  // dare_tol is 1e-9; keep small magnitudes readable and exact.
  char buf[64];
  if (v != 0.0 && std::abs(v) < 1e-4) {
    std::snprintf(buf, sizeof buf, "%.6e", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.6f", v);
  }
  return buf;
}

bool is_scalar(const json& j) { return !j.is_object() && !j.is_array(); }

void emit(const json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  if (j.is_object()) {
    out += "{\n";
    std::size_t i = 0;
    for (const auto& [key, value] : j.items()) {  // std::map keeps keys sorted
      out += inner + json(key).dump() + ": ";
      emit(value, indent + 1, out);
      out += (++i < j.size()) ? ",\n" : "\n";
    }
    out += pad + "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      out += "[]";
    } else if (std::ranges::all_of(j, is_scalar)) {
      out += "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ", ";
        emit(j[i], indent + 1, out);
      }
      out += "]";
    } else {
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out += inner;
        emit(j[i], indent + 1, out);
        out += (i + 1 < j.size()) ? ",\n" : "\n";
      }
      out += pad + "]";
    }
  } else if (j.is_number_float()) {
    out += format_number(j.get<double>());
  } else {
    out += j.dump();
  }
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

}  // namespace

Scenario load_scenario(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ScenarioError("parse error at line " + std::to_string(line_of(text, e.byte)) + ": " +
                        e.what());
  }

  const Field f(root, "");
  f.expect_object({"bounds", "vehicle", "start", "obstacles", "spots", "planner", "controller"});

  Scenario sc;
  const Field b = f["bounds"];
  b.expect_object({"min_x", "min_y", "max_x", "max_y"});
  sc.bounds = {b["min_x"].number(), b["min_y"].number(), b["max_x"].number(), b["max_y"].number()};

  sc.vehicle = read_vehicle(f["vehicle"]);

  const Field st = f["start"];
  st.expect_object({"x", "y", "psi", "psi_t"});
  sc.start = ArticulatedState(st["x"].number(), st["y"].number(), st["psi"].number(),
                              st["psi_t"].number());

  const Field obs = f["obstacles"];
  for (std::size_t i = 0; i < obs.array_size(); ++i) {
    const Field o = obs[i];
    o.expect_object({"x", "y", "heading", "length", "width"});
    const double len = o["length"].number();
    const double wid = o["width"].number();
    if (!(len > 0.0)) o["length"].fail("must be > 0");
    if (!(wid > 0.0)) o["width"].fail("must be > 0");
    sc.obstacles.emplace_back(Pose2(o["x"].number(), o["y"].number(), o["heading"].number()), len, wid);
  }

  const Field spots = f["spots"];
  for (std::size_t i = 0; i < spots.array_size(); ++i) {
    const Field s = spots[i];
    s.expect_object({"id", "x", "y", "heading", "pos_tol", "heading_tol"});
    ParkingSpot spot;
    spot.id = static_cast<int>(s["id"].integer());
    spot.goal = Pose2(s["x"].number(), s["y"].number(), s["heading"].number());
    spot.pos_tol = s["pos_tol"].number();
    spot.heading_tol = s["heading_tol"].number();
    sc.spots.push_back(spot);
  }

  sc.planner_config = read_planner(f["planner"]);
  sc.controller_config = read_controller(f["controller"]);

  validate_scenario(sc);
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

std::string save_scenario(const Scenario& sc) {
  std::string out;
  emit(to_json(sc), 0, out);
  out += "\n";
  return out;
}

}  // namespace ttpark
