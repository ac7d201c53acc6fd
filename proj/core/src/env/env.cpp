#include "archie/env/env.hpp"

#include <algorithm>
#include <cmath>

#include "archie/common/error.hpp"

namespace archie::env {
namespace {

struct EnvName {
  EnvId id;
  std::string_view name;
};

constexpr EnvName kEnvNames[] = {
    {EnvId::kGraspLift2D, "GraspLift2D"},
    {EnvId::kGraspSlide2D, "GraspSlide2D"},
    {EnvId::kPlace2D, "Place2D"},
    {EnvId::kNarrowTablePush, "NarrowTablePush"},
    {EnvId::kPointReach2D, "PointReach2D"},
};

double clamp_unit(double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "non-finite action component");
  return std::clamp(v, -1.0, 1.0);
}

double norm(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Defaults for the vertical plane shared by the three grasping tasks. The
// plane spans x in [-1, 1] and y in [0, 1] with the floor at y = 0.
std::map<std::string, double> plane_defaults() {
  return {
      {"x_min", -1.0},         {"x_max", 1.0},          {"y_min", 0.0},
      {"y_max", 1.0},          {"v_max", 1.0},          {"grasp_radius", 0.05},
      {"object_width", 0.10},  {"object_height", 0.05}, {"spawn_margin", 0.1},
      {"agent_x0", 0.0},       {"agent_y0", 0.5},       {"place_offset", 0.04},
  };
}

// Top-down view of a narrow table. Success is past table_length along x;
// leaving |y| <= table_width / 2 or |x| <= table_half_length means the box
// fell off.
std::map<std::string, double> push_defaults() {
  return {
      {"table_half_length", 0.6}, {"table_width", 0.2},      {"table_length", 0.5},
      {"table_height", 0.0},      {"agent_half_size", 0.025}, {"object_half_size", 0.05},
      {"v_max", 1.0},             {"contact_tolerance", 0.005}, {"agent_x_lo", -0.5},
      {"agent_x_hi", -0.4},       {"agent_y_spread", 0.05},   {"object_x_lo", -0.3},
      {"object_x_hi", 0.0},       {"object_y_spread", 0.02},
  };
}

std::map<std::string, double> point_defaults() {
  return {{"half_extent", 1.0}, {"v_max", 1.0}, {"spawn_margin", 0.1}};
}

std::map<std::string, double> geometry_defaults(EnvId id) {
  switch (id) {
    case EnvId::kGraspLift2D:
    case EnvId::kGraspSlide2D:
    case EnvId::kPlace2D:
      return plane_defaults();
    case EnvId::kNarrowTablePush:
      return push_defaults();
    case EnvId::kPointReach2D:
      return point_defaults();
  }
  return {};
}

// ---------------------------------------------------------------------------

class PlaneGraspEnv final : public Env {
 public:
  explicit PlaneGraspEnv(EnvConfig config) : Env(std::move(config)) {
    for (const auto& [key, value] : plane_defaults()) geo_[key] = config_.geom(key);
    const double w = geom("x_max") - geom("x_min");
    const double h = geom("y_max") - geom("y_min");
    const double diag = std::hypot(w, h);
    schema_.entries = {
        {"agent.x", geom("x_min"), geom("x_max"), false, "horizontal position of the agent"},
        {"agent.y", geom("y_min"), geom("y_max"), false, "height of the agent above the floor"},
        {"object.x", geom("x_min"), geom("x_max"), false, "horizontal position of the cube"},
        {"object.y", geom("y_min"), geom("y_max"), false, "height of the cube's bottom above the floor"},
        {"grasping", 0.0, 1.0, true, "1 while the agent holds the cube, else 0"},
        {"contact", 0.0, 1.0, true, "1 when the agent is within grasp range of the cube, else 0"},
        {"dist_agent_object", 0.0, diag, false, "distance between agent and cube"},
    };
  }

  const ObservationSchema& observation_schema() const override { return schema_; }
  int action_dim() const override { return 3; }

 protected:
  double geom(const char* key) const { return geo_.at(key); }

  void sample_initial_state(Rng& rng, WorldState& s) const override {
    const double margin = geom("spawn_margin");
    const double x_lo = geom("x_min") + margin;
    const double x_hi = geom("x_max") - margin;
    s = WorldState{};
    if (config_.env_id == EnvId::kPlace2D) {
      // Agent holds the object, both at the top of the plane.
      const double offset = geom("place_offset");
      const double y_top = geom("y_max") - margin;
      s.agent_pos = {rng.uniform(x_lo, x_hi - offset), y_top};
      s.grasp_offset = {offset, 0.0};
      s.object_pos = {s.agent_pos.x + offset, y_top};
      s.agent_grasping = true;
    } else {
      s.agent_pos = {geom("agent_x0"), geom("agent_y0")};
      s.object_pos = {rng.uniform(x_lo, x_hi), geom("y_min")};
    }
  }

  StepInfo advance(const EnvAction& a, WorldState& s) const override {
    const double dt = config_.dt;
    const double v_max = geom("v_max");
    const double x_min = geom("x_min"), x_max = geom("x_max");
    const double y_min = geom("y_min"), y_max = geom("y_max");

    // Grasp state changes use the pre-move configuration.
    if (s.agent_grasping && a.grasp_cmd <= 0.0) {
      s.agent_grasping = false;
      s.object_vel = {};
    } else if (!s.agent_grasping && a.grasp_cmd > 0.0 &&
               norm(s.agent_pos, s.object_pos) < geom("grasp_radius")) {
      s.agent_grasping = true;
      s.grasp_offset = {s.object_pos.x - s.agent_pos.x, s.object_pos.y - s.agent_pos.y};
      s.object_vel = {};
    }

    Vec2 next{s.agent_pos.x + a.velocity_cmd.x * v_max * dt,
              s.agent_pos.y + a.velocity_cmd.y * v_max * dt};
    if (s.agent_grasping) {
      // Both the agent and the carried object must stay inside the plane.
      const Vec2 off = s.grasp_offset;
      next.x = std::clamp(next.x, std::max(x_min, x_min - off.x), std::min(x_max, x_max - off.x));
      next.y = std::clamp(next.y, std::max(y_min, y_min - off.y), std::min(y_max, y_max - off.y));
      const Vec2 obj{next.x + off.x, next.y + off.y};
      s.object_vel = {(obj.x - s.object_pos.x) / dt, (obj.y - s.object_pos.y) / dt};
      s.object_pos = obj;
    } else {
      next.x = std::clamp(next.x, x_min, x_max);
      next.y = std::clamp(next.y, y_min, y_max);
      if (s.object_pos.y > y_min || s.object_vel.y != 0.0) {
        s.object_vel.x = 0.0;
        s.object_vel.y -= config_.gravity * dt;
        s.object_pos.y += s.object_vel.y * dt;
        if (s.object_pos.y <= y_min) {
          s.object_pos.y = y_min;
          s.object_vel = {};
        }
      }
    }
    s.agent_pos = next;

    StepInfo info;
    info.grasping = s.agent_grasping;
    info.contact = norm(s.agent_pos, s.object_pos) < geom("grasp_radius");
    return info;
  }

  void fill_observation(const WorldState& s, std::vector<double>& out) const override {
    const double d = norm(s.agent_pos, s.object_pos);
    out = {s.agent_pos.x,
           s.agent_pos.y,
           s.object_pos.x,
           s.object_pos.y,
           s.agent_grasping ? 1.0 : 0.0,
           d < geom("grasp_radius") ? 1.0 : 0.0,
           d};
  }

 private:
  ObservationSchema schema_;
  std::map<std::string, double, std::less<>> geo_;
};

// ---------------------------------------------------------------------------

class TablePushEnv final : public Env {
 public:
  explicit TablePushEnv(EnvConfig config) : Env(std::move(config)) {
    for (const auto& [key, value] : push_defaults()) geo_[key] = config_.geom(key);
    const double L = geom("table_half_length");
    const double half_w = geom("table_width") / 2.0;
    const double reach = geom("agent_half_size") + geom("object_half_size");
    schema_.entries = {
        {"agent.x", -L, L, false, "position of the agent along the table"},
        {"agent.y", -half_w, half_w, false, "position of the agent across the table"},
        {"object.x", -L - reach, L + reach, false, "position of the cube along the table"},
        {"object.y", -half_w - reach, half_w + reach, false, "position of the cube across the table"},
        {"object.fallen", 0.0, 1.0, true, "1 once the cube has dropped off the table (below table height), else 0"},
        {"contact", 0.0, 1.0, true, "1 when the agent touches the cube, else 0"},
        {"dist_agent_object", 0.0, std::hypot(2 * L + reach, 2 * half_w + reach), false,
         "distance between agent and cube"},
    };
  }

  const ObservationSchema& observation_schema() const override { return schema_; }
  int action_dim() const override { return 2; }

 protected:
  double geom(const char* key) const { return geo_.at(key); }

  void sample_initial_state(Rng& rng, WorldState& s) const override {
    s = WorldState{};
    const double ay = geom("agent_y_spread");
    const double oy = geom("object_y_spread");
    s.object_pos = {rng.uniform(geom("object_x_lo"), geom("object_x_hi")), rng.uniform(-oy, oy)};
    s.agent_pos = {rng.uniform(geom("agent_x_lo"), geom("agent_x_hi")), rng.uniform(-ay, ay)};
  }

  bool touching(const WorldState& s) const {
    if (s.object_fallen) return false;
    const double reach = geom("agent_half_size") + geom("object_half_size");
    const double gap = std::max(std::abs(s.object_pos.x - s.agent_pos.x) - reach,
                                std::abs(s.object_pos.y - s.agent_pos.y) - reach);
    return gap <= geom("contact_tolerance");
  }

  StepInfo advance(const EnvAction& a, WorldState& s) const override {
    const double dt = config_.dt;
    const double v_max = geom("v_max");
    const double L = geom("table_half_length");
    const double half_w = geom("table_width") / 2.0;
    const double reach = geom("agent_half_size") + geom("object_half_size");

    s.agent_pos.x = std::clamp(s.agent_pos.x + a.velocity_cmd.x * v_max * dt, -L, L);
    s.agent_pos.y = std::clamp(s.agent_pos.y + a.velocity_cmd.y * v_max * dt, -half_w, half_w);

    const Vec2 before = s.object_pos;
    if (!s.object_fallen) {
      // Kinematic pushing: separate overlapping boxes along the axis of least
      // penetration, moving only the object.
      const double dx = s.object_pos.x - s.agent_pos.x;
      const double dy = s.object_pos.y - s.agent_pos.y;
      const double px = reach - std::abs(dx);
      const double py = reach - std::abs(dy);
      if (px > 0.0 && py > 0.0) {
        if (px <= py) {
          s.object_pos.x += (dx >= 0.0 ? px : -px);
        } else {
          s.object_pos.y += (dy >= 0.0 ? py : -py);
        }
      }
      if (std::abs(s.object_pos.y) > half_w || std::abs(s.object_pos.x) > L) s.object_fallen = true;
    }
    s.object_vel = {(s.object_pos.x - before.x) / dt, (s.object_pos.y - before.y) / dt};

    StepInfo info;
    info.fallen = s.object_fallen;
    info.contact = touching(s);
    return info;
  }

  void fill_observation(const WorldState& s, std::vector<double>& out) const override {
    out = {s.agent_pos.x,
           s.agent_pos.y,
           s.object_pos.x,
           s.object_pos.y,
           s.object_fallen ? 1.0 : 0.0,
           touching(s) ? 1.0 : 0.0,
           norm(s.agent_pos, s.object_pos)};
  }

 private:
  ObservationSchema schema_;
  std::map<std::string, double, std::less<>> geo_;
};

// ---------------------------------------------------------------------------

class PointReachEnv final : public Env {
 public:
  explicit PointReachEnv(EnvConfig config)
      : Env(std::move(config)),
        extent_(config_.geom("half_extent")),
        step_(config_.geom("v_max") * config_.dt),
        margin_(config_.geom("spawn_margin")) {
    schema_.entries = {
        {"agent.x", -extent_, extent_, false, "horizontal position of the agent"},
        {"agent.y", -extent_, extent_, false, "vertical position of the agent"},
        {"dist_agent_origin", 0.0, std::sqrt(2.0) * extent_, false, "distance between the agent and the origin"},
    };
  }

  const ObservationSchema& observation_schema() const override { return schema_; }
  int action_dim() const override { return 2; }

 protected:
  void sample_initial_state(Rng& rng, WorldState& s) const override {
    s = WorldState{};
    const double lim = extent_ - margin_;
    s.agent_pos = {rng.uniform(-lim, lim), rng.uniform(-lim, lim)};
  }

  StepInfo advance(const EnvAction& a, WorldState& s) const override {
    s.agent_pos.x = std::clamp(s.agent_pos.x + a.velocity_cmd.x * step_, -extent_, extent_);
    s.agent_pos.y = std::clamp(s.agent_pos.y + a.velocity_cmd.y * step_, -extent_, extent_);
    return StepInfo{};
  }

  void fill_observation(const WorldState& s, std::vector<double>& out) const override {
    out = {s.agent_pos.x, s.agent_pos.y, std::hypot(s.agent_pos.x, s.agent_pos.y)};
  }

 private:
  ObservationSchema schema_;
  double extent_;
  double step_;
  double margin_;
};

}  // namespace

std::string_view to_string(EnvId id) {
  for (const auto& e : kEnvNames) {
    if (e.id == id) return e.name;
  }
  return "unknown";
}

EnvId env_id_from_string(std::string_view name) {
  for (const auto& e : kEnvNames) {
    if (e.name == name) return e.id;
  }
  throw Error(ErrorCode::kUnknownEnv, "unknown env_id '" + std::string(name) + "'");
}

std::vector<EnvId> all_env_ids() {
  std::vector<EnvId> ids;
  for (const auto& e : kEnvNames) ids.push_back(e.id);
  return ids;
}

EnvConfig EnvConfig::defaults(EnvId id) {
  EnvConfig c;
  c.env_id = id;
  c.geometry = geometry_defaults(id);
  return c;
}

void EnvConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::kInvalidConfig, "dt must be a positive finite number of seconds");
  }
  if (horizon < 1) throw Error(ErrorCode::kInvalidConfig, "horizon must be at least 1 step");
  if (!std::isfinite(gravity)) throw Error(ErrorCode::kInvalidConfig, "gravity must be finite");
  const auto known = geometry_defaults(env_id);
  for (const auto& [key, value] : geometry) {
    if (!known.contains(key)) {
      throw Error(ErrorCode::kInvalidConfig, "unknown geometry key '" + key + "' for " +
                                                 std::string(to_string(env_id)));
    }
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::kInvalidConfig, "geometry '" + key + "' is not finite");
    }
  }
}

double EnvConfig::geom(const std::string& key) const {
  if (auto it = geometry.find(key); it != geometry.end()) return it->second;
  const auto known = geometry_defaults(env_id);
  if (auto it = known.find(key); it != known.end()) return it->second;
  throw Error(ErrorCode::kInvalidConfig, "missing geometry '" + key + "'");
}

std::optional<std::size_t> ObservationSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> ObservationSchema::names() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.name);
  return out;
}

Observation Env::reset(std::uint64_t seed) {
  Rng rng(seed);
  sample_initial_state(rng, state_);
  state_.t = 0;
  was_reset_ = true;
  return observe();
}

std::pair<Observation, StepInfo> Env::step(const EnvAction& action) {
  if (!was_reset_) throw Error(ErrorCode::kNotReset, "step() called before reset()");
  if (state_.t >= config_.horizon) {
    throw Error(ErrorCode::kEpisodeExhausted,
                "episode exhausted after " + std::to_string(config_.horizon) + " steps");
  }
  EnvAction a;
  a.velocity_cmd = {clamp_unit(action.velocity_cmd.x), clamp_unit(action.velocity_cmd.y)};
  a.grasp_cmd = clamp_unit(action.grasp_cmd);
  StepInfo info = advance(a, state_);
  state_.t += 1;
  info.horizon_reached = state_.t == config_.horizon;
  return {observe(), info};
}

EnvAction Env::decode_action(std::span<const double> values) const {
  if (static_cast<int>(values.size()) != action_dim()) {
    throw Error(ErrorCode::kShapeMismatch, "action has " + std::to_string(values.size()) +
                                               " components, env expects " +
                                               std::to_string(action_dim()));
  }
  EnvAction a;
  a.velocity_cmd = {values[0], values[1]};
  if (values.size() > 2) a.grasp_cmd = values[2];
  return a;
}

Observation Env::observe() const {
  Observation obs;
  fill_observation(state_, obs.values);
  return obs;
}

void Env::set_state(const WorldState& state) {
  state_ = state;
  was_reset_ = true;
}

std::unique_ptr<Env> make_env(const EnvConfig& config) {
  config.validate();
  switch (config.env_id) {
    case EnvId::kGraspLift2D:
    case EnvId::kGraspSlide2D:
    case EnvId::kPlace2D:
      return std::make_unique<PlaneGraspEnv>(config);
    case EnvId::kNarrowTablePush:
      return std::make_unique<TablePushEnv>(config);
    case EnvId::kPointReach2D:
      return std::make_unique<PointReachEnv>(config);
  }
  throw Error(ErrorCode::kUnknownEnv, "unknown env_id");
}

}  // namespace archie::env
