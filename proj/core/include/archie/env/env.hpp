#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "archie/common/rng.hpp"

namespace archie::env {

enum class EnvId {
  kGraspLift2D,
  kGraspSlide2D,
  kPlace2D,
  kNarrowTablePush,
  // Point agent on a plane whose goal is the origin; used for the
  // reward-weight imbalance experiment.
  kPointReach2D,
};

std::string_view to_string(EnvId id);
// Throws Error(kUnknownEnv).
EnvId env_id_from_string(std::string_view name);
std::vector<EnvId> all_env_ids();

struct EnvConfig {
  EnvId env_id = EnvId::kGraspLift2D;
  double dt = 0.01;
  int horizon = 1000;
  double gravity = 9.81;
  // Named geometry scalars. Missing keys take the env default, unknown keys
  // are rejected by validate().
  std::map<std::string, double> geometry;

  static EnvConfig defaults(EnvId id);
  // Throws Error(kInvalidConfig) on dt <= 0, horizon < 1, non-finite or
  // unknown geometry.
  void validate() const;
  double geom(const std::string& key) const;
};

struct SchemaEntry {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  // 0/1-valued variable, usable directly as a classifier.
  bool flag = false;
  // Plain-language meaning, shown to the reward author.
  std::string description;

  friend bool operator==(const SchemaEntry&, const SchemaEntry&) = default;
};

struct ObservationSchema {
  std::vector<SchemaEntry> entries;

  std::size_t size() const { return entries.size(); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  std::vector<std::string> names() const;

  friend bool operator==(const ObservationSchema&, const ObservationSchema&) = default;
};

// Flattened observation, ordered as the env's ObservationSchema.
struct Observation {
  std::vector<double> values;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct WorldState {
  Vec2 agent_pos;
  bool agent_grasping = false;
  // Plane envs: bottom-centre of the object rectangle. Push env: box centre.
  Vec2 object_pos;
  Vec2 object_vel;
  Vec2 grasp_offset;
  bool object_fallen = false;
  int t = 0;
};

struct EnvAction {
  Vec2 velocity_cmd;
  double grasp_cmd = 0.0;
};

struct StepInfo {
  bool contact = false;
  bool grasping = false;
  bool fallen = false;
  // True when this step consumed the last step of the horizon.
  bool horizon_reached = false;
};

class Env {
 public:
  explicit Env(EnvConfig config) : config_(std::move(config)) {}
  virtual ~Env() = default;

  Env(const Env&) = delete;
  Env& operator=(const Env&) = delete;

  const EnvConfig& config() const { return config_; }
  EnvId id() const { return config_.env_id; }
  int horizon() const { return config_.horizon; }

  virtual const ObservationSchema& observation_schema() const = 0;
  virtual int action_dim() const = 0;

  Observation reset(std::uint64_t seed);
  std::pair<Observation, StepInfo> step(const EnvAction& action);

  // Interprets a flat policy output: [vx, vy] or [vx, vy, grasp].
  EnvAction decode_action(std::span<const double> values) const;
  std::pair<Observation, StepInfo> step(std::span<const double> values) {
    return step(decode_action(values));
  }

  const WorldState& state() const { return state_; }
  Observation observe() const;
  // Test hook: installs an arbitrary state (t is preserved from the argument).
  void set_state(const WorldState& state);

 protected:
  virtual void sample_initial_state(Rng& rng, WorldState& state) const = 0;
  virtual StepInfo advance(const EnvAction& action, WorldState& state) const = 0;
  virtual void fill_observation(const WorldState& state, std::vector<double>& out) const = 0;

  EnvConfig config_;
  WorldState state_;
  bool was_reset_ = false;
};

// Throws Error(kInvalidConfig) or Error(kUnknownEnv).
std::unique_ptr<Env> make_env(const EnvConfig& config);

}  // namespace archie::env
