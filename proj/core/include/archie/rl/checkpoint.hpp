#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "archie/rl/sac.hpp"

namespace archie::rl {

inline constexpr char kCheckpointMagic[8] = {'A', 'R', 'C', 'H', 'L', 'A', 'B', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::uint64_t config_hash = 0;
  PolicyBundle bundle;
};

// Layout, all integers and floats little-endian:
//   magic[8] version:u32 config_hash:u64
//   5 x network header {n_dims:u32 dims:u32[n_dims] activation:u32}
//     for policy, q1, q2, q1_target, q2_target
//   f64 parameter blocks of those networks in the same order
//   log_alpha:f64
//   4 x Adam {steps:i64 m:f64[] v:f64[]} for policy, q1, q2, alpha
//   critic_updates:i64 actor_updates:i64 env_steps:i64
std::string encode_checkpoint(const Checkpoint& ckpt);
// Throws Error(kCheckpointFormat).
Checkpoint decode_checkpoint(const std::string& bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace archie::rl
