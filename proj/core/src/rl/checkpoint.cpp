#include "archie/rl/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "archie/common/error.hpp"
#include "archie/common/text.hpp"

namespace archie::rl {
namespace {

class Writer {
 public:
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void i64(std::int64_t v) { le(static_cast<std::uint64_t>(v), 8); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void f64s(std::span<const double> v) {
    for (double x : v) f64(x);
  }
  void raw(const char* p, std::size_t n) { out_.append(p, n); }
  std::string take() { return std::move(out_); }

 private:
  void le(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  std::int64_t i64() { return static_cast<std::int64_t>(le(8)); }
  double f64() { return std::bit_cast<double>(le(8)); }
  void f64s(std::span<double> v) {
    for (double& x : v) x = f64();
  }
  void raw(char* p, std::size_t n) {
    need(n);
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw Error(ErrorCode::kCheckpointFormat, "checkpoint is truncated");
  }
  std::uint64_t le(int bytes) {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + static_cast<std::size_t>(i)])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(bytes);
    return v;
  }
  const std::string& in_;
  std::size_t pos_ = 0;
};

void write_header(Writer& w, const Mlp& net) {
  w.u32(static_cast<std::uint32_t>(net.dims().size()));
  for (int d : net.dims()) w.u32(static_cast<std::uint32_t>(d));
  w.u32(Mlp::kActivationRelu);
}

std::vector<int> read_header(Reader& r) {
  const std::uint32_t n = r.u32();
  if (n < 2 || n > 64) throw Error(ErrorCode::kCheckpointFormat, "implausible layer count in checkpoint");
  std::vector<int> dims;
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t d = r.u32();
    if (d < 1 || d > (1u << 20)) throw Error(ErrorCode::kCheckpointFormat, "implausible layer width in checkpoint");
    dims.push_back(static_cast<int>(d));
  }
  if (r.u32() != Mlp::kActivationRelu) throw Error(ErrorCode::kCheckpointFormat, "unknown activation id");
  return dims;
}

void write_adam(Writer& w, const Adam& a) {
  w.i64(a.steps());
  w.f64s(a.m());
  w.f64s(a.v());
}

Adam read_adam(Reader& r, std::size_t n, double lr) {
  Adam a(n, {.lr = lr});
  a.set_steps(r.i64());
  r.f64s(a.m());
  r.f64s(a.v());
  return a;
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& ckpt) {
  const PolicyBundle& b = ckpt.bundle;
  const Mlp* nets[] = {&b.policy.net(), &b.q1, &b.q2, &b.q1_target, &b.q2_target};
  Writer w;
  w.raw(kCheckpointMagic, sizeof kCheckpointMagic);
  w.u32(kCheckpointVersion);
  w.u64(ckpt.config_hash);
  for (const Mlp* n : nets) write_header(w, *n);
  for (const Mlp* n : nets) w.f64s(n->params());
  w.f64(b.log_alpha);
  write_adam(w, b.policy_opt);
  write_adam(w, b.q1_opt);
  write_adam(w, b.q2_opt);
  write_adam(w, b.alpha_opt);
  w.i64(b.critic_updates);
  w.i64(b.actor_updates);
  w.i64(b.env_steps);
  return w.take();
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  char magic[sizeof kCheckpointMagic];
  r.raw(magic, sizeof magic);
  if (std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) {
    throw Error(ErrorCode::kCheckpointFormat, "bad checkpoint magic");
  }
  if (const auto v = r.u32(); v != kCheckpointVersion) {
    throw Error(ErrorCode::kCheckpointFormat, "unsupported checkpoint version " + std::to_string(v));
  }
  Checkpoint ckpt;
  ckpt.config_hash = r.u64();
  std::vector<int> dims[5];
  for (auto& d : dims) d = read_header(r);
  if (dims[0].back() % 2 != 0) throw Error(ErrorCode::kCheckpointFormat, "policy output must be even");
  if (dims[1] != dims[2] || dims[1] != dims[3] || dims[1] != dims[4]) {
    throw Error(ErrorCode::kCheckpointFormat, "critic and target shapes differ");
  }
  PolicyBundle& b = ckpt.bundle;
  b.policy.net() = Mlp(dims[0]);
  b.q1 = Mlp(dims[1]);
  b.q2 = Mlp(dims[2]);
  b.q1_target = Mlp(dims[3]);
  b.q2_target = Mlp(dims[4]);
  if (b.q1.input_dim() != b.policy.obs_dim() + b.policy.act_dim() || b.q1.output_dim() != 1) {
    throw Error(ErrorCode::kCheckpointFormat, "critic shape does not match the policy");
  }
  Mlp* nets[] = {&b.policy.net(), &b.q1, &b.q2, &b.q1_target, &b.q2_target};
  for (Mlp* n : nets) r.f64s(n->params());
  b.log_alpha = r.f64();
  // Learning rates are not persisted; the trainer re-applies its config.
  b.policy_opt = read_adam(r, b.policy.net().num_params(), 3e-4);
  b.q1_opt = read_adam(r, b.q1.num_params(), 3e-4);
  b.q2_opt = read_adam(r, b.q2.num_params(), 3e-4);
  b.alpha_opt = read_adam(r, 1, 3e-4);
  b.critic_updates = r.i64();
  b.actor_updates = r.i64();
  b.env_steps = r.i64();
  if (!r.done()) throw Error(ErrorCode::kCheckpointFormat, "trailing bytes after checkpoint");
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  write_file_atomic(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file(path)); }

}  // namespace archie::rl
