#include <bit>
#include <cstring>
#include <fstream>

#include <fmt/format.h>

#include "mdp/error.hpp"
#include "mdp/trainer.hpp"

namespace mdp::train {

namespace {

constexpr char kMagic[4] = {'M', 'D', 'P', 'C'};
constexpr std::uint8_t kVersion = 1;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void dims32(std::size_t v, const char* what) {
    if (v > UINT32_MAX) throw ContractError(std::string("checkpoint: ") + what + " too large");
    u32(static_cast<std::uint32_t>(v));
  }
  void data(const Tensor2D& t) {
    for (double v : t.data()) f64(v);
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    if (in_.size() - pos_ < n) {
      throw LengthError(fmt::format("checkpoint truncated while reading {} at byte {}", what, pos_));
    }
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8(const char* what) { return take(1, what)[0]; }
  std::uint32_t u32(const char* what) {
    auto b = take(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64(const char* what) {
    auto b = take(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
  std::string str(const char* what) {
    const std::uint32_t n = u32(what);
    auto b = take(n, what);
    return {reinterpret_cast<const char*>(b.data()), b.size()};
  }
  void data(Tensor2D& t, const char* what) {
    if ((in_.size() - pos_) / 8 < t.size()) {
      throw LengthError(fmt::format("checkpoint truncated while reading {}", what));
    }
    for (double& v : t.data()) v = f64(what);
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  const auto& params = ckpt.params;
  if (params.tensors.size() != model::kParamCount ||
      ckpt.adam.m.size() != model::kParamCount || ckpt.adam.v.size() != model::kParamCount) {
    throw ContractError("checkpoint: parameter/moment count mismatch");
  }
  Writer w;
  w.bytes(kMagic, 4);
  w.u8(kVersion);
  w.u8(0);
  w.u8(0);
  w.u8(0);
  w.str(train_config_to_json(ckpt.config));
  w.dims32(params.dims.raw_dim_v, "raw_dim_v");
  w.dims32(params.dims.raw_dim_a, "raw_dim_a");
  w.dims32(params.dims.d, "d");
  w.dims32(params.dims.steps, "T");
  w.u32(static_cast<std::uint32_t>(model::kParamCount));
  for (std::size_t i = 0; i < model::kParamCount; ++i) {
    const Tensor2D& t = params.tensors[i];
    w.str(std::string(model::param_name(static_cast<model::ParamId>(i))));
    w.dims32(t.rows(), "rows");
    w.dims32(t.cols(), "cols");
    w.data(t);
  }
  w.u64(ckpt.adam.step);
  for (std::size_t i = 0; i < model::kParamCount; ++i) {
    if (!ckpt.adam.m[i].same_shape(params.tensors[i]) ||
        !ckpt.adam.v[i].same_shape(params.tensors[i])) {
      throw ContractError("checkpoint: optimizer moment shape mismatch");
    }
    w.data(ckpt.adam.m[i]);
    w.data(ckpt.adam.v[i]);
  }
  w.u32(ckpt.epoch);
  for (std::uint64_t word : ckpt.rng) w.u64(word);
  return w.take();
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.take(4, "magic");
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw FormatError("checkpoint: bad magic");
  const std::uint8_t version = r.u8("version");
  if (version != kVersion) {
    throw FormatError(fmt::format("checkpoint: unsupported version {}", version));
  }
  for (int i = 0; i < 3; ++i) {
    if (r.u8("padding") != 0) throw FormatError("checkpoint: nonzero padding");
  }
  Checkpoint ckpt;
  try {
    ckpt.config = train_config_from_json(r.str("config"));
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint config: ") + e.what());
  }
  auto& dims = ckpt.params.dims;
  dims.raw_dim_v = r.u32("raw_dim_v");
  dims.raw_dim_a = r.u32("raw_dim_a");
  dims.d = r.u32("d");
  dims.steps = r.u32("T");
  if (dims.d != ckpt.config.d || dims.steps != ckpt.config.steps) {
    throw FormatError("checkpoint: model dims disagree with the config snapshot");
  }
  const std::uint32_t count = r.u32("tensor count");
  if (count != model::kParamCount) {
    throw FormatError(fmt::format("checkpoint: expected {} tensors, found {}", model::kParamCount,
                                  count));
  }
  for (std::size_t i = 0; i < count; ++i) {
    const auto id = static_cast<model::ParamId>(i);
    const std::string name = r.str("tensor name");
    if (name != model::param_name(id)) {
      throw FormatError(fmt::format("checkpoint: tensor {} is '{}', expected '{}'", i, name,
                                    model::param_name(id)));
    }
    const std::size_t rows = r.u32("rows");
    const std::size_t cols = r.u32("cols");
    if (std::pair{rows, cols} != model::param_shape(dims, id)) {
      throw FormatError(fmt::format("checkpoint: tensor '{}' has shape ({}x{})", name, rows, cols));
    }
    Tensor2D t(rows, cols);
    r.data(t, "tensor data");
    ckpt.params.tensors.push_back(std::move(t));
  }
  ckpt.adam.step = r.u64("adam step");
  for (std::size_t i = 0; i < count; ++i) {
    Tensor2D m(ckpt.params.tensors[i].rows(), ckpt.params.tensors[i].cols());
    Tensor2D v(m.rows(), m.cols());
    r.data(m, "adam m");
    r.data(v, "adam v");
    ckpt.adam.m.push_back(std::move(m));
    ckpt.adam.v.push_back(std::move(v));
  }
  ckpt.epoch = r.u32("epoch");
  for (auto& word : ckpt.rng) word = r.u64("rng state");
  if (!r.done()) throw LengthError("checkpoint: trailing bytes");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const auto bytes = encode_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace mdp::train
