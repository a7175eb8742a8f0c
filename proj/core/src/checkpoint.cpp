#include "fishergen/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "fishergen/errors.hpp"

namespace fishergen {

namespace {

constexpr char kMagic[4] = {'F', 'G', 'N', '1'};

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  void spec(const MlpSpec& s) {
    u32(static_cast<std::uint32_t>(s.layer_count()));
    for (std::size_t w : s.layer_widths) u32(static_cast<std::uint32_t>(w));
    for (Activation a : s.activations) u8(static_cast<std::uint8_t>(a));
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}
  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw FormatError("checkpoint: truncated file");
  }
  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{in_[pos_++]} << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{in_[pos_++]} << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::vector<double> f64s(std::uint64_t n) {
    need(n * 8);
    std::vector<double> v(n);
    for (double& x : v) x = f64();
    return v;
  }
  MlpSpec spec() {
    const std::uint32_t layers = u32();
    if (layers == 0 || layers > 1024) throw FormatError("checkpoint: implausible layer count");
    MlpSpec s;
    for (std::uint32_t i = 0; i <= layers; ++i) s.layer_widths.push_back(u32());
    for (std::uint32_t i = 0; i < layers; ++i) {
      const std::uint8_t a = u8();
      if (a > 1) throw FormatError("checkpoint: unknown activation code");
      s.activations.push_back(static_cast<Activation>(a));
    }
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& c) {
  Writer w;
  w.bytes(kMagic, 4);
  w.u32(kCheckpointVersion);
  const std::string text = serialize_config(c.config, false);
  w.u32(static_cast<std::uint32_t>(text.size()));
  w.bytes(text.data(), text.size());
  w.u8(static_cast<std::uint8_t>(c.model.variant()));
  w.spec(c.model.encoder_spec());
  w.spec(c.model.decoder_spec());
  const std::vector<double> flat = c.model.params().flatten();
  w.u64(flat.size());
  for (double x : flat) w.f64(x);
  w.u64(c.adam.step);
  w.u64(c.adam.m.size());
  for (double x : c.adam.m) w.f64(x);
  for (double x : c.adam.v) w.f64(x);
  w.u64(c.epoch);
  w.u64(c.rng.key);
  w.u64(c.rng.counter);
  return w.take();
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  if (r.str(4) != std::string(kMagic, 4)) throw FormatError("checkpoint: bad magic (expected FGN1)");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  }
  const std::uint32_t text_len = r.u32();
  RunConfig config;
  try {
    config = parse_config(r.str(text_len));
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint: bad config block: ") + e.what());
  }
  const std::uint8_t variant_code = r.u8();
  if (variant_code > 1) throw FormatError("checkpoint: unknown variant code");
  MlpSpec encoder = r.spec();
  MlpSpec decoder = r.spec();
  ParamStore params;
  try {
    params = ParamStore::zeros(encoder);
    params.append(ParamStore::zeros(decoder));
  } catch (const ShapeError& e) {
    throw FormatError(std::string("checkpoint: bad network spec: ") + e.what());
  }
  const std::uint64_t n = r.u64();
  if (n != params.flat_size()) throw FormatError("checkpoint: parameter count disagrees with specs");
  params.assign_flat(r.f64s(n));

  AdamState adam;
  adam.step = r.u64();
  const std::uint64_t moments = r.u64();
  if (moments != 0 && moments != n) throw FormatError("checkpoint: optimizer state size mismatch");
  adam.m = r.f64s(moments);
  adam.v = r.f64s(moments);
  const std::uint64_t epoch = r.u64();
  CounterRng::State rng;
  rng.key = r.u64();
  rng.counter = r.u64();
  if (!r.done()) throw FormatError("checkpoint: trailing bytes");

  try {
    GenerativeModel model(static_cast<Variant>(variant_code), std::move(encoder), std::move(decoder),
                          std::move(params));
    return Checkpoint{std::move(config), std::move(model), std::move(adam), epoch, rng};
  } catch (const ShapeError& e) {
    throw FormatError(std::string("checkpoint: inconsistent model: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  const std::vector<std::uint8_t> bytes = encode_checkpoint(checkpoint);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write checkpoint '" + tmp.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("checkpoint write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace fishergen
