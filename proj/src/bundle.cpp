// Copyright 2026 The Fovea Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fovea/bundle.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fovea/atomic_file.hpp"

namespace fovea {
namespace {

std::uint32_t crc_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  const char* p = bytes.data();
  size_t left = bytes.size();
  while (left > 0) {
    const uInt n = static_cast<uInt>(std::min<size_t>(left, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(p), n);
    p += n;
    left -= n;
  }
  return static_cast<std::uint32_t>(crc);
}

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u64(s.size());
    buf_.append(s);
  }
  void raw(std::string_view s) { buf_.append(s); }

  template <typename Derived>
  void vec(const Eigen::MatrixBase<Derived>& v) {
    u64(static_cast<std::uint64_t>(v.size()));
    for (Index i = 0; i < v.size(); ++i) f64(v(i));
  }
  void vec(const std::vector<double>& v) {
    u64(v.size());
    for (double x : v) f64(x);
  }
  void ivec(const std::vector<int>& v) {
    u64(v.size());
    for (int x : v) i32(x);
  }
  void mat(const Eigen::MatrixXd& m) {
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    for (Index r = 0; r < m.rows(); ++r)
      for (Index c = 0; c < m.cols(); ++c) f64(m(r, c));
  }

  const std::string& bytes() const { return buf_; }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(std::string_view bytes, std::string section) : bytes_(bytes), section_(std::move(section)) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<std::uint8_t>(bytes_[pos_++])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<std::uint8_t>(bytes_[pos_++])) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint64_t n = count(1);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  Eigen::VectorXd vec() {
    const std::uint64_t n = count(8);
    Eigen::VectorXd v(static_cast<Index>(n));
    for (Index i = 0; i < v.size(); ++i) v(i) = f64();
    return v;
  }
  std::vector<double> dvec() {
    const std::uint64_t n = count(8);
    std::vector<double> v(n);
    for (auto& x : v) x = f64();
    return v;
  }
  std::vector<int> ivec() {
    const std::uint64_t n = count(4);
    std::vector<int> v(n);
    for (auto& x : v) x = i32();
    return v;
  }
  Eigen::MatrixXd mat() {
    const std::uint64_t r = u64(), c = u64();
    if (c != 0 && r > (bytes_.size() - pos_) / 8 / c) fail("matrix size exceeds section");
    Eigen::MatrixXd m(static_cast<Index>(r), static_cast<Index>(c));
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j) m(i, j) = f64();
    return m;
  }

  void expect_end() const {
    if (pos_ != bytes_.size()) fail("trailing bytes");
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw BundleFormatError("bundle section '" + section_ + "': " + what);
  }

 private:
  void need(size_t n) const {
    if (bytes_.size() - pos_ < n) fail("unexpected end of section");
  }
  std::uint64_t count(size_t elem) {
    const std::uint64_t n = u64();
    if (n > (bytes_.size() - pos_) / elem) fail("length exceeds section");
    return n;
  }

  std::string_view bytes_;
  std::string section_;
  size_t pos_ = 0;
};

// ---- component codecs ----

void put(Writer& w, const SaabKernelSet& k) {
  w.i32(k.kernel_side);
  w.i32(k.input_channels);
  w.vec(k.dc_kernel);
  w.mat(k.ac_kernels);
  w.vec(k.eigenvalues);
  w.vec(k.patch_mean);
}

SaabKernelSet get_saab(Reader& r) {
  SaabKernelSet k;
  k.kernel_side = r.i32();
  k.input_channels = r.i32();
  k.dc_kernel = r.vec();
  k.ac_kernels = r.mat();
  k.eigenvalues = r.vec();
  k.patch_mean = r.vec();
  if (k.kernel_side < 0 || k.input_channels < 0) r.fail("negative Saab dimensions");
  if (k.fitted()) {
    const Index d = k.patch_dim();
    if (k.dc_kernel.size() != d || k.patch_mean.size() != d || (k.ac_kernels.rows() > 0 && k.ac_kernels.cols() != d) ||
        k.eigenvalues.size() != k.ac_kernels.rows())
      r.fail("inconsistent Saab kernel shapes");
  }
  return k;
}

void put(Writer& w, const RftResult& f) {
  w.i32(f.bins);
  w.vec(f.loss);
  w.ivec(f.ranking);
  w.ivec(f.selected);
  w.vec(f.f_min);
  w.vec(f.f_max);
}

RftResult get_rft(Reader& r) {
  RftResult f;
  f.bins = r.i32();
  f.loss = r.dvec();
  f.ranking = r.ivec();
  f.selected = r.ivec();
  f.f_min = r.dvec();
  f.f_max = r.dvec();
  const int p = static_cast<int>(f.loss.size());
  for (int s : f.selected)
    if (s < 0 || s >= p) r.fail("RFT selection index out of range");
  return f;
}

void put(Writer& w, const GbtConfig& c) {
  w.i32(c.tree_count);
  w.i32(c.max_depth);
  w.f64(c.learning_rate);
  w.f64(c.subsample);
  w.i32(c.min_samples_leaf);
  w.i32(c.histogram_bins);
  w.u64(c.seed);
}

GbtConfig get_gbt_config(Reader& r) {
  GbtConfig c;
  c.tree_count = r.i32();
  c.max_depth = r.i32();
  c.learning_rate = r.f64();
  c.subsample = r.f64();
  c.min_samples_leaf = r.i32();
  c.histogram_bins = r.i32();
  c.seed = r.u64();
  return c;
}

void put(Writer& w, const GbtModel& m) {
  w.f64(m.base_prediction);
  w.f64(m.learning_rate);
  w.i32(m.feature_count);
  put(w, m.config);
  w.vec(m.training_mse);
  w.u64(m.trees.size());
  for (const auto& t : m.trees) {
    w.u64(t.nodes.size());
    for (const auto& n : t.nodes) {
      w.i32(n.feature);
      w.i32(n.right);
      w.f64(n.value);
    }
  }
}

GbtModel get_gbt(Reader& r) {
  GbtModel m;
  m.base_prediction = r.f64();
  m.learning_rate = r.f64();
  m.feature_count = r.i32();
  m.config = get_gbt_config(r);
  m.training_mse = r.dvec();
  const std::uint64_t trees = r.u64();
  m.trees.reserve(std::min<std::uint64_t>(trees, 1u << 20));
  for (std::uint64_t t = 0; t < trees; ++t) {
    RegressionTree tree;
    const std::uint64_t n = r.u64();
    if (n == 0 || n > (1u << 24)) r.fail("bad tree size");
    tree.nodes.resize(n);
    for (auto& node : tree.nodes) {
      node.feature = r.i32();
      node.right = r.i32();
      node.value = r.f64();
    }
    // Pre-order invariant: children after parents, inside the array.
    const auto size = static_cast<std::int32_t>(n);
    for (std::int32_t i = 0; i < size; ++i) {
      const auto& node = tree.nodes[i];
      if (node.feature < 0) continue;
      if (node.feature >= m.feature_count || i + 1 >= size || node.right <= i + 1 || node.right >= size)
        r.fail("malformed tree");
    }
    m.trees.push_back(std::move(tree));
  }
  return m;
}

void put(Writer& w, const RegressionHead& h) {
  put(w, h.rft);
  put(w, h.model);
}

RegressionHead get_head(Reader& r) {
  RegressionHead h;
  h.rft = get_rft(r);
  h.model = get_gbt(r);
  if (h.model.fitted() && h.model.feature_count != static_cast<int>(h.rft.selected.size()))
    r.fail("head regressor width does not match its feature selection");
  return h;
}

std::string encode_pipeline(const FeaturePipeline& fp) {
  Writer w;
  w.u32(kLayerCount);
  for (const auto& L : fp.layers) {
    w.u32(static_cast<std::uint32_t>(L.level));
    put(w, L.saab3);
    put(w, L.saab5);
    w.u8(L.spatial ? 1 : 0);
    if (L.spatial) {
      w.u32(static_cast<std::uint32_t>(L.spatial->level));
      put(w, L.spatial->stage1);
      put(w, L.spatial->stage2);
      w.f64(L.spatial->edge.low_threshold);
      w.f64(L.spatial->edge.high_threshold);
      w.f64(L.spatial->edge.smoothing_sigma);
      w.f64(L.spatial->prior_sigma_fraction);
    }
    put(w, L.forward3);
    put(w, L.forward5);
  }
  return w.take();
}

Level get_level(Reader& r) {
  const std::uint32_t v = r.u32();
  for (Level l : kLevels)
    if (static_cast<std::uint32_t>(l) == v) return l;
  r.fail("unknown level " + std::to_string(v));
}

FeaturePipeline decode_pipeline(std::string_view bytes) {
  Reader r(bytes, "pipeline");
  if (r.u32() != kLayerCount) r.fail("unexpected layer count");
  FeaturePipeline fp;
  for (auto& L : fp.layers) {
    L.level = get_level(r);
    L.saab3 = get_saab(r);
    L.saab5 = get_saab(r);
    if (r.u8()) {
      SpatialModule s;
      s.level = get_level(r);
      s.stage1 = get_saab(r);
      s.stage2 = get_saab(r);
      s.edge.low_threshold = r.f64();
      s.edge.high_threshold = r.f64();
      s.edge.smoothing_sigma = r.f64();
      s.prior_sigma_fraction = r.f64();
      L.spatial = std::move(s);
    }
    L.forward3 = get_rft(r);
    L.forward5 = get_rft(r);
  }
  r.expect_end();
  return fp;
}

std::string encode_heads(const PathHeads& h) {
  Writer w;
  for (const auto& m : h.map) put(w, m);
  put(w, h.residual16);
  put(w, h.residual8);
  return w.take();
}

PathHeads decode_heads(std::string_view bytes) {
  Reader r(bytes, "heads");
  PathHeads h;
  for (auto& m : h.map) m = get_head(r);
  h.residual16 = get_head(r);
  h.residual8 = get_head(r);
  r.expect_end();
  return h;
}

std::string encode_meta(const ModelBundle& b) {
  Writer w;
  w.str(b.meta.dataset_name);
  w.u64(b.meta.image_count);
  w.u64(b.meta.seed);
  w.i64(b.meta.timestamp);
  return w.take();
}

TrainingMeta decode_meta(std::string_view bytes) {
  Reader r(bytes, "meta");
  TrainingMeta m;
  m.dataset_name = r.str();
  m.image_count = r.u64();
  m.seed = r.u64();
  m.timestamp = r.i64();
  r.expect_end();
  return m;
}

constexpr const char* kSectionNames[] = {"config", "meta", "pipeline", "heads", "ensemble"};

std::uint32_t read_u32(std::string_view b, size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<std::uint8_t>(b[at + i])) << (8 * i);
  return v;
}

std::uint64_t read_u64(std::string_view b, size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<std::uint8_t>(b[at + i])) << (8 * i);
  return v;
}

}  // namespace

std::string encode_gbt(const GbtModel& model) {
  Writer w;
  put(w, model);
  return w.take();
}

GbtModel decode_gbt(std::string_view bytes) {
  Reader r(bytes, "gbt");
  GbtModel m = get_gbt(r);
  r.expect_end();
  return m;
}

std::string encode_bundle(const ModelBundle& b) {
  ModelConfig echo = b.config;
  echo.jobs = 1;
  std::vector<std::pair<std::string, std::string>> sections;
  sections.emplace_back("config", config_to_text(echo));
  sections.emplace_back("meta", encode_meta(b));
  sections.emplace_back("pipeline", encode_pipeline(b.pipeline));
  sections.emplace_back("heads", encode_heads(b.heads));
  sections.emplace_back("ensemble", encode_gbt(b.ensemble.model));

  size_t header = 8 + 4 + 4 + 4;
  for (const auto& [name, payload] : sections) header += 4 + name.size() + 8 + 8 + 4;
  Writer w;
  w.raw(std::string_view(kBundleMagic, sizeof kBundleMagic));
  w.u32(b.format_version);
  w.u32(static_cast<std::uint32_t>(sections.size()));
  std::uint64_t offset = header;
  for (const auto& [name, payload] : sections) {
    w.u32(static_cast<std::uint32_t>(name.size()));
    w.raw(name);
    w.u64(offset);
    w.u64(payload.size());
    w.u32(crc_of(payload));
    offset += payload.size();
  }
  w.u32(crc_of(w.bytes()));
  std::string out = w.take();
  for (const auto& [name, payload] : sections) out += payload;
  return out;
}

std::vector<BundleSectionInfo> bundle_sections(std::string_view b) {
  if (b.size() < 16) throw BundleTruncatedError("bundle truncated: missing header");
  if (std::memcmp(b.data(), kBundleMagic, sizeof kBundleMagic) != 0)
    throw BundleFormatError("not a model bundle (bad magic)");
  const std::uint32_t version = read_u32(b, 8);
  if (version > kBundleVersion)
    throw BundleVersionError("bundle format version " + std::to_string(version) + " is newer than supported version " +
                             std::to_string(kBundleVersion));
  if (version == 0) throw BundleFormatError("bundle format version 0 is invalid");
  const std::uint32_t count = read_u32(b, 12);
  if (count > 64) throw BundleFormatError("implausible section count");
  size_t pos = 16;
  std::vector<BundleSectionInfo> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    if (b.size() < pos + 4) throw BundleTruncatedError("bundle truncated in section table");
    const std::uint32_t len = read_u32(b, pos);
    pos += 4;
    if (len > 64) throw BundleFormatError("implausible section name length");
    if (b.size() < pos + len + 20) throw BundleTruncatedError("bundle truncated in section table");
    BundleSectionInfo s;
    s.name = std::string(b.substr(pos, len));
    pos += len;
    s.offset = read_u64(b, pos);
    s.length = read_u64(b, pos + 8);
    s.crc = read_u32(b, pos + 16);
    pos += 20;
    out.push_back(std::move(s));
  }
  if (b.size() < pos + 4) throw BundleTruncatedError("bundle truncated in section table");
  if (read_u32(b, pos) != crc_of(b.substr(0, pos))) throw BundleChecksumError("header");
  return out;
}

ModelBundle decode_bundle(std::string_view b) {
  const auto sections = bundle_sections(b);
  auto payload = [&](const char* name) -> std::string_view {
    for (const auto& s : sections) {
      if (s.name != name) continue;
      if (s.offset > b.size() || s.length > b.size() - s.offset)
        throw BundleTruncatedError(std::string("bundle truncated in section '") + name + "'");
      const auto bytes = b.substr(s.offset, s.length);
      if (crc_of(bytes) != s.crc) throw BundleChecksumError(name);
      return bytes;
    }
    throw BundleFormatError(std::string("bundle is missing section '") + name + "'");
  };
  for (const char* name : kSectionNames) payload(name);

  ModelBundle out;
  out.format_version = read_u32(b, 8);
  try {
    apply_config_text(out.config, std::string(payload("config")), "bundle config");
    out.config.validate();
  } catch (const ConfigError& e) {
    throw BundleFormatError(std::string("bundle section 'config': ") + e.what());
  }
  out.meta = decode_meta(payload("meta"));
  out.pipeline = decode_pipeline(payload("pipeline"));
  out.pipeline.config = out.config.pipeline;
  out.heads = decode_heads(payload("heads"));
  {
    Reader r(payload("ensemble"), "ensemble");
    out.ensemble.model = get_gbt(r);
    r.expect_end();
  }
  if (!out.fitted()) throw BundleFormatError("bundle does not contain a fitted model");
  return out;
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
  if (!bundle.fitted()) throw InvalidState("cannot save an unfitted model");
  const std::string bytes = encode_bundle(bundle);
  write_file_atomically(path, [&](const std::filesystem::path& tmp) {
    std::ofstream out(tmp, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::kData, "cannot write " + tmp.string());
  });
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BundleError("cannot read bundle " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_bundle(ss.str());
}

}  // namespace fovea
