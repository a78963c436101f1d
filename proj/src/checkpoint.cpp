#include "l2e/checkpoint.hpp"

#include <cstring>

namespace l2e {

namespace {
constexpr char kParamMagic[9] = "L2EPARAM";
}

BinaryWriter::BinaryWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw CheckpointError("cannot open " + path.string() + " for writing");
}

void BinaryWriter::string(const std::string& s) {
  pod<std::uint64_t>(s.size());
  out_.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void BinaryWriter::finish() {
  out_.flush();
  if (!out_) throw CheckpointError("write failed: " + path_.string());
}

BinaryReader::BinaryReader(const std::filesystem::path& path)
    : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw CheckpointError("cannot open " + path.string());
}

void BinaryReader::check() {
  if (!in_) throw CheckpointError("truncated or corrupt file: " + path_.string());
}

std::string BinaryReader::string() {
  const auto n = pod<std::uint64_t>();
  if (n > (1ULL << 30)) throw CheckpointError("checkpoint: string length out of range");
  std::string s(n, '\0');
  in_.read(s.data(), static_cast<std::streamsize>(n));
  check();
  return s;
}

void BinaryReader::expect_magic(const char (&magic)[9]) {
  char buf[8];
  in_.read(buf, 8);
  check();
  if (std::memcmp(buf, magic, 8) != 0) {
    throw CheckpointError(path_.string() + " is not a " + std::string(magic, 8) + " file");
  }
}

void ParamFile::save(const std::filesystem::path& path) const {
  BinaryWriter w(path);
  for (int i = 0; i < 8; ++i) w.pod(kParamMagic[i]);
  w.pod(kVersion);
  w.pod<std::uint64_t>(meta.size());
  for (const auto& [k, v] : meta) {
    w.string(k);
    w.string(v);
  }
  w.pod<std::uint64_t>(arrays.size());
  for (const auto& [name, a] : arrays) {
    w.string(name);
    w.array<std::uint64_t>(a.shape);
    w.array<double>(a.data);
  }
  w.finish();
}

ParamFile ParamFile::load(const std::filesystem::path& path) {
  BinaryReader r(path);
  r.expect_magic(kParamMagic);
  const auto version = r.pod<std::uint32_t>();
  if (version != kVersion) {
    throw CheckpointError("unsupported parameter file version " + std::to_string(version));
  }
  ParamFile f;
  const auto n_meta = r.pod<std::uint64_t>();
  for (std::uint64_t i = 0; i < n_meta; ++i) {
    std::string k = r.string();
    f.meta[k] = r.string();
  }
  const auto n_arrays = r.pod<std::uint64_t>();
  for (std::uint64_t i = 0; i < n_arrays; ++i) {
    std::string name = r.string();
    Array a;
    a.shape = r.array<std::uint64_t>(16);
    a.data = r.array<double>();
    std::uint64_t expected = 1;
    for (auto d : a.shape) expected *= d;
    if (expected != a.data.size()) throw CheckpointError("array '" + name + "' shape mismatch");
    f.arrays[name] = std::move(a);
  }
  return f;
}

const ParamFile::Array& ParamFile::array(const std::string& name) const {
  auto it = arrays.find(name);
  if (it == arrays.end()) throw CheckpointError("missing array '" + name + "'");
  return it->second;
}

const std::string& ParamFile::value(const std::string& key) const {
  auto it = meta.find(key);
  if (it == meta.end()) throw CheckpointError("missing metadata '" + key + "'");
  return it->second;
}

}  // namespace l2e
