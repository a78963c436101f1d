#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace l2e {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Little helper over a binary stream; values are written in host byte order.
class BinaryWriter {
 public:
  explicit BinaryWriter(const std::filesystem::path& path);

  template <class T>
    requires std::is_trivially_copyable_v<T>
  void pod(const T& v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  template <class T>
  void array(std::span<const T> v) {
    pod<std::uint64_t>(v.size());
    out_.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size_bytes()));
  }
  void string(const std::string& s);
  void finish();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::filesystem::path& path);

  template <class T>
    requires std::is_trivially_copyable_v<T>
  T pod() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    check();
    return v;
  }
  template <class T>
  std::vector<T> array(std::uint64_t max_len = 1ULL << 34) {
    const auto n = pod<std::uint64_t>();
    if (n > max_len) throw CheckpointError("checkpoint: array length out of range");
    std::vector<T> v(n);
    in_.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
    check();
    return v;
  }
  std::string string();
  void expect_magic(const char (&magic)[9]);

 private:
  void check();
  std::filesystem::path path_;
  std::ifstream in_;
};

/// Named flat arrays plus string metadata; used for network parameters.
///
/// Layout: "L2EPARAM" magic, u32 version, u64 metadata count, (key, value)
/// strings, u64 array count, then per array: name, u64[] shape, f64[] data.
struct ParamFile {
  static constexpr std::uint32_t kVersion = 1;

  struct Array {
    std::vector<std::uint64_t> shape;
    std::vector<double> data;
  };

  std::map<std::string, std::string> meta;
  std::map<std::string, Array> arrays;

  void save(const std::filesystem::path& path) const;
  static ParamFile load(const std::filesystem::path& path);

  const Array& array(const std::string& name) const;
  const std::string& value(const std::string& key) const;
};

}  // namespace l2e
