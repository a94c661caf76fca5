#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mucond {

// Shortest round-trip decimal for a double (%.17g), also used by the CSV and
// JSON writers so result files are byte-stable across runs.
std::string format_double(double v);

// Minimal ordered JSON writer. Keys appear in insertion order; numbers are
// rendered with format_double; no dependence on any parser library.
class JsonWriter {
 public:
  void begin_object();
  void end_object();
  void begin_array();
  void end_array();
  void key(std::string_view k);
  void value(double v);
  void value_int(long long v);
  void value_uint(std::uint64_t v);
  void value(std::string_view s);
  void value(bool b);
  void value_null();
  const std::string& str() const { return out_; }

 private:
  void comma();
  std::string out_;
  std::vector<bool> need_comma_;
  bool pending_key_ = false;
};

std::string json_escape(std::string_view s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);
void ensure_directory(const std::string& path);
bool file_exists(const std::string& path);

// FNV-1a 64-bit content fingerprint (not cryptographic), hex string.
std::string fnv1a64_hex(std::string_view bytes);

}  // namespace mucond
