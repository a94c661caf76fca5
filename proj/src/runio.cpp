#include "mucond/runio.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mucond {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void JsonWriter::comma() {
  if (!need_comma_.empty() && need_comma_.back() && !pending_key_) out_ += ", ";
  if (!need_comma_.empty() && !pending_key_) need_comma_.back() = true;
  pending_key_ = false;
}

void JsonWriter::begin_object() {
  comma();
  out_ += '{';
  need_comma_.push_back(false);
}

void JsonWriter::end_object() {
  out_ += '}';
  need_comma_.pop_back();
}

void JsonWriter::begin_array() {
  comma();
  out_ += '[';
  need_comma_.push_back(false);
}

void JsonWriter::end_array() {
  out_ += ']';
  need_comma_.pop_back();
}

void JsonWriter::key(std::string_view k) {
  comma();
  out_ += '"';
  out_ += json_escape(k);
  out_ += "\": ";
  pending_key_ = true;
}

void JsonWriter::value(double v) {
  comma();
  out_ += format_double(v);
}

void JsonWriter::value_int(long long v) {
  comma();
  out_ += std::to_string(v);
}

void JsonWriter::value_uint(std::uint64_t v) {
  comma();
  out_ += std::to_string(v);
}

void JsonWriter::value(std::string_view s) {
  comma();
  out_ += '"';
  out_ += json_escape(s);
  out_ += '"';
}

void JsonWriter::value(bool b) {
  comma();
  out_ += b ? "true" : "false";
}

void JsonWriter::value_null() {
  comma();
  out_ += "null";
}

std::string json_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed for " + path);
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw std::runtime_error("cannot create directory " + path + ": " + ec.message());
}

bool file_exists(const std::string& path) {
  return std::filesystem::exists(path);
}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mucond
