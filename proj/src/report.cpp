#include "ivac/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ivac {

std::string format_double(double v) {
  if (std::isnan(v)) return "null";
  if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json Json::str(std::string v) {
  Json j(Kind::string);
  j.str_ = std::move(v);
  return j;
}
Json Json::num(double v) {
  Json j(Kind::number);
  j.num_ = v;
  return j;
}
Json Json::integer(long long v) {
  Json j(Kind::integer);
  j.int_ = v;
  return j;
}
Json Json::boolean(bool v) {
  Json j(Kind::boolean);
  j.bool_ = v;
  return j;
}

Json& Json::set(const std::string& key, Json v) {
  if (kind_ != Kind::object) throw std::logic_error("Json::set on non-object");
  for (auto& kv : members_)
    if (kv.first == key) {
      kv.second = std::move(v);
      return *this;
    }
  members_.emplace_back(key, std::move(v));
  return *this;
}

Json& Json::push(Json v) {
  if (kind_ != Kind::array) throw std::logic_error("Json::push on non-array");
  items_.push_back(std::move(v));
  return *this;
}

Json Json::num_array(const std::vector<double>& v) {
  Json a = array();
  for (double x : v) a.push(num(x));
  return a;
}
Json Json::int_array(const std::vector<int>& v) {
  Json a = array();
  for (int x : v) a.push(integer(x));
  return a;
}

namespace {
void emit_string(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}
}  // namespace

void Json::emit(std::string& out, int indent, int depth) const {
  const std::string pad(static_cast<std::size_t>(indent) * (static_cast<std::size_t>(depth) + 1), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent) * static_cast<std::size_t>(depth), ' ');
  switch (kind_) {
    case Kind::null: out += "null"; break;
    case Kind::boolean: out += bool_ ? "true" : "false"; break;
    case Kind::integer: out += std::to_string(int_); break;
    case Kind::number: out += format_double(num_); break;
    case Kind::string: emit_string(out, str_); break;
    case Kind::array: {
      if (items_.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      for (std::size_t i = 0; i < items_.size(); ++i) {
        out += pad;
        items_[i].emit(out, indent, depth + 1);
        if (i + 1 < items_.size()) out += ',';
        out += '\n';
      }
      out += close_pad + "]";
      break;
    }
    case Kind::object: {
      if (members_.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      for (std::size_t i = 0; i < members_.size(); ++i) {
        out += pad;
        emit_string(out, members_[i].first);
        out += ": ";
        members_[i].second.emit(out, indent, depth + 1);
        if (i + 1 < members_.size()) out += ',';
        out += '\n';
      }
      out += close_pad + "}";
      break;
    }
  }
}

std::string Json::dump(int indent) const {
  std::string out;
  emit(out, indent, 0);
  out += '\n';
  return out;
}

void Csv::add_row(const std::vector<double>& row) {
  if (row.size() != header_.size()) throw std::invalid_argument("Csv: row width mismatch");
  rows_.push_back(row);
}

std::string Csv::dump() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) {
    out += header_[i];
    out += (i + 1 < header_.size()) ? "," : "\n";
  }
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out += format_double(row[i]);
      out += (i + 1 < row.size()) ? "," : "\n";
    }
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace ivac
