#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ivac {

// Minimal JSON tree with insertion-ordered object keys and %.17g number
// formatting, so a run with the same inputs produces byte-identical files.
class Json {
 public:
  static Json object() { return Json(Kind::object); }
  static Json array() { return Json(Kind::array); }
  static Json str(std::string v);
  static Json num(double v);
  static Json integer(long long v);
  static Json boolean(bool v);

  Json() : kind_(Kind::null) {}

  Json& set(const std::string& key, Json v);  // object only; replaces on repeat
  Json& push(Json v);                         // array only

  // Convenience for numeric sequences.
  static Json num_array(const std::vector<double>& v);
  static Json int_array(const std::vector<int>& v);

  std::string dump(int indent = 2) const;

 private:
  enum class Kind { object, array, string, number, integer, boolean, null };
  explicit Json(Kind k) : kind_(k) {}
  void emit(std::string& out, int indent, int depth) const;

  Kind kind_;
  double num_ = 0.0;
  long long int_ = 0;
  bool bool_ = false;
  std::string str_;
  std::vector<std::pair<std::string, Json>> members_;
  std::vector<Json> items_;
};

// Rectangular CSV with a header row; numbers use %.17g.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(const std::vector<double>& row);
  std::string dump() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

std::string format_double(double v);  // %.17g
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ivac
