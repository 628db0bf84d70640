#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tasksheaf/errors.hpp"

namespace tasksheaf {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Accepts "3", "-7", "1/4", "-3/8", "0.25", "-1.5", ".5", "2.". Always exact:
// decimals become p/10^k before normalisation, never a float.
inline Rat parse_rational(std::string_view text) {
  auto bad = [&] { throw ParseError("not a rational: '" + std::string(text) + "'"); };
  if (text.empty()) bad();
  bool neg = false;
  size_t i = 0;
  if (text[i] == '+' || text[i] == '-') {
    neg = text[i] == '-';
    ++i;
  }
  auto digits = [&](size_t& j) {
    size_t start = j;
    while (j < text.size() && text[j] >= '0' && text[j] <= '9') ++j;
    return std::string(text.substr(start, j - start));
  };
  // never the cpp_int string constructor here: a leading zero reads as octal
  auto fold = [](const std::string& s) {
    Int v = 0;
    for (char c : s) v = v * 10 + (c - '0');
    return v;
  };
  std::string whole = digits(i);
  Rat q;
  if (i < text.size() && text[i] == '.') {
    ++i;
    std::string frac = digits(i);
    if (i != text.size() || (whole.empty() && frac.empty())) bad();
    Int scale = 1;
    for (size_t k = 0; k < frac.size(); ++k) scale *= 10;
    q = Rat(fold(whole) * scale + fold(frac), scale);
  } else if (i < text.size() && text[i] == '/') {
    ++i;
    std::string den = digits(i);
    if (whole.empty() || den.empty() || i != text.size()) bad();
    Int d = fold(den);
    if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    q = Rat(fold(whole), d);
  } else {
    if (whole.empty() || i != text.size()) bad();
    q = Rat(fold(whole));
  }
  if (neg) q = -q;
  return q;
}

// Decimal form when the denominator is 2^a 5^b (so the expansion terminates),
// "p/q" otherwise. Round-trips through parse_rational.
inline std::string render_rational(const Rat& q) {
  Int num = boost::multiprecision::numerator(q);
  Int den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  Int d = den;
  unsigned twos = 0, fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d != 1) return num.str() + "/" + den.str();
  unsigned k = twos > fives ? twos : fives;
  Int scale = 1;
  for (unsigned j = 0; j < k; ++j) scale *= 10;
  Int scaled = num * (scale / den);
  bool neg = scaled < 0;
  Int mag = neg ? Int(-scaled) : scaled;
  std::string body = mag.str();
  if (body.size() <= k) body.insert(0, k + 1 - body.size(), '0');
  body.insert(body.size() - k, ".");
  return (neg ? "-" : "") + body;
}

// One task-level value: an exact rational or an opaque symbol. A Task fixes
// which kind its vectors carry; mixing kinds inside one task is rejected at
// task validation, not here.
class Value {
 public:
  Value() : rep_(Rat(0)) {}

  static Value rational(Rat q) { return Value(std::move(q)); }
  static Value symbol(std::string name) {
    if (name.empty()) throw ValidationError("empty symbol value");
    return Value(std::move(name));
  }

  bool is_rational() const { return rep_.index() == 0; }
  bool is_symbol() const { return rep_.index() == 1; }

  const Rat& rat() const {
    if (!is_rational()) throw InternalError("Value::rat on symbol");
    return std::get<Rat>(rep_);
  }
  const std::string& symbol() const {
    if (!is_symbol()) throw InternalError("Value::symbol on rational");
    return std::get<std::string>(rep_);
  }

  std::string render() const {
    return is_rational() ? render_rational(rat()) : symbol();
  }

  friend bool operator==(const Value& a, const Value& b) { return a.rep_ == b.rep_; }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
  // Rationals before symbols, each kind in its natural order.
  friend bool operator<(const Value& a, const Value& b) { return a.rep_ < b.rep_; }
  friend bool operator<=(const Value& a, const Value& b) { return !(b < a); }
  friend bool operator>(const Value& a, const Value& b) { return b < a; }
  friend bool operator>=(const Value& a, const Value& b) { return !(a < b); }

 private:
  explicit Value(Rat q) : rep_(std::move(q)) {}
  explicit Value(std::string s) : rep_(std::move(s)) {}

  std::variant<Rat, std::string> rep_;
};

inline Value rat_value(long num, long den = 1) { return Value::rational(Rat(num, den)); }

// Per-process vector of values; index = process. Used for task inputs,
// task outputs and section entries alike.
using ValueVector = std::vector<Value>;

inline std::string render_vector(const ValueVector& v) {
  std::string out = "(";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += v[i].render();
  }
  out += ")";
  return out;
}

}  // namespace tasksheaf
