#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace xprov {

// Cell value: 64-bit int, finite double, UTF-8 string, bool, or Null.
// Null is the only missing-data marker (NaN is rejected at construction)
// and compares equal only to itself. Equality is strict: an Int never
// equals a Float even when numerically identical; predicate evaluation
// and sort keys use the numeric comparators below instead.
class Scalar {
 public:
  enum class Kind { Null, Int, Float, Str, Bool };

  Scalar() : value_(std::monostate{}) {}
  static Scalar null() { return Scalar(); }
  static Scalar of(std::int64_t v) { return Scalar(v); }
  static Scalar of(double v);
  static Scalar of(std::string v) { return Scalar(std::move(v)); }
  static Scalar of(const char* v) { return Scalar(std::string(v)); }
  static Scalar of(bool v) { return Scalar(v); }

  Kind kind() const { return static_cast<Kind>(value_.index()); }
  bool is_null() const { return kind() == Kind::Null; }
  bool is_int() const { return kind() == Kind::Int; }
  bool is_float() const { return kind() == Kind::Float; }
  bool is_str() const { return kind() == Kind::Str; }
  bool is_bool() const { return kind() == Kind::Bool; }
  bool is_number() const { return is_int() || is_float(); }

  std::int64_t as_int() const { return std::get<std::int64_t>(value_); }
  double as_float() const { return std::get<double>(value_); }
  const std::string& as_str() const { return std::get<std::string>(value_); }
  bool as_bool() const { return std::get<bool>(value_); }

  // Numeric value as double; precondition: is_number().
  double number() const;

  bool operator==(const Scalar& other) const { return value_ == other.value_; }
  bool operator!=(const Scalar& other) const { return !(*this == other); }

  // Deterministic display form ("null", "35", "35.0", "\"abc\"", "true").
  std::string repr() const;

 private:
  explicit Scalar(std::int64_t v) : value_(v) {}
  explicit Scalar(double v) : value_(v) {}
  explicit Scalar(std::string v) : value_(std::move(v)) {}
  explicit Scalar(bool v) : value_(v) {}

  std::variant<std::monostate, std::int64_t, double, std::string, bool> value_;
};

// True when both are numbers and numerically equal (Int 35 == Float 35.0).
bool numeric_equal(const Scalar& a, const Scalar& b);

// Total order used by sort keys: numbers < strings < bools, numerics compare
// by value, strings bytewise, false < true. Null is handled by the caller
// (sorted last). Returns <0, 0, >0. Precondition: neither is null.
int scalar_compare(const Scalar& a, const Scalar& b);

}  // namespace xprov
