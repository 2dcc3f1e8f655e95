#include "xprov/scalar.hpp"

#include <cmath>
#include <sstream>

#include "xprov/error.hpp"

namespace xprov {

Scalar Scalar::of(double v) {
  if (std::isnan(v)) {
    fail(ErrorCode::InvalidScalar, "NaN is not a legal cell value; use null");
  }
  return Scalar(v);
}

double Scalar::number() const {
  return is_int() ? static_cast<double>(as_int()) : as_float();
}

std::string Scalar::repr() const {
  switch (kind()) {
    case Kind::Null:
      return "null";
    case Kind::Int:
      return std::to_string(as_int());
    case Kind::Float: {
      std::ostringstream out;
      out.precision(17);
      out << as_float();
      std::string s = out.str();
      if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
          s.find("inf") == std::string::npos) {
        s += ".0";
      }
      return s;
    }
    case Kind::Str:
      return "\"" + as_str() + "\"";
    case Kind::Bool:
      return as_bool() ? "true" : "false";
  }
  return "";
}

bool numeric_equal(const Scalar& a, const Scalar& b) {
  if (!a.is_number() || !b.is_number()) return false;
  if (a.is_int() && b.is_int()) return a.as_int() == b.as_int();
  return a.number() == b.number();
}

int scalar_compare(const Scalar& a, const Scalar& b) {
  auto rank = [](const Scalar& s) {
    if (s.is_number()) return 0;
    if (s.is_str()) return 1;
    return 2;
  };
  int ra = rank(a), rb = rank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (ra) {
    case 0: {
      if (a.is_int() && b.is_int()) {
        if (a.as_int() == b.as_int()) return 0;
        return a.as_int() < b.as_int() ? -1 : 1;
      }
      double x = a.number(), y = b.number();
      if (x == y) return 0;
      return x < y ? -1 : 1;
    }
    case 1:
      return a.as_str().compare(b.as_str());
    default: {
      int x = a.as_bool() ? 1 : 0, y = b.as_bool() ? 1 : 0;
      return x - y;
    }
  }
}

}  // namespace xprov
