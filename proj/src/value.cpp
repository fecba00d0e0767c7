#include "fieldc/value.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace fieldc {

namespace {

[[noreturn]] void typeFail(const char* want, const Value& got) {
  throw TypeError(std::string("expected ") + want + ", got " + got.typeName());
}

}  // namespace

bool Value::asBool() const {
  if (!isBool()) typeFail("Bool", *this);
  return std::get<bool>(v_);
}

double Value::asNum() const {
  if (!isNum()) typeFail("Num", *this);
  return std::get<double>(v_);
}

const std::string& Value::asStr() const {
  if (!isStr()) typeFail("Str", *this);
  return std::get<std::string>(v_);
}

const Tuple& Value::asTuple() const {
  if (!isTuple()) typeFail("Tuple", *this);
  return *std::get<std::shared_ptr<const Tuple>>(v_);
}

const FuncValue& Value::asFunc() const {
  if (!isFunc()) typeFail("Function", *this);
  return std::get<FuncValue>(v_);
}

const NbrMap& Value::asNbrMap() const {
  if (!isNbrMap()) typeFail("NbrMap", *this);
  return *std::get<std::shared_ptr<const NbrMap>>(v_);
}

const char* Value::typeName() const {
  switch (v_.index()) {
    case 0: return "Bool";
    case 1: return "Num";
    case 2: return "Str";
    case 3: return "Tuple";
    case 4: return "Function";
    case 5: return "NbrMap";
  }
  return "?";
}

std::string formatNum(double d) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  if (ec != std::errc()) return "?";
  return std::string(buf, p);
}

std::string Value::toString() const {
  switch (v_.index()) {
    case 0: return std::get<bool>(v_) ? "true" : "false";
    case 1: return formatNum(std::get<double>(v_));
    case 2: return "\"" + std::get<std::string>(v_) + "\"";
    case 3: {
      std::ostringstream os;
      os << "[";
      const Tuple& t = asTuple();
      for (size_t i = 0; i < t.size(); ++i) {
        if (i) os << "; ";
        os << t[i].toString();
      }
      os << "]";
      return os.str();
    }
    case 4: return "<fn " + std::get<FuncValue>(v_).tag + ">";
    case 5: {
      std::ostringstream os;
      os << "{";
      bool first = true;
      for (const auto& [d, v] : asNbrMap()) {
        if (!first) os << "; ";
        first = false;
        os << d << ":" << v.toString();
      }
      os << "}";
      return os.str();
    }
  }
  return "?";
}

bool valueEquals(const Value& a, const Value& b) {
  if (a.isBool() && b.isBool()) return a.asBool() == b.asBool();
  if (a.isNum() && b.isNum()) return a.asNum() == b.asNum();
  if (a.isStr() && b.isStr()) return a.asStr() == b.asStr();
  if (a.isFunc() && b.isFunc()) return a.asFunc().tag == b.asFunc().tag;
  if (a.isTuple() && b.isTuple()) {
    const Tuple& ta = a.asTuple();
    const Tuple& tb = b.asTuple();
    if (ta.size() != tb.size()) return false;
    for (size_t i = 0; i < ta.size(); ++i)
      if (!valueEquals(ta[i], tb[i])) return false;
    return true;
  }
  if (a.isNbrMap() && b.isNbrMap()) {
    const NbrMap& ma = a.asNbrMap();
    const NbrMap& mb = b.asNbrMap();
    if (ma.size() != mb.size()) return false;
    auto ia = ma.begin();
    auto ib = mb.begin();
    for (; ia != ma.end(); ++ia, ++ib)
      if (ia->first != ib->first || !valueEquals(ia->second, ib->second)) return false;
    return true;
  }
  return false;
}

bool valueApproxEquals(const Value& a, const Value& b, double eps) {
  if (a.isNum() && b.isNum()) {
    double x = a.asNum(), y = b.asNum();
    if (x == y) return true;  // covers equal infinities
    return std::fabs(x - y) <= eps;
  }
  if (a.isTuple() && b.isTuple()) {
    const Tuple& ta = a.asTuple();
    const Tuple& tb = b.asTuple();
    if (ta.size() != tb.size()) return false;
    for (size_t i = 0; i < ta.size(); ++i)
      if (!valueApproxEquals(ta[i], tb[i], eps)) return false;
    return true;
  }
  return valueEquals(a, b);
}

bool valueLess(const Value& a, const Value& b) {
  if (a.isNum() && b.isNum()) return a.asNum() < b.asNum();  // NaN: false
  if (a.isBool() && b.isBool()) return !a.asBool() && b.asBool();
  if (a.isStr() && b.isStr()) return a.asStr() < b.asStr();
  if (a.isTuple() && b.isTuple()) {
    const Tuple& ta = a.asTuple();
    const Tuple& tb = b.asTuple();
    size_t n = std::min(ta.size(), tb.size());
    for (size_t i = 0; i < n; ++i) {
      if (!valueEquals(ta[i], tb[i]))
        return valueLess(ta[i], tb[i]);
    }
    return ta.size() < tb.size();
  }
  throw TypeError(std::string("cannot order ") + a.typeName() + " against " + b.typeName());
}

Value valueMin(const Value& a, const Value& b) {
  if (a.isNum() && std::isnan(a.asNum())) return b;
  if (b.isNum() && std::isnan(b.asNum())) return a;
  return valueLess(b, a) ? b : a;
}

Value valueMax(const Value& a, const Value& b) {
  if (a.isNum() && std::isnan(a.asNum())) return b;
  if (b.isNum() && std::isnan(b.asNum())) return a;
  return valueLess(a, b) ? b : a;
}

}  // namespace fieldc
