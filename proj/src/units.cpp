#include "tierplan/units.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "tierplan/errors.hpp"

namespace tierplan {

namespace {

// Splits "5.6ms" into (5.6, "ms"). Throws on empty or non-numeric input.
std::pair<double, std::string> split_magnitude(const std::string& text,
                                               const char* what) {
  std::size_t pos = 0;
  while (pos < text.size() &&
         (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.' ||
          text[pos] == '+' || text[pos] == '-' || text[pos] == 'e' ||
          text[pos] == 'E')) {
    // 'e'/'E' only counts as part of the number when followed by a digit/sign,
    // so "8e9" parses but the unit in "16us" is left alone... distinguish by
    // peeking: exponent must be followed by digit or sign.
    if (text[pos] == 'e' || text[pos] == 'E') {
      if (pos + 1 >= text.size() ||
          (!std::isdigit(static_cast<unsigned char>(text[pos + 1])) &&
           text[pos + 1] != '+' && text[pos + 1] != '-')) {
        break;
      }
    }
    ++pos;
  }
  if (pos == 0) {
    throw ValidationError(std::string("cannot parse ") + what + " '" + text + "'");
  }
  double value = 0;
  try {
    value = std::stod(text.substr(0, pos));
  } catch (const std::exception&) {
    throw ValidationError(std::string("cannot parse ") + what + " '" + text + "'");
  }
  std::string unit = text.substr(pos);
  for (char& c : unit) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return {value, unit};
}

}  // namespace

Duration parse_duration(const std::string& text) {
  auto [value, unit] = split_magnitude(text, "duration");
  double ns = 0;
  if (unit.empty() || unit == "ns") {
    ns = value;
  } else if (unit == "us") {
    ns = value * 1e3;
  } else if (unit == "ms") {
    ns = value * 1e6;
  } else if (unit == "s") {
    ns = value * 1e9;
  } else {
    throw ValidationError("unknown duration unit '" + unit + "' in '" + text + "'");
  }
  if (ns < 0) throw ValidationError("duration must be non-negative: '" + text + "'");
  return Duration{std::llround(ns)};
}

double parse_bandwidth_bps(const std::string& text) {
  auto [value, unit] = split_magnitude(text, "bandwidth");
  double bps = 0;
  if (unit.empty() || unit == "bps") {
    bps = value;
  } else if (unit == "kbps") {
    bps = value * 1e3;
  } else if (unit == "mbps") {
    bps = value * 1e6;
  } else if (unit == "gbps") {
    bps = value * 1e9;
  } else {
    throw ValidationError("unknown bandwidth unit '" + unit + "' in '" + text + "'");
  }
  if (bps <= 0) throw ValidationError("bandwidth must be positive: '" + text + "'");
  return bps;
}

std::string format_duration(Duration d) {
  const auto ns = d.count();
  std::ostringstream out;
  if (ns == 0) {
    out << "0s";
  } else if (ns % 1'000'000'000 == 0) {
    out << ns / 1'000'000'000 << "s";
  } else if (ns >= 1'000'000) {
    out << static_cast<double>(ns) / 1e6 << "ms";
  } else if (ns >= 1'000) {
    out << static_cast<double>(ns) / 1e3 << "us";
  } else {
    out << ns << "ns";
  }
  return out.str();
}

}  // namespace tierplan
