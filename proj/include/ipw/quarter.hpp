#pragma once

#include <compare>
#include <string>

namespace ipw {

// Calendar quarter, e.g. 1995Q3. Parses "YYYYQn" and ISO "YYYY-MM-DD"
// (the month is mapped to its quarter).
struct Quarter {
  int year = 0;
  int q = 1;  // 1..4

  auto operator<=>(const Quarter&) const = default;

  Quarter next() const {
    return q == 4 ? Quarter{year + 1, 1} : Quarter{year, q + 1};
  }

  std::string str() const {
    return std::to_string(year) + "Q" + std::to_string(q);
  }

  // Throws ipw::Error(bad_data) on anything unparsable.
  static Quarter parse(const std::string& text);
};

}  // namespace ipw
