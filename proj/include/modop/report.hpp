#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace modop {

// Default verdict threshold for normality, commutation and theorem residuals.
inline constexpr double kDefaultTol = 1e-9;

/// A named residual compared against its bound. NaN never passes.
struct Residual {
  std::string name;
  double value = 0.0;
  double bound = 0.0;

  bool pass() const { return value <= bound; }
};

/// Residual report produced by every verifier.
struct Report {
  std::string name;
  std::vector<Residual> residuals;
  std::vector<std::pair<std::string, bool>> flags;
  std::vector<std::string> notes;
  std::vector<std::pair<std::string, double>> values;  // informational, never pass/fail

  void add(std::string key, double value, double bound) { residuals.push_back({std::move(key), value, bound}); }
  void flag(std::string key, bool value) { flags.emplace_back(std::move(key), value); }
  void value(std::string key, double v) { values.emplace_back(std::move(key), v); }

  bool passed() const {
    for (const auto& r : residuals)
      if (!r.pass()) return false;
    return true;
  }

  /// Throws std::out_of_range if absent.
  const Residual& at(std::string_view key) const;
  bool flag_value(std::string_view key) const;

  /// Append every residual of another report, prefixed with "prefix.".
  void merge(const Report& other, std::string_view prefix);
};

/// Boolean verdict together with the (normalized) residual it was read from.
struct Verdict {
  bool holds = false;
  double residual = 0.0;
};

}  // namespace modop
