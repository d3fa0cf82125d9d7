#include "modop/report.hpp"

#include <stdexcept>

namespace modop {

const Residual& Report::at(std::string_view key) const {
  for (const auto& r : residuals)
    if (r.name == key) return r;
  throw std::out_of_range("no residual named " + std::string(key) + " in report " + name);
}

bool Report::flag_value(std::string_view key) const {
  for (const auto& [k, v] : flags)
    if (k == key) return v;
  throw std::out_of_range("no flag named " + std::string(key) + " in report " + name);
}

void Report::merge(const Report& other, std::string_view prefix) {
  for (const auto& r : other.residuals) residuals.push_back({std::string(prefix) + "." + r.name, r.value, r.bound});
  for (const auto& [k, v] : other.flags) flags.emplace_back(std::string(prefix) + "." + k, v);
  for (const auto& [k, v] : other.values) values.emplace_back(std::string(prefix) + "." + k, v);
  for (const auto& n : other.notes) notes.push_back(n);
}

}  // namespace modop
