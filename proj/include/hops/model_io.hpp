#pragma once

#include <filesystem>
#include <iosfwd>
#include <variant>

#include "hops/benchmarks.hpp"
#include "hops/poly.hpp"

namespace hops {

// On-disk model artifact: the fitted model plus the variable recipe needed to
// rebuild its design matrix from raw records. Binary, little-endian, doubles
// stored as raw bits; save/load round-trips are bit-exact.
struct SavedModel {
  std::variant<PolyModel, LinearModel> model;
  std::string variables;  // VariableSpec key
  std::size_t recency_h = 0;
  std::size_t recency_d = 0;

  bool is_poly() const { return std::holds_alternative<PolyModel>(model); }
  VariableSpec variable_spec() const {
    return VariableSpec::from_key(variables, recency_h, std::max<std::size_t>(recency_d, 1));
  }
};

void save_model(const SavedModel& model, std::ostream& os);
void save_model(const SavedModel& model, const std::filesystem::path& path);
SavedModel load_model(std::istream& is);
SavedModel load_model(const std::filesystem::path& path);

}  // namespace hops
