#include "srmkit/activity.hpp"

#include <string>

#include "srmkit/errors.hpp"

namespace srmkit {

std::string ActivityMatrix::label() const { return network_id + "/" + layer_id; }

void validate(const ActivityMatrix& a) {
  if (a.units() < 1 || a.examples() < 2) {
    throw Error(ErrorCode::kInvalidMatrix,
                a.label() + ": needs at least 1 unit and 2 examples, got " +
                    std::to_string(a.units()) + "x" + std::to_string(a.examples()));
  }
  require_finite(a.data, a.label());
}

Index common_example_count(std::span<const ActivityMatrix> mats) {
  if (mats.empty()) throw Error(ErrorCode::kEmptyList, "no activity matrices");
  const Index m = mats.front().examples();
  for (const auto& a : mats) {
    if (a.examples() != m) {
      throw Error(ErrorCode::kExampleCountMismatch,
                  mats.front().label() + " has " + std::to_string(m) +
                      " examples but " + a.label() + " has " +
                      std::to_string(a.examples()));
    }
  }
  return m;
}

std::vector<Matrix> data_of(std::span<const ActivityMatrix> mats) {
  std::vector<Matrix> out;
  out.reserve(mats.size());
  for (const auto& a : mats) out.push_back(a.data);
  return out;
}

}  // namespace srmkit
