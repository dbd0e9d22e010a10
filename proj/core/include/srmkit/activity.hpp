#pragma once

#include <span>
#include <string>
#include <vector>

#include "srmkit/matcore.hpp"

namespace srmkit {

/// Activity patterns of one layer of one network: units x examples, one column
/// per input example.
struct ActivityMatrix {
  std::string network_id;
  std::string layer_id;
  Matrix data;

  Index units() const { return data.rows(); }
  Index examples() const { return data.cols(); }

  // "network/layer", used to name offending entries in error messages.
  std::string label() const;
};

/// Throws unless n >= 1, m >= 2 and all entries are finite.
void validate(const ActivityMatrix& a);

/// Shares one example count across all matrices; throws ExampleCountMismatch
/// naming the first disagreeing pair, or EmptyList.
Index common_example_count(std::span<const ActivityMatrix> mats);

/// Copies out just the data matrices.
std::vector<Matrix> data_of(std::span<const ActivityMatrix> mats);

}  // namespace srmkit
