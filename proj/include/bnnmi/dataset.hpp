#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bnnmi {

// Feature rows plus class labels. Labels are 0-based class indices in
// [0, classes); features are stored row-major, `dim` values per row.
struct LabeledDataset {
  std::string name;
  std::size_t classes = 0;
  std::size_t dim = 0;
  std::vector<double> features;
  std::vector<std::size_t> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * dim, dim};
  }

  // Rows at `indices`, in that order.
  LabeledDataset subset(std::span<const std::size_t> indices) const;

  // Throws DomainError unless non-empty, consistently sized, finite, and
  // every label is in range.
  void validate() const;
};

}  // namespace bnnmi
