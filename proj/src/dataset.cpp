#include "bnnmi/dataset.hpp"

#include <cmath>

#include "bnnmi/errors.hpp"

namespace bnnmi {

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  LabeledDataset out{name, classes, dim, {}, {}};
  out.features.reserve(indices.size() * dim);
  out.labels.reserve(indices.size());
  for (const auto i : indices) {
    if (i >= size()) throw IndexError("LabeledDataset::subset: index out of range");
    const auto r = row(i);
    out.features.insert(out.features.end(), r.begin(), r.end());
    out.labels.push_back(labels[i]);
  }
  return out;
}

void LabeledDataset::validate() const {
  if (labels.empty()) throw DomainError("dataset '" + name + "' is empty");
  if (dim == 0 || features.size() != labels.size() * dim) {
    throw DomainError("dataset '" + name + "': features do not match labels");
  }
  for (const auto y : labels) {
    if (y >= classes) {
      throw DomainError("dataset '" + name + "': label out of range");
    }
  }
  for (const double v : features) {
    if (!std::isfinite(v)) {
      throw DomainError("dataset '" + name + "': non-finite feature");
    }
  }
}

}  // namespace bnnmi
