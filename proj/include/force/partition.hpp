#pragma once

#include <vector>

#include "force/matlin.hpp"

namespace force {

// A partition of the index set {0, ..., d-1} into K disjoint nonempty groups.
// Groups and members are kept sorted so equal partitions compare equal.
struct Partition {
  std::vector<std::vector<Index>> groups;
  Index d = 0;

  Partition() = default;
  Partition(std::vector<std::vector<Index>> g, Index d_total);

  Index num_groups() const { return Index(groups.size()); }
  Index min_group_size() const;

  // group index of each item, as a flat label vector
  std::vector<Index> labels() const;

  static Partition from_labels(const std::vector<Index>& labels);
  static Partition singletons(Index d);

  bool operator==(const Partition& other) const = default;
};

// B(G): 1/|G_a| on co-clustered pairs, 0 elsewhere.
Matrix partnership_matrix(const Partition& G);

}  // namespace force
