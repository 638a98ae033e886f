#include "force/partition.hpp"

#include <algorithm>
#include <stdexcept>

namespace force {

Partition::Partition(std::vector<std::vector<Index>> g, Index d_total)
    : groups(std::move(g)), d(d_total) {
  if (d < 1) throw std::invalid_argument("Partition: d must be >= 1");
  std::vector<char> seen(size_t(d), 0);
  Index count = 0;
  for (auto& grp : groups) {
    if (grp.empty()) throw std::invalid_argument("Partition: empty group");
    std::sort(grp.begin(), grp.end());
    for (Index i : grp) {
      if (i < 0 || i >= d) throw std::invalid_argument("Partition: index out of range");
      if (seen[size_t(i)]) throw std::invalid_argument("Partition: duplicate index");
      seen[size_t(i)] = 1;
      ++count;
    }
  }
  if (count != d) throw std::invalid_argument("Partition: groups do not cover the index set");
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

Index Partition::min_group_size() const {
  Index m = d;
  for (const auto& g : groups) m = std::min(m, Index(g.size()));
  return m;
}

std::vector<Index> Partition::labels() const {
  std::vector<Index> lab(size_t(d), -1);
  for (Index k = 0; k < num_groups(); ++k)
    for (Index i : groups[size_t(k)]) lab[size_t(i)] = k;
  return lab;
}

Partition Partition::from_labels(const std::vector<Index>& labels) {
  const Index d = Index(labels.size());
  Index K = 0;
  for (Index l : labels) K = std::max(K, l + 1);
  std::vector<std::vector<Index>> groups(static_cast<size_t>(K));
  for (Index i = 0; i < d; ++i) {
    if (labels[size_t(i)] < 0) throw std::invalid_argument("from_labels: unassigned item");
    groups[size_t(labels[size_t(i)])].push_back(i);
  }
  // drop empty label slots
  groups.erase(std::remove_if(groups.begin(), groups.end(),
                              [](const auto& g) { return g.empty(); }),
               groups.end());
  return Partition(std::move(groups), d);
}

Partition Partition::singletons(Index d) {
  std::vector<std::vector<Index>> groups;
  groups.reserve(size_t(d));
  for (Index i = 0; i < d; ++i) groups.push_back({i});
  return Partition(std::move(groups), d);
}

Matrix partnership_matrix(const Partition& G) {
  Matrix B = Matrix::Zero(G.d, G.d);
  for (const auto& grp : G.groups) {
    const double w = 1.0 / double(grp.size());
    for (Index i : grp)
      for (Index j : grp) B(i, j) = w;
  }
  return B;
}

}  // namespace force
