#pragma once

#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

namespace boolperc {

/// Union-find with path halving and union by size.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n = 0) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t add() {
    parent_.push_back(parent_.size());
    size_.push_back(1);
    return parent_.size() - 1;
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  /// Returns the surviving root; `absorbed` receives the other root (equal
  /// to the survivor when x and y were already joined).
  std::size_t unite(std::size_t x, std::size_t y, std::size_t* absorbed = nullptr) {
    x = find(x);
    y = find(y);
    if (x != y) {
      if (size_[x] < size_[y]) std::swap(x, y);
      parent_[y] = x;
      size_[x] += size_[y];
    }
    if (absorbed) *absorbed = y;
    return x;
  }

  std::size_t size_of(std::size_t x) { return size_[find(x)]; }
  std::size_t size() const noexcept { return parent_.size(); }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace boolperc
