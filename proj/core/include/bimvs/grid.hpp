#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace bimvs {

// Dense row-major H x W container. (y, x) indexing, y is the row.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int height, int width, const T& fill = T{})
      : height_(height), width_(width),
        cells_(static_cast<std::size_t>(height) * width, fill) {
    assert(height >= 0 && width >= 0);
  }

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }

  T& operator()(int y, int x) {
    assert(contains(y, x));
    return cells_[static_cast<std::size_t>(y) * width_ + x];
  }
  const T& operator()(int y, int x) const {
    assert(contains(y, x));
    return cells_[static_cast<std::size_t>(y) * width_ + x];
  }

  T& operator[](std::size_t i) { return cells_[i]; }
  const T& operator[](std::size_t i) const { return cells_[i]; }

  T* data() { return cells_.data(); }
  const T* data() const { return cells_.data(); }

  bool contains(int y, int x) const {
    return y >= 0 && y < height_ && x >= 0 && x < width_;
  }
  template <typename U>
  bool same_size(const Grid<U>& other) const {
    return height_ == other.height() && width_ == other.width();
  }

  void fill(const T& value) { cells_.assign(cells_.size(), value); }

  bool operator==(const Grid&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<T> cells_;
};

using GridD = Grid<double>;
using GridU8 = Grid<unsigned char>;

}  // namespace bimvs
