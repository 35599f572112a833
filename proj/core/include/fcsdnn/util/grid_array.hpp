#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <vector>

namespace fcsdnn {

// Dense 2D grid function, q1 index fastest: a(i, j) = data[j * n1 + i].
template <class T>
class GridArray {
public:
    GridArray() = default;
    GridArray(int n1, int n2, T fill = T{}) : n1_(n1), n2_(n2), data_(std::size_t(n1) * n2, fill) {}

    int n1() const { return n1_; }
    int n2() const { return n2_; }
    std::size_t size() const { return data_.size(); }

    T& operator()(int i, int j) {
        assert(i >= 0 && i < n1_ && j >= 0 && j < n2_);
        return data_[std::size_t(j) * n1_ + i];
    }
    const T& operator()(int i, int j) const {
        assert(i >= 0 && i < n1_ && j >= 0 && j < n2_);
        return data_[std::size_t(j) * n1_ + i];
    }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& vec() { return data_; }
    const std::vector<T>& vec() const { return data_; }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

private:
    int n1_ = 0;
    int n2_ = 0;
    std::vector<T> data_;
};

using Grid = GridArray<double>;

} // namespace fcsdnn
