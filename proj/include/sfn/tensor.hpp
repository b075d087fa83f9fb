#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfn {

// Dense row-major array. Shape is carried for checkpointing and shape
// checks; layers index the flat buffer directly.
template <class T>
struct Tensor {
    std::vector<size_t> shape;
    std::vector<T> v;

    Tensor() = default;

    explicit Tensor(std::initializer_list<size_t> dims) { resize(dims); }

    void resize(std::initializer_list<size_t> dims) {
        shape.assign(dims.begin(), dims.end());
        v.assign(numel_of(shape), T(0));
    }

    void resize(const std::vector<size_t>& dims) {
        shape = dims;
        v.assign(numel_of(shape), T(0));
    }

    static size_t numel_of(const std::vector<size_t>& dims) {
        size_t n = 1;
        for (size_t d : dims) n *= d;
        return dims.empty() ? 0 : n;
    }

    size_t numel() const { return v.size(); }
    T* data() { return v.data(); }
    const T* data() const { return v.data(); }

    T& operator[](size_t i) { return v[i]; }
    const T& operator[](size_t i) const { return v[i]; }

    // 2-d accessors for [rows, cols] tensors
    T& at(size_t r, size_t c) { return v[r * shape[1] + c]; }
    const T& at(size_t r, size_t c) const { return v[r * shape[1] + c]; }

    void fill(T x) { std::fill(v.begin(), v.end(), x); }
    void zero() { fill(T(0)); }

    std::string shape_str() const {
        std::string s = "[";
        for (size_t i = 0; i < shape.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(shape[i]);
        }
        return s + "]";
    }
};

} // namespace sfn
