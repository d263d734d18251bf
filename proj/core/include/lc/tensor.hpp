#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "lc/errors.hpp"

namespace lc {

// Dense row-major array. Immutable shape; product(shape) == data.size() is
// maintained by every constructor and checked on reshape.
template <class T>
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<T> data;

    Tensor() = default;

    Tensor(std::vector<std::size_t> s, std::vector<T> d)
        : shape(std::move(s)), data(std::move(d)) {
        if (numel_of(shape) != data.size())
            throw config_error("tensor: shape/data size mismatch");
    }

    static Tensor zeros(std::vector<std::size_t> s) {
        const std::size_t n = numel_of(s);
        return Tensor(std::move(s), std::vector<T>(n, T(0)));
    }

    static Tensor full(std::vector<std::size_t> s, T value) {
        const std::size_t n = numel_of(s);
        return Tensor(std::move(s), std::vector<T>(n, value));
    }

    static std::size_t numel_of(const std::vector<std::size_t>& s) {
        return std::accumulate(s.begin(), s.end(), std::size_t{1},
                               std::multiplies<>());
    }

    std::size_t numel() const { return data.size(); }

    std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
    std::size_t cols() const {
        return shape.size() < 2 ? (shape.empty() ? 0 : 1) : shape[1];
    }

    T& at(std::size_t i) { return data[i]; }
    const T& at(std::size_t i) const { return data[i]; }

    T& at(std::size_t i, std::size_t j) { return data[i * cols() + j]; }
    const T& at(std::size_t i, std::size_t j) const {
        return data[i * cols() + j];
    }

    std::span<T> row(std::size_t i) {
        return std::span<T>(data.data() + i * cols(), cols());
    }
    std::span<const T> row(std::size_t i) const {
        return std::span<const T>(data.data() + i * cols(), cols());
    }

    void fill(T v) { std::fill(data.begin(), data.end(), v); }
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

template <class T>
bool all_finite(std::span<const T> v) {
    for (const T x : v)
        if (!std::isfinite(static_cast<double>(x)))
            return false;
    return true;
}

// Throws numeric_error naming the context; never lets NaN/Inf travel silently.
template <class T>
void ensure_finite(const Tensor<T>& t, const std::string& context) {
    if (!all_finite(std::span<const T>(t.data)))
        throw numeric_error("non-finite values in " + context);
}

} // namespace lc
