#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>

#include "lc/errors.hpp"
#include "lc/tensor.hpp"

namespace lc {

// log(sum_i exp(v_i)) with the max shifted out, so it cannot overflow.
template <class T>
T log_sum_exp(std::span<const T> v) {
    if (v.empty())
        throw config_error("log_sum_exp: empty vector");
    const T m = *std::max_element(v.begin(), v.end());
    T sum = T(0);
    for (const T x : v)
        sum += std::exp(x - m);
    return m + std::log(sum);
}

template <class T>
void softmax(std::span<const T> v, std::span<T> out) {
    if (v.empty())
        throw config_error("softmax: empty vector");
    const T m = *std::max_element(v.begin(), v.end());
    T sum = T(0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = std::exp(v[i] - m);
        sum += out[i];
    }
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] /= sum;
}

template <class T>
std::vector<T> softmax(std::span<const T> v) {
    std::vector<T> out(v.size());
    softmax(v, std::span<T>(out));
    return out;
}

// 64-bit softmax of 32-bit logits, for places that keep probabilities at
// higher precision than the model.
inline void softmax_double(std::span<const float> v, std::span<double> out) {
    if (v.empty())
        throw config_error("softmax: empty vector");
    const double m =
        static_cast<double>(*std::max_element(v.begin(), v.end()));
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = std::exp(static_cast<double>(v[i]) - m);
        sum += out[i];
    }
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] /= sum;
}

// Index of the largest element; ties resolve to the smallest index.
template <class T>
std::size_t argmax_smallest(std::span<const T> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best])
            best = i;
    return best;
}

struct GradCheckReport {
    double max_relative_error = 0.0;
    std::size_t worst_coordinate = 0;
    double analytic = 0.0; // analytic gradient at the worst coordinate
    double numeric = 0.0;  // central difference at the worst coordinate
};

// Central differences per coordinate against a hand-derived gradient.
// Relative error uses a 1e-8 denominator floor so near-zero gradients do
// not blow up the ratio.
inline GradCheckReport finite_difference_check(
    const std::function<double(const TensorD&)>& f, const TensorD& point,
    const TensorD& analytic_grad, double step) {
    if (step <= 0.0)
        throw config_error("finite_difference_check: step must be > 0");
    if (point.numel() != analytic_grad.numel())
        throw config_error("finite_difference_check: gradient shape mismatch");

    GradCheckReport report;
    TensorD probe = point;
    for (std::size_t i = 0; i < point.numel(); ++i) {
        const double x0 = point.data[i];
        probe.data[i] = x0 + step;
        const double fp = f(probe);
        probe.data[i] = x0 - step;
        const double fm = f(probe);
        probe.data[i] = x0;
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw numeric_error("finite_difference_check: non-finite f at coordinate " +
                                std::to_string(i));
        const double numeric = (fp - fm) / (2.0 * step);
        const double analytic = analytic_grad.data[i];
        const double denom =
            std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        const double rel = std::abs(analytic - numeric) / denom;
        if (rel >= report.max_relative_error) {
            report.max_relative_error = rel;
            report.worst_coordinate = i;
            report.analytic = analytic;
            report.numeric = numeric;
        }
    }
    return report;
}

} // namespace lc
