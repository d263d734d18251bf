#pragma once

#include <cstddef>

namespace lc::detail {

// C[n,m] = A[n,k] * B[k,m]
template <class T>
void matmul_nn(const T* a, const T* b, T* c, std::size_t n, std::size_t k,
               std::size_t m);

// C[n,m] = A[n,k] * B[m,k]^T  (rows dotted with rows)
template <class T>
void matmul_nt(const T* a, const T* b, T* c, std::size_t n, std::size_t k,
               std::size_t m);

// C[k,m] = A[n,k]^T * B[n,m]
template <class T>
void matmul_tn(const T* a, const T* b, T* c, std::size_t n, std::size_t k,
               std::size_t m);

} // namespace lc::detail
