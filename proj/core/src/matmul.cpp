// Dense kernels kept in one TU so reduction-friendly flags apply only here.

#include "lc/matmul.hpp"

#include <cstring>

namespace lc::detail {

template <class T>
void matmul_nn(const T* a, const T* b, T* c, std::size_t n, std::size_t k,
               std::size_t m) {
  std::memset(c, 0, n * m * sizeof(T));
  for (std::size_t i = 0; i < n; ++i) {
    const T* arow = a + i * k;
    T* crow = c + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const T aip = arow[p];
      const T* brow = b + p * m;
      for (std::size_t j = 0; j < m; ++j) crow[j] += aip * brow[j];
    }
  }
}

template <class T>
void matmul_nt(const T* a, const T* b, T* c, std::size_t n, std::size_t k,
               std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    const T* arow = a + i * k;
    T* crow = c + i * m;
    for (std::size_t j = 0; j < m; ++j) {
      const T* brow = b + j * k;
      T acc = T(0);
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      crow[j] = acc;
    }
  }
}

template <class T>
void matmul_tn(const T* a, const T* b, T* c, std::size_t n, std::size_t k,
               std::size_t m) {
  std::memset(c, 0, k * m * sizeof(T));
  for (std::size_t p = 0; p < n; ++p) {
    const T* arow = a + p * k;
    const T* brow = b + p * m;
    for (std::size_t i = 0; i < k; ++i) {
      const T api = arow[i];
      T* crow = c + i * m;
      for (std::size_t j = 0; j < m; ++j) crow[j] += api * brow[j];
    }
  }
}

template void matmul_nn<float>(const float*, const float*, float*, std::size_t,
                               std::size_t, std::size_t);
template void matmul_nn<double>(const double*, const double*, double*,
                                std::size_t, std::size_t, std::size_t);
template void matmul_nt<float>(const float*, const float*, float*, std::size_t,
                               std::size_t, std::size_t);
template void matmul_nt<double>(const double*, const double*, double*,
                                std::size_t, std::size_t, std::size_t);
template void matmul_tn<float>(const float*, const float*, float*, std::size_t,
                               std::size_t, std::size_t);
template void matmul_tn<double>(const double*, const double*, double*,
                                std::size_t, std::size_t, std::size_t);

} // namespace lc::detail
