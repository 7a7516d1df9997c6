#include "noisypower/noise.hpp"

#include <random>

namespace noisypower {

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, double scale,
                            RngEngine& rng) {
  DenseMatrix g(rows, cols);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) g(i, j) = scale * dist(rng);
  return g;
}

DenseMatrix laplace_matrix(std::size_t rows, std::size_t cols, double scale,
                           RngEngine& rng) {
  // Difference of two independent Exponential(1) draws is Laplace(0, 1);
  // this avoids the log-of-zero edge the inverse-CDF route has at u = -1/2.
  DenseMatrix g(rows, cols);
  std::exponential_distribution<double> dist(1.0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const double a = dist(rng);
      const double b = dist(rng);
      g(i, j) = scale * (a - b);
    }
  return g;
}

}  // namespace noisypower
