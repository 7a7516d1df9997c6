#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "noisypower/matrix.hpp"
#include "noisypower/rng.hpp"

namespace noisypower {

enum class NoiseKind {
  zero,
  adversarial_fixed,
  gaussian,
  laplacian,
  gaussian_entrywise_scaled,
  sampling,
};

// Per-iteration noise injected into the power update. Sources may inspect the
// current iterate (adaptive noise), so generate() receives it alongside the
// iteration counter and the run's noise RNG.
class NoiseSource {
 public:
  virtual ~NoiseSource() = default;
  virtual DenseMatrix generate(std::size_t iteration, const DenseMatrix& current,
                               RngEngine& rng) = 0;
  virtual NoiseKind kind() const = 0;
};

class ZeroNoise final : public NoiseSource {
 public:
  DenseMatrix generate(std::size_t, const DenseMatrix& current, RngEngine&) override {
    return DenseMatrix(current.rows(), current.cols());
  }
  NoiseKind kind() const override { return NoiseKind::zero; }
};

// Same matrix at every iteration; the basic adversarial building block.
class FixedNoise final : public NoiseSource {
 public:
  explicit FixedNoise(DenseMatrix g) : g_(std::move(g)) {}
  DenseMatrix generate(std::size_t, const DenseMatrix&, RngEngine&) override {
    return g_;
  }
  NoiseKind kind() const override { return NoiseKind::adversarial_fixed; }

 private:
  DenseMatrix g_;
};

// Plays back a recorded per-iteration sequence; iterations past the end get
// zero noise. Used to replay one run's noise inside another.
class ReplayNoise final : public NoiseSource {
 public:
  explicit ReplayNoise(std::vector<DenseMatrix> seq) : seq_(std::move(seq)) {}
  DenseMatrix generate(std::size_t iteration, const DenseMatrix& current,
                       RngEngine&) override {
    if (iteration >= 1 && iteration <= seq_.size()) return seq_[iteration - 1];
    return DenseMatrix(current.rows(), current.cols());
  }
  NoiseKind kind() const override { return NoiseKind::adversarial_fixed; }

 private:
  std::vector<DenseMatrix> seq_;
};

// Fill helpers shared by the stochastic sources.
DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, double scale,
                            RngEngine& rng);
DenseMatrix laplace_matrix(std::size_t rows, std::size_t cols, double scale,
                           RngEngine& rng);

class GaussianNoise final : public NoiseSource {
 public:
  explicit GaussianNoise(double scale) : scale_(scale) {}
  DenseMatrix generate(std::size_t, const DenseMatrix& current,
                       RngEngine& rng) override {
    return gaussian_matrix(current.rows(), current.cols(), scale_, rng);
  }
  NoiseKind kind() const override { return NoiseKind::gaussian; }

 private:
  double scale_;
};

class LaplacianNoise final : public NoiseSource {
 public:
  explicit LaplacianNoise(double scale) : scale_(scale) {}
  DenseMatrix generate(std::size_t, const DenseMatrix& current,
                       RngEngine& rng) override {
    return laplace_matrix(current.rows(), current.cols(), scale_, rng);
  }
  NoiseKind kind() const override { return NoiseKind::laplacian; }

 private:
  double scale_;
};

// Gaussian entries scaled by the max-abs entry of the current iterate: the
// adaptive source used by the private power method.
class EntrywiseScaledGaussianNoise final : public NoiseSource {
 public:
  explicit EntrywiseScaledGaussianNoise(double sigma) : sigma_(sigma) {}
  DenseMatrix generate(std::size_t, const DenseMatrix& current,
                       RngEngine& rng) override {
    const double scale = current.max_abs() * sigma_;
    return gaussian_matrix(current.rows(), current.cols(), scale, rng);
  }
  NoiseKind kind() const override {
    return NoiseKind::gaussian_entrywise_scaled;
  }

 private:
  double sigma_;
};

}  // namespace noisypower
