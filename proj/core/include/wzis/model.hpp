#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wzis/rng.hpp"

namespace wzis {

// Symbols are dense integer indices 0..size-1; alphabets carry no labels.
struct Alphabet {
  int size = 0;

  explicit Alphabet(int s);
  Alphabet() = default;
};

// A finite sequence over a declared alphabet. Every entry is validated to be
// in [0, alphabet).
class Sequence {
 public:
  Sequence() = default;
  Sequence(std::vector<int> symbols, int alphabet);

  int alphabet() const { return alphabet_; }
  std::int64_t size() const { return static_cast<std::int64_t>(symbols_.size()); }
  int operator[](std::int64_t i) const { return symbols_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& symbols() const { return symbols_; }

 private:
  std::vector<int> symbols_;
  int alphabet_ = 0;
};

// Row-stochastic conditional probability table P(y|x). Rows must sum to 1
// within 1e-12 in absolute terms; normalization is never applied silently.
class Channel {
 public:
  Channel() = default;

  int input_size() const { return in_; }
  int output_size() const { return out_; }
  double prob(int x, int y) const { return table_[static_cast<std::size_t>(x) * out_ + y]; }
  std::span<const double> row(int x) const {
    return {table_.data() + static_cast<std::size_t>(x) * out_, static_cast<std::size_t>(out_)};
  }

  friend Channel validate_dmc(const std::vector<std::vector<double>>& matrix);

 private:
  std::vector<double> table_;
  int in_ = 0;
  int out_ = 0;
};

constexpr double kStochasticTol = 1e-12;

// Validates a raw table as a DMC. Errors: NonStochasticRow, NegativeEntry.
Channel validate_dmc(const std::vector<std::vector<double>>& matrix);

// Convenience constructors for common channels.
Channel identity_channel(int size);
Channel binary_symmetric_channel(double crossover);

// Single-letter distortion table rho[x][xhat] >= 0 with cached maximum.
class DistortionMatrix {
 public:
  DistortionMatrix() = default;
  explicit DistortionMatrix(const std::vector<std::vector<double>>& table);

  // Group-difference measure rho(x, xhat) = rho0((x - xhat) mod alpha).
  static DistortionMatrix from_difference(std::span<const double> rho0);
  static DistortionMatrix hamming(int size);

  int source_size() const { return nx_; }
  int recon_size() const { return nxh_; }
  double at(int x, int xh) const { return table_[static_cast<std::size_t>(x) * nxh_ + xh]; }
  std::span<const double> row(int x) const {
    return {table_.data() + static_cast<std::size_t>(x) * nxh_, static_cast<std::size_t>(nxh_)};
  }
  double max() const { return rho_max_; }

 private:
  std::vector<double> table_;
  int nx_ = 0;
  int nxh_ = 0;
  double rho_max_ = 0.0;
};

// Draws y_i ~ P(.|x_i) independently per letter. Deterministic given seed.
Sequence sample_side_info(const Sequence& x, const Channel& ch, Seed seed);

// (1/n) sum_i rho(x_i, xh_i). Errors: LengthMismatch.
double average_distortion(const Sequence& x, const Sequence& xh, const DistortionMatrix& rho);

}  // namespace wzis
