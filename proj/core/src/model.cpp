#include "wzis/model.hpp"

#include <cmath>
#include <string>

#include "wzis/error.hpp"

namespace wzis {

Alphabet::Alphabet(int s) : size(s) {
  require(s >= 1, ErrorCode::kConfigError, "alphabet size must be >= 1");
}

Sequence::Sequence(std::vector<int> symbols, int alphabet)
    : symbols_(std::move(symbols)), alphabet_(alphabet) {
  require(alphabet >= 1, ErrorCode::kConfigError, "alphabet size must be >= 1");
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    require(symbols_[i] >= 0 && symbols_[i] < alphabet, ErrorCode::kConfigError,
            "sequence symbol out of range at position " + std::to_string(i));
  }
}

Channel validate_dmc(const std::vector<std::vector<double>>& matrix) {
  require(!matrix.empty() && !matrix[0].empty(), ErrorCode::kConfigError,
          "channel table must have at least one row and column");
  const std::size_t cols = matrix[0].size();
  Channel ch;
  ch.in_ = static_cast<int>(matrix.size());
  ch.out_ = static_cast<int>(cols);
  ch.table_.reserve(matrix.size() * cols);
  for (std::size_t r = 0; r < matrix.size(); ++r) {
    require(matrix[r].size() == cols, ErrorCode::kConfigError,
            "channel table must be rectangular");
    double sum = 0.0;
    for (double v : matrix[r]) {
      require(v >= 0.0 && std::isfinite(v), ErrorCode::kNegativeEntry,
              "channel entry negative or non-finite in row " + std::to_string(r));
      require(v <= 1.0 + kStochasticTol, ErrorCode::kNonStochasticRow,
              "channel entry exceeds 1 in row " + std::to_string(r));
      sum += v;
    }
    require(std::fabs(sum - 1.0) <= kStochasticTol, ErrorCode::kNonStochasticRow,
            "channel row " + std::to_string(r) + " sums to " + std::to_string(sum));
    ch.table_.insert(ch.table_.end(), matrix[r].begin(), matrix[r].end());
  }
  return ch;
}

Channel identity_channel(int size) {
  std::vector<std::vector<double>> m(size, std::vector<double>(size, 0.0));
  for (int i = 0; i < size; ++i) m[i][i] = 1.0;
  return validate_dmc(m);
}

Channel binary_symmetric_channel(double crossover) {
  return validate_dmc({{1.0 - crossover, crossover}, {crossover, 1.0 - crossover}});
}

DistortionMatrix::DistortionMatrix(const std::vector<std::vector<double>>& table) {
  require(!table.empty() && !table[0].empty(), ErrorCode::kConfigError,
          "distortion table must have at least one row and column");
  nx_ = static_cast<int>(table.size());
  nxh_ = static_cast<int>(table[0].size());
  rho_max_ = 0.0;
  for (const auto& row : table) {
    require(row.size() == static_cast<std::size_t>(nxh_), ErrorCode::kConfigError,
            "distortion table must be rectangular");
    for (double v : row) {
      require(v >= 0.0 && std::isfinite(v), ErrorCode::kConfigError,
              "distortion entries must be nonnegative and finite");
      if (v > rho_max_) rho_max_ = v;
      table_.push_back(v);
    }
  }
}

DistortionMatrix DistortionMatrix::from_difference(std::span<const double> rho0) {
  const int alpha = static_cast<int>(rho0.size());
  std::vector<std::vector<double>> table(alpha, std::vector<double>(alpha));
  for (int x = 0; x < alpha; ++x)
    for (int xh = 0; xh < alpha; ++xh)
      table[x][xh] = rho0[static_cast<std::size_t>(((x - xh) % alpha + alpha) % alpha)];
  return DistortionMatrix(table);
}

DistortionMatrix DistortionMatrix::hamming(int size) {
  std::vector<std::vector<double>> table(size, std::vector<double>(size, 1.0));
  for (int i = 0; i < size; ++i) table[i][i] = 0.0;
  return DistortionMatrix(table);
}

Sequence sample_side_info(const Sequence& x, const Channel& ch, Seed seed) {
  require(x.alphabet() <= ch.input_size(), ErrorCode::kConfigError,
          "sequence alphabet exceeds channel input alphabet");
  Rng rng(seed);
  std::vector<int> y;
  y.reserve(static_cast<std::size_t>(x.size()));
  for (std::int64_t i = 0; i < x.size(); ++i) {
    y.push_back(rng.sample_pmf(ch.row(x[i])));
  }
  return Sequence(std::move(y), ch.output_size());
}

double average_distortion(const Sequence& x, const Sequence& xh, const DistortionMatrix& rho) {
  require(x.size() == xh.size(), ErrorCode::kLengthMismatch,
          "average_distortion: sequences have different lengths");
  if (x.size() == 0) return 0.0;
  double total = 0.0;
  for (std::int64_t i = 0; i < x.size(); ++i) total += rho.at(x[i], xh[i]);
  return total / static_cast<double>(x.size());
}

}  // namespace wzis
