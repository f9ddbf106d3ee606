#include "mdp/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "mdp/error.hpp"
#include "mdp/rng.hpp"

namespace mdp {

Tensor2D::Tensor2D(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Tensor2D::Tensor2D(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_string());
  }
}

Tensor2D Tensor2D::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(n * m);
  for (const auto& r : rows) {
    if (r.size() != m) throw DimensionError("ragged row initializer");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Tensor2D(n, m, std::move(data));
}

Tensor2D Tensor2D::row_vector(std::span<const double> values) {
  return Tensor2D(1, values.size(), {values.begin(), values.end()});
}

Tensor2D Tensor2D::column_vector(std::span<const double> values) {
  return Tensor2D(values.size(), 1, {values.begin(), values.end()});
}

bool Tensor2D::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string Tensor2D::shape_string() const {
  return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
}

void Tensor2D::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

double Xoshiro256::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace mdp
