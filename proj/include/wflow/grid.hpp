#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace wflow {

// Uniform axis including both endpoints.
struct Axis {
  double min = 0.0;
  double max = 0.0;
  int n = 0;

  double step() const { return (max - min) / (n - 1); }
  double at(int i) const { return min + i * step(); }
};

// Rectangular uniform sampling of phase space. Field storage is x-major:
// index = i * k.n + j for node (x.at(i), k.at(j)).
struct PhaseSpaceGrid {
  static constexpr int kMinPoints = 16;

  Axis x;
  Axis k;

  static PhaseSpaceGrid symmetric(double x_max, double k_max, int nx, int nk);
  // [-8, 8]^2 with 256 x 256 nodes.
  static PhaseSpaceGrid default_phase_space();

  // Throws InputError.
  void validate() const;

  std::size_t size() const {
    return static_cast<std::size_t>(x.n) * static_cast<std::size_t>(k.n);
  }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(k.n) +
           static_cast<std::size_t>(j);
  }
};

struct FieldExtremum {
  double value = 0.0;  // signed value at the argmax of |value|
  double x = 0.0;
  double k = 0.0;
  bool found = false;  // false when every node is masked
};

// Real values on a grid; masked nodes carry no value.
class ScalarField {
 public:
  explicit ScalarField(PhaseSpaceGrid grid);

  const PhaseSpaceGrid& grid() const { return grid_; }

  double value(int i, int j) const { return values_[grid_.index(i, j)]; }
  bool masked(int i, int j) const { return mask_[grid_.index(i, j)] != 0; }
  void set(int i, int j, double v);
  void set_masked(int i, int j);

  std::size_t masked_count() const;
  // Largest |value| over unmasked nodes.
  FieldExtremum max_abs() const;

  const std::vector<double>& values() const { return values_; }

 private:
  PhaseSpaceGrid grid_;
  std::vector<double> values_;
  std::vector<unsigned char> mask_;
};

struct VectorField {
  ScalarField x;
  ScalarField k;

  explicit VectorField(const PhaseSpaceGrid& grid) : x(grid), k(grid) {}
};

// Calls row(i) for every x index, partitioning rows over worker threads.
// Rows are disjoint, so writers need no coordination.
void parallel_rows(int rows, const std::function<void(int)>& row,
                   unsigned threads = 0);

// Dense field of evaluator(x, k). An evaluator returning std::optional
// signals masked nodes with std::nullopt.
template <class Evaluator>
ScalarField field_sweep(Evaluator&& evaluator, const PhaseSpaceGrid& grid,
                        unsigned threads = 0) {
  grid.validate();
  ScalarField field(grid);
  parallel_rows(
      grid.x.n,
      [&](int i) {
        const double x = grid.x.at(i);
        for (int j = 0; j < grid.k.n; ++j) {
          const double k = grid.k.at(j);
          using Result = std::invoke_result_t<Evaluator&, double, double>;
          if constexpr (std::is_same_v<Result, std::optional<double>>) {
            const std::optional<double> v = evaluator(x, k);
            if (v) {
              field.set(i, j, *v);
            } else {
              field.set_masked(i, j);
            }
          } else {
            field.set(i, j, evaluator(x, k));
          }
        }
      },
      threads);
  return field;
}

}  // namespace wflow
