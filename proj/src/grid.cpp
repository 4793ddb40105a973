#include "wflow/grid.hpp"

#include <cmath>
#include <exception>
#include <string>

#include "wflow/errors.hpp"

namespace wflow {
namespace {

void validate_axis(const Axis& a, const char* name) {
  if (!std::isfinite(a.min) || !std::isfinite(a.max) || !(a.max > a.min)) {
    throw InputError(std::string(name) + " axis needs finite max > min");
  }
  if (a.n < PhaseSpaceGrid::kMinPoints) {
    throw InputError(std::string(name) + " axis needs at least " +
                     std::to_string(PhaseSpaceGrid::kMinPoints) +
                     " points, got " + std::to_string(a.n));
  }
}

}  // namespace

PhaseSpaceGrid PhaseSpaceGrid::symmetric(double x_max, double k_max, int nx,
                                         int nk) {
  PhaseSpaceGrid g{{-x_max, x_max, nx}, {-k_max, k_max, nk}};
  g.validate();
  return g;
}

PhaseSpaceGrid PhaseSpaceGrid::default_phase_space() {
  return symmetric(8.0, 8.0, 256, 256);
}

void PhaseSpaceGrid::validate() const {
  validate_axis(x, "x");
  validate_axis(k, "k");
}

ScalarField::ScalarField(PhaseSpaceGrid grid)
    : grid_(grid), values_(grid.size(), 0.0), mask_(grid.size(), 0) {}

void ScalarField::set(int i, int j, double v) {
  values_[grid_.index(i, j)] = v;
  mask_[grid_.index(i, j)] = 0;
}

void ScalarField::set_masked(int i, int j) {
  values_[grid_.index(i, j)] = std::nan("");
  mask_[grid_.index(i, j)] = 1;
}

std::size_t ScalarField::masked_count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 1));
}

FieldExtremum ScalarField::max_abs() const {
  FieldExtremum best;
  for (int i = 0; i < grid_.x.n; ++i) {
    for (int j = 0; j < grid_.k.n; ++j) {
      if (masked(i, j)) continue;
      const double v = value(i, j);
      if (!best.found || std::abs(v) > std::abs(best.value)) {
        best = {v, grid_.x.at(i), grid_.k.at(j), true};
      }
    }
  }
  return best;
}

void parallel_rows(int rows, const std::function<void(int)>& row,
                   unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(rows, 1)));
  if (threads <= 1) {
    for (int i = 0; i < rows; ++i) row(i);
    return;
  }
  std::vector<std::exception_ptr> failures(threads);
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        try {
          for (int i = static_cast<int>(t); i < rows;
               i += static_cast<int>(threads)) {
            row(i);
          }
        } catch (...) {
          failures[t] = std::current_exception();
        }
      });
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

}  // namespace wflow
