#pragma once

namespace hl {

/// Uniform cell-centred grid on [-L, L].
///
/// Cells per unit stress k = n / (2L) is a positive integer and n is even,
/// so -1, 0 and +1 are cell edges and every edge is an exact multiple of 1/k.
class StressGrid {
 public:
  /// Throws ConfigError naming the nearest admissible n when misaligned.
  static StressGrid build(double half_width, int n_cells);

  /// Nearest even n for which n / (2L) is a positive integer, or 0 if none.
  static int nearest_admissible(double half_width, int n_cells);

  double half_width() const { return half_width_; }
  int n_cells() const { return n_; }
  int cells_per_unit() const { return k_; }
  double cell_width() const { return 1.0 / k_; }

  /// Edge i in [0, n]; edge(n/2) == 0.
  double edge(int i) const { return static_cast<double>(i - n_ / 2) / k_; }
  /// Centre of cell i in [0, n).
  double center(int i) const {
    return (static_cast<double>(i - n_ / 2) + 0.5) / k_;
  }

  /// Cells [inner_begin, inner_end) cover [-1, 1].
  int inner_begin() const { return n_ / 2 - k_; }
  int inner_end() const { return n_ / 2 + k_; }
  bool outside_threshold(int i) const {
    return i < inner_begin() || i >= inner_end();
  }

  /// The two cells adjacent to sigma = 0.
  int source_left() const { return n_ / 2 - 1; }
  int source_right() const { return n_ / 2; }

  bool operator==(const StressGrid&) const = default;

 private:
  StressGrid(double half_width, int n, int k)
      : half_width_(half_width), n_(n), k_(k) {}

  double half_width_;
  int n_;
  int k_;
};

}  // namespace hl
