#pragma once

namespace hl {

struct ModelParams {
  double alpha = 1.0;
  double epsilon = 1e-3;
  double half_width = 8.0;
  int n_cells = 1600;
  double tol_mass = 1e-6;
  double tol_root = 1e-12;
  double tol_ode = 1e-10;

  /// Throws ConfigError. epsilon == 0 is accepted only in degenerate mode.
  void validate(bool degenerate_mode) const;
};

}  // namespace hl
