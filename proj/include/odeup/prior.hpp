/**
 * @file prior.hpp
 * @brief q-times integrated Wiener process prior.
 *
 * State layout: for each of the d ODE coordinates a contiguous block of
 * q+1 entries holding the value and its first q time derivatives, i.e.
 * all matrices have the Kronecker form I_d ⊗ (·).
 */
#pragma once

#include "odeup/linalg.hpp"

namespace odeup {

struct IWPPrior {
  int d = 1;
  int q = 1;
  double kappa2 = 1.0;

  /// Throws InvalidArgument unless d ≥ 1, q ≥ 1 and kappa2 > 0.
  IWPPrior(int d, int q, double kappa2 = 1.0);

  [[nodiscard]] int state_dim() const noexcept { return d * (q + 1); }
  [[nodiscard]] IWPPrior with_diffusion(double new_kappa2) const { return IWPPrior(d, q, new_kappa2); }
};

/// I_d ⊗ Φ̆(h) with Φ̆(h)ᵢⱼ = h^(j−i)/(j−i)! for j ≥ i.
[[nodiscard]] Matrix transition(const IWPPrior& prior, double h);

/// Lower factor of I_d ⊗ κ² Q̆(h). Uses Q̆(h) = T Q̆(1) T with
/// T = diag(h^(q−i+½)), so small steps do not lose precision.
[[nodiscard]] Matrix process_noise_sqrt(const IWPPrior& prior, double h);

/// Dense I_d ⊗ κ² Q̆(h), evaluated entrywise.
[[nodiscard]] Matrix process_noise(const IWPPrior& prior, double h);

/// I_d ⊗ e_orderᵀ.
[[nodiscard]] Matrix projection(const IWPPrior& prior, int order);

}  // namespace odeup
