#pragma once

#include <functional>
#include <string>
#include <vector>

#include "phasefront/field.hpp"

// Smooth pointwise nonlinearities F(u) with F(0) = 0, carried together with
// their Wirtinger derivatives dF/du and dF/d(conj u). The derivatives feed
// the paradifferential linearization; the evolution solver only evaluates F.
namespace phasefront {

struct Nonlinearity {
  std::string name = "zero";
  std::function<cplx(cplx)> value = [](cplx) { return cplx(0.0, 0.0); };
  // Wirtinger derivatives dF/du and dF/d(conj u). The built-ins set them
  // analytically; leave them empty and consumers fall back to central finite
  // differences on the real coordinate pair.
  std::function<cplx(cplx)> dz;
  std::function<cplx(cplx)> dzbar;
};

Nonlinearity nl_zero();
Nonlinearity nl_identity();                       // F(u) = u
Nonlinearity nl_square();                         // F(u) = u^2
Nonlinearity nl_gauge();                          // F(u) = |u|^2 u
// F(u) = sum_{k>=1} coeffs[k-1] u^k (no constant term, so F(0) = 0).
Nonlinearity nl_power_series(std::vector<cplx> coeffs);

}  // namespace phasefront
