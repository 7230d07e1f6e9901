#include "phasefront/nonlinearity.hpp"

#include <memory>
#include <utility>

namespace phasefront {

Nonlinearity nl_zero() {
  Nonlinearity f;
  f.dz = [](cplx) { return cplx(0.0, 0.0); };
  f.dzbar = [](cplx) { return cplx(0.0, 0.0); };
  return f;
}

Nonlinearity nl_identity() {
  Nonlinearity f;
  f.name = "identity";
  f.value = [](cplx u) { return u; };
  f.dz = [](cplx) { return cplx(1.0, 0.0); };
  f.dzbar = [](cplx) { return cplx(0.0, 0.0); };
  return f;
}

Nonlinearity nl_square() {
  Nonlinearity f;
  f.name = "square";
  f.value = [](cplx u) { return u * u; };
  f.dz = [](cplx u) { return 2.0 * u; };
  f.dzbar = [](cplx) { return cplx(0.0, 0.0); };
  return f;
}

Nonlinearity nl_gauge() {
  Nonlinearity f;
  f.name = "gauge";
  f.value = [](cplx u) { return u * u * std::conj(u); };
  f.dz = [](cplx u) { return 2.0 * u * std::conj(u); };
  f.dzbar = [](cplx u) { return u * u; };
  return f;
}

Nonlinearity nl_power_series(std::vector<cplx> coeffs) {
  Nonlinearity f;
  f.name = "power-series";
  auto c = std::make_shared<std::vector<cplx>>(std::move(coeffs));
  f.value = [c](cplx u) {
    // Horner from the top: sum_{k>=1} c[k-1] u^k = u * (c0 + u*(c1 + ...)).
    cplx acc(0.0, 0.0);
    for (auto it = c->rbegin(); it != c->rend(); ++it) acc = acc * u + *it;
    return u * acc;
  };
  f.dz = [c](cplx u) {
    cplx acc(0.0, 0.0);
    double k = static_cast<double>(c->size());
    for (auto it = c->rbegin(); it != c->rend(); ++it, k -= 1.0)
      acc = acc * u + k * (*it);
    return acc;
  };
  f.dzbar = [](cplx) { return cplx(0.0, 0.0); };
  return f;
}

}  // namespace phasefront
