#include <cmath>

#include "costas/config.hpp"
#include "costas/math.hpp"

namespace costas {

double data_eval(const DataSignalSpec& spec, double t) {
  switch (spec.kind) {
    case DataKind::kConstant:
      return spec.value;
    case DataKind::kSquare:
      return limiter_sign(std::sin(spec.omega_m * t));
  }
  return spec.value;
}

}  // namespace costas
