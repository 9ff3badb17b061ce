#pragma once

#include <variant>

#include "ruzsa/finite_pmf.hpp"
#include "ruzsa/grid_density.hpp"
#include "ruzsa/parametric.hpp"

namespace ruzsa {

using Density = std::variant<FinitePMF, GridDensity, ParametricDensity>;

inline const GroupSpec& group_of(const Density& d) {
  return std::visit([](const auto& x) -> const GroupSpec& { return x.group(); }, d);
}

}  // namespace ruzsa
