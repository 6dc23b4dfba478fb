#pragma once

#include <optional>
#include <vector>

#include "pvass/rational.hpp"

namespace pvass {

using Matrix = std::vector<std::vector<Rational>>;

// Solves A X = B exactly over the rationals for possibly several right-hand
// columns. Returns the n x k solution, or nullopt when A is singular.
// Pivot selection is deterministic (first nonzero in column order).
std::optional<Matrix> solve_linear(Matrix a, Matrix b);

// Single right-hand-side convenience overload.
std::optional<std::vector<Rational>> solve_linear(Matrix a, std::vector<Rational> rhs);

}  // namespace pvass
