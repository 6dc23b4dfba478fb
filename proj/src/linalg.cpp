#include "pvass/linalg.hpp"

namespace pvass {

std::optional<Matrix> solve_linear(Matrix a, Matrix b) {
    const std::size_t n = a.size();
    if (n == 0) return Matrix{};
    const std::size_t k = b.front().size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col] == 0) ++pivot;
        if (pivot == n) return std::nullopt;
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        const Rational inv = a[col][col];
        for (std::size_t j = col; j < n; ++j) a[col][j] /= inv;
        for (std::size_t j = 0; j < k; ++j) b[col][j] /= inv;
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || a[row][col] == 0) continue;
            const Rational factor = a[row][col];
            for (std::size_t j = col; j < n; ++j) a[row][j] -= factor * a[col][j];
            for (std::size_t j = 0; j < k; ++j) b[row][j] -= factor * b[col][j];
        }
    }
    return b;
}

std::optional<std::vector<Rational>> solve_linear(Matrix a, std::vector<Rational> rhs) {
    Matrix b(rhs.size(), std::vector<Rational>(1));
    for (std::size_t i = 0; i < rhs.size(); ++i) b[i][0] = rhs[i];
    auto solved = solve_linear(std::move(a), std::move(b));
    if (!solved) return std::nullopt;
    std::vector<Rational> out(solved->size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*solved)[i][0];
    return out;
}

}  // namespace pvass
