#include "pvass/lp.hpp"

#include <stdexcept>

namespace pvass {

namespace {

// Dense simplex tableau in standard form: minimize cost over Ax = b, x >= 0.
struct Tableau {
    std::vector<std::vector<Rational>> rows;  // m x (n+1), last column is rhs
    std::vector<Rational> cost;               // n+1, last entry is -objective
    std::vector<int> basis;                   // m, column index of basic variable
    int cols = 0;

    void pivot(int r, int c) {
        const Rational p = rows[r][c];
        for (auto& v : rows[r]) v /= p;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (static_cast<int>(i) == r || rows[i][c] == 0) continue;
            const Rational f = rows[i][c];
            for (int j = 0; j <= cols; ++j) rows[i][j] -= f * rows[r][j];
        }
        if (cost[c] != 0) {
            const Rational f = cost[c];
            for (int j = 0; j <= cols; ++j) cost[j] -= f * rows[r][j];
        }
        basis[r] = c;
    }

    // Bland's rule: entering column is the lowest index with negative reduced
    // cost, leaving row is the minimal ratio with lowest basic index on ties.
    // Returns false when unbounded, true at optimum.
    bool iterate(const std::vector<bool>& allowed) {
        for (;;) {
            int entering = -1;
            for (int j = 0; j < cols; ++j) {
                if (allowed[j] && cost[j] < 0) {
                    entering = j;
                    break;
                }
            }
            if (entering < 0) return true;
            int leaving = -1;
            Rational best_ratio;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i][entering] <= 0) continue;
                Rational ratio = rows[i][cols] / rows[i][entering];
                if (leaving < 0 || ratio < best_ratio ||
                    (ratio == best_ratio && basis[i] < basis[leaving])) {
                    leaving = static_cast<int>(i);
                    best_ratio = ratio;
                }
            }
            if (leaving < 0) return false;
            pivot(leaving, entering);
        }
    }
};

}  // namespace

LpOutcome solve_lp(const LinearProgram& lp) {
    const int nvars = static_cast<int>(lp.variables.size());

    // Column layout per original variable: bounded variables shift to y >= 0,
    // free variables split into a difference of nonnegative parts.
    struct ColumnMap {
        int first = 0;
        bool split = false;
        Rational shift;
    };
    std::vector<ColumnMap> map(nvars);
    int structural = 0;
    for (int i = 0; i < nvars; ++i) {
        map[i].first = structural;
        if (lp.variables[i].lower) {
            map[i].shift = *lp.variables[i].lower;
            structural += 1;
        } else {
            map[i].split = true;
            structural += 2;
        }
    }

    const int m = static_cast<int>(lp.constraints.size());
    int slack_cols = 0;
    for (const auto& c : lp.constraints) {
        if (c.rel != LinearProgram::Relation::Equal) ++slack_cols;
    }
    const int total = structural + slack_cols + m;  // artificials on every row

    Tableau t;
    t.cols = total;
    t.rows.assign(m, std::vector<Rational>(total + 1, Rational(0)));
    t.basis.assign(m, -1);

    int slack_at = structural;
    for (int r = 0; r < m; ++r) {
        const auto& c = lp.constraints[r];
        // Rows may be shorter than the variable list; missing entries are 0.
        if (static_cast<int>(c.coeffs.size()) > nvars) {
            throw std::invalid_argument("constraint row longer than the variable list");
        }
        Rational rhs = c.rhs;
        const int ncoeffs = static_cast<int>(c.coeffs.size());
        for (int i = 0; i < ncoeffs; ++i) {
            const Rational& a = c.coeffs[i];
            if (a == 0) continue;
            t.rows[r][map[i].first] += a;
            if (map[i].split) {
                t.rows[r][map[i].first + 1] -= a;
            } else {
                rhs -= a * map[i].shift;
            }
        }
        if (c.rel == LinearProgram::Relation::LessEq) {
            t.rows[r][slack_at++] = 1;
        } else if (c.rel == LinearProgram::Relation::GreaterEq) {
            t.rows[r][slack_at++] = -1;
        }
        t.rows[r][total] = rhs;
        if (rhs < 0) {
            for (int j = 0; j <= total; ++j) t.rows[r][j] = -t.rows[r][j];
        }
        const int artificial = structural + slack_cols + r;
        t.rows[r][artificial] = 1;
        t.basis[r] = artificial;
    }

    // Phase 1: minimize the sum of artificials.
    t.cost.assign(total + 1, Rational(0));
    for (int r = 0; r < m; ++r) t.cost[structural + slack_cols + r] = 1;
    for (int r = 0; r < m; ++r) {
        for (int j = 0; j <= total; ++j) t.cost[j] -= t.rows[r][j];
    }
    std::vector<bool> allowed(total, true);
    t.iterate(allowed);
    // Phase-1 objective is -cost[total].
    if (-t.cost[total] != 0) {
        LpOutcome out;
        out.status = LpOutcome::Status::Infeasible;
        return out;
    }
    // Drive leftover artificials out of the basis; rows that cannot pivot are
    // redundant and harmless (their rhs is zero).
    for (int r = 0; r < m; ++r) {
        if (t.basis[r] < structural + slack_cols) continue;
        for (int j = 0; j < structural + slack_cols; ++j) {
            if (t.rows[r][j] != 0) {
                t.pivot(r, j);
                break;
            }
        }
    }
    for (int j = structural + slack_cols; j < total; ++j) allowed[j] = false;

    auto extract = [&](LpOutcome& out) {
        std::vector<Rational> cols(total, Rational(0));
        for (int r = 0; r < m; ++r) {
            if (t.basis[r] < total) cols[t.basis[r]] = t.rows[r][total];
        }
        out.assignment.resize(nvars);
        for (int i = 0; i < nvars; ++i) {
            if (map[i].split) {
                out.assignment[i] = cols[map[i].first] - cols[map[i].first + 1];
            } else {
                out.assignment[i] = cols[map[i].first] + map[i].shift;
            }
        }
    };

    LpOutcome out;
    if (!lp.objective) {
        out.status = LpOutcome::Status::Feasible;
        extract(out);
        return out;
    }

    // Phase 2 with the real objective, minimized.
    const bool maximize = lp.direction == LinearProgram::Direction::Maximize;
    std::vector<Rational> c(total + 1, Rational(0));
    Rational constant = 0;
    for (int i = 0; i < nvars; ++i) {
        Rational coef = (*lp.objective)[i];
        if (maximize) coef = -coef;
        if (coef == 0) continue;
        c[map[i].first] += coef;
        if (map[i].split) {
            c[map[i].first + 1] -= coef;
        } else {
            constant += coef * map[i].shift;
        }
    }
    t.cost = c;
    for (int r = 0; r < m; ++r) {
        if (t.basis[r] >= total || t.cost[t.basis[r]] == 0) continue;
        const Rational f = t.cost[t.basis[r]];
        for (int j = 0; j <= total; ++j) t.cost[j] -= f * t.rows[r][j];
    }
    if (!t.iterate(allowed)) {
        out.status = LpOutcome::Status::Unbounded;
        return out;
    }
    out.status = LpOutcome::Status::Optimal;
    Rational objective = -t.cost[total] + constant;
    out.value = maximize ? Rational(-objective) : objective;
    extract(out);
    return out;
}

}  // namespace pvass
