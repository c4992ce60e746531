#include "bridged/assignment.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace bridged {

std::vector<int> solve_assignment(const Matrix& cost) {
    const auto n = static_cast<int>(cost.rows());
    const auto m = static_cast<int>(cost.cols());
    if (n == 0) return {};
    if (n > m) {
        throw ArgumentError(fmt::format("assignment needs rows <= cols, got {}x{}", n, m));
    }
    if (!cost.allFinite()) throw NumericError("assignment cost is not finite");

    // 1-based potentials formulation; column 0 is a virtual source.
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(m) + 1, 0.0);
    std::vector<int> owner(static_cast<std::size_t>(m) + 1, 0);
    std::vector<int> way(static_cast<std::size_t>(m) + 1, 0);
    std::vector<double> minv(static_cast<std::size_t>(m) + 1);
    std::vector<char> used(static_cast<std::size_t>(m) + 1);

    for (int i = 1; i <= n; ++i) {
        owner[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = owner[static_cast<std::size_t>(j0)];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                const auto ju = static_cast<std::size_t>(j);
                if (used[ju]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[ju];
                if (cur < minv[ju]) {
                    minv[ju] = cur;
                    way[ju] = j0;
                }
                if (minv[ju] < delta) {
                    delta = minv[ju];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                const auto ju = static_cast<std::size_t>(j);
                if (used[ju]) {
                    u[static_cast<std::size_t>(owner[ju])] += delta;
                    v[ju] -= delta;
                } else {
                    minv[ju] -= delta;
                }
            }
            j0 = j1;
        } while (owner[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            owner[static_cast<std::size_t>(j0)] = owner[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> result(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= m; ++j) {
        const int i = owner[static_cast<std::size_t>(j)];
        if (i > 0) result[static_cast<std::size_t>(i - 1)] = j - 1;
    }
    return result;
}

std::vector<int> solve_max_assignment(const Matrix& weight) {
    return solve_assignment(-weight);
}

double assignment_total(const Matrix& weight, const std::vector<int>& cols) {
    double total = 0.0;
    for (std::size_t r = 0; r < cols.size(); ++r) {
        total += weight(static_cast<Eigen::Index>(r), cols[r]);
    }
    return total;
}

std::vector<int> solve_max_assignment_lex(const Matrix& weight) {
    const auto n = static_cast<int>(weight.rows());
    const auto m = static_cast<int>(weight.cols());
    if (n == 0) return {};
    const double best = assignment_total(weight, solve_max_assignment(weight));
    const double tol = 1e-9 * (1.0 + std::abs(best));

    std::vector<int> chosen;
    std::vector<char> taken(static_cast<std::size_t>(m), 0);
    double fixed_total = 0.0;
    for (int r = 0; r < n; ++r) {
        bool placed = false;
        for (int c = 0; c < m && !placed; ++c) {
            if (taken[static_cast<std::size_t>(c)]) continue;
            // Optimum of the remaining rows over the remaining columns.
            std::vector<int> free_cols;
            for (int j = 0; j < m; ++j) {
                if (!taken[static_cast<std::size_t>(j)] && j != c) free_cols.push_back(j);
            }
            const int rest_rows = n - r - 1;
            double rest = 0.0;
            if (rest_rows > 0) {
                Matrix sub(rest_rows, static_cast<Eigen::Index>(free_cols.size()));
                for (int i = 0; i < rest_rows; ++i) {
                    for (std::size_t j = 0; j < free_cols.size(); ++j) {
                        sub(i, static_cast<Eigen::Index>(j)) = weight(r + 1 + i, free_cols[j]);
                    }
                }
                rest = assignment_total(sub, solve_max_assignment(sub));
            }
            const double total = fixed_total + weight(r, c) + rest;
            if (total >= best - tol) {
                chosen.push_back(c);
                taken[static_cast<std::size_t>(c)] = 1;
                fixed_total += weight(r, c);
                placed = true;
            }
        }
        if (!placed) throw NumericError("lexicographic assignment lost optimality");
    }
    return chosen;
}

}  // namespace bridged
