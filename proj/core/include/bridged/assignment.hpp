#ifndef BRIDGED_ASSIGNMENT_HPP
#define BRIDGED_ASSIGNMENT_HPP

#include <vector>

#include "bridged/types.hpp"

namespace bridged {

/// Minimum-cost assignment of every row to a distinct column (Hungarian
/// method with potentials, O(rows² · cols)). Requires rows <= cols and
/// finite costs. Returns the column chosen for each row.
std::vector<int> solve_assignment(const Matrix& cost);

/// Maximum-weight counterpart of solve_assignment.
std::vector<int> solve_max_assignment(const Matrix& weight);

/// Among all maximum-weight assignments, the lexicographically smallest
/// row -> column vector. Totals are compared with a relative tolerance, so
/// this is meant for small count matrices (bridges, confusion tables).
std::vector<int> solve_max_assignment_lex(const Matrix& weight);

double assignment_total(const Matrix& weight, const std::vector<int>& cols);

}  // namespace bridged

#endif  // BRIDGED_ASSIGNMENT_HPP
