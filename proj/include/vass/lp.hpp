#pragma once

#include "vass/bigint.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace vass::lp {

// coeffs . x >= rhs, variables unrestricted in sign.
struct Row {
    Vec coeffs;
    Int rhs;
};

std::optional<std::vector<Rat>> feasible_point(const std::vector<Row>& rows, std::size_t nvars);

enum class IntStatus { Feasible, Infeasible, BudgetExceeded };

struct IntResult {
    IntStatus status = IntStatus::Infeasible;
    Vec point;
    std::size_t nodes = 0;
};

// Branch and bound inside a proximity box around an LP point; the box is
// large enough that an integer point exists in it whenever one exists at all.
IntResult integer_point(const std::vector<Row>& rows, std::size_t nvars, std::size_t node_budget = 2000000);

// Integer solutions of A x = rhs as x = base + kernel * z.
struct Lattice {
    bool solvable = false;
    Vec base;
    std::vector<Vec> kernel;  // columns
};

Lattice solve_integer_equalities(const std::vector<Vec>& matrix, const Vec& rhs, std::size_t nvars);

Int hadamard_bound(const std::vector<Row>& rows, std::size_t nvars);

}  // namespace vass::lp
