#pragma once

// Exact solvers for the small discrete optimal-transport problems behind the
// Wasserstein distance: a shortest-augmenting-path assignment solver for the
// uniform equal-size case and a transportation simplex for general weights.
// Problem sizes in this codebase are tiny (tens of atoms), so exactness is
// cheap and no approximate solver is offered.

#include <cstddef>
#include <vector>

namespace clumem::ot {

struct Assignment {
    std::vector<std::size_t> col_of_row;
    double cost = 0.0;
};

// minimum-cost perfect matching on an n x n cost matrix (row major),
// O(n^3) shortest augmenting paths with dual potentials
Assignment assignment(const double* cost, std::size_t n);

struct TransportPlan {
    std::vector<double> flow; // n x m, row major
    double cost = 0.0;
};

// Exact transportation problem: minimize sum flow[i][j]*cost[i][j] subject
// to row sums = supply and column sums = demand. Supplies and demands must
// be positive and balanced within 1e-9 (the residual is folded into the
// last demand). Dantzig pivoting with a Bland fallback for termination.
TransportPlan transport(const double* supply, std::size_t n,
                        const double* demand, std::size_t m,
                        const double* cost);

} // namespace clumem::ot
