#include "clumem/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace clumem::ot {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kReducedCostTol = 1e-12;
} // namespace

Assignment assignment(const double* cost, std::size_t n) {
    Assignment out;
    if (n == 0) return out;

    // dual-potential shortest augmenting paths; 1-based with column 0 virtual
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);

    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    out.col_of_row.assign(n, 0);
    for (std::size_t j = 1; j <= n; ++j) {
        out.col_of_row[p[j] - 1] = j - 1;
        out.cost += cost[(p[j] - 1) * n + (j - 1)];
    }
    return out;
}

namespace {

struct BasicCell {
    std::size_t i, j;
    double flow;
};

// rebuilds node adjacency over the current basis tree
void build_adjacency(const std::vector<BasicCell>& basis, std::size_t n,
                     std::size_t m, std::vector<std::vector<std::size_t>>& adj) {
    adj.assign(n + m, {});
    for (std::size_t e = 0; e < basis.size(); ++e) {
        adj[basis[e].i].push_back(e);
        adj[n + basis[e].j].push_back(e);
    }
}

} // namespace

TransportPlan transport(const double* supply, std::size_t n,
                        const double* demand, std::size_t m,
                        const double* cost) {
    if (n == 0 || m == 0)
        throw std::invalid_argument("transport: empty marginal");
    std::vector<double> s(supply, supply + n), d(demand, demand + m);
    double ssum = 0.0, dsum = 0.0;
    for (double w : s) {
        if (!(w > 0.0)) throw std::invalid_argument("transport: supplies must be positive");
        ssum += w;
    }
    for (double w : d) {
        if (!(w > 0.0)) throw std::invalid_argument("transport: demands must be positive");
        dsum += w;
    }
    if (std::abs(ssum - dsum) > 1e-9)
        throw std::invalid_argument("transport: unbalanced marginals");
    d[m - 1] += ssum - dsum; // exact balance

    // northwest-corner start; a simultaneous exhaust inserts a zero cell so
    // the basis always holds n+m-1 cells forming a spanning tree
    std::vector<BasicCell> basis;
    basis.reserve(n + m - 1);
    {
        std::size_t i = 0, j = 0;
        double rs = s[0], rd = d[0];
        while (true) {
            const double f = std::min(rs, rd);
            basis.push_back({i, j, f});
            rs -= f;
            rd -= f;
            if (i + 1 == n && j + 1 == m) break;
            if (i + 1 < n && (rs <= 0.0 || j + 1 == m)) {
                ++i;
                rs = s[i];
            } else {
                ++j;
                rd = d[j];
            }
        }
    }

    std::vector<char> is_basic(n * m, 0);
    for (const auto& c : basis) is_basic[c.i * m + c.j] = 1;

    std::vector<double> u(n), v(m);
    std::vector<char> u_set(n), v_set(m);
    std::vector<std::vector<std::size_t>> adj;
    std::vector<std::size_t> stack, parent_edge, parent_node;

    const std::size_t max_pivots = 2000 + 400 * (n + m);
    for (std::size_t pivot = 0;; ++pivot) {
        if (pivot >= max_pivots)
            throw std::runtime_error("transport: pivot limit exceeded");

        build_adjacency(basis, n, m, adj);

        // potentials via tree traversal from row 0
        std::fill(u_set.begin(), u_set.end(), 0);
        std::fill(v_set.begin(), v_set.end(), 0);
        u[0] = 0.0;
        u_set[0] = 1;
        stack.assign(1, 0);
        while (!stack.empty()) {
            const std::size_t node = stack.back();
            stack.pop_back();
            for (std::size_t e : adj[node]) {
                const BasicCell& c = basis[e];
                if (node < n) {
                    if (!v_set[c.j]) {
                        v[c.j] = cost[c.i * m + c.j] - u[c.i];
                        v_set[c.j] = 1;
                        stack.push_back(n + c.j);
                    }
                } else {
                    if (!u_set[c.i]) {
                        u[c.i] = cost[c.i * m + c.j] - v[c.j];
                        u_set[c.i] = 1;
                        stack.push_back(c.i);
                    }
                }
            }
        }

        // entering cell: Dantzig (most negative reduced cost), switching to
        // Bland's first-improving rule late as an anti-cycling guard
        const bool bland = pivot >= max_pivots / 2;
        std::size_t ei = 0, ej = 0;
        double best = -kReducedCostTol;
        bool found = false;
        for (std::size_t i = 0; i < n && !(found && bland); ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                if (is_basic[i * m + j]) continue;
                const double red = cost[i * m + j] - u[i] - v[j];
                if (red < best) {
                    best = red;
                    ei = i;
                    ej = j;
                    found = true;
                    if (bland) break;
                }
            }
        }
        if (!found) break; // optimal

        // cycle: tree path from row ei to column ej
        parent_edge.assign(n + m, SIZE_MAX);
        parent_node.assign(n + m, SIZE_MAX);
        stack.assign(1, ei);
        std::vector<char> seen(n + m, 0);
        seen[ei] = 1;
        while (!stack.empty()) {
            const std::size_t node = stack.back();
            stack.pop_back();
            if (node == n + ej) break;
            for (std::size_t e : adj[node]) {
                const BasicCell& c = basis[e];
                const std::size_t other = (node < n) ? n + c.j : c.i;
                if (!seen[other]) {
                    seen[other] = 1;
                    parent_edge[other] = e;
                    parent_node[other] = node;
                    stack.push_back(other);
                }
            }
        }

        // walk back from the column end; path edges alternate -,+ starting
        // with - at the row-ei end
        std::vector<std::size_t> path;
        for (std::size_t node = n + ej; node != ei; node = parent_node[node])
            path.push_back(parent_edge[node]);
        std::reverse(path.begin(), path.end());

        double theta = kInf;
        std::size_t leave_pos = SIZE_MAX;
        for (std::size_t k = 0; k < path.size(); k += 2) { // minus edges
            const double f = basis[path[k]].flow;
            if (f < theta) {
                theta = f;
                leave_pos = k;
            }
        }

        for (std::size_t k = 0; k < path.size(); ++k) {
            if (k % 2 == 0)
                basis[path[k]].flow -= theta;
            else
                basis[path[k]].flow += theta;
        }
        const std::size_t leave_edge = path[leave_pos];
        is_basic[basis[leave_edge].i * m + basis[leave_edge].j] = 0;
        is_basic[ei * m + ej] = 1;
        basis[leave_edge] = {ei, ej, theta};
    }

    TransportPlan plan;
    plan.flow.assign(n * m, 0.0);
    for (const auto& c : basis) {
        const double f = (c.flow < 0.0 && c.flow > -1e-12) ? 0.0 : c.flow;
        plan.flow[c.i * m + c.j] = f;
        plan.cost += f * cost[c.i * m + c.j];
    }
    return plan;
}

} // namespace clumem::ot
