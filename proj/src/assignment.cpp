#include <algorithm>
#include <limits>

#include "vospp/metrics.hpp"

namespace vospp {

namespace {

// Shortest augmenting path Hungarian method for an n x m cost matrix with
// n <= m. Returns the column assigned to each row.
std::vector<int> min_cost_rows(const std::vector<std::vector<double>>& cost, int n, int m) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    std::vector<char> used(m + 1);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
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
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= m; ++j) {
        if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
    }
    return row_to_col;
}

}  // namespace

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights) {
    const int rows = static_cast<int>(weights.size());
    if (rows == 0) return {};
    const int cols = static_cast<int>(weights.front().size());
    for (const auto& row : weights) require(static_cast<int>(row.size()) == cols, "assignment: ragged weight matrix");
    if (cols == 0) return std::vector<int>(rows, -1);

    double peak = 0.0;
    for (const auto& row : weights) {
        for (double w : row) peak = std::max(peak, w);
    }
    const bool transpose = rows > cols;
    const int n = transpose ? cols : rows;
    const int m = transpose ? rows : cols;
    std::vector<std::vector<double>> cost(n, std::vector<double>(m));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) cost[i][j] = peak - (transpose ? weights[j][i] : weights[i][j]);
    }
    const std::vector<int> assigned = min_cost_rows(cost, n, m);
    if (!transpose) return assigned;
    std::vector<int> out(rows, -1);
    for (int i = 0; i < n; ++i) {
        if (assigned[i] >= 0) out[assigned[i]] = i;
    }
    return out;
}

}  // namespace vospp
