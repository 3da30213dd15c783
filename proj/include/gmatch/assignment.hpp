#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "gmatch/errors.hpp"

namespace gmatch {

// Dense square cost matrix for the linear assignment problem.
class CostMatrix {
public:
    explicit CostMatrix(int dim) : n_(dim) {
        if (dim < 1) throw ContractError("CostMatrix: dimension must be >= 1");
        c_.assign(static_cast<std::size_t>(dim) * dim, 0.0);
    }

    int dim() const { return n_; }
    double& at(int i, int j) { return c_[static_cast<std::size_t>(i) * n_ + j]; }
    double at(int i, int j) const { return c_[static_cast<std::size_t>(i) * n_ + j]; }
    const double* data() const { return c_.data(); }

private:
    int n_;
    std::vector<double> c_;
};

struct Assignment {
    std::vector<int> perm;  // perm[i] = column assigned to row i
    double objective = 0.0;
};

namespace detail {

// Jonker-Volgenant shortest augmenting path algorithm for the dense LAP
// (Computing 38, 1987): column reduction, reduction transfer, two rounds of
// augmenting row reduction, then an augmentation phase growing shortest
// alternating paths. Ties are resolved toward the lowest column index, so the
// solution is deterministic.
inline Assignment jv_lap_min(const double* cost, int n) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    auto c = [&](int i, int j) { return cost[static_cast<std::size_t>(i) * n + j]; };

    std::vector<int> rowsol(n, -1), colsol(n, -1);
    std::vector<double> u(n, 0.0), v(n, 0.0);
    std::vector<int> free_rows(n), collist(n), matches(n, 0), pred(n);
    std::vector<double> d(n);

    // Column reduction, scanning columns in reverse.
    for (int j = n - 1; j >= 0; --j) {
        double minv = c(0, j);
        int imin = 0;
        for (int i = 1; i < n; ++i)
            if (c(i, j) < minv) {
                minv = c(i, j);
                imin = i;
            }
        v[j] = minv;
        if (++matches[imin] == 1) {
            rowsol[imin] = j;
            colsol[j] = imin;
        } else if (v[j] < v[rowsol[imin]]) {
            int j1 = rowsol[imin];
            rowsol[imin] = j;
            colsol[j] = imin;
            colsol[j1] = -1;
        } else {
            colsol[j] = -1;
        }
    }

    // Reduction transfer from singly-assigned rows.
    int numfree = 0;
    for (int i = 0; i < n; ++i) {
        if (matches[i] == 0) {
            free_rows[numfree++] = i;
        } else if (matches[i] == 1) {
            int j1 = rowsol[i];
            double minv = kInf;
            for (int j = 0; j < n; ++j)
                if (j != j1 && c(i, j) - v[j] < minv) minv = c(i, j) - v[j];
            v[j1] -= minv;
        }
    }

    // Augmenting row reduction, two rounds. Rows displacing each other over a
    // shared column normally make progress through the dual update on v; with
    // floating-point costs that update can be absorbed and the displacement
    // cycle forever, so re-insertions are capped per round. Rows left over are
    // handled exactly by the augmentation phase below.
    for (int loop = 0; loop < 2; ++loop) {
        int k = 0;
        int prvnumfree = numfree;
        long long reinserts = 0;
        const long long max_reinserts = 16LL * n + 64;
        numfree = 0;
        while (k < prvnumfree) {
            int i = free_rows[k++];
            double umin = c(i, 0) - v[0];
            double usubmin = kInf;
            int j1 = 0, j2 = -1;
            for (int j = 1; j < n; ++j) {
                double h = c(i, j) - v[j];
                if (h < usubmin) {
                    if (h >= umin) {
                        usubmin = h;
                        j2 = j;
                    } else {
                        usubmin = umin;
                        umin = h;
                        j2 = j1;
                        j1 = j;
                    }
                }
            }
            int i0 = colsol[j1];
            if (umin < usubmin) {
                v[j1] -= usubmin - umin;
            } else if (i0 >= 0) {
                j1 = j2;
                i0 = colsol[j2];
            }
            rowsol[i] = j1;
            colsol[j1] = i;
            if (i0 >= 0) {
                if (umin < usubmin && ++reinserts <= max_reinserts)
                    free_rows[--k] = i0;
                else
                    free_rows[numfree++] = i0;
            }
        }
    }

    // Augmentation: shortest alternating path from each remaining free row.
    for (int f = 0; f < numfree; ++f) {
        const int freerow = free_rows[f];
        for (int j = 0; j < n; ++j) {
            d[j] = c(freerow, j) - v[j];
            pred[j] = freerow;
            collist[j] = j;
        }
        int low = 0, up = 0, last = -1, endofpath = -1;
        double minv = 0.0;
        bool found = false;
        do {
            if (up == low) {
                last = low - 1;
                minv = d[collist[up++]];
                for (int k = up; k < n; ++k) {
                    int j = collist[k];
                    double h = d[j];
                    if (h <= minv) {
                        if (h < minv) {
                            up = low;
                            minv = h;
                        }
                        collist[k] = collist[up];
                        collist[up++] = j;
                    }
                }
                for (int k = low; k < up; ++k)
                    if (colsol[collist[k]] < 0) {
                        endofpath = collist[k];
                        found = true;
                        break;
                    }
            }
            if (!found) {
                int j1 = collist[low++];
                int i = colsol[j1];
                double h = c(i, j1) - v[j1] - minv;
                for (int k = up; k < n; ++k) {
                    int j = collist[k];
                    double v2 = c(i, j) - v[j] - h;
                    if (v2 < d[j]) {
                        pred[j] = i;
                        if (v2 == minv) {
                            if (colsol[j] < 0) {
                                endofpath = j;
                                found = true;
                                break;
                            }
                            collist[k] = collist[up];
                            collist[up++] = j;
                        }
                        d[j] = v2;
                    }
                }
            }
        } while (!found);

        for (int k = 0; k <= last; ++k) {
            int j1 = collist[k];
            v[j1] += d[j1] - minv;
        }

        int i;
        do {
            i = pred[endofpath];
            colsol[endofpath] = i;
            int j1 = endofpath;
            endofpath = rowsol[i];
            rowsol[i] = j1;
        } while (i != freerow);
    }

    Assignment out;
    out.perm = std::move(rowsol);
    for (int i = 0; i < n; ++i) {
        u[i] = c(i, out.perm[i]) - v[out.perm[i]];
        out.objective += c(i, out.perm[i]);
    }
    return out;
}

inline void check_finite(const double* cost, int n) {
    const std::size_t total = static_cast<std::size_t>(n) * n;
    for (std::size_t k = 0; k < total; ++k)
        if (!std::isfinite(cost[k])) throw ContractError("LAP: cost matrix has non-finite entries");
}

// Raw entry points for callers holding row-major buffers (avoids a copy in the
// matcher inner loop).
inline Assignment lap_min_rowmajor(const double* cost, int n) {
    if (n < 1) throw ContractError("LAP: dimension must be >= 1");
    check_finite(cost, n);
    return jv_lap_min(cost, n);
}

inline Assignment lap_max_rowmajor(const double* cost, int n) {
    if (n < 1) throw ContractError("LAP: dimension must be >= 1");
    check_finite(cost, n);
    std::vector<double> neg(static_cast<std::size_t>(n) * n);
    for (std::size_t k = 0; k < neg.size(); ++k) neg[k] = -cost[k];
    Assignment a = jv_lap_min(neg.data(), n);
    a.objective = -a.objective;
    return a;
}

}  // namespace detail

// Minimum-cost assignment of rows to columns.
inline Assignment solve_lap_min(const CostMatrix& c) {
    return detail::lap_min_rowmajor(c.data(), c.dim());
}

// Maximum-reward assignment (negate-and-minimize).
inline Assignment solve_lap_max(const CostMatrix& c) {
    return detail::lap_max_rowmajor(c.data(), c.dim());
}

}  // namespace gmatch
