// dense_solve.hpp — in-place dense LU solve with partial pivoting, used for
// the interior-point KKT systems (a few hundred unknowns at most).
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace mvv::detail {

// Solves M x = rhs in place; M is n x n row-major and is destroyed.
// Returns false on (numerical) singularity.
inline bool lu_solve(std::vector<double>& M, std::vector<double>& rhs, int n) {
    std::vector<int> piv(n);
    for (int i = 0; i < n; ++i) piv[i] = i;
    for (int col = 0; col < n; ++col) {
        int p = col;
        double best = std::abs(M[static_cast<size_t>(col) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            const double v = std::abs(M[static_cast<size_t>(r) * n + col]);
            if (v > best) {
                best = v;
                p = r;
            }
        }
        if (!(best > 0) || !std::isfinite(best)) return false;
        if (p != col) {
            for (int j = 0; j < n; ++j) std::swap(M[static_cast<size_t>(p) * n + j], M[static_cast<size_t>(col) * n + j]);
            std::swap(rhs[p], rhs[col]);
        }
        const double inv = 1.0 / M[static_cast<size_t>(col) * n + col];
        for (int r = col + 1; r < n; ++r) {
            const double f = M[static_cast<size_t>(r) * n + col] * inv;
            if (f == 0) continue;
            M[static_cast<size_t>(r) * n + col] = f;
            double*__restrict row = &M[static_cast<size_t>(r) * n];
            const double* __restrict prow = &M[static_cast<size_t>(col) * n];
            for (int j = col + 1; j < n; ++j) row[j] -= f * prow[j];
            rhs[r] -= f * rhs[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double acc = rhs[r];
        const double* row = &M[static_cast<size_t>(r) * n];
        for (int j = r + 1; j < n; ++j) acc -= row[j] * rhs[j];
        rhs[r] = acc / row[r];
    }
    return true;
}

}  // namespace mvv::detail
