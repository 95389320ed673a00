#include "pdham/sym/linalg.hpp"

#include "pdham/error.hpp"

namespace pdham::sym {

Expr LinearSolution::certificate() const {
    Expr c(1);
    for (const auto& p : pivots) c *= p;
    return c;
}

namespace {

std::size_t weight(const Expr& e) { return e.num().size() + e.den().size(); }

}  // namespace

LinearSolution solve_linear(const Matrix& a, const std::vector<Expr>& b, const Reducer& reduce,
                            const ZeroTestConfig& cfg) {
    const std::size_t rows = a.size();
    const std::size_t cols = rows == 0 ? 0 : a[0].size();
    auto red = [&](const Expr& e) { return reduce ? reduce(e) : e; };

    Matrix m(rows, std::vector<Expr>(cols + 1));
    for (std::size_t r = 0; r < rows; ++r) {
        if (a[r].size() != cols) throw std::invalid_argument("ragged matrix");
        for (std::size_t c = 0; c < cols; ++c) m[r][c] = red(a[r][c]);
        m[r][cols] = red(b.at(r));
    }

    auto decide = [&](const Expr& e) {
        const ZeroVerdict v = is_zero(e, cfg);
        if (v.decision == Decision::Unknown) throw unknown_error("cannot decide whether pivot " + e.str() + " vanishes");
        return v.zero();
    };

    LinearSolution sol;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        // Prefer constant pivots, then the smallest candidate.
        std::size_t best = rows;
        for (std::size_t k = r; k < rows; ++k) {
            if (m[k][c].is_zero()) continue;
            if (decide(m[k][c])) {
                m[k][c] = Expr();
                continue;
            }
            if (best == rows) {
                best = k;
                continue;
            }
            const bool kc = m[k][c].is_constant();
            const bool bc = m[best][c].is_constant();
            if ((kc && !bc) || (kc == bc && weight(m[k][c]) < weight(m[best][c]))) best = k;
        }
        if (best == rows) continue;
        std::swap(m[r], m[best]);
        const Expr piv = m[r][c];
        sol.pivots.push_back(piv);
        sol.pivot_columns.push_back(static_cast<int>(c));
        for (std::size_t j = c; j <= cols; ++j)
            if (!m[r][j].is_zero()) m[r][j] = red(m[r][j] / piv);
        for (std::size_t k = 0; k < rows; ++k) {
            if (k == r || m[k][c].is_zero()) continue;
            const Expr f = m[k][c];
            for (std::size_t j = c; j <= cols; ++j)
                if (!m[r][j].is_zero()) m[k][j] = red(m[k][j] - f * m[r][j]);
        }
        ++r;
    }
    sol.rank = static_cast<int>(r);

    for (std::size_t k = r; k < rows; ++k) {
        const Expr& rhs = m[k][cols];
        if (rhs.is_zero()) continue;
        const ZeroVerdict v = is_zero(rhs, cfg);
        if (v.decision == Decision::Unknown) throw unknown_error("cannot decide solvability condition " + rhs.str());
        if (!v.zero()) sol.conditions.push_back(rhs);
    }

    sol.particular.assign(cols, Expr());
    for (std::size_t k = 0; k < r; ++k)
        sol.particular[static_cast<std::size_t>(sol.pivot_columns[k])] = m[k][cols];

    std::vector<bool> is_pivot(cols, false);
    for (int pc : sol.pivot_columns) is_pivot[static_cast<std::size_t>(pc)] = true;
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        std::vector<Expr> v(cols);
        v[free] = 1;
        for (std::size_t k = 0; k < r; ++k) v[static_cast<std::size_t>(sol.pivot_columns[k])] = -m[k][free];
        sol.nullspace.push_back(std::move(v));
    }
    return sol;
}

}  // namespace pdham::sym
