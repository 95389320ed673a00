#pragma once

// Random polynomial data on small charts, shared by unit and acceptance tests.

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "pdham/sysdef/model.hpp"

namespace pdham::testing {

using sym::Expr;
using sysdef::Chart;
using sysdef::ChartPtr;

inline ChartPtr make_chart(int n, int m) {
    auto c = std::make_shared<Chart>();
    for (int i = 0; i < n; ++i) c->base.push_back("x" + std::to_string(i + 1));
    for (int a = 0; a < m; ++a) c->fiber.push_back("y" + std::to_string(a + 1));
    return c;
}

class RandomPoly {
public:
    explicit RandomPoly(std::uint64_t seed) : rng_(seed) {}

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    /// Sparse polynomial of total degree <= deg in all chart coordinates
    /// with small rational coefficients.
    Expr poly(const Chart& c, int deg, int terms = 3) {
        std::vector<std::string> vars = c.base;
        vars.insert(vars.end(), c.fiber.begin(), c.fiber.end());
        Expr out;
        for (int t = 0; t < terms; ++t) {
            const int num = uniform(-5, 5);
            if (num == 0) continue;
            Expr mono = Expr::rational(num, uniform(1, 3));
            const int d = uniform(0, deg);
            for (int k = 0; k < d; ++k) mono *= Expr::symbol(vars[static_cast<std::size_t>(uniform(0, static_cast<int>(vars.size()) - 1))]);
            out += mono;
        }
        return out;
    }

    sysdef::Form0 form0(const ChartPtr& c, int deg) {
        sysdef::Form0 f{c, {}};
        for (int i = 0; i < c->n(); ++i) f.f.push_back(poly(*c, deg));
        return f;
    }

    sysdef::Form1 form1(const ChartPtr& c, int deg) {
        sysdef::Form1 t = sysdef::Form1::zero(c);
        for (int i = 0; i < c->n(); ++i)
            for (int a = 0; a < c->m(); ++a) t.th[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] = poly(*c, deg);
        t.h = poly(*c, deg);
        return t;
    }

    /// Not closed in general.
    sysdef::Form2 form2(const ChartPtr& c, int deg) {
        sysdef::Form2 w(c);
        for (int i = 0; i < c->n(); ++i)
            for (int a = 0; a < c->m(); ++a)
                for (int b = a + 1; b < c->m(); ++b) w.set_w(i, a, b, poly(*c, deg));
        for (int a = 0; a < c->m(); ++a) w.set_v(a, poly(*c, deg));
        return w;
    }

    sysdef::VerticalField field(const ChartPtr& c, int deg) {
        sysdef::VerticalField y{c, {}};
        for (int a = 0; a < c->m(); ++a) y.y.push_back(poly(*c, deg));
        return y;
    }

    sysdef::Connection connection(const ChartPtr& c, int deg) {
        sysdef::Connection n{c, {}};
        n.c.assign(static_cast<std::size_t>(c->n()), {});
        for (int i = 0; i < c->n(); ++i)
            for (int a = 0; a < c->m(); ++a) n.c[static_cast<std::size_t>(i)].push_back(poly(*c, deg));
        return n;
    }

private:
    std::mt19937_64 rng_;
};

}  // namespace pdham::testing
