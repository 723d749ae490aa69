#pragma once

#include <algorithm>
#include <vector>

#include "supercrit/algebra.hpp"
#include "supercrit/common.hpp"

namespace testsupport {

using supercrit::Point;
using supercrit::Rng;

inline supercrit::algebra::AlgebraElement random_element(int dim, Rng& rng, double scale = 1.0) {
    auto a = supercrit::algebra::AlgebraElement::zero(dim);
    for (int i = 0; i < dim; ++i) a.c[i] = scale * rng.normal();
    return a;
}

// Random multivariate polynomial of total degree <= max_degree.
struct Polynomial {
    struct Monomial {
        double coeff;
        std::vector<int> exps;
    };
    std::vector<Monomial> terms;

    double operator()(const Point& x) const {
        double s = 0.0;
        for (const auto& m : terms) {
            double t = m.coeff;
            for (std::size_t i = 0; i < x.size(); ++i)
                for (int e = 0; e < m.exps[i]; ++e) t *= x[i];
            s += t;
        }
        return s;
    }
};

inline Polynomial random_polynomial(int vars, int max_degree, Rng& rng, int terms = 8) {
    Polynomial p;
    for (int t = 0; t < terms; ++t) {
        Polynomial::Monomial m;
        m.coeff = rng.uniform(-1.0, 1.0);
        m.exps.assign(vars, 0);
        int budget = rng.uniform_int(0, max_degree);
        while (budget > 0) {
            m.exps[rng.uniform_int(0, vars - 1)] += 1;
            --budget;
        }
        p.terms.push_back(std::move(m));
    }
    return p;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

}  // namespace testsupport
