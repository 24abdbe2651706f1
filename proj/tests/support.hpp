#pragma once

// Glue between the reference oracles and library types.

#include "oracles.hpp"

#include "epimetric/lab.hpp"

namespace testsupport {

inline epimetric::ConvexBody to_body(const oracle::Poly& p) {
    std::vector<epimetric::Vec2> v;
    for (const auto& q : p) v.emplace_back(q[0], q[1]);
    return epimetric::ConvexBody::polygon(std::move(v));
}

inline epimetric::Vec v1(double a) { return epimetric::Vec::Constant(1, a); }
inline epimetric::Vec v2(double a, double b) {
    epimetric::Vec v(2);
    v << a, b;
    return v;
}

inline epimetric::Mat m2(double a, double b, double c, double d) {
    epimetric::Mat m(2, 2);
    m << a, b, c, d;
    return m;
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(1e-300, std::abs(want)); }

}  // namespace testsupport
