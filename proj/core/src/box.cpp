#include "hjfb/box.hpp"

#include <algorithm>
#include <cmath>

#include "hjfb/errors.hpp"

namespace hjfb {

Box::Box(Vec lo, Vec hi) : lower(lo), upper(hi) {
    if (lo.dim() != hi.dim()) throw DimensionMismatch("box corners differ in dimension");
    for (int k = 0; k < lo.dim(); ++k) {
        if (!(hi[k] > lo[k])) throw InvalidArgument("box needs lower < upper on every axis");
    }
}

bool Box::contains(const Vec& x, double rel_slack) const {
    if (x.dim() != dim()) return false;
    for (int k = 0; k < dim(); ++k) {
        const double slack = rel_slack * (upper[k] - lower[k]);
        if (x[k] < lower[k] - slack || x[k] > upper[k] + slack) return false;
    }
    return true;
}

double Box::diameter() const { return (upper - lower).norm(); }

Vec Box::clamp(const Vec& x) const {
    Vec r = x;
    for (int k = 0; k < dim(); ++k) r[k] = std::clamp(x[k], lower[k], upper[k]);
    return r;
}

}  // namespace hjfb
