#pragma once

#include "hjfb/symmat.hpp"

namespace hjfb {

/// Axis-aligned box [lower, upper] in R^d.
struct Box {
    Vec lower;
    Vec upper;

    Box() = default;
    Box(Vec lo, Vec hi);

    [[nodiscard]] int dim() const noexcept { return lower.dim(); }
    /// Containment with an absolute slack scaled by the box size.
    [[nodiscard]] bool contains(const Vec& x, double rel_slack = 1e-12) const;
    [[nodiscard]] double diameter() const;
    [[nodiscard]] Vec clamp(const Vec& x) const;

    friend bool operator==(const Box&, const Box&) = default;
};

}  // namespace hjfb
