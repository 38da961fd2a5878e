#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hjfb {

/// Outcome of a sampling-based structural check.
///
/// passed == (worst_margin <= tolerance) unless premise_violated is set, in
/// which case the check could not be run and passed is false.
struct CheckReport {
    std::string name;
    bool passed = false;
    double worst_margin = 0.0;
    double tolerance = 0.0;
    /// Flattened sampled input achieving worst_margin; layout described by `note`.
    std::vector<double> witness;
    std::string note;
    int n_samples = 0;
    std::uint64_t seed = 0;
    bool premise_violated = false;
    /// Sub-checks for composite reports.
    std::vector<CheckReport> parts;
};

/// Running worst-case tracker used by the samplers.
class WorstCase {
public:
    explicit WorstCase(double initial = -1e300) : worst_(initial) {}

    template <class WitnessFn>
    void offer(double margin, WitnessFn&& make_witness) {
        if (margin > worst_ || !seen_) {
            worst_ = margin;
            witness_ = make_witness();
            seen_ = true;
        }
    }

    [[nodiscard]] double worst() const noexcept { return worst_; }
    [[nodiscard]] std::vector<double> witness() const { return witness_; }

private:
    double worst_;
    std::vector<double> witness_;
    bool seen_ = false;
};

}  // namespace hjfb
