#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fraclab {

/// Empirical envelope-ratio statistics for an inequality  lhs <= N * envelope
/// sampled on a grid.
struct BoundReport {
    std::string name;         // short identifier of the inequality
    std::string formula;      // the certified inequality, human readable
    double sup_ratio = 0.0;   // sup over the base grid of lhs / envelope
    double arg_t = 0.0;       // location of the sup (time or first coordinate)
    double arg_r = 0.0;       // location of the sup (radius, lambda, ...)
    std::string grid;         // grid description
    double refined_sup = 0.0; // same sup on the refined / extended grid
    double refinement_drift = 0.0;
    double drift_tolerance = 0.05;

    [[nodiscard]] bool finite() const { return std::isfinite(sup_ratio) && std::isfinite(refined_sup); }
    [[nodiscard]] bool passed() const { return finite() && refinement_drift < drift_tolerance; }

    void set_drift() {
        refinement_drift = std::abs(refined_sup - sup_ratio) / std::max(std::abs(sup_ratio), 1e-300);
    }
};

/// Running argmax helper used by the bound sweeps.
struct SupTracker {
    double sup = -1.0;
    double at_t = 0.0;
    double at_r = 0.0;
    bool nonfinite = false;

    void add(double value, double t, double r) {
        if (!std::isfinite(value)) {
            nonfinite = true;
            return;
        }
        if (value > sup) {
            sup = value;
            at_t = t;
            at_r = r;
        }
    }
    [[nodiscard]] double result() const {
        return nonfinite ? std::numeric_limits<double>::infinity() : sup;
    }
};

}  // namespace fraclab
