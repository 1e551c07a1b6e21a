#pragma once

#include <functional>
#include <vector>

namespace mixeig {

struct Extremum {
    double x = 0.0;
    double value = 0.0;
};

/// Interior candidate points of (a, b): `count / 4` geometrically spaced points near each
/// end (from 1e-10 (b - a) up to (b - a) / 4) plus `count / 2` uniformly spaced ones.
std::vector<double> candidate_points(double a, double b, int count = 512);

/// Golden-section search for a maximum of f on [lo, hi]; f is only evaluated inside.
Extremum golden_maximize(const std::function<double(double)>& f, double lo, double hi, double x_tol = 1e-13);

/// Maximum of f over the sorted points xs, refined by golden section on the neighbouring
/// segments of the best point. `lo` and `hi` bound the first and last bracket. NaN values are
/// skipped; an infinite value is returned immediately.
Extremum maximize_over(const std::function<double(double)>& f, const std::vector<double>& xs, double lo, double hi);

/// Same as maximize_over with the sign flipped.
Extremum minimize_over(const std::function<double(double)>& f, const std::vector<double>& xs, double lo, double hi);

} // namespace mixeig
