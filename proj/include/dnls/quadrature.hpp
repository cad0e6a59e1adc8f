#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace dnls::quad {

/// Composite Simpson rule on [a, b] with an even number of panels.
template <typename F>
double simpson(F&& f, double a, double b, int panels) {
    if (panels < 2) panels = 2;
    if (panels % 2 != 0) ++panels;
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

/// Running integral F(t_i) = int_{t_0}^{t_i} f, evaluated panel-wise with
/// Simpson sub-steps no longer than `max_step`. `times` must be
/// nondecreasing; the first entry of the result is 0.
template <typename F>
std::vector<double> cumulative_simpson(F&& f, std::span<const double> times, double max_step) {
    if (!(max_step > 0.0)) throw std::invalid_argument("quadrature step must be positive");
    std::vector<double> out(times.size(), 0.0);
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double a = times[i - 1];
        const double b = times[i];
        if (b < a) throw std::invalid_argument("quadrature abscissae must be nondecreasing");
        const int panels = 2 * static_cast<int>(std::ceil((b - a) / (2.0 * max_step)));
        out[i] = out[i - 1] + (b > a ? simpson(f, a, b, panels) : 0.0);
    }
    return out;
}

}  // namespace dnls::quad
