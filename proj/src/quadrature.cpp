#include "singreg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "singreg/errors.hpp"

namespace singreg {

namespace {

// 15-point Kronrod nodes on [-1, 1]; even indices are the 7-point Gauss nodes.
constexpr double kNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kKronrod[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kGauss[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
    double a = 0.0;
    double b = 0.0;
    double value = 0.0;
    double error = 0.0;
    bool operator<(const Interval& other) const
    {
        if (error != other.error)
            return error < other.error;
        return a > other.a;
    }
};

Interval kronrod15(const std::function<double(double)>& f, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kKronrod[7];
    double gauss = fc * kGauss[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kNodes[i];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kKronrod[i] * pair;
        if (i % 2 == 1)
            gauss += kGauss[i / 2] * pair;
    }
    Interval out{a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
    if (!std::isfinite(out.value))
        out.error = INFINITY;
    return out;
}

} // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& options)
{
    if (!(a > 0.0) || !(b > a))
        throw DomainError("integration needs 0 < a < b");
    const double decades = std::log10(b / a);
    const std::size_t panels = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(decades * static_cast<double>(options.panels_per_decade))));

    std::priority_queue<Interval> queue;
    double lo = a;
    for (std::size_t i = 1; i <= panels; ++i) {
        const double hi = i == panels ? b : a * std::pow(b / a, static_cast<double>(i) / static_cast<double>(panels));
        queue.push(kronrod15(f, lo, hi));
        lo = hi;
    }

    auto totals = [&queue]() {
        // Copy so the sums run in a fixed order independent of heap layout.
        std::vector<Interval> all;
        auto copy = queue;
        while (!copy.empty()) {
            all.push_back(copy.top());
            copy.pop();
        }
        std::sort(all.begin(), all.end(), [](const Interval& l, const Interval& r) { return l.a < r.a; });
        double value = 0.0, error = 0.0;
        for (const Interval& in : all) {
            value += in.value;
            error += in.error;
        }
        return std::pair{value, error};
    };

    auto [value, error] = totals();

    while (error > std::max(options.abs_tol, options.rel_tol * std::abs(value))) {
        if (queue.size() >= options.max_intervals || !std::isfinite(error)) {
            const Interval worst = queue.top();
            std::ostringstream msg;
            msg << "quadrature did not converge: estimated error " << error << " on value " << value
                << ", worst subinterval [" << worst.a << ", " << worst.b << "] with error "
                << worst.error;
            throw NumericError(msg.str());
        }
        const Interval worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Interval left = kronrod15(f, worst.a, mid);
        const Interval right = kronrod15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
        // Refresh the running sums periodically to shed cancellation drift.
        if (queue.size() % 64 == 0)
            std::tie(value, error) = totals();
    }
    std::tie(value, error) = totals();
    return {value, error, queue.size()};
}

} // namespace singreg
