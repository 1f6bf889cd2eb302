#include "volterra/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace volterra {

namespace {

// Kronrod-15 abscissae on [0,1] side (symmetric), with K15 weights; the
// G7 weights sit at the even-indexed abscissae.
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment eval_gk(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kXgk[i]);
        fv[14 - i] = f(c + h * kXgk[i]);
    }
    fv[7] = f(c);
    double kron = 0.0, gauss = 0.0, resabs = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double pair = (i == 7) ? fv[7] : fv[i] + fv[14 - i];
        const double abs_pair =
            (i == 7) ? std::abs(fv[7]) : std::abs(fv[i]) + std::abs(fv[14 - i]);
        kron += kWgk[i] * pair;
        resabs += kWgk[i] * abs_pair;
        if (i % 2 == 1) gauss += kWg[i / 2] * pair;
    }
    // spread of f around its Kronrod mean, used to scale the error estimate
    const double mean = kron * 0.5;
    double resasc = kWgk[7] * std::abs(fv[7] - mean);
    for (int i = 0; i < 7; ++i)
        resasc +=
            kWgk[i] * (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));
    resasc *= h;
    resabs *= h;
    Segment seg;
    seg.a = a;
    seg.b = b;
    seg.value = kron * h;
    double err = std::abs((kron - gauss) * h);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / eps50)
        err = std::max(eps50 * resabs, err);
    seg.error = err;
    return seg;
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadratureConfig& cfg) {
    QuadResult res;
    if (a == b) {
        res.converged = true;
        return res;
    }
    std::priority_queue<Segment> heap;
    heap.push(eval_gk(f, a, b));
    res.evaluations = 15;
    double total = heap.top().value;
    double err = heap.top().error;
    int splits = 0;
    while (splits < cfg.max_subdivisions) {
        const double tol =
            std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total));
        if (err <= tol || !std::isfinite(err)) break;
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Segment left = eval_gk(f, worst.a, mid);
        Segment right = eval_gk(f, mid, worst.b);
        res.evaluations += 30;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++splits;
    }
    res.value = total;
    res.error = err;
    res.converged =
        std::isfinite(total) &&
        err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total));
    return res;
}

QuadResult integrate_half_line(const std::function<double(double)>& f,
                               const QuadratureConfig& cfg) {
    const double cutoff = cfg.domain_cutoff;
    auto mapped = [&f, cutoff](double u) {
        const double om = 1.0 - u;
        const double t = u / om;
        if (t > cutoff) return 0.0;
        return f(t) / (om * om);
    };
    return integrate(mapped, 0.0, 1.0, cfg);
}

double integrate_strict(const std::function<double(double)>& f, double a,
                        double b, const QuadratureConfig& cfg) {
    const QuadResult res = integrate(f, a, b, cfg);
    if (!res.converged)
        throw QuadratureError("quadrature failed to converge (error " +
                              std::to_string(res.error) + ")");
    return res.value;
}

double integrate_half_line_strict(const std::function<double(double)>& f,
                                  const QuadratureConfig& cfg) {
    const QuadResult res = integrate_half_line(f, cfg);
    if (!res.converged)
        throw QuadratureError("half-line quadrature failed to converge (error " +
                              std::to_string(res.error) + ")");
    return res.value;
}

}  // namespace volterra
