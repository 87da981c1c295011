#include "spikelab/numerics/roots.hpp"
#include "spikelab/errors.hpp"

#include <cmath>
#include <algorithm>

namespace spikelab::numerics {

double brent(const std::function<double(double)>& f, double a, double b,
             double xtol, int max_iter) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw bracket_failure("brent: no sign change on bracket");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        double tol1 = 2.0 * 1e-16 * std::fabs(b) + 0.5 * xtol;
        double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            double s = fb / fa, p, q2;
            if (a == c) {
                p = 2.0 * xm * s;
                q2 = 1.0 - s;
            } else {
                double q = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q2 = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q2 = -q2;
            p = std::fabs(p);
            if (2.0 * p < std::min(3.0 * xm * q2 - std::fabs(tol1 * q2), std::fabs(e * q2))) {
                e = d;
                d = p / q2;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::fabs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
        if (fb * fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    return b;
}

double brent_scan(const std::function<double(double)>& f, double lo, double hi,
                  int scan, double xtol) {
    double x0 = lo, f0 = f(x0);
    if (f0 == 0.0) return x0;
    for (int i = 1; i <= scan; ++i) {
        double x1 = lo + (hi - lo) * double(i) / scan;
        double f1 = f(x1);
        if (f1 == 0.0) return x1;
        if (f0 * f1 < 0.0) return brent(f, x0, x1, xtol);
        x0 = x1;
        f0 = f1;
    }
    throw bracket_failure("brent_scan: no sign change found on interval");
}

Newton2Result newton2(const std::function<std::pair<double, double>(double, double)>& F,
                      double x0, double y0, double tol, int max_iter, double fd_scale,
                      const std::function<bool(double, double)>& admissible) {
    Newton2Result res;
    double x = x0, y = y0;
    auto [f1, f2] = F(x, y);
    double nrm = std::max(std::fabs(f1), std::fabs(f2));
    for (int it = 0; it < max_iter; ++it) {
        res.iterations = it;
        if (nrm < tol) {
            res.converged = true;
            break;
        }
        double hx = fd_scale * std::max(std::fabs(x), 1.0);
        double hy = fd_scale * std::max(std::fabs(y), 1.0);
        auto [a1, a2] = F(x + hx, y);
        auto [b1, b2] = F(x, y + hy);
        double j11 = (a1 - f1) / hx, j12 = (b1 - f1) / hy;
        double j21 = (a2 - f2) / hx, j22 = (b2 - f2) / hy;
        double det = j11 * j22 - j12 * j21;
        if (!(std::fabs(det) > 0.0) || !std::isfinite(det)) break;
        double dx = -(j22 * f1 - j12 * f2) / det;
        double dy = -(-j21 * f1 + j11 * f2) / det;
        double lambda = 1.0;
        bool accepted = false;
        for (int back = 0; back < 25; ++back) {
            double xn = x + lambda * dx, yn = y + lambda * dy;
            if (!admissible || admissible(xn, yn)) {
                auto [g1, g2] = F(xn, yn);
                double nn = std::max(std::fabs(g1), std::fabs(g2));
                if (std::isfinite(nn) && (nn < nrm || nn < tol)) {
                    x = xn; y = yn;
                    f1 = g1; f2 = g2;
                    nrm = nn;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!accepted) break;
    }
    res.x = x;
    res.y = y;
    res.residual = nrm;
    if (nrm < tol) res.converged = true;
    return res;
}

} // namespace spikelab::numerics
