#include "spikelab/numerics/interp.hpp"
#include "spikelab/errors.hpp"

#include <cmath>
#include <algorithm>

namespace spikelab::numerics {

Pchip::Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw error("InterpError", "pchip needs >= 2 nodes");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) throw error("InterpError", "pchip nodes must increase");
    m_.assign(n, 0.0);
    std::vector<double> d(n - 1), h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        d[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    if (n == 2) {
        m_[0] = m_[1] = d[0];
        return;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] * d[i] <= 0.0) {
            m_[i] = 0.0;
        } else {
            double w1 = 2.0 * h[i] + h[i - 1];
            double w2 = h[i] + 2.0 * h[i - 1];
            m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    // one-sided ends (Fritsch-Butland style limiting)
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= 0.0) m = 0.0;
        else if (d0 * d1 < 0.0 && std::fabs(m) > 3.0 * std::fabs(d0)) m = 3.0 * d0;
        return m;
    };
    m_[0] = end_slope(h[0], h[1], d[0], d[1]);
    m_[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
}

std::size_t Pchip::locate(double xq) const {
    if (xq <= x_.front()) return 0;
    if (xq >= x_.back()) return x_.size() - 2;
    auto it = std::upper_bound(x_.begin(), x_.end(), xq);
    return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double Pchip::operator()(double xq) const {
    std::size_t i = locate(xq);
    double h = x_[i + 1] - x_[i];
    double t = (xq - x_[i]) / h;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
}

double Pchip::derivative(double xq) const {
    std::size_t i = locate(xq);
    double h = x_[i + 1] - x_[i];
    double t = (xq - x_[i]) / h;
    double dh00 = (6 * t * t - 6 * t) / h, dh10 = 3 * t * t - 4 * t + 1;
    double dh01 = (-6 * t * t + 6 * t) / h, dh11 = 3 * t * t - 2 * t;
    return dh00 * y_[i] + dh10 * m_[i] + dh01 * y_[i + 1] + dh11 * m_[i + 1];
}

std::vector<double> pchip_resample(const std::vector<double>& x, const std::vector<double>& y,
                                   const std::vector<double>& xq) {
    Pchip p(x, y);
    std::vector<double> out(xq.size());
    for (std::size_t i = 0; i < xq.size(); ++i) out[i] = p(xq[i]);
    return out;
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    std::size_t n = x_.size();
    if (n < 3 || y_.size() != n) throw error("InterpError", "spline needs >= 3 nodes");
    m_.assign(n, 0.0);
    // tridiagonal solve for the interior second derivatives, natural ends
    std::vector<double> a(n, 0), b(n, 0), c(n, 0), r(n, 0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
        a[i] = hl / 6.0;
        b[i] = (hl + hr) / 3.0;
        c[i] = hr / 6.0;
        r[i] = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
    }
    for (std::size_t i = 2; i + 1 < n; ++i) {
        double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        r[i] -= w * r[i - 1];
    }
    for (std::size_t ii = n - 2; ii >= 1; --ii) {
        m_[ii] = (r[ii] - c[ii] * m_[ii + 1]) / b[ii];
        if (ii == 1) break;
    }
}

std::size_t CubicSpline::locate(double xq) const {
    if (xq <= x_.front()) return 0;
    if (xq >= x_.back()) return x_.size() - 2;
    auto it = std::upper_bound(x_.begin(), x_.end(), xq);
    return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double CubicSpline::operator()(double xq) const {
    std::size_t i = locate(xq);
    double h = x_[i + 1] - x_[i];
    double A = (x_[i + 1] - xq) / h, B = (xq - x_[i]) / h;
    return A * y_[i] + B * y_[i + 1] +
           ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
}

} // namespace spikelab::numerics
