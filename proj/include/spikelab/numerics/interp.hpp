#pragma once

#include <vector>

namespace spikelab::numerics {

/// Piecewise-cubic Hermite interpolant with Fritsch-Carlson slopes
/// (monotonicity-preserving; used for the C(B) core tables and for
/// resampling profiles onto refined grids).
class Pchip {
public:
    Pchip() = default;
    Pchip(std::vector<double> x, std::vector<double> y);

    double operator()(double xq) const;
    double derivative(double xq) const;

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    bool empty() const { return x_.empty(); }

private:
    std::vector<double> x_, y_, m_; // nodes, values, node slopes
    std::size_t locate(double xq) const;
};

/// Evaluates a pchip of (x,y) at each point of xq (convenience).
std::vector<double> pchip_resample(const std::vector<double>& x, const std::vector<double>& y,
                                   const std::vector<double>& xq);

/// Natural cubic spline (C^2), used where second-derivative smoothness of
/// the interpolant matters (refined-grid residual checks).
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y);
    double operator()(double xq) const;

private:
    std::vector<double> x_, y_, m_; // second derivatives at nodes
    std::size_t locate(double xq) const;
};

} // namespace spikelab::numerics
