#ifndef ASDTORIC_JET_HPP
#define ASDTORIC_JET_HPP

#include <array>
#include <cmath>

namespace asdtoric {

/// Truncated second-order Taylor data of a scalar function of (x, y):
/// value, gradient and Hessian. Arithmetic propagates derivatives by the
/// product and quotient rules, exactly to second order.
struct Jet2 {
    double v = 0.0;
    std::array<double, 2> d{};                // d/dx, d/dy
    std::array<std::array<double, 2>, 2> h{}; // symmetric Hessian

    static Jet2 constant(double c) { return Jet2{c, {}, {}}; }

    /// The coordinate function with index `axis` (0 = x, 1 = y) at value c.
    static Jet2 coordinate(double c, int axis)
    {
        Jet2 out{c, {}, {}};
        out.d[axis] = 1.0;
        return out;
    }

    Jet2 operator-() const
    {
        Jet2 out;
        out.v = -v;
        for (int i = 0; i < 2; ++i) {
            out.d[i] = -d[i];
            for (int j = 0; j < 2; ++j) out.h[i][j] = -h[i][j];
        }
        return out;
    }

    Jet2& operator+=(const Jet2& o)
    {
        v += o.v;
        for (int i = 0; i < 2; ++i) {
            d[i] += o.d[i];
            for (int j = 0; j < 2; ++j) h[i][j] += o.h[i][j];
        }
        return *this;
    }
    Jet2& operator-=(const Jet2& o) { return *this += -o; }

    Jet2& operator*=(double s)
    {
        v *= s;
        for (int i = 0; i < 2; ++i) {
            d[i] *= s;
            for (int j = 0; j < 2; ++j) h[i][j] *= s;
        }
        return *this;
    }

    friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
    friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
    friend Jet2 operator*(Jet2 a, double s) { return a *= s; }
    friend Jet2 operator*(double s, Jet2 a) { return a *= s; }

    friend Jet2 operator*(const Jet2& a, const Jet2& b)
    {
        Jet2 out;
        out.v = a.v * b.v;
        for (int i = 0; i < 2; ++i) {
            out.d[i] = a.d[i] * b.v + a.v * b.d[i];
            for (int j = 0; j < 2; ++j)
                out.h[i][j] = a.h[i][j] * b.v + a.d[i] * b.d[j] + a.d[j] * b.d[i] + a.v * b.h[i][j];
        }
        return out;
    }

    /// 1/a: d(1/a) = -a'/a^2, d2(1/a) = -a''/a^2 + 2 a' a'^T / a^3.
    friend Jet2 reciprocal(const Jet2& a)
    {
        const double inv = 1.0 / a.v;
        const double inv2 = inv * inv;
        Jet2 out;
        out.v = inv;
        for (int i = 0; i < 2; ++i) {
            out.d[i] = -a.d[i] * inv2;
            for (int j = 0; j < 2; ++j) out.h[i][j] = -a.h[i][j] * inv2 + 2.0 * a.d[i] * a.d[j] * inv2 * inv;
        }
        return out;
    }

    friend Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }
};

} // namespace asdtoric

#endif // ASDTORIC_JET_HPP
