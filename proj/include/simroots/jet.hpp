#pragma once

#include <simroots/error.hpp>
#include <simroots/scalar.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace simroots {

/// Truncated Taylor series at a point: coefficient q is f^(q)(x0) / q!.
template <real_scalar T> class jet {
public:
    jet() = default;

    static jet constant(std::size_t order, const T& value)
    {
        jet j(order);
        j.c_[0] = value;
        return j;
    }

    /// The independent variable expanded around x0.
    static jet variable(std::size_t order, const T& x0)
    {
        jet j(order);
        j.c_[0] = x0;
        if (order >= 1) j.c_[1] = T(1);
        return j;
    }

    [[nodiscard]] std::size_t order() const noexcept { return c_.size() - 1; }
    [[nodiscard]] const std::vector<T>& coefficients() const noexcept { return c_; }
    [[nodiscard]] const T& operator[](std::size_t q) const { return c_[q]; }
    T& operator[](std::size_t q) { return c_[q]; }

    /// q-th derivative at the expansion point.
    [[nodiscard]] T derivative(std::size_t q) const { return c_[q] * factorial<T>(static_cast<unsigned>(q)); }

    jet& operator+=(const jet& o)
    {
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    jet& operator-=(const jet& o)
    {
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }

    friend jet operator+(jet a, const jet& b) { return a += b; }
    friend jet operator-(jet a, const jet& b) { return a -= b; }
    friend jet operator-(jet a)
    {
        for (auto& v : a.c_) v = -v;
        return a;
    }

    friend jet operator*(const jet& a, const jet& b)
    {
        jet r(a.order());
        for (std::size_t k = 0; k <= a.order(); ++k) {
            T acc(0);
            for (std::size_t j = 0; j <= k; ++j) acc += a.c_[j] * b.c_[k - j];
            r.c_[k] = acc;
        }
        return r;
    }

    friend jet operator/(const jet& a, const jet& b)
    {
        using std::abs;
        if (!(abs(b.c_[0]) >= T(1e-300)))
            throw error(errc::division_by_singular_jet, "divisor value coefficient is numerically zero");
        jet r(a.order());
        for (std::size_t k = 0; k <= a.order(); ++k) {
            T acc = a.c_[k];
            for (std::size_t j = 1; j <= k; ++j) acc -= b.c_[j] * r.c_[k - j];
            r.c_[k] = acc / b.c_[0];
        }
        return r;
    }

    friend jet sin(const jet& u) { return sin_cos(u).first; }
    friend jet cos(const jet& u) { return sin_cos(u).second; }

    friend jet exp(const jet& u)
    {
        using std::exp;
        jet e(u.order());
        e.c_[0] = exp(u.c_[0]);
        // k e_k = sum_{j=1..k} j u_j e_{k-j}
        for (std::size_t k = 1; k <= u.order(); ++k) {
            T acc(0);
            for (std::size_t j = 1; j <= k; ++j) acc += T(j) * u.c_[j] * e.c_[k - j];
            e.c_[k] = acc / T(k);
        }
        return e;
    }

    friend jet pow(const jet& u, int exponent)
    {
        jet base = exponent < 0 ? constant(u.order(), T(1)) / u : u;
        unsigned n = static_cast<unsigned>(exponent < 0 ? -exponent : exponent);
        jet result = constant(u.order(), T(1));
        while (n != 0) {
            if (n & 1u) result = result * base;
            n >>= 1u;
            if (n != 0) base = base * base;
        }
        return result;
    }

private:
    explicit jet(std::size_t order) : c_(order + 1, T(0)) {}

    static std::pair<jet, jet> sin_cos(const jet& u)
    {
        using std::cos;
        using std::sin;
        jet s(u.order());
        jet c(u.order());
        s.c_[0] = sin(u.c_[0]);
        c.c_[0] = cos(u.c_[0]);
        for (std::size_t k = 1; k <= u.order(); ++k) {
            T as(0);
            T ac(0);
            for (std::size_t j = 1; j <= k; ++j) {
                as += T(j) * u.c_[j] * c.c_[k - j];
                ac += T(j) * u.c_[j] * s.c_[k - j];
            }
            s.c_[k] = as / T(k);
            c.c_[k] = -ac / T(k);
        }
        return {std::move(s), std::move(c)};
    }

    std::vector<T> c_;
};

} // namespace simroots
