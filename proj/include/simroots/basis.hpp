#pragma once

#include <simroots/error.hpp>
#include <simroots/expression.hpp>
#include <simroots/scalar.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace simroots {

enum class basis_kind { constant, power, sine, cosine, exponential, inverse_quadratic, expression };

/// Guaranteed derivative order when nothing narrower is requested.
inline constexpr unsigned default_derivative_cap = 16;

/// One member of a Chebyshev system. Catalog kinds have closed-form derivatives of every
/// order; the expression kind propagates Taylor jets through its tree.
template <real_scalar T> class basis_function {
public:
    static basis_function constant(unsigned cap = default_derivative_cap)
    {
        return basis_function(basis_kind::constant, 0, T(0), cap);
    }
    static basis_function power(unsigned s, unsigned cap = default_derivative_cap)
    {
        return basis_function(basis_kind::power, s, T(0), cap);
    }
    static basis_function sine(T omega, unsigned cap = default_derivative_cap)
    {
        return basis_function(basis_kind::sine, 0, omega, cap);
    }
    static basis_function cosine(T omega, unsigned cap = default_derivative_cap)
    {
        return basis_function(basis_kind::cosine, 0, omega, cap);
    }
    static basis_function exponential(T lambda, unsigned cap = default_derivative_cap)
    {
        return basis_function(basis_kind::exponential, 0, lambda, cap);
    }
    /// 1 / (1 + x^2)
    static basis_function inverse_quadratic(unsigned cap = default_derivative_cap)
    {
        return basis_function(basis_kind::inverse_quadratic, 0, T(0), cap);
    }
    static basis_function expr(const std::string& text, unsigned cap = default_derivative_cap)
    {
        basis_function b(basis_kind::expression, 0, T(0), cap);
        b.tree_ = expression<T>::parse(text);
        return b;
    }

    [[nodiscard]] basis_kind kind() const noexcept { return kind_; }
    [[nodiscard]] unsigned exponent() const noexcept { return exponent_; }
    /// omega for sine/cosine, lambda for exponential.
    [[nodiscard]] const T& parameter() const noexcept { return param_; }
    [[nodiscard]] const expression<T>& tree() const noexcept { return tree_; }
    [[nodiscard]] unsigned derivative_cap() const noexcept { return cap_; }

    [[nodiscard]] basis_function with_derivative_cap(unsigned cap) const
    {
        auto copy = *this;
        copy.cap_ = cap;
        return copy;
    }

    /// d^p/dx^p of the function at x.
    [[nodiscard]] T eval(const T& x, unsigned p) const
    {
        if (p > cap_)
            throw error(errc::order_exceeds_cap,
                        "derivative order " + std::to_string(p) + " exceeds cap " + std::to_string(cap_));
        using std::atan2;
        using std::cos;
        using std::exp;
        using std::sin;
        using std::sqrt;
        switch (kind_) {
        case basis_kind::constant: return p == 0 ? T(1) : T(0);
        case basis_kind::power:
            if (p > exponent_) return T(0);
            return falling_factorial<T>(exponent_, p) * ipow(x, exponent_ - p);
        case basis_kind::sine:
        case basis_kind::cosine: {
            // Each derivative advances the phase by a quarter period.
            unsigned phase = (p + (kind_ == basis_kind::cosine ? 1u : 0u)) % 4u;
            T arg = param_ * x;
            T value = (phase % 2 == 0) ? sin(arg) : cos(arg);
            if (phase >= 2) value = -value;
            return ipow(param_, p) * value;
        }
        case basis_kind::exponential: return ipow(param_, p) * exp(param_ * x);
        case basis_kind::inverse_quadratic: {
            // 1/(1+x^2) = Im 1/(x - i), so the p-th derivative is (-1)^p p! Im (x - i)^-(p+1).
            // With x - i = r e^{i psi}: Im (x - i)^-(p+1) = -r^-(p+1) sin((p+1) psi).
            T r = sqrt(x * x + T(1));
            T psi = atan2(T(-1), x);
            T value = -sin(T(p + 1) * psi) / ipow(r, p + 1) * factorial<T>(p);
            return (p % 2 == 0) ? value : -value;
        }
        case basis_kind::expression: return tree_.propagate(x, p).derivative(p);
        }
        return T(0);
    }

private:
    basis_function(basis_kind kind, unsigned exponent, T param, unsigned cap)
        : kind_(kind), exponent_(exponent), param_(param), cap_(cap)
    {
    }

    basis_kind kind_;
    unsigned exponent_;
    T param_;
    expression<T> tree_;
    unsigned cap_;
};

template <real_scalar T> T eval_basis(const basis_function<T>& b, const T& x, unsigned p) { return b.eval(x, p); }

/// Open interval (lo, hi); infinite endpoints allowed.
template <real_scalar T> struct interval {
    T lo = -std::numeric_limits<T>::infinity();
    T hi = std::numeric_limits<T>::infinity();

    [[nodiscard]] bool contains(const T& x) const { return lo < x && x < hi; }
};

/// Ordered functions phi_0 .. phi_n, assumed to form a Chebyshev system on the domain.
template <real_scalar T> class basis_system {
public:
    basis_system(std::vector<basis_function<T>> functions, interval<T> domain = {})
        : functions_(std::move(functions)), domain_(domain)
    {
        if (functions_.size() < 2)
            throw error(errc::invalid_configuration, "a basis system needs at least two functions");
        if (!(domain_.lo < domain_.hi)) throw error(errc::invalid_configuration, "empty domain interval");
    }

    [[nodiscard]] std::size_t size() const noexcept { return functions_.size(); }
    /// Degree n of the generalized polynomials on this system.
    [[nodiscard]] std::size_t degree() const noexcept { return functions_.size() - 1; }
    [[nodiscard]] const basis_function<T>& operator[](std::size_t j) const { return functions_[j]; }
    [[nodiscard]] const std::vector<basis_function<T>>& functions() const noexcept { return functions_; }
    [[nodiscard]] const interval<T>& domain() const noexcept { return domain_; }

    [[nodiscard]] unsigned derivative_cap() const
    {
        unsigned cap = std::numeric_limits<unsigned>::max();
        for (const auto& f : functions_) cap = std::min(cap, f.derivative_cap());
        return cap;
    }

    [[nodiscard]] basis_system with_derivative_cap(unsigned cap) const
    {
        std::vector<basis_function<T>> capped;
        capped.reserve(functions_.size());
        for (const auto& f : functions_) capped.push_back(f.with_derivative_cap(cap));
        return basis_system(std::move(capped), domain_);
    }

    /// True for {1, x, ..., x^n} in this order.
    [[nodiscard]] bool is_monomial() const
    {
        for (std::size_t j = 0; j < functions_.size(); ++j) {
            const auto& f = functions_[j];
            bool ok = (f.kind() == basis_kind::power && f.exponent() == j) ||
                      (j == 0 && f.kind() == basis_kind::constant);
            if (!ok) return false;
        }
        return true;
    }

    void check_point(const T& x) const
    {
        if (!domain_.contains(x))
            throw error(errc::domain_error, "point " + std::to_string(to_double(x)) + " outside the domain");
    }

    [[nodiscard]] T eval(std::size_t j, const T& x, unsigned p) const
    {
        check_point(x);
        return functions_[j].eval(x, p);
    }

private:
    std::vector<basis_function<T>> functions_;
    interval<T> domain_;
};

/// {1, x^2, sin 3x, exp(-x), 1/(1+x^2)} on the real line.
template <real_scalar T> basis_system<T> make_paper_basis(unsigned cap = 4)
{
    return basis_system<T>({basis_function<T>::constant(cap), basis_function<T>::power(2, cap),
                            basis_function<T>::sine(T(3), cap), basis_function<T>::exponential(T(-1), cap),
                            basis_function<T>::inverse_quadratic(cap)});
}

/// {1, x, ..., x^n}
template <real_scalar T> basis_system<T> make_monomial_basis(std::size_t n, unsigned cap = default_derivative_cap)
{
    std::vector<basis_function<T>> fs;
    for (std::size_t s = 0; s <= n; ++s) fs.push_back(basis_function<T>::power(static_cast<unsigned>(s), cap));
    return basis_system<T>(std::move(fs));
}

} // namespace simroots
