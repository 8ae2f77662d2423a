#pragma once

#include <simroots/basis.hpp>
#include <simroots/confluent.hpp>
#include <simroots/error.hpp>

#include <cmath>
#include <vector>

namespace simroots {

/// f(x) = sum_j a_j phi_j(x) over a basis system.
template <real_scalar T> class generalized_polynomial {
public:
    generalized_polynomial(basis_system<T> basis, std::vector<T> coefficients)
        : basis_(std::move(basis)), a_(std::move(coefficients))
    {
        if (a_.size() != basis_.size())
            throw error(errc::dimension_mismatch, "coefficient count " + std::to_string(a_.size()) +
                                                      " differs from basis size " + std::to_string(basis_.size()));
        bool any = false;
        for (const auto& v : a_) any = any || v != T(0);
        if (!any) throw error(errc::invalid_configuration, "all coefficients are zero");
    }

    [[nodiscard]] const basis_system<T>& basis() const noexcept { return basis_; }
    [[nodiscard]] const std::vector<T>& coefficients() const noexcept { return a_; }
    [[nodiscard]] std::size_t degree() const noexcept { return basis_.degree(); }

    /// f^(p)(x)
    [[nodiscard]] T eval(const T& x, unsigned p = 0) const
    {
        basis_.check_point(x);
        T sum(0);
        for (std::size_t j = 0; j < a_.size(); ++j) sum += a_[j] * basis_[j].eval(x, p);
        return sum;
    }

    /// sum_j |a_j phi_j^(p)(x)|: the magnitude against which rounding in eval(x, p) is measured.
    [[nodiscard]] T magnitude(const T& x, unsigned p = 0) const
    {
        using std::abs;
        basis_.check_point(x);
        T sum(0);
        for (std::size_t j = 0; j < a_.size(); ++j) sum += abs(a_[j] * basis_[j].eval(x, p));
        return sum;
    }

    [[nodiscard]] generalized_polynomial scaled(const T& c) const
    {
        auto b = a_;
        for (auto& v : b) v *= c;
        return generalized_polynomial(basis_, std::move(b));
    }

    [[nodiscard]] T max_coefficient() const
    {
        using std::abs;
        T m(0);
        for (const auto& v : a_) m = std::max(m, T(abs(v)));
        return m;
    }

private:
    basis_system<T> basis_;
    std::vector<T> a_;
};

/// The polynomial with the given roots and multiplicities, normalized to unit max coefficient.
template <real_scalar T>
generalized_polynomial<T> from_roots(const basis_system<T>& basis, const root_configuration<T>& cfg)
{
    return generalized_polynomial<T>(basis, coefficients_from_roots(basis, cfg).coefficients);
}

/// |f^(q)(x_j)| for every node j and q = 0 .. multiplicity-1, in confluent row order.
template <real_scalar T>
std::vector<T> residual_profile(const generalized_polynomial<T>& f, const root_configuration<T>& cfg)
{
    using std::abs;
    std::vector<T> out;
    out.reserve(cfg.total_degree());
    for (const auto& node : cfg.nodes())
        for (unsigned q = 0; q < node.multiplicity; ++q) out.push_back(abs(f.eval(node.location, q)));
    return out;
}

} // namespace simroots
