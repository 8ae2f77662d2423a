#pragma once

#include <simroots/confluent.hpp>
#include <simroots/error.hpp>
#include <simroots/genpoly.hpp>
#include <simroots/solver.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace simroots {

// Diagnostics that expose the structure behind the convergence of the generalized step:
// the functions Phi and Psi whose ratio is the new error, their vanishing derivatives at
// the true roots, exactness of Q_i there, and observed convergence orders.

/// Phi(x) = (a+1) [(x - r) f'(x) - a f(x)] Q_i(x) - (x - r) f(x) Q_i'(x), with r the true root
/// tracked by iterate i, a its multiplicity and Q_i built from the iterates.
template <real_scalar T>
T eval_phi(const generalized_polynomial<T>& f, const root_configuration<T>& iterates, std::size_t i,
           const T& true_root, const T& x)
{
    const T alpha(iterates[i].multiplicity);
    const T d = x - true_root;
    const T fx = f.eval(x, 0);
    return (alpha + T(1)) * (d * f.eval(x, 1) - alpha * fx) * q_value(f.basis(), iterates, i, x) -
           d * fx * q_derivative(f.basis(), iterates, i, x);
}

/// Psi(x) = (a+1) f'(x) Q_i(x) - f(x) Q_i'(x)
template <real_scalar T>
T eval_psi(const generalized_polynomial<T>& f, const root_configuration<T>& iterates, std::size_t i, const T& x)
{
    const T alpha(iterates[i].multiplicity);
    return (alpha + T(1)) * f.eval(x, 1) * q_value(f.basis(), iterates, i, x) -
           f.eval(x, 0) * q_derivative(f.basis(), iterates, i, x);
}

/// Central difference of order q with step h (half-integer offsets for odd q). Its error
/// expands in even powers of h.
template <real_scalar T, typename Fn> T central_difference(Fn&& fn, const T& x, unsigned q, const T& h)
{
    T sum(0);
    T binom(1);
    for (unsigned k = 0; k <= q; ++k) {
        T offset = (T(q) / T(2) - T(k)) * h;
        T term = binom * fn(x + offset);
        sum += (k % 2 == 0) ? term : -term;
        binom = binom * T(q - k) / T(k + 1);
    }
    return sum / ipow(h, q);
}

/// Richardson-extrapolated central difference at h, h/2, h/4 (removes the h^2 and h^4 terms).
template <real_scalar T, typename Fn> T richardson_derivative(Fn&& fn, const T& x, unsigned q, const T& h = T(1e-2))
{
    T d1 = central_difference(fn, x, q, h);
    T d2 = central_difference(fn, x, q, T(h / T(2)));
    T d3 = central_difference(fn, x, q, T(h / T(4)));
    T r1 = (T(4) * d2 - d1) / T(3);
    T r2 = (T(4) * d3 - d2) / T(3);
    return (T(16) * r2 - r1) / T(15);
}

/// max |fn| over `samples` evenly spaced points of [center - half_width, center + half_width].
template <real_scalar T, typename Fn>
T local_scale(Fn&& fn, const T& center, const T& half_width = T(0.1), unsigned samples = 41)
{
    using std::abs;
    T best(0);
    for (unsigned s = 0; s < samples; ++s) {
        T x = center - half_width + T(2) * half_width * T(s) / T(samples - 1);
        best = std::max(best, T(abs(fn(x))));
    }
    return best;
}

template <real_scalar T> struct vanishing_report {
    /// Estimates of the q-th derivative at the true root, q = first_order .. first_order + size - 1.
    std::vector<T> derivatives;
    unsigned first_order = 1;
    /// Value of the function itself at the root.
    T value_at_root;
    /// max |fn| on [root - 0.1, root + 0.1].
    T scale;

    [[nodiscard]] T worst_relative() const
    {
        using std::abs;
        T worst(0);
        for (const auto& d : derivatives) worst = std::max(worst, T(abs(d) / scale));
        return worst;
    }
};

/// Finite-difference Phi^(q)(r) for q = 1 .. a. All of them vanish in exact arithmetic.
template <real_scalar T>
vanishing_report<T> phi_vanishing(const generalized_polynomial<T>& f, const root_configuration<T>& iterates,
                                  std::size_t i, const T& true_root, const T& h = T(1e-2))
{
    auto phi = [&](const T& x) { return eval_phi(f, iterates, i, true_root, x); };
    vanishing_report<T> r;
    for (unsigned q = 1; q <= iterates[i].multiplicity; ++q) r.derivatives.push_back(richardson_derivative(phi, true_root, q, h));
    r.value_at_root = phi(true_root);
    r.scale = local_scale(phi, true_root);
    return r;
}

/// Finite-difference Psi^(q)(r) for q = 1 .. a-2; empty when a <= 2.
template <real_scalar T>
vanishing_report<T> psi_vanishing(const generalized_polynomial<T>& f, const root_configuration<T>& iterates,
                                  std::size_t i, const T& true_root, const T& h = T(1e-2))
{
    auto psi = [&](const T& x) { return eval_psi(f, iterates, i, x); };
    vanishing_report<T> r;
    for (unsigned q = 1; q + 2 <= iterates[i].multiplicity; ++q)
        r.derivatives.push_back(richardson_derivative(psi, true_root, q, h));
    r.value_at_root = psi(true_root);
    r.scale = local_scale(psi, true_root);
    return r;
}

template <real_scalar T> struct congruence_row {
    T delta;
    /// sup over probes and roots of |Q_i / K - f^(a_i)|, K the determinant-form scale of f.
    T q_deviation;
    /// same for |Q_i' / K - f^(a_i + 1)|
    T q_derivative_deviation;
    /// sup |f^(a_i)| over the same probes
    T scale;
};

/// Evenly spaced probes on [min node - 1, max node + 1].
template <real_scalar T> std::vector<T> default_probe_grid(const root_configuration<T>& cfg, unsigned samples = 41)
{
    T lo = cfg[0].location;
    T hi = cfg[0].location;
    for (const auto& nd : cfg.nodes()) {
        lo = std::min(lo, nd.location);
        hi = std::max(hi, nd.location);
    }
    lo -= T(1);
    hi += T(1);
    std::vector<T> grid;
    for (unsigned s = 0; s < samples; ++s) grid.push_back(lo + (hi - lo) * T(s) / T(samples - 1));
    return grid;
}

/// For every delta, shifts all nodes of the true configuration by delta and measures how far
/// Q_i and Q_i' at the shifted nodes are from f^(a_i) and f^(a_i+1). At delta = 0 the two agree
/// exactly; the gap closes at least linearly in delta.
template <real_scalar T>
std::vector<congruence_row<T>> check_congruence_eq4(const generalized_polynomial<T>& f,
                                                    const root_configuration<T>& true_cfg,
                                                    const std::vector<T>& deltas,
                                                    std::vector<T> probes = {})
{
    using std::abs;
    if (probes.empty()) probes = default_probe_grid(true_cfg);
    const auto& basis = f.basis();

    // Least-squares proportionality between the determinant form and f.
    auto det_form = coefficients_from_roots(basis, true_cfg);
    T num(0);
    T den(0);
    for (std::size_t j = 0; j < basis.size(); ++j) {
        T d = det_form.coefficients[j] * det_form.normalization;
        num += d * f.coefficients()[j];
        den += f.coefficients()[j] * f.coefficients()[j];
    }
    const T k = num / den;

    std::vector<congruence_row<T>> table;
    for (const auto& delta : deltas) {
        std::vector<root_node<T>> shifted;
        for (const auto& nd : true_cfg.nodes()) shifted.push_back({nd.location + delta, nd.multiplicity});
        root_configuration<T> iterates(std::move(shifted));
        congruence_row<T> row{delta, T(0), T(0), T(0)};
        for (std::size_t i = 0; i < iterates.size(); ++i) {
            const unsigned a = iterates[i].multiplicity;
            for (const auto& x : probes) {
                T fa = f.eval(x, a);
                row.q_deviation = std::max(row.q_deviation, T(abs(q_value(basis, iterates, i, x) / k - fa)));
                row.q_derivative_deviation = std::max(
                    row.q_derivative_deviation, T(abs(q_derivative(basis, iterates, i, x) / k - f.eval(x, a + 1))));
                row.scale = std::max(row.scale, T(abs(fa)));
            }
        }
        table.push_back(row);
    }
    return table;
}

struct root_order {
    std::size_t root = 0;
    /// ln e^[k+1] / ln e^[k]
    double order = 0.0;
    /// the k of the ratio used
    unsigned k = 0;
};

struct order_estimate {
    std::vector<root_order> per_root;
    std::string method = "log-ratio";

    [[nodiscard]] std::optional<double> for_root(std::size_t i) const
    {
        for (const auto& r : per_root)
            if (r.root == i) return r.order;
        return std::nullopt;
    }
};

/// Log-ratio order ln e^[k+1] / ln e^[k] from the last pair of errors that are still above
/// 100 eps (1 + |x|) in double precision. Roots with fewer than three usable errors are
/// omitted; if none is left, throws InsufficientHistory.
inline order_estimate estimate_order(const std::vector<iteration_record>& history, const std::vector<double>& true_roots)
{
    order_estimate est;
    for (std::size_t i = 0; i < true_roots.size(); ++i) {
        const double floor = 100.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(true_roots[i]));
        std::vector<double> errors;
        for (const auto& rec : history) {
            if (i >= rec.approximations.size()) break;
            double e = std::abs(rec.approximations[i] - true_roots[i]);
            if (!(e > floor)) break;
            if (!(e < 1.0)) {
                if (errors.empty()) continue;
                break;
            }
            errors.push_back(e);
        }
        if (errors.size() < 3) continue;
        const std::size_t last = errors.size() - 1;
        est.per_root.push_back({i, std::log(errors[last]) / std::log(errors[last - 1]), static_cast<unsigned>(last - 1)});
    }
    if (est.per_root.empty())
        throw error(errc::insufficient_history, "no root has three consecutive usable errors");
    return est;
}

/// Sequences of plain errors, one per root, wrapped as a history.
inline std::vector<iteration_record> history_from_errors(const std::vector<std::vector<double>>& per_iteration)
{
    std::vector<iteration_record> h;
    for (std::size_t k = 0; k < per_iteration.size(); ++k) h.push_back({static_cast<unsigned>(k), per_iteration[k], {}, 0.0});
    return h;
}

struct diagnostic_row {
    std::string quantity;
    std::string at;
    double value = 0.0;
};

/// CSV with columns quantity,at,value.
inline void write_diagnostics_csv(std::ostream& os, const std::vector<diagnostic_row>& rows)
{
    os << "quantity,at,value\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.10g", r.value);
        os << r.quantity << ',' << r.at << ',' << buf << '\n';
    }
}

} // namespace simroots
