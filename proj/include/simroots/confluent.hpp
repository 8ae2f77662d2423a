#pragma once

#include <simroots/basis.hpp>
#include <simroots/error.hpp>
#include <simroots/scalar.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace simroots {

template <real_scalar T> struct root_node {
    T location;
    unsigned multiplicity = 1;

    friend bool operator==(const root_node&, const root_node&) = default;
};

/// Distinct nodes with multiplicities; used for exact roots and for iterate snapshots alike.
template <real_scalar T> class root_configuration {
public:
    root_configuration() = default;

    explicit root_configuration(std::vector<root_node<T>> nodes) : nodes_(std::move(nodes))
    {
        for (std::size_t j = 0; j < nodes_.size(); ++j) {
            if (nodes_[j].multiplicity == 0)
                throw error(errc::invalid_configuration, "node " + std::to_string(j) + " has multiplicity 0");
            for (std::size_t k = 0; k < j; ++k)
                if (nodes_[k].location == nodes_[j].location)
                    throw error(errc::invalid_configuration,
                                "nodes " + std::to_string(k) + " and " + std::to_string(j) + " coincide");
        }
    }

    root_configuration(const std::vector<T>& locations, const std::vector<unsigned>& multiplicities)
        : root_configuration(zip(locations, multiplicities))
    {
    }

    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] const root_node<T>& operator[](std::size_t j) const { return nodes_[j]; }
    [[nodiscard]] const std::vector<root_node<T>>& nodes() const noexcept { return nodes_; }

    [[nodiscard]] std::size_t total_degree() const
    {
        std::size_t n = 0;
        for (const auto& nd : nodes_) n += nd.multiplicity;
        return n;
    }

    [[nodiscard]] unsigned max_multiplicity() const
    {
        unsigned m = 0;
        for (const auto& nd : nodes_) m = std::max(m, nd.multiplicity);
        return m;
    }

private:
    static std::vector<root_node<T>> zip(const std::vector<T>& xs, const std::vector<unsigned>& alphas)
    {
        if (xs.size() != alphas.size())
            throw error(errc::dimension_mismatch, "locations and multiplicities differ in length");
        std::vector<root_node<T>> out;
        out.reserve(xs.size());
        for (std::size_t j = 0; j < xs.size(); ++j) out.push_back({xs[j], alphas[j]});
        return out;
    }

    std::vector<root_node<T>> nodes_;
};

/// Row-major dense square matrix.
template <real_scalar T> class dense_matrix {
public:
    explicit dense_matrix(std::size_t n = 0) : n_(n), a_(n * n, T(0)) {}
    dense_matrix(std::initializer_list<std::initializer_list<T>> rows) : dense_matrix(rows.size())
    {
        std::size_t r = 0;
        for (const auto& row : rows) {
            if (row.size() != n_) throw error(errc::dimension_mismatch, "matrix must be square");
            std::copy(row.begin(), row.end(), a_.begin() + static_cast<std::ptrdiff_t>(r++ * n_));
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    T& operator()(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }

    /// Copy with one row and one column removed.
    [[nodiscard]] dense_matrix minor(std::size_t row, std::size_t col) const
    {
        dense_matrix m(n_ - 1);
        for (std::size_t r = 0, rr = 0; r < n_; ++r) {
            if (r == row) continue;
            for (std::size_t c = 0, cc = 0; c < n_; ++c) {
                if (c == col) continue;
                m(rr, cc++) = (*this)(r, c);
            }
            ++rr;
        }
        return m;
    }

private:
    std::size_t n_;
    std::vector<T> a_;
};

/// Determinant by row-pivoted LU factorization. Exactly singular input gives 0.
/// Overflows for large n (no log-magnitude scaling); intended for n up to about 150.
template <real_scalar T> T determinant(dense_matrix<T> a)
{
    using std::abs;
    const std::size_t n = a.size();
    T det(1);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        for (std::size_t r = k + 1; r < n; ++r)
            if (abs(a(r, k)) > abs(a(pivot, k))) pivot = r;
        if (a(pivot, k) == T(0)) return T(0);
        if (pivot != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(pivot, c));
            det = -det;
        }
        det *= a(k, k);
        for (std::size_t r = k + 1; r < n; ++r) {
            T factor = a(r, k) / a(k, k);
            if (factor == T(0)) continue;
            for (std::size_t c = k + 1; c < n; ++c) a(r, c) -= factor * a(k, c);
        }
    }
    return det;
}

/// Product of Euclidean row norms: an upper bound on |det| (Hadamard).
template <real_scalar T> T hadamard_bound(const dense_matrix<T>& a)
{
    using std::sqrt;
    T bound(1);
    for (std::size_t r = 0; r < a.size(); ++r) {
        T s(0);
        for (std::size_t c = 0; c < a.size(); ++c) s += a(r, c) * a(r, c);
        bound *= sqrt(s);
    }
    return bound;
}

/// One row of a confluent matrix: derivative `order` taken at node `node`, or at the probe
/// point when `node` is `probe`.
struct row_spec {
    static constexpr std::size_t probe = static_cast<std::size_t>(-1);
    std::size_t node;
    unsigned order;
};

template <real_scalar T> struct confluent_matrix {
    dense_matrix<T> entries;
    std::vector<row_spec> row_plan;
};

/// First row: phi_j^(first_row_order)(probe). Then for every node a block of rows with
/// derivative orders 0 .. multiplicity-1.
template <real_scalar T>
confluent_matrix<T> build_matrix(const basis_system<T>& basis, const root_configuration<T>& cfg, const T& probe,
                                 unsigned first_row_order)
{
    const std::size_t n1 = basis.size();
    if (cfg.total_degree() + 1 != n1)
        throw error(errc::dimension_mismatch, "basis has " + std::to_string(n1) + " functions but multiplicities sum to " +
                                                  std::to_string(cfg.total_degree()));
    if (first_row_order > basis.derivative_cap())
        throw error(errc::order_exceeds_cap, "first row order " + std::to_string(first_row_order) +
                                                 " exceeds basis cap " + std::to_string(basis.derivative_cap()));
    confluent_matrix<T> m{dense_matrix<T>(n1), {}};
    m.row_plan.reserve(n1);
    m.row_plan.push_back({row_spec::probe, first_row_order});
    for (std::size_t j = 0; j < cfg.size(); ++j)
        for (unsigned q = 0; q < cfg[j].multiplicity; ++q) m.row_plan.push_back({j, q});
    for (std::size_t r = 0; r < n1; ++r) {
        const auto& spec = m.row_plan[r];
        const T& at = spec.node == row_spec::probe ? probe : cfg[spec.node].location;
        for (std::size_t c = 0; c < n1; ++c) m.entries(r, c) = basis.eval(c, at, spec.order);
    }
    return m;
}

template <real_scalar T> T determinant(const confluent_matrix<T>& m) { return determinant(m.entries); }

/// Q_i(x): the multiplicity(i)-th derivative in the probe variable of the confluent determinant
/// at the iterates. The probe enters only the first row, so this is the determinant with that
/// row differentiated.
template <real_scalar T>
T q_value(const basis_system<T>& basis, const root_configuration<T>& iterates, std::size_t i, const T& x)
{
    return determinant(build_matrix(basis, iterates, x, iterates[i].multiplicity));
}

/// Q_i'(x)
template <real_scalar T>
T q_derivative(const basis_system<T>& basis, const root_configuration<T>& iterates, std::size_t i, const T& x)
{
    return determinant(build_matrix(basis, iterates, x, iterates[i].multiplicity + 1));
}

template <real_scalar T> struct root_coefficients {
    /// Normalized to unit max-magnitude.
    std::vector<T> coefficients;
    /// The determinant-form polynomial equals `normalization` times the normalized one.
    T normalization;
};

inline constexpr double singular_node_threshold = 1e-12;

/// Coefficients a_j = (-1)^j M_j from the first-row cofactors of the confluent matrix, so
/// that sum a_j phi_j vanishes to the prescribed order at every node.
template <real_scalar T>
root_coefficients<T> coefficients_from_roots(const basis_system<T>& basis, const root_configuration<T>& cfg)
{
    using std::abs;
    if (cfg.size() > 0) basis.check_point(cfg[0].location);
    auto m = build_matrix(basis, cfg, cfg.size() > 0 ? cfg[0].location : T(0), 0);
    const std::size_t n1 = basis.size();
    std::vector<T> a(n1);
    T largest(0);
    for (std::size_t j = 0; j < n1; ++j) {
        T minor = determinant(m.entries.minor(0, j));
        a[j] = (j % 2 == 0) ? minor : -minor;
        largest = std::max(largest, abs(a[j]));
    }
    // Scale of the node rows alone: product of their norms bounds every minor.
    using std::sqrt;
    T scale(1);
    for (std::size_t r = 1; r < n1; ++r) {
        T s(0);
        for (std::size_t c = 0; c < n1; ++c) s += m.entries(r, c) * m.entries(r, c);
        scale *= sqrt(s);
    }
    if (!(largest > T(singular_node_threshold) * scale))
        throw error(errc::singular_node_system, "confluent node matrix is numerically singular");
    for (auto& v : a) v /= largest;
    return {std::move(a), largest};
}

} // namespace simroots
