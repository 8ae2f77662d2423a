#pragma once

#include <simroots/confluent.hpp>
#include <simroots/error.hpp>
#include <simroots/genpoly.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace simroots {

enum class method {
    /// Generalized Ehrlich-type step for multiple roots, needs f and f' only.
    method3,
    /// Predecessor step built on f^(alpha-1) and f^(alpha).
    method13,
    /// Classical algebraic Ehrlich step; monomial bases only.
    ehrlich,
};

constexpr std::string_view to_string(method m) noexcept
{
    switch (m) {
    case method::method3: return "method3";
    case method::method13: return "method13";
    case method::ehrlich: return "ehrlich";
    }
    return "unknown";
}

/// Order in which the per-root corrections of one total step are computed. The result does
/// not depend on it.
enum class execution { sequential, reversed, parallel };

struct solver_settings {
    simroots::method method = simroots::method::method3;
    /// Converged once max |correction| drops below this.
    double tolerance = 1e-11;
    unsigned max_iterations = 50;
    /// Relative cancellation guard on correction denominators and on Q_i.
    double denominator_floor = 1e-14;
    /// Two iterates closer than collision_threshold * (1 + |x_i|) collide.
    double collision_threshold = 1e-12;
    bool use_monomial_shortcut = false;
    /// A numerator value within root_hit_factor * epsilon of its rounding magnitude is treated
    /// as zero, giving a zero correction.
    double root_hit_factor = 1e3;
    /// Converged iterates must satisfy |f^(q)(x_i)| <= residual_tolerance * magnitude, q < alpha_i.
    double residual_tolerance = 1e-6;
    execution exec = execution::sequential;
};

template <real_scalar T> struct iteration_state {
    std::vector<T> approximations;
    std::vector<unsigned> multiplicities;
    unsigned k = 0;
    std::vector<T> last_corrections{};

    [[nodiscard]] std::size_t size() const noexcept { return approximations.size(); }
    [[nodiscard]] root_configuration<T> configuration() const { return {approximations, multiplicities}; }
};

enum class solve_status { converged, max_iterations, degenerate_denominator, iterate_collision, domain_escape, residual_mismatch };

constexpr std::string_view to_string(solve_status s) noexcept
{
    switch (s) {
    case solve_status::converged: return "converged";
    case solve_status::max_iterations: return "max_iterations";
    case solve_status::degenerate_denominator: return "degenerate_denominator";
    case solve_status::iterate_collision: return "iterate_collision";
    case solve_status::domain_escape: return "domain_escape";
    case solve_status::residual_mismatch: return "residual_mismatch";
    }
    return "unknown";
}

/// One row of the iteration table. Corrections are x^[k-1] - x^[k]; zero at k = 0.
struct iteration_record {
    unsigned k = 0;
    std::vector<double> approximations;
    std::vector<double> corrections;
    double correction_max = 0.0;
};

template <real_scalar T> struct solve_report {
    simroots::method method = simroots::method::method3;
    std::vector<iteration_record> history;
    solve_status status = solve_status::max_iterations;
    unsigned iterations_used = 0;
    std::vector<double> final_residuals;
    std::vector<T> final_approximations;
    std::string message;
};

namespace detail {

template <real_scalar T> bool numerically_zero(const T& value, const T& magnitude, double factor)
{
    using std::abs;
    return abs(value) <= T(factor) * epsilon<T>() * magnitude;
}

template <real_scalar T>
void check_collisions(const std::vector<T>& xs, double threshold)
{
    using std::abs;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (!(abs(xs[i] - xs[j]) >= T(threshold) * (T(1) + abs(xs[i]))))
                throw error(errc::iterate_collision,
                            "iterates " + std::to_string(j) + " and " + std::to_string(i) + " collide");
}

/// Q_i'(x_i) / ((alpha_i + 1) Q_i(x_i)) at the current iterates, by determinants.
template <real_scalar T>
T q_ratio(const basis_system<T>& basis, const root_configuration<T>& iterates, std::size_t i, double floor)
{
    using std::abs;
    const auto& node = iterates[i];
    auto m = build_matrix(basis, iterates, node.location, node.multiplicity);
    T q = determinant(m);
    if (!(abs(q) >= T(floor) * hadamard_bound(m.entries)))
        throw error(errc::degenerate_denominator, "Q_" + std::to_string(i + 1) + " vanishes at the iterate");
    T dq = q_derivative(basis, iterates, i, node.location);
    return dq / (T(node.multiplicity + 1) * q);
}

/// Computes every per-root correction from the same snapshot. Each slot is written by exactly
/// one task; the first failure by root index is rethrown.
template <real_scalar T, typename Fn> std::vector<T> total_step(std::size_t m, execution exec, Fn&& correction)
{
    std::vector<T> out(m, T(0));
    std::vector<std::exception_ptr> failures(m);
    auto run = [&](std::size_t i) {
        try {
            out[i] = correction(i);
        } catch (...) {
            failures[i] = std::current_exception();
        }
    };
    switch (exec) {
    case execution::sequential:
        for (std::size_t i = 0; i < m; ++i) run(i);
        break;
    case execution::reversed:
        for (std::size_t i = m; i-- > 0;) run(i);
        break;
    case execution::parallel: {
        std::vector<std::jthread> workers;
        workers.reserve(m);
        for (std::size_t i = 0; i < m; ++i) workers.emplace_back(run, i);
        break; // jthreads join here
    }
    }
    for (auto& f : failures)
        if (f) std::rethrow_exception(f);
    return out;
}

template <real_scalar T>
void check_state(const generalized_polynomial<T>& f, const iteration_state<T>& state)
{
    if (state.approximations.size() != state.multiplicities.size())
        throw error(errc::dimension_mismatch, "approximations and multiplicities differ in length");
    std::size_t n = 0;
    for (auto a : state.multiplicities) n += a;
    if (n != f.degree())
        throw error(errc::dimension_mismatch, "multiplicities sum to " + std::to_string(n) + ", expected " +
                                                  std::to_string(f.degree()));
}

} // namespace detail

/// sum_{j != i} alpha_j / (x_i - x_j): the closed form of Q_i'/((alpha_i+1) Q_i) on {1, x, ..., x^n}.
template <real_scalar T> T monomial_shortcut(const iteration_state<T>& state, std::size_t i, double collision_threshold = 0.0)
{
    using std::abs;
    T sum(0);
    const T& xi = state.approximations[i];
    for (std::size_t j = 0; j < state.size(); ++j) {
        if (j == i) continue;
        T d = xi - state.approximations[j];
        if (d == T(0) || abs(d) < T(collision_threshold) * (T(1) + abs(xi)))
            throw error(errc::iterate_collision, "iterates " + std::to_string(i) + " and " + std::to_string(j) + " collide");
        sum += T(state.multiplicities[j]) / d;
    }
    return sum;
}

/// Correction of root i for the generalized Ehrlich-type step for multiple roots:
/// alpha f / (f' - f Q'/((alpha+1) Q)), all at x_i^[k].
template <real_scalar T>
T correction_method3(const generalized_polynomial<T>& f, const iteration_state<T>& state,
                     const root_configuration<T>& iterates, std::size_t i, const solver_settings& s)
{
    using std::abs;
    const T& x = state.approximations[i];
    const unsigned alpha = state.multiplicities[i];
    T fx = f.eval(x, 0);
    if (detail::numerically_zero(fx, f.magnitude(x, 0), s.root_hit_factor)) return T(0);
    T ratio = (s.use_monomial_shortcut && f.basis().is_monomial())
                  ? monomial_shortcut(state, i, s.collision_threshold)
                  : detail::q_ratio(f.basis(), iterates, i, s.denominator_floor);
    T fp = f.eval(x, 1);
    T den = fp - fx * ratio;
    if (!(abs(den) >= T(s.denominator_floor) * (abs(fp) + abs(fx * ratio))) || den == T(0))
        throw error(errc::degenerate_denominator, "step denominator cancels for root " + std::to_string(i + 1));
    return T(alpha) * fx / den;
}

/// Correction of root i for the earlier generalization:
/// f^(alpha-1) / (f^(alpha) - f^(alpha-1) Q'/(2Q)).
template <real_scalar T>
T correction_method13(const generalized_polynomial<T>& f, const iteration_state<T>& state,
                      const root_configuration<T>& iterates, std::size_t i, const solver_settings& s)
{
    using std::abs;
    const T& x = state.approximations[i];
    const unsigned alpha = state.multiplicities[i];
    T g = f.eval(x, alpha - 1);
    if (detail::numerically_zero(g, f.magnitude(x, alpha - 1), s.root_hit_factor)) return T(0);
    // q_ratio carries 1/(alpha+1); this formula wants 1/2.
    T ratio = (s.use_monomial_shortcut && f.basis().is_monomial())
                  ? monomial_shortcut(state, i, s.collision_threshold)
                  : detail::q_ratio(f.basis(), iterates, i, s.denominator_floor);
    ratio *= T(alpha + 1) / T(2);
    T ga = f.eval(x, alpha);
    T den = ga - g * ratio;
    if (!(abs(den) >= T(s.denominator_floor) * (abs(ga) + abs(g * ratio))) || den == T(0))
        throw error(errc::degenerate_denominator, "step denominator cancels for root " + std::to_string(i + 1));
    return g / den;
}

/// Correction of root i for the algebraic Ehrlich step: alpha / (f'/f - sum_{j != i} alpha_j/(x_i - x_j)).
template <real_scalar T>
T correction_ehrlich(const generalized_polynomial<T>& f, const iteration_state<T>& state, std::size_t i,
                     const solver_settings& s)
{
    using std::abs;
    if (!f.basis().is_monomial()) throw error(errc::not_monomial, "the Ehrlich step needs the basis {1, x, ..., x^n}");
    const T& x = state.approximations[i];
    T fx = f.eval(x, 0);
    if (detail::numerically_zero(fx, f.magnitude(x, 0), s.root_hit_factor)) return T(0);
    T logd = f.eval(x, 1) / fx;
    T sum = monomial_shortcut(state, i, s.collision_threshold);
    T den = logd - sum;
    if (!(abs(den) >= T(s.denominator_floor) * (abs(logd) + abs(sum))) || den == T(0))
        throw error(errc::degenerate_denominator, "step denominator cancels for root " + std::to_string(i + 1));
    return T(state.multiplicities[i]) / den;
}

/// Corrections of one total step: new x_i = x_i - correction_i, all read from the same snapshot.
template <real_scalar T>
std::vector<T> step_corrections(const generalized_polynomial<T>& f, const iteration_state<T>& state,
                                const solver_settings& s)
{
    detail::check_state(f, state);
    detail::check_collisions(state.approximations, s.collision_threshold);
    auto iterates = state.configuration();
    return detail::total_step<T>(state.size(), s.exec, [&](std::size_t i) {
        switch (s.method) {
        case method::method3: return correction_method3(f, state, iterates, i, s);
        case method::method13: return correction_method13(f, state, iterates, i, s);
        case method::ehrlich: return correction_ehrlich(f, state, i, s);
        }
        return T(0);
    });
}

namespace detail {

template <real_scalar T>
std::vector<T> apply(const std::vector<T>& xs, const std::vector<T>& corrections)
{
    std::vector<T> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = xs[i] - corrections[i];
    return out;
}

} // namespace detail

template <real_scalar T>
std::vector<T> step_method3(const generalized_polynomial<T>& f, const iteration_state<T>& state, solver_settings s = {})
{
    s.method = method::method3;
    return detail::apply(state.approximations, step_corrections(f, state, s));
}

template <real_scalar T>
std::vector<T> step_method13(const generalized_polynomial<T>& f, const iteration_state<T>& state, solver_settings s = {})
{
    s.method = method::method13;
    return detail::apply(state.approximations, step_corrections(f, state, s));
}

template <real_scalar T>
std::vector<T> ehrlich_step(const generalized_polynomial<T>& f, const iteration_state<T>& state, solver_settings s = {})
{
    s.method = method::ehrlich;
    return detail::apply(state.approximations, step_corrections(f, state, s));
}

namespace detail {

template <real_scalar T>
iteration_record make_record(unsigned k, const std::vector<T>& xs, const std::vector<T>& corrections)
{
    using std::abs;
    iteration_record r;
    r.k = k;
    for (const auto& x : xs) r.approximations.push_back(to_double(x));
    for (const auto& c : corrections) {
        r.corrections.push_back(to_double(c));
        r.correction_max = std::max(r.correction_max, to_double(T(abs(c))));
    }
    return r;
}

template <real_scalar T>
bool residuals_consistent(const generalized_polynomial<T>& f, const std::vector<T>& xs,
                          const std::vector<unsigned>& alphas, double tolerance)
{
    using std::abs;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (unsigned q = 0; q < alphas[i]; ++q) {
            T mag = f.magnitude(xs[i], q);
            if (abs(f.eval(xs[i], q)) > T(tolerance) * mag) return false;
        }
    return true;
}

} // namespace detail

/// Iterates the selected method from `initial` until max |correction| < tolerance, the
/// iteration budget runs out, or a guard fires. Guards end up in the report status.
template <real_scalar T>
solve_report<T> solve(const generalized_polynomial<T>& f, const std::vector<T>& initial,
                      const std::vector<unsigned>& multiplicities, const solver_settings& s = {})
{
    iteration_state<T> state{initial, multiplicities, 0, std::vector<T>(initial.size(), T(0))};
    detail::check_state(f, state);

    solve_report<T> report;
    report.method = s.method;
    report.history.push_back(detail::make_record(0, state.approximations, state.last_corrections));

    auto finish = [&](solve_status status, std::string message) {
        report.status = status;
        report.message = std::move(message);
    };

    bool done = false;
    while (!done && state.k < s.max_iterations) {
        std::vector<T> corrections;
        try {
            corrections = step_corrections(f, state, s);
        } catch (const error& e) {
            if (e.code() == errc::iterate_collision) finish(solve_status::iterate_collision, e.what());
            else if (e.code() == errc::degenerate_denominator) finish(solve_status::degenerate_denominator, e.what());
            else if (e.code() == errc::domain_error) finish(solve_status::domain_escape, e.what());
            else throw;
            done = true;
            break;
        }
        auto next = detail::apply(state.approximations, corrections);
        for (std::size_t i = 0; i < next.size(); ++i) {
            if (!is_finite(next[i]) || !f.basis().domain().contains(next[i])) {
                finish(solve_status::domain_escape, "iterate " + std::to_string(i + 1) + " left the domain");
                done = true;
            }
        }
        if (done) break;

        state.approximations = std::move(next);
        state.last_corrections = corrections;
        ++state.k;
        report.history.push_back(detail::make_record(state.k, state.approximations, corrections));

        if (report.history.back().correction_max < s.tolerance) {
            if (detail::residuals_consistent(f, state.approximations, state.multiplicities, s.residual_tolerance))
                finish(solve_status::converged, "max correction below tolerance");
            else
                finish(solve_status::residual_mismatch,
                       "iteration stalled where f does not vanish to the tracked multiplicities");
            done = true;
        }
    }
    if (!done) finish(solve_status::max_iterations, "iteration budget exhausted");

    report.iterations_used = state.k;
    report.final_approximations = state.approximations;
    try {
        for (const auto& r : residual_profile(f, state.configuration())) report.final_residuals.push_back(to_double(r));
    } catch (const error&) {
        // coincident iterates have no well-defined residual profile
    }
    return report;
}

} // namespace simroots
