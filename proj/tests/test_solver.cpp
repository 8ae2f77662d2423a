#include <simroots/solver.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace simroots;

namespace {

generalized_polynomial<quad> sample_f(quad scale = quad(1))
{
    auto f = from_roots(make_paper_basis<quad>(), root_configuration<quad>({quad("-0.5"), quad(3)}, {2u, 2u}));
    return f.scaled(scale);
}

iteration_state<quad> sample_start() { return {{quad("-0.4"), quad("2.8")}, {2u, 2u}}; }

double d(const quad& v) { return to_double(v); }

// Random monomial problem with well separated roots and iterates.
struct random_case {
    generalized_polynomial<quad> f;
    iteration_state<quad> state;
};

random_case make_random_case(std::mt19937& rng)
{
    std::uniform_int_distribution<int> count(1, 4);
    std::uniform_int_distribution<unsigned> mult(1, 2);
    std::uniform_real_distribution<double> jitter(-0.15, 0.15);
    const int m = count(rng);
    std::vector<quad> roots;
    std::vector<unsigned> alphas;
    unsigned n = 0;
    for (int i = 0; i < m; ++i) {
        unsigned a = n + 2 <= 8 ? mult(rng) : 1u;
        if (n + a > 8) break;
        roots.push_back(quad(-2.25 + 1.5 * i + jitter(rng)));
        alphas.push_back(a);
        n += a;
    }
    if (n < 2) {
        roots.push_back(quad(4));
        alphas.push_back(1);
        ++n;
    }
    auto f = from_roots(make_monomial_basis<quad>(n, n + 3), root_configuration<quad>(roots, alphas));
    iteration_state<quad> st{{}, alphas};
    for (const auto& r : roots) st.approximations.push_back(r + quad(jitter(rng)) / quad(3));
    return {f, st};
}

} // namespace

TEST(Solver, SampleFirstStepMethod3)
{
    auto x = step_method3(sample_f(), sample_start());
    EXPECT_NEAR(d(x[0]), -0.5001904855, 1e-8);
    EXPECT_NEAR(d(x[1]), 2.9812593584, 1e-8);
}

TEST(Solver, SampleStepsMethod13)
{
    auto st = sample_start();
    auto x1 = step_method13(sample_f(), st);
    EXPECT_NEAR(d(x1[0]), -0.5021054, 5e-8);
    EXPECT_NEAR(d(x1[1]), 2.9677106, 5e-8);
    st.approximations = x1;
    auto x2 = step_method13(sample_f(), st);
    EXPECT_NEAR(d(x2[0]), -0.500000081, 5e-10);
    EXPECT_NEAR(d(x2[1]), 2.99935, 5e-6);
}

TEST(Solver, ZeroCorrectionsAtExactRoots)
{
    iteration_state<quad> st{{quad("-0.5"), quad(3)}, {2u, 2u}};
    for (auto m : {method::method3, method::method13}) {
        solver_settings s;
        s.method = m;
        for (const auto& c : step_corrections(sample_f(), st, s)) EXPECT_EQ(c, quad(0));
    }
}

TEST(Solver, Method13MatchesMethod3ForSimpleRoots)
{
    auto f = from_roots(make_monomial_basis<quad>(3), root_configuration<quad>({quad(-1), quad("0.5"), quad(2)}, {1u, 1u, 1u}));
    iteration_state<quad> st{{quad("-1.1"), quad("0.6"), quad("1.9")}, {1u, 1u, 1u}};
    auto a = step_method3(f, st);
    auto b = step_method13(f, st);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_LT(d(abs(a[i] - b[i])), 1e-28);
}

TEST(Solver, MonomialShortcutExamples)
{
    iteration_state<double> st{{0.0, 1.0}, {1u, 1u}};
    EXPECT_DOUBLE_EQ(monomial_shortcut(st, 0), -1.0);
    EXPECT_DOUBLE_EQ(monomial_shortcut(st, 1), 1.0);
    iteration_state<double> dup{{0.5, 0.5}, {1u, 1u}};
    EXPECT_THROW((void)monomial_shortcut(dup, 0), error);
}

TEST(Solver, ShortcutMatchesDeterminantRatio)
{
    auto basis = make_monomial_basis<quad>(4, 8);
    iteration_state<quad> st{{quad("-1.3"), quad("0.2"), quad("1.7")}, {2u, 1u, 1u}};
    auto cfg = st.configuration();
    for (std::size_t i = 0; i < 3; ++i) {
        quad ratio = q_derivative(basis, cfg, i, cfg[i].location) /
                     (quad(cfg[i].multiplicity + 1) * q_value(basis, cfg, i, cfg[i].location));
        EXPECT_LT(oracle::rel_err(d(monomial_shortcut(st, i)), d(ratio)), 1e-25);
    }
}

TEST(Solver, EhrlichOnUnitQuadratic)
{
    generalized_polynomial<double> f(make_monomial_basis<double>(2), {-1.0, 0.0, 1.0});
    iteration_state<double> st{{0.9, -1.2}, {1u, 1u}};
    auto x = ehrlich_step(f, st);
    // alpha / (f'/f - 1/(x_i - x_j)) by hand
    for (std::size_t i = 0; i < 2; ++i) {
        double xi = st.approximations[i];
        double xj = st.approximations[1 - i];
        double want = xi - 1.0 / (2 * xi / (xi * xi - 1) - 1.0 / (xi - xj));
        EXPECT_NEAR(x[i], want, 1e-15);
    }
    solver_settings s;
    s.method = method::ehrlich;
    auto r = solve(f, st.approximations, st.multiplicities, s);
    EXPECT_EQ(r.status, solve_status::converged);
    EXPECT_LE(r.iterations_used, 6u);
    EXPECT_NEAR(r.final_approximations[0], 1.0, 1e-14);
    EXPECT_NEAR(r.final_approximations[1], -1.0, 1e-14);
}

TEST(Solver, EhrlichRejectsGeneralBasis)
{
    solver_settings s;
    s.method = method::ehrlich;
    try {
        (void)step_corrections(sample_f(), sample_start(), s);
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::not_monomial);
    }
}

TEST(Solver, SolveSampleMethod3)
{
    auto r = solve(sample_f(), sample_start().approximations, {2u, 2u});
    EXPECT_EQ(r.status, solve_status::converged);
    EXPECT_LE(r.iterations_used, 4u);
    EXPECT_NEAR(d(r.final_approximations[0]), -0.5, 1e-9);
    EXPECT_NEAR(d(r.final_approximations[1]), 3.0, 1e-9);
    ASSERT_EQ(r.history.front().k, 0u);
    EXPECT_EQ(r.history.front().correction_max, 0.0);
    EXPECT_EQ(r.history.size(), r.iterations_used + 1);
    for (double v : r.final_residuals) EXPECT_LT(v, 1e-12);
}

TEST(Solver, SolveSampleMethod13)
{
    solver_settings s;
    s.method = method::method13;
    auto r = solve(sample_f(), sample_start().approximations, {2u, 2u}, s);
    EXPECT_EQ(r.status, solve_status::converged);
    EXPECT_LE(r.iterations_used, 5u);
    EXPECT_NEAR(d(r.final_approximations[0]), -0.5, 1e-8);
    EXPECT_NEAR(d(r.final_approximations[1]), 3.0, 1e-8);
}

TEST(Solver, CollidingStartReportsCollision)
{
    auto r = solve(sample_f(), {quad(1), quad(1)}, {2u, 2u});
    EXPECT_EQ(r.status, solve_status::iterate_collision);
    EXPECT_EQ(r.iterations_used, 0u);
    EXPECT_EQ(r.history.size(), 1u);
}

TEST(Solver, MultiplicityMismatchThrows)
{
    EXPECT_THROW((void)solve(sample_f(), sample_start().approximations, {2u, 1u}), error);
    EXPECT_THROW((void)solve(sample_f(), sample_start().approximations, {4u}), error);
}

TEST(Solver, DomainEscape)
{
    // f = x - 5 on (0, 2): one step from 1 lands on 5.
    basis_system<quad> b({basis_function<quad>::constant(), basis_function<quad>::power(1)}, {quad(0), quad(2)});
    generalized_polynomial<quad> f(b, {quad(-5), quad(1)});
    auto r = solve(f, {quad(1)}, {1u});
    EXPECT_EQ(r.status, solve_status::domain_escape);
    EXPECT_EQ(r.iterations_used, 0u);
}

TEST(Solver, DegenerateDenominator)
{
    // f = x^2 - 1 with iterates (2, 1.25): f'(2) = 4 = f(2) / (2 - 1.25), so the denominator cancels.
    generalized_polynomial<quad> f(make_monomial_basis<quad>(2), {quad(-1), quad(0), quad(1)});
    auto r = solve(f, {quad(2), quad("1.25")}, {1u, 1u});
    EXPECT_EQ(r.status, solve_status::degenerate_denominator);
    try {
        (void)step_corrections(f, iteration_state<quad>{{quad(2), quad("1.25")}, {1u, 1u}}, solver_settings{});
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::degenerate_denominator);
    }
}

TEST(Solver, ScaleInvariance)
{
    auto base = solve(sample_f(), sample_start().approximations, {2u, 2u});
    for (const char* c : {"1e-6", "1e6"}) {
        auto r = solve(sample_f(quad(c)), sample_start().approximations, {2u, 2u});
        ASSERT_EQ(r.history.size(), base.history.size()) << c;
        for (std::size_t k = 0; k < r.history.size(); ++k)
            for (std::size_t i = 0; i < 2; ++i)
                EXPECT_LE(oracle::rel_err(r.history[k].approximations[i], base.history[k].approximations[i]), 1e-13)
                    << c << " k=" << k;
    }
}

TEST(Solver, ExecutionOrderIsBitwiseIrrelevant)
{
    std::mt19937 rng(11);
    std::vector<random_case> cases;
    for (int t = 0; t < 10; ++t) cases.push_back(make_random_case(rng));
    cases.push_back({sample_f(), sample_start()});
    for (auto m : {method::method3, method::method13}) {
        for (const auto& c : cases) {
            solver_settings s;
            s.method = m;
            auto seq = step_corrections(c.f, c.state, s);
            s.exec = execution::reversed;
            auto rev = step_corrections(c.f, c.state, s);
            s.exec = execution::parallel;
            auto par = step_corrections(c.f, c.state, s);
            for (std::size_t i = 0; i < seq.size(); ++i) {
                EXPECT_EQ(seq[i], rev[i]);
                EXPECT_EQ(seq[i], par[i]);
            }
        }
    }
}

TEST(Solver, FixedPointAtExactRoots)
{
    auto r = solve(sample_f(), {quad("-0.5"), quad(3)}, {2u, 2u});
    EXPECT_EQ(r.status, solve_status::converged);
    EXPECT_LE(r.iterations_used, 1u);
    EXPECT_LT(r.history.back().correction_max, 1e-12);
}

TEST(Solver, ReductionToEhrlichOnMonomials)
{
    std::mt19937 rng(3);
    for (int t = 0; t < 20; ++t) {
        auto c = make_random_case(rng);
        auto a = step_method3(c.f, c.state);
        auto b = ehrlich_step(c.f, c.state);
        for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LE(oracle::rel_err(d(a[i]), d(b[i])), 1e-12) << "case " << t;
    }
}

TEST(Solver, ShortcutSettingGivesSameStep)
{
    std::mt19937 rng(5);
    for (int t = 0; t < 10; ++t) {
        auto c = make_random_case(rng);
        solver_settings s;
        auto a = step_corrections(c.f, c.state, s);
        s.use_monomial_shortcut = true;
        auto b = step_corrections(c.f, c.state, s);
        for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LE(oracle::rel_err(d(a[i]), d(b[i])), 1e-20);
    }
}

TEST(Solver, CubicContraction)
{
    // e_{k+1} <= C e_k^3 with C bounded over the run, on simple and multiple roots.
    auto f = from_roots(make_monomial_basis<quad>(5), root_configuration<quad>({quad(-1), quad("0.5"), quad(2)}, {3u, 1u, 1u}));
    const quad roots[] = {quad(-1), quad("0.5"), quad(2)};
    auto r = solve(f, {quad("-1.2"), quad("0.3"), quad("2.3")}, {3u, 1u, 1u});
    ASSERT_EQ(r.status, solve_status::converged);
    for (std::size_t k = 0; k + 1 < r.history.size(); ++k) {
        double e0 = 0.0;
        double e1 = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            e0 = std::max(e0, std::abs(r.history[k].approximations[i] - d(roots[i])));
            e1 = std::max(e1, std::abs(r.history[k + 1].approximations[i] - d(roots[i])));
        }
        if (e0 < 1e-4) break;
        EXPECT_LT(e1 / (e0 * e0 * e0), 1e3) << "k=" << k;
    }
}

TEST(Solver, MaxIterationsStatus)
{
    solver_settings s;
    s.max_iterations = 1;
    auto r = solve(sample_f(), sample_start().approximations, {2u, 2u}, s);
    EXPECT_EQ(r.status, solve_status::max_iterations);
    EXPECT_EQ(r.iterations_used, 1u);
}

TEST(Solver, DoublePrecisionStillReachesRoots)
{
    auto f = from_roots(make_paper_basis<double>(), root_configuration<double>({-0.5, 3.0}, {2u, 2u}));
    auto r = solve(f, {-0.4, 2.8}, {2u, 2u});
    EXPECT_NEAR(r.history[1].approximations[0], -0.5001904855, 1e-8);
    EXPECT_NEAR(r.history[1].approximations[1], 2.9812593584, 1e-8);
    EXPECT_NEAR(r.final_approximations[0], -0.5, 1e-7);
    EXPECT_NEAR(r.final_approximations[1], 3.0, 1e-7);
}
