#pragma once

#include <simroots/analysis.hpp>
#include <simroots/problem.hpp>
#include <simroots/scalar.hpp>
#include <simroots/solver.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace simroots::cli {

enum class precision { quad, binary64 };

struct options {
    std::filesystem::path out_dir = ".";
    bool validate_only = false;
    bool dump_normalized = false;
    cli::precision precision = cli::precision::quad;
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_input_error = 1;
inline constexpr int exit_not_converged = 2;

/// Ten significant digits, trailing zeros kept.
inline std::string format_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%#.10g", v);
    return buf;
}

inline void write_iteration_csv(std::ostream& os, const std::vector<iteration_record>& history, std::size_t m)
{
    os << 'k';
    for (std::size_t i = 1; i <= m; ++i) os << ",x_" << i;
    os << ",correction_max\n";
    for (const auto& rec : history) {
        os << rec.k;
        for (double x : rec.approximations) os << ',' << format_number(x);
        os << ',' << format_number(rec.correction_max) << '\n';
    }
}

template <real_scalar T> struct method_run {
    method which;
    solve_report<T> report;
    std::optional<order_estimate> order;
};

template <real_scalar T>
std::vector<method_run<T>> run_methods(const problem& p, const problem_instance<T>& inst)
{
    std::vector<method_run<T>> runs;
    for (auto m : p.methods) {
        method_run<T> r{m, solve(inst.polynomial, inst.initial, inst.multiplicities, settings_for(p, m)), std::nullopt};
        if (inst.true_roots && inst.true_roots->size() == inst.initial.size()) {
            std::vector<double> truth;
            for (const auto& nd : inst.true_roots->nodes()) truth.push_back(to_double(nd.location));
            try {
                r.order = estimate_order(r.report.history, truth);
            } catch (const error&) {
            }
        }
        runs.push_back(std::move(r));
    }
    return runs;
}

template <real_scalar T>
std::vector<diagnostic_row> diagnostics_for(const method_run<T>& run, const problem_instance<T>& inst)
{
    std::vector<diagnostic_row> rows;
    if (!inst.true_roots) return rows;
    for (const auto& rec : run.report.history)
        for (std::size_t i = 0; i < rec.approximations.size() && i < inst.true_roots->size(); ++i)
            rows.push_back({"error_x_" + std::to_string(i + 1), std::to_string(rec.k),
                            std::abs(rec.approximations[i] - to_double((*inst.true_roots)[i].location))});
    if (run.order)
        for (const auto& o : run.order->per_root)
            rows.push_back({"order_x_" + std::to_string(o.root + 1), std::to_string(o.k), o.order});
    return rows;
}

template <real_scalar T> void write_summary(std::ostream& os, const std::filesystem::path& file, const std::vector<method_run<T>>& runs, cli::precision prec)
{
    os << "problem: " << file.filename().string() << '\n';
    os << "precision: " << (prec == cli::precision::quad ? "quad" : "double") << '\n';
    for (const auto& r : runs) {
        os << '\n' << '[' << to_string(r.which) << "]\n";
        os << "status: " << to_string(r.report.status) << '\n';
        os << "iterations: " << r.report.iterations_used << '\n';
        os << "final:";
        for (const auto& x : r.report.final_approximations) os << ' ' << format_number(to_double(x));
        os << "\nresiduals:";
        for (double v : r.report.final_residuals) os << ' ' << format_number(v);
        os << "\norder:";
        if (r.order) {
            for (const auto& o : r.order->per_root) os << " x_" << o.root + 1 << '=' << format_number(o.order);
        } else {
            os << " n/a";
        }
        os << '\n';
    }
}

/// Largest |x_i(a) - x_i(b)| over pairs of converged runs; negative when fewer than two converged.
template <real_scalar T> double agreement(const std::vector<method_run<T>>& runs)
{
    using std::abs;
    double worst = -1.0;
    for (std::size_t a = 0; a < runs.size(); ++a)
        for (std::size_t b = 0; b < a; ++b) {
            if (runs[a].report.status != solve_status::converged || runs[b].report.status != solve_status::converged) continue;
            const auto& xa = runs[a].report.final_approximations;
            const auto& xb = runs[b].report.final_approximations;
            worst = std::max(worst, 0.0);
            for (std::size_t i = 0; i < xa.size(); ++i) worst = std::max(worst, to_double(T(abs(xa[i] - xb[i]))));
        }
    return worst;
}

/// Per-method columns side by side, one row per k, then an agreement row.
template <real_scalar T> void write_compare_csv(std::ostream& os, const std::vector<method_run<T>>& runs, std::size_t m)
{
    os << 'k';
    for (const auto& r : runs)
        for (std::size_t i = 1; i <= m; ++i) os << ',' << to_string(r.which) << "_x_" << i;
    os << '\n';
    std::size_t rows = 0;
    for (const auto& r : runs) rows = std::max(rows, r.report.history.size());
    for (std::size_t k = 0; k < rows; ++k) {
        os << k;
        for (const auto& r : runs)
            for (std::size_t i = 0; i < m; ++i) {
                os << ',';
                if (k < r.report.history.size()) os << format_number(r.report.history[k].approximations[i]);
            }
        os << '\n';
    }
    double agree = agreement(runs);
    os << "agreement," << (agree < 0.0 ? std::string("n/a") : format_number(agree));
    for (std::size_t c = 1; c < runs.size() * m; ++c) os << ',';
    os << '\n';
}

namespace detail {

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error(errc::parse_error, "cannot read '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, const std::string& body)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error(errc::parse_error, "cannot write '" + path.string() + "'");
    out << body;
}

template <real_scalar T>
int execute(const std::filesystem::path& file, const problem& p, const options& opt, bool compare, std::ostream& out)
{
    auto inst = instantiate<T>(p);
    if (opt.validate_only) {
        out << "valid: " << file.filename().string() << '\n';
        return exit_ok;
    }
    auto runs = run_methods(p, inst);
    std::filesystem::create_directories(opt.out_dir);
    const std::size_t m = inst.initial.size();

    std::ostringstream summary;
    write_summary(summary, file, runs, opt.precision);
    if (compare) {
        std::ostringstream csv;
        write_compare_csv(csv, runs, m);
        write_file(opt.out_dir / "compare.csv", csv.str());
        out << csv.str();
    } else {
        for (const auto& r : runs) {
            std::ostringstream csv;
            write_iteration_csv(csv, r.report.history, m);
            write_file(opt.out_dir / (std::string(to_string(r.which)) + ".csv"), csv.str());
            auto diag = diagnostics_for(r, inst);
            if (!diag.empty()) {
                std::ostringstream d;
                write_diagnostics_csv(d, diag);
                write_file(opt.out_dir / (std::string(to_string(r.which)) + "_diagnostics.csv"), d.str());
            }
        }
        out << summary.str();
    }
    write_file(opt.out_dir / (compare ? "compare_summary.txt" : "summary.txt"), summary.str());

    for (const auto& r : runs)
        if (r.report.status != solve_status::converged) return exit_not_converged;
    return exit_ok;
}

inline int dispatch(const std::filesystem::path& file, const options& opt, bool compare, std::ostream& out, std::ostream& err)
{
    try {
        auto p = parse_problem(read_file(file));
        if (compare && p.methods.size() < 2) throw error(errc::parse_error, "field 'methods': compare needs at least two methods");
        if (opt.dump_normalized) {
            // still validates the polynomial before printing
            (void)instantiate<double>(p);
            out << to_json(p).dump(2) << '\n';
            return exit_ok;
        }
        return opt.precision == precision::quad ? execute<quad>(file, p, opt, compare, out)
                                                : execute<double>(file, p, opt, compare, out);
    } catch (const error& e) {
        err << "simroots: " << e.what() << '\n';
        return exit_input_error;
    }
}

} // namespace detail

/// `simroots run`: one CSV per method plus summary.txt in the output directory.
inline int run(const std::filesystem::path& file, const options& opt, std::ostream& out, std::ostream& err)
{
    return detail::dispatch(file, opt, false, out, err);
}

/// `simroots compare`: merged compare.csv with an agreement row.
inline int compare(const std::filesystem::path& file, const options& opt, std::ostream& out, std::ostream& err)
{
    return detail::dispatch(file, opt, true, out, err);
}

} // namespace simroots::cli
