#pragma once

#include <simroots/basis.hpp>
#include <simroots/confluent.hpp>
#include <simroots/error.hpp>
#include <simroots/genpoly.hpp>
#include <simroots/solver.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace simroots {

struct basis_entry {
    /// constant, power, sine, cosine, exponential, inverse_quadratic or expr
    std::string kind;
    unsigned s = 0;
    double parameter = 0.0;
    std::string tree;

    friend bool operator==(const basis_entry&, const basis_entry&) = default;
};

struct root_entry {
    double x = 0.0;
    unsigned multiplicity = 1;

    friend bool operator==(const root_entry&, const root_entry&) = default;
};

/// A parsed problem file with every default filled in.
struct problem {
    std::vector<basis_entry> basis;
    std::optional<double> domain_lo;
    std::optional<double> domain_hi;
    /// Exactly one of coefficients / roots is set.
    std::optional<std::vector<double>> coefficients;
    std::optional<std::vector<root_entry>> roots;
    std::vector<double> initial;
    std::vector<unsigned> multiplicities;
    std::vector<method> methods;
    double tolerance = 1e-11;
    unsigned max_iterations = 50;
    /// Defaults to max multiplicity + 2.
    unsigned derivative_cap = 0;

    friend bool operator==(const problem&, const problem&) = default;
};

namespace detail {

/// 1-based line of the first occurrence of "key" in the source text, 0 when absent.
inline std::size_t line_of_key(std::string_view text, std::string_view key)
{
    std::string quoted = "\"" + std::string(key) + "\"";
    auto pos = text.find(quoted);
    if (pos == std::string_view::npos) return 0;
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class problem_reader {
public:
    explicit problem_reader(std::string_view text) : text_(text) {}

    [[noreturn]] void fail(std::string_view field, const std::string& what) const
    {
        auto leaf = field.substr(field.rfind('.') == std::string_view::npos ? 0 : field.rfind('.') + 1);
        std::size_t line = line_of_key(text_, leaf);
        std::string where = "field '" + std::string(field) + "'";
        if (line != 0) where += " (line " + std::to_string(line) + ")";
        throw error(errc::parse_error, where + ": " + what);
    }

    const nlohmann::json& require(const nlohmann::json& obj, const std::string& key, std::string_view field) const
    {
        if (!obj.is_object() || !obj.contains(key)) fail(field, "missing");
        return obj.at(key);
    }

    double number(const nlohmann::json& v, std::string_view field) const
    {
        if (!v.is_number()) fail(field, "expected a number");
        return v.get<double>();
    }

    unsigned count(const nlohmann::json& v, std::string_view field) const
    {
        if (!v.is_number_integer() || v.get<long long>() < 0) fail(field, "expected a non-negative integer");
        return v.get<unsigned>();
    }

    std::vector<double> numbers(const nlohmann::json& v, std::string_view field) const
    {
        if (!v.is_array()) fail(field, "expected an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) out.push_back(number(e, field));
        return out;
    }

private:
    std::string_view text_;
};

inline const std::vector<std::pair<std::string_view, method>>& method_names()
{
    static const std::vector<std::pair<std::string_view, method>> names = {
        {"method3", method::method3}, {"method13", method::method13}, {"ehrlich", method::ehrlich}};
    return names;
}

} // namespace detail

/// Parses and validates a problem file. Failures throw ParseError naming the field and line.
inline problem parse_problem(std::string_view text)
{
    detail::problem_reader rd(text);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw error(errc::parse_error, std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw error(errc::parse_error, "problem file must be a JSON object");

    problem p;
    const auto& basis = rd.require(doc, "basis", "basis");
    if (!basis.is_array() || basis.size() < 2) rd.fail("basis", "expected an array of at least two entries");
    for (const auto& b : basis) {
        basis_entry e;
        const auto& kind = rd.require(b, "kind", "basis.kind");
        if (!kind.is_string()) rd.fail("basis.kind", "expected a string");
        e.kind = kind.get<std::string>();
        if (e.kind == "inverse-quadratic") e.kind = "inverse_quadratic";
        if (e.kind == "power") e.s = rd.count(rd.require(b, "s", "basis.s"), "basis.s");
        else if (e.kind == "sine" || e.kind == "cosine") e.parameter = rd.number(rd.require(b, "omega", "basis.omega"), "basis.omega");
        else if (e.kind == "exponential") e.parameter = rd.number(rd.require(b, "lambda", "basis.lambda"), "basis.lambda");
        else if (e.kind == "expr") {
            const auto& tree = rd.require(b, "tree", "basis.tree");
            if (!tree.is_string()) rd.fail("basis.tree", "expected a string");
            e.tree = tree.get<std::string>();
            try {
                (void)expression<double>::parse(e.tree);
            } catch (const error& err) {
                rd.fail("basis.tree", err.what());
            }
        } else if (e.kind != "constant" && e.kind != "inverse_quadratic") {
            rd.fail("basis.kind", "unknown kind '" + e.kind + "'");
        }
        p.basis.push_back(std::move(e));
    }
    const std::size_t n = p.basis.size() - 1;

    if (doc.contains("domain")) {
        const auto& d = doc.at("domain");
        if (!d.is_array() || d.size() != 2) rd.fail("domain", "expected [lo, hi] with null for an infinite end");
        if (!d[0].is_null()) p.domain_lo = rd.number(d[0], "domain");
        if (!d[1].is_null()) p.domain_hi = rd.number(d[1], "domain");
        if (p.domain_lo && p.domain_hi && !(*p.domain_lo < *p.domain_hi)) rd.fail("domain", "empty interval");
    }

    const auto& poly = rd.require(doc, "polynomial", "polynomial");
    const bool has_c = poly.is_object() && poly.contains("coefficients");
    const bool has_r = poly.is_object() && poly.contains("roots");
    if (has_c == has_r) rd.fail("polynomial", "give exactly one of 'coefficients' or 'roots'");
    if (has_c) {
        auto c = rd.numbers(poly.at("coefficients"), "polynomial.coefficients");
        if (c.size() != p.basis.size()) rd.fail("polynomial.coefficients", "length must equal the basis length");
        if (std::all_of(c.begin(), c.end(), [](double v) { return v == 0.0; }))
            rd.fail("polynomial.coefficients", "all coefficients are zero");
        p.coefficients = std::move(c);
    } else {
        const auto& rs = poly.at("roots");
        if (!rs.is_array()) rd.fail("polynomial.roots", "expected an array");
        std::vector<root_entry> roots;
        std::size_t total = 0;
        for (const auto& r : rs) {
            root_entry e{rd.number(rd.require(r, "x", "polynomial.roots.x"), "polynomial.roots.x"),
                         rd.count(rd.require(r, "multiplicity", "polynomial.roots.multiplicity"),
                                  "polynomial.roots.multiplicity")};
            if (e.multiplicity == 0) rd.fail("polynomial.roots.multiplicity", "must be at least 1");
            total += e.multiplicity;
            roots.push_back(e);
        }
        if (total != n)
            rd.fail("polynomial.roots", "multiplicities sum to " + std::to_string(total) + ", expected " + std::to_string(n));
        p.roots = std::move(roots);
    }

    p.initial = rd.numbers(rd.require(doc, "initial", "initial"), "initial");
    const auto& mult = rd.require(doc, "multiplicities", "multiplicities");
    if (!mult.is_array()) rd.fail("multiplicities", "expected an array of integers");
    std::size_t total = 0;
    for (const auto& m : mult) {
        unsigned a = rd.count(m, "multiplicities");
        if (a == 0) rd.fail("multiplicities", "entries must be at least 1");
        total += a;
        p.multiplicities.push_back(a);
    }
    if (p.initial.empty()) rd.fail("initial", "at least one starting value is needed");
    if (p.multiplicities.size() != p.initial.size())
        rd.fail("multiplicities", "length " + std::to_string(p.multiplicities.size()) + " differs from 'initial' length " +
                                      std::to_string(p.initial.size()));
    if (total != n)
        rd.fail("multiplicities", "sum to " + std::to_string(total) + " but the basis has degree " + std::to_string(n));

    const auto& methods = rd.require(doc, "methods", "methods");
    if (!methods.is_array() || methods.empty()) rd.fail("methods", "expected a non-empty array");
    for (const auto& m : methods) {
        if (!m.is_string()) rd.fail("methods", "expected method names");
        auto name = m.get<std::string>();
        auto it = std::find_if(detail::method_names().begin(), detail::method_names().end(),
                               [&](const auto& kv) { return kv.first == name; });
        if (it == detail::method_names().end()) rd.fail("methods", "unknown method '" + name + "'");
        if (std::find(p.methods.begin(), p.methods.end(), it->second) != p.methods.end())
            rd.fail("methods", "duplicate method '" + name + "'");
        p.methods.push_back(it->second);
    }

    if (doc.contains("settings")) {
        const auto& s = doc.at("settings");
        if (!s.is_object()) rd.fail("settings", "expected an object");
        if (s.contains("tolerance")) {
            p.tolerance = rd.number(s.at("tolerance"), "settings.tolerance");
            if (!(p.tolerance > 0.0)) rd.fail("settings.tolerance", "must be positive");
        }
        if (s.contains("max_iterations")) {
            p.max_iterations = rd.count(s.at("max_iterations"), "settings.max_iterations");
            if (p.max_iterations == 0) rd.fail("settings.max_iterations", "must be positive");
        }
    }
    unsigned max_alpha = *std::max_element(p.multiplicities.begin(), p.multiplicities.end());
    p.derivative_cap = max_alpha + 2;
    if (doc.contains("derivative_cap")) {
        p.derivative_cap = rd.count(doc.at("derivative_cap"), "derivative_cap");
        if (p.derivative_cap < max_alpha + 1)
            rd.fail("derivative_cap", "must be at least max multiplicity + 1 = " + std::to_string(max_alpha + 1));
    }

    for (auto m : p.methods) {
        if (m != method::ehrlich) continue;
        for (std::size_t j = 0; j < p.basis.size(); ++j) {
            const auto& b = p.basis[j];
            bool monomial = (b.kind == "power" && b.s == j) || (j == 0 && b.kind == "constant");
            if (!monomial) rd.fail("methods", "ehrlich requires the basis {1, x, ..., x^n}");
        }
    }
    return p;
}

/// Canonical JSON form; parse_problem(to_json(p).dump()) == p.
inline nlohmann::json to_json(const problem& p)
{
    using nlohmann::json;
    json doc = json::object();
    json basis = json::array();
    for (const auto& b : p.basis) {
        json e = {{"kind", b.kind}};
        if (b.kind == "power") e["s"] = b.s;
        else if (b.kind == "sine" || b.kind == "cosine") e["omega"] = b.parameter;
        else if (b.kind == "exponential") e["lambda"] = b.parameter;
        else if (b.kind == "expr") e["tree"] = b.tree;
        basis.push_back(std::move(e));
    }
    doc["basis"] = std::move(basis);
    doc["domain"] = json::array({p.domain_lo ? json(*p.domain_lo) : json(nullptr), p.domain_hi ? json(*p.domain_hi) : json(nullptr)});
    if (p.coefficients) {
        doc["polynomial"] = {{"coefficients", *p.coefficients}};
    } else {
        json rs = json::array();
        for (const auto& r : *p.roots) rs.push_back({{"x", r.x}, {"multiplicity", r.multiplicity}});
        doc["polynomial"] = {{"roots", std::move(rs)}};
    }
    doc["initial"] = p.initial;
    doc["multiplicities"] = p.multiplicities;
    json methods = json::array();
    for (auto m : p.methods) methods.push_back(std::string(to_string(m)));
    doc["methods"] = std::move(methods);
    doc["settings"] = {{"tolerance", p.tolerance}, {"max_iterations", p.max_iterations}};
    doc["derivative_cap"] = p.derivative_cap;
    return doc;
}

/// A problem bound to a working precision.
template <real_scalar T> struct problem_instance {
    basis_system<T> basis;
    generalized_polynomial<T> polynomial;
    std::vector<T> initial;
    std::vector<unsigned> multiplicities;
    /// Present when the polynomial was given by its roots.
    std::optional<root_configuration<T>> true_roots;
};

template <real_scalar T> basis_system<T> make_basis(const problem& p)
{
    std::vector<basis_function<T>> fs;
    const unsigned cap = p.derivative_cap;
    for (const auto& b : p.basis) {
        if (b.kind == "constant") fs.push_back(basis_function<T>::constant(cap));
        else if (b.kind == "power") fs.push_back(basis_function<T>::power(b.s, cap));
        else if (b.kind == "sine") fs.push_back(basis_function<T>::sine(T(b.parameter), cap));
        else if (b.kind == "cosine") fs.push_back(basis_function<T>::cosine(T(b.parameter), cap));
        else if (b.kind == "exponential") fs.push_back(basis_function<T>::exponential(T(b.parameter), cap));
        else if (b.kind == "inverse_quadratic") fs.push_back(basis_function<T>::inverse_quadratic(cap));
        else fs.push_back(basis_function<T>::expr(b.tree, cap));
    }
    interval<T> domain;
    if (p.domain_lo) domain.lo = T(*p.domain_lo);
    if (p.domain_hi) domain.hi = T(*p.domain_hi);
    return basis_system<T>(std::move(fs), domain);
}

/// Builds the basis and polynomial. Roots that do not determine a polynomial (singular node
/// matrix, duplicates, outside the domain) are reported against the 'polynomial' field.
template <real_scalar T> problem_instance<T> instantiate(const problem& p)
{
    auto basis = make_basis<T>(p);
    std::optional<root_configuration<T>> roots;
    std::vector<T> coefficients;
    try {
        if (p.roots) {
            std::vector<root_node<T>> nodes;
            for (const auto& r : *p.roots) nodes.push_back({T(r.x), r.multiplicity});
            roots.emplace(std::move(nodes));
            coefficients = coefficients_from_roots(basis, *roots).coefficients;
        } else {
            for (double c : *p.coefficients) coefficients.push_back(T(c));
        }
    } catch (const error& e) {
        throw error(errc::parse_error, std::string("field 'polynomial': ") + e.what());
    }
    std::vector<T> initial;
    for (double x : p.initial) initial.push_back(T(x));
    generalized_polynomial<T> f(basis, std::move(coefficients));
    return {std::move(basis), std::move(f), std::move(initial), p.multiplicities, std::move(roots)};
}

inline solver_settings settings_for(const problem& p, method m)
{
    solver_settings s;
    s.method = m;
    s.tolerance = p.tolerance;
    s.max_iterations = p.max_iterations;
    return s;
}

} // namespace simroots
