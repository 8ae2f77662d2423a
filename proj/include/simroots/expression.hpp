#pragma once

#include <simroots/error.hpp>
#include <simroots/jet.hpp>
#include <simroots/scalar.hpp>

#include <cctype>
#include <memory>
#include <string>
#include <string_view>
#include <variant>

namespace simroots {

/// Immutable expression tree in one variable x. Nodes are shared, so copies are cheap
/// and safe across threads.
template <real_scalar T> class expression {
public:
    enum class unary_fn { negate, sin, cos, exp };
    enum class binary_op { add, sub, mul, div };

    struct node;
    using node_ptr = std::shared_ptr<const node>;

    struct number { T value; };
    struct variable {};
    struct unary { unary_fn fn; node_ptr arg; };
    struct binary { binary_op op; node_ptr lhs, rhs; };
    struct power { node_ptr base; int exponent; };

    struct node {
        std::variant<number, variable, unary, binary, power> v;
    };

    expression() = default;
    expression(node_ptr root, std::string source) : root_(std::move(root)), source_(std::move(source)) {}

    /// Grammar: numbers, x, + - * /, ^ with an integer exponent, sin, cos, exp, parentheses.
    static expression parse(std::string_view text);

    [[nodiscard]] const std::string& source() const noexcept { return source_; }
    [[nodiscard]] bool empty() const noexcept { return root_ == nullptr; }

    /// Taylor coefficients of the expression at x through the given order.
    [[nodiscard]] jet<T> propagate(const T& x, std::size_t order) const { return eval(*root_, x, order); }

private:
    static jet<T> eval(const node& n, const T& x, std::size_t order)
    {
        return std::visit(
            [&](const auto& alt) -> jet<T> {
                using A = std::decay_t<decltype(alt)>;
                if constexpr (std::is_same_v<A, number>) {
                    return jet<T>::constant(order, alt.value);
                } else if constexpr (std::is_same_v<A, variable>) {
                    return jet<T>::variable(order, x);
                } else if constexpr (std::is_same_v<A, unary>) {
                    auto a = eval(*alt.arg, x, order);
                    switch (alt.fn) {
                    case unary_fn::negate: return -a;
                    case unary_fn::sin: return sin(a);
                    case unary_fn::cos: return cos(a);
                    case unary_fn::exp: return exp(a);
                    }
                    return a;
                } else if constexpr (std::is_same_v<A, binary>) {
                    auto l = eval(*alt.lhs, x, order);
                    auto r = eval(*alt.rhs, x, order);
                    switch (alt.op) {
                    case binary_op::add: return l + r;
                    case binary_op::sub: return l - r;
                    case binary_op::mul: return l * r;
                    case binary_op::div: return l / r;
                    }
                    return l;
                } else {
                    return pow(eval(*alt.base, x, order), alt.exponent);
                }
            },
            n.v);
    }

    node_ptr root_;
    std::string source_;
};

namespace detail {

template <real_scalar T> class expression_parser {
    using E = expression<T>;
    using node_ptr = typename E::node_ptr;

public:
    explicit expression_parser(std::string_view text) : text_(text) {}

    node_ptr parse()
    {
        auto root = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected character");
        return root;
    }

private:
    static node_ptr make(auto alt) { return std::make_shared<const typename E::node>(typename E::node{std::move(alt)}); }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw error(errc::parse_error,
                    what + " at offset " + std::to_string(pos_) + " in expression '" + std::string(text_) + "'");
    }

    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    node_ptr parse_sum()
    {
        auto lhs = parse_product();
        for (;;) {
            if (accept('+')) lhs = make(typename E::binary{E::binary_op::add, lhs, parse_product()});
            else if (accept('-')) lhs = make(typename E::binary{E::binary_op::sub, lhs, parse_product()});
            else return lhs;
        }
    }

    node_ptr parse_product()
    {
        auto lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = make(typename E::binary{E::binary_op::mul, lhs, parse_unary()});
            else if (accept('/')) lhs = make(typename E::binary{E::binary_op::div, lhs, parse_unary()});
            else return lhs;
        }
    }

    node_ptr parse_unary()
    {
        if (accept('-')) return make(typename E::unary{E::unary_fn::negate, parse_unary()});
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    node_ptr parse_power()
    {
        auto base = parse_primary();
        if (!accept('^')) return base;
        skip_ws();
        bool negative = false;
        if (accept('-')) negative = true;
        else accept('+');
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) fail("exponent must be an integer literal");
        int e = std::stoi(std::string(text_.substr(start, pos_ - start)));
        return make(typename E::power{base, negative ? -e : e});
    }

    node_ptr parse_primary()
    {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto inner = parse_sum();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            auto name = text_.substr(start, pos_ - start);
            if (name == "x") return make(typename E::variable{});
            typename E::unary_fn fn;
            if (name == "sin") fn = E::unary_fn::sin;
            else if (name == "cos") fn = E::unary_fn::cos;
            else if (name == "exp") fn = E::unary_fn::exp;
            else {
                pos_ = start;
                fail("unknown identifier '" + std::string(name) + "'");
            }
            if (!accept('(')) fail("expected '(' after function name");
            auto arg = parse_sum();
            if (!accept(')')) fail("expected ')'");
            return make(typename E::unary{fn, arg});
        }
        fail("unexpected character");
    }

    node_ptr parse_number()
    {
        std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        };
        digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            std::size_t exp_start = pos_;
            digits();
            if (exp_start == pos_) pos_ = mark;
        }
        auto literal = std::string(text_.substr(start, pos_ - start));
        if (literal == ".") fail("malformed number");
        return make(typename E::number{scalar_from_string<T>(literal)});
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace detail

template <real_scalar T> expression<T> expression<T>::parse(std::string_view text)
{
    detail::expression_parser<T> p(text);
    auto root = p.parse();
    return expression(std::move(root), std::string(text));
}

} // namespace simroots
