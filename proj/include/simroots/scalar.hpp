#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <concepts>
#include <limits>
#include <string>

namespace simroots {

/// IEEE binary128 layout, software arithmetic. Expression templates are off so
/// that `auto` locals hold values.
using quad = boost::multiprecision::number<
    boost::multiprecision::backends::cpp_bin_float<113, boost::multiprecision::backends::digit_base_2, void,
                                                   std::int16_t, -16382, 16383>,
    boost::multiprecision::et_off>;

template <typename T>
concept real_scalar = requires(T a, T b) {
    { a + b } -> std::convertible_to<T>;
    { a * b } -> std::convertible_to<T>;
    { a / b } -> std::convertible_to<T>;
    { a < b } -> std::convertible_to<bool>;
    requires std::numeric_limits<T>::is_specialized;
};

template <real_scalar T> T epsilon() { return std::numeric_limits<T>::epsilon(); }

template <real_scalar T> double to_double(const T& v) { return static_cast<double>(v); }

/// Parses a decimal literal at full precision of T.
template <real_scalar T> T scalar_from_string(const std::string& text)
{
    if constexpr (std::is_floating_point_v<T>) {
        return static_cast<T>(std::stold(text));
    } else {
        return T(text);
    }
}

template <real_scalar T> T ipow(T base, unsigned exponent)
{
    T result(1);
    while (exponent != 0) {
        if (exponent & 1u) result *= base;
        base *= base;
        exponent >>= 1u;
    }
    return result;
}

template <real_scalar T> T factorial(unsigned n)
{
    T result(1);
    for (unsigned k = 2; k <= n; ++k) result *= T(k);
    return result;
}

/// s (s-1) ... (s-p+1)
template <real_scalar T> T falling_factorial(unsigned s, unsigned p)
{
    if (p > s) return T(0);
    T result(1);
    for (unsigned k = 0; k < p; ++k) result *= T(s - k);
    return result;
}

template <real_scalar T> bool is_finite(const T& v)
{
    using std::isfinite;
    using boost::multiprecision::isfinite;
    return isfinite(v);
}

} // namespace simroots
