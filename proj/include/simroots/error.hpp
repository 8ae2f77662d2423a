#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace simroots {

enum class errc {
    order_exceeds_cap,
    domain_error,
    division_by_singular_jet,
    dimension_mismatch,
    singular_node_system,
    degenerate_denominator,
    iterate_collision,
    invalid_configuration,
    not_monomial,
    insufficient_history,
    parse_error,
};

constexpr std::string_view to_string(errc code) noexcept
{
    switch (code) {
    case errc::order_exceeds_cap: return "OrderExceedsCap";
    case errc::domain_error: return "DomainError";
    case errc::division_by_singular_jet: return "DivisionBySingularJet";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::singular_node_system: return "SingularNodeSystem";
    case errc::degenerate_denominator: return "DegenerateDenominator";
    case errc::iterate_collision: return "IterateCollision";
    case errc::invalid_configuration: return "InvalidConfiguration";
    case errc::not_monomial: return "NotMonomial";
    case errc::insufficient_history: return "InsufficientHistory";
    case errc::parse_error: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    [[nodiscard]] errc code() const noexcept { return code_; }

private:
    errc code_;
};

} // namespace simroots
