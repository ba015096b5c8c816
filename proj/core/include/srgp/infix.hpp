#pragma once

#include "srgp/expr.hpp"

#include <string>
#include <vector>

namespace srgp {

/// Human-readable infix form. Operator applications are parenthesized with
/// spaced operators; a coefficiented variable prints tightly as `1.5*x2` so it
/// stays distinguishable from a product node. Values print with 17 significant
/// digits and survive a parse round trip exactly.
std::string to_infix(const ExprTree& tree, const std::vector<std::string>& names);

/// Parses the serialization produced by `to_infix`. `names` resolves variable
/// identifiers to dataset columns.
ExprTree parse_infix(const std::string& text, const std::vector<std::string>& names);

} // namespace srgp
