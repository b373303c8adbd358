// Operator-expression parser used by the CLI and the presets.
//
// Grammar (ASCII, whitespace between tokens ignored):
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := coeff ('*' factor)* | factor ('*' factor)*
//   factor := name site? "'"?
//   coeff  := complex literal: "0.5", "1i", "2.0-0.3i" (one token, no spaces)
//   name   := a | n | sx | sy | sz | sp | sm | id
//   site   := 1-based tensor-factor index; may be omitted when the space has
//             exactly one factor
// A trailing apostrophe takes the Hermitian conjugate of the factor.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oqs/algebra.hpp"
#include "oqs/errors.hpp"

namespace oqs {

// Unknown names, out-of-range sites, operators on the wrong factor dimension.
struct SemanticError : ParseError {
    using ParseError::ParseError;
};

struct ExprFactor {
    std::string name;
    std::optional<int> site;  // 1-based, as written
    bool dagger = false;
    std::size_t offset = 0;
};

struct ExprTerm {
    cd coeff{1.0, 0.0};
    std::vector<ExprFactor> factors;
};

struct OperatorExpr {
    std::vector<ExprTerm> terms;

    Operator realize(const HilbertSpace& space) const;
    std::string pretty() const;
};

OperatorExpr parse_expr(const std::string& text);
Operator parse_operator_expression(const std::string& text, const HilbertSpace& space);

}  // namespace oqs
