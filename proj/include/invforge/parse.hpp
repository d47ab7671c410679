#pragma once

#include "invforge/expr.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>

namespace invforge {

enum class PrintStyle { Plain, Latex, Json };

std::string print(const Expr& e, PrintStyle style = PrintStyle::Plain);
std::string to_latex(const Expr& e);
/// AST of the normal form: {"op": add|mul|pow|call|sym|rat, ...}.
nlohmann::json to_json_ast(const Expr& e);

enum class ParseMode {
    /// Nonlinearities f(u, u_x): identifiers u, v and ux only.
    User,
    /// Any printable engine symbol; other identifiers become parameters.
    Engine,
};

/// Throws SyntaxError (line/column carrying) or UnknownIdentifier.
Expr parse(std::string_view text, ParseMode mode = ParseMode::User);

} // namespace invforge
