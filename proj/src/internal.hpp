#pragma once

#include <cstdint>
#include <string>

namespace invforge::detail {

/// Rendering of an interned atom ("exp(u)", "(u + v)^(1/2)"); plain or LaTeX.
std::string atom_display(std::uint32_t index, bool latex);

} // namespace invforge::detail
