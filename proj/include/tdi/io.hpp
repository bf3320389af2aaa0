#pragma once

#include <string>

#include "tdi/system.hpp"
#include "tdi/window.hpp"

namespace tdi {

// Set files: a header "N <value>" followed by either whitespace separated
// elements or a single line "mask <hex>" (bit x-1 set iff x is present).
// '#' starts a comment. Throws ParseError.
SetWindow parse_set_text(const std::string& text);
SetWindow read_set_file(const std::string& path);

std::string format_set_mask(const SetWindow& window);
std::string format_set_list(const SetWindow& window);
std::string mask_hex(const SetWindow& window);

// System files: {"k": K, "lambda": [...]}.
DiagonalSystem parse_system_json(const std::string& text);
DiagonalSystem read_system_file(const std::string& path);

std::string read_text_file(const std::string& path);

}  // namespace tdi
