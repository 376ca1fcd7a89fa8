#pragma once

#include <string>

#include "dfrc/types.hpp"

namespace dfrc {

// Text matrix exchange format: first line "rows cols", then one row per line,
// entries written as re+imj pairs (e.g. "1.5-0.25j") separated by spaces.
void write_complex_matrix(const std::string& path, const CMat& m);
CMat read_complex_matrix(const std::string& path);

std::string format_complex(const Complex& z);
Complex parse_complex(const std::string& token);

}  // namespace dfrc
