#pragma once

#include <filesystem>
#include <string>

#include "divekit/instance.hpp"

namespace divekit {

inline constexpr int kInstanceFormatVersion = 1;

// Native JSON: {"format": "divekit-milp", "version": 1, "name", "n", "m",
// "c", "rows": [[[col, coeff], ...], ...], "sense": "LGE...", "b", "lb",
// "ub", "int", "divable"}. Infinite bounds are written as +-1e20.
std::string instance_to_json(const MilpInstance& inst);
MilpInstance instance_from_json(const std::string& text);

// Fixed-form MPS subset: NAME, ROWS (N/L/G/E), COLUMNS with INTORG/INTEND
// markers, RHS, BOUNDS (UP/LO/FX/BV/MI/PL/FR), ENDATA. Anything else raises
// UnsupportedFeature; malformed lines raise ParseError.
MilpInstance instance_from_mps(const std::string& text);

// Dispatches on extension: ".mps" reads MPS, everything else JSON.
MilpInstance read_instance(const std::filesystem::path& path);
// Always writes native JSON.
void write_instance(const MilpInstance& inst, const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace divekit
