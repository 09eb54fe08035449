#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hfl/json_io.hpp"

namespace hfl {

/// canonical serialization: sorted keys, stable float text, trailing newline
std::string canonical_json(const json& j);

/// FNV-1a over the canonical serialization; names cached report files
std::uint64_t config_hash(const json& config);
std::string config_hash_hex(const json& config);

/// one cell with 17 significant digits (CSV gets full precision)
std::string format_number(double x);

/// RFC-4180 CSV table with a header row
std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

}  // namespace hfl
