#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace archie {

// Shortest representation that round-trips to the same double.
std::string format_double(double value);

// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

// 64-bit FNV-1a, used for config fingerprints stored in checkpoints.
std::uint64_t fnv1a64(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

// Writes via a sibling temporary file and rename, so readers never observe a
// partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace archie
