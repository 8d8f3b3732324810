#pragma once

// Persistence for search indexes (.nlx) and trained models (.nlm). The byte
// layout is documented field by field in docs/format.md.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nlx/phoc.hpp"
#include "nlx/ranking.hpp"
#include "nlx/subspace.hpp"

namespace nlx {

inline constexpr std::uint32_t kIndexFormatVersion = 1;
inline constexpr std::uint32_t kModelFormatVersion = 1;

struct ModelFile {
  PhocConfig config;
  CcaModel model;
};

// Serialization never depends on thread count or run; equal indexes give
// equal bytes.
std::vector<std::uint8_t> serialize_index(const SearchIndex& index);

// Errors: kParse (bad magic or inconsistent structure), kVersion,
// kTruncated, kChecksum.
SearchIndex deserialize_index(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> serialize_model(const ModelFile& model);
ModelFile deserialize_model(std::span<const std::uint8_t> bytes);

// File wrappers; I/O failures throw Error(kIo).
void save_index(const SearchIndex& index, const std::string& path);
SearchIndex load_index(const std::string& path);
void save_model(const ModelFile& model, const std::string& path);
ModelFile load_model(const std::string& path);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace nlx
