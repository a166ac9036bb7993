#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "glucolab/nn/network.hpp"

namespace glucolab::nn {

inline constexpr int kWeightFormatVersion = 1;

/// Versioned text container for one or more networks plus header fields.
///
///   glucolab-weights <version>
///   <key> = <value>            (header, any number of lines)
///   network <name>
///   layer <in> <out> <activation>
///   params <count>
///   <hex-float values>
///   end
///   ...
///   sha256 <digest of every preceding byte>
///
/// Parameters are written as C99 hex floats, so a round trip is bit-exact.
struct WeightFile {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<std::pair<std::string, Network>> networks;

  const std::string& header_value(const std::string& key) const;
  const Network& network(const std::string& name) const;
};

std::string encode_weight_file(const WeightFile& file);
/// Throws ChecksumError on digest mismatch or truncation, FormatError on
/// malformed content or version mismatch.
WeightFile decode_weight_file(const std::string& text);

void save_weight_file(const std::filesystem::path& path, const WeightFile& file);
WeightFile load_weight_file(const std::filesystem::path& path);

/// Single-network convenience wrappers.
void save_weights(const std::filesystem::path& path, const Network& net);
/// When `expected_layer_sizes` is given, a different architecture throws FormatError.
Network load_weights(const std::filesystem::path& path,
                     const std::optional<std::vector<std::size_t>>& expected_layer_sizes = std::nullopt);

}  // namespace glucolab::nn
