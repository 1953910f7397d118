#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rea/neural.hpp"

namespace rea {

/// Binary parameter file:
///   8 bytes   magic "REAPARAM"
///   8 bytes   header length L, little-endian uint64
///   L bytes   JSON header {"dtype":"float64","endianness":"little",
///             "stacks":[{"name","offset","count","layers":[{"in","out","activation"}]}],
///             "total": N}
///   8N bytes  parameters as little-endian IEEE-754 doubles, stacks in header order
using NamedStack = std::pair<std::string, DenseStack>;

std::string encode_params(const std::vector<NamedStack>& stacks);
std::vector<NamedStack> decode_params(std::string_view bytes);

void write_params(const std::filesystem::path& path, const std::vector<NamedStack>& stacks);
std::vector<NamedStack> read_params(const std::filesystem::path& path);

}  // namespace rea
