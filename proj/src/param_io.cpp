#include "rea/param_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rea/error.hpp"

namespace rea {

namespace {

constexpr std::string_view kMagic = "REAPARAM";

void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

std::uint64_t get_u64(std::string_view in, std::size_t pos) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
  }
  return v;
}

}  // namespace

std::string encode_params(const std::vector<NamedStack>& stacks) {
  nlohmann::json header;
  header["dtype"] = "float64";
  header["endianness"] = "little";
  header["stacks"] = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto& [name, stack] : stacks) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& s : stack.layers()) {
      layers.push_back({{"in", s.in}, {"out", s.out}, {"activation", to_string(s.act)}});
    }
    header["stacks"].push_back(
        {{"name", name}, {"offset", offset}, {"count", stack.param_count()}, {"layers", layers}});
    offset += stack.param_count();
  }
  header["total"] = offset;
  const std::string text = header.dump();

  std::string out(kMagic);
  put_u64(out, text.size());
  out += text;
  out.reserve(out.size() + 8 * offset);
  for (const auto& [name, stack] : stacks) {
    for (double p : stack.params()) put_u64(out, std::bit_cast<std::uint64_t>(p));
  }
  return out;
}

std::vector<NamedStack> decode_params(std::string_view bytes) {
  if (bytes.size() < 16 || bytes.substr(0, 8) != kMagic) {
    throw ValidationError("not a parameter file (bad magic)");
  }
  const std::uint64_t header_len = get_u64(bytes, 8);
  if (bytes.size() < 16 + header_len) throw ValidationError("truncated parameter header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(16, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("corrupt parameter header: ") + e.what());
  }
  if (header.value("dtype", "") != "float64" || header.value("endianness", "") != "little") {
    throw ValidationError("unsupported parameter encoding");
  }
  const std::size_t total = header.at("total").get<std::size_t>();
  const std::size_t data_pos = 16 + header_len;
  if (bytes.size() != data_pos + 8 * total) throw ValidationError("parameter payload size mismatch");

  std::vector<NamedStack> stacks;
  for (const auto& sj : header.at("stacks")) {
    std::vector<LayerShape> layers;
    for (const auto& lj : sj.at("layers")) {
      layers.push_back({lj.at("in").get<std::size_t>(), lj.at("out").get<std::size_t>(),
                        activation_from_string(lj.at("activation").get<std::string>())});
    }
    DenseStack stack(std::move(layers));
    const std::size_t offset = sj.at("offset").get<std::size_t>();
    if (sj.at("count").get<std::size_t>() != stack.param_count() ||
        offset + stack.param_count() > total) {
      throw ValidationError("parameter header layout is inconsistent");
    }
    auto params = stack.params();
    for (std::size_t i = 0; i < params.size(); ++i) {
      params[i] = std::bit_cast<double>(get_u64(bytes, data_pos + 8 * (offset + i)));
    }
    stacks.emplace_back(sj.at("name").get<std::string>(), std::move(stack));
  }
  return stacks;
}

void write_params(const std::filesystem::path& path, const std::vector<NamedStack>& stacks) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write '" + path.string() + "'");
  const std::string bytes = encode_params(stacks);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::vector<NamedStack> read_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open parameter file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_params(ss.str());
}

}  // namespace rea
