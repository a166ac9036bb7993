#include "glucolab/nn/serialize.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "glucolab/util/errors.hpp"
#include "glucolab/util/hashing.hpp"

namespace glucolab::nn {

namespace {

constexpr std::string_view kMagic = "glucolab-weights";
constexpr std::string_view kChecksumTag = "sha256 ";

std::string hexfloat(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%a", v);
  return buffer;
}

double parse_hexfloat(const std::string& token) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') throw FormatError("weights: bad number '" + token + "'");
  return v;
}

void encode_network(std::ostringstream& out, const std::string& name, const Network& net) {
  out << "network " << name << '\n';
  for (const auto& l : net.layers()) {
    out << "layer " << l.weight.cols() << ' ' << l.weight.rows() << ' ' << to_string(l.activation)
        << '\n';
  }
  const auto params = net.flatten();
  out << "params " << params.size() << '\n';
  for (std::size_t i = 0; i < params.size(); ++i) {
    out << hexfloat(params[i]) << ((i % 8 == 7 || i + 1 == params.size()) ? '\n' : ' ');
  }
  out << "end\n";
}

}  // namespace

const std::string& WeightFile::header_value(const std::string& key) const {
  for (const auto& [k, v] : header) {
    if (k == key) return v;
  }
  throw FormatError("weights: missing header field '" + key + "'");
}

const Network& WeightFile::network(const std::string& name) const {
  for (const auto& [n, net] : networks) {
    if (n == name) return net;
  }
  throw FormatError("weights: missing network '" + name + "'");
}

std::string encode_weight_file(const WeightFile& file) {
  std::ostringstream out;
  out << kMagic << ' ' << kWeightFormatVersion << '\n';
  for (const auto& [k, v] : file.header) {
    if (k.find_first_of(" =\n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw Error("weights: header field '" + k + "' not representable");
    }
    out << k << " = " << v << '\n';
  }
  for (const auto& [name, net] : file.networks) encode_network(out, name, net);
  std::string body = out.str();
  body += std::string(kChecksumTag) + sha256_hex(body) + '\n';
  return body;
}

WeightFile decode_weight_file(const std::string& text) {
  const auto tag = text.rfind(kChecksumTag);
  if (tag == std::string::npos || (tag != 0 && text[tag - 1] != '\n')) {
    throw ChecksumError("weights: checksum line missing (file truncated?)");
  }
  const std::string body = text.substr(0, tag);
  std::string digest = text.substr(tag + kChecksumTag.size());
  while (!digest.empty() && (digest.back() == '\n' || digest.back() == '\r')) digest.pop_back();
  if (digest != sha256_hex(body)) throw ChecksumError("weights: checksum mismatch");

  std::istringstream in(body);
  std::string line;
  std::getline(in, line);
  {
    std::istringstream first(line);
    std::string magic;
    int version = 0;
    first >> magic >> version;
    if (magic != kMagic) throw FormatError("weights: not a weight file");
    if (version != kWeightFormatVersion) {
      throw FormatError("weights: unsupported format version " + std::to_string(version));
    }
  }
  WeightFile file;
  while (std::getline(in, line)) {
    if (line.rfind("network ", 0) == 0) {
      const std::string name = line.substr(8);
      std::vector<std::size_t> sizes;
      std::vector<Activation> acts;
      std::size_t count = 0;
      while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word == "layer") {
          std::size_t in_dim = 0, out_dim = 0;
          std::string act;
          ls >> in_dim >> out_dim >> act;
          if (sizes.empty()) sizes.push_back(in_dim);
          if (sizes.back() != in_dim) throw FormatError("weights: non-contiguous layer sizes");
          sizes.push_back(out_dim);
          acts.push_back(parse_activation(act));
        } else if (word == "params") {
          ls >> count;
          break;
        } else {
          throw FormatError("weights: unexpected line '" + line + "'");
        }
      }
      Network net = Network::zeros(sizes, acts);
      if (net.parameter_count() != count) throw FormatError("weights: parameter count mismatch");
      std::vector<double> params;
      params.reserve(count);
      std::string token;
      while (params.size() < count && in >> token) params.push_back(parse_hexfloat(token));
      in >> token;
      if (params.size() != count || token != "end") throw FormatError("weights: truncated payload");
      std::getline(in, line);
      net.unflatten(params);
      file.networks.emplace_back(name, std::move(net));
    } else if (!line.empty()) {
      const auto eq = line.find(" = ");
      if (eq == std::string::npos) throw FormatError("weights: malformed header line '" + line + "'");
      file.header.emplace_back(line.substr(0, eq), line.substr(eq + 3));
    }
  }
  return file;
}

void save_weight_file(const std::filesystem::path& path, const WeightFile& file) {
  write_file_atomic(path, encode_weight_file(file));
}

WeightFile load_weight_file(const std::filesystem::path& path) {
  return decode_weight_file(read_file(path));
}

void save_weights(const std::filesystem::path& path, const Network& net) {
  WeightFile file;
  file.networks.emplace_back("net", net);
  save_weight_file(path, file);
}

Network load_weights(const std::filesystem::path& path,
                     const std::optional<std::vector<std::size_t>>& expected_layer_sizes) {
  auto file = load_weight_file(path);
  if (file.networks.size() != 1) throw FormatError("weights: expected exactly one network");
  Network net = std::move(file.networks.front().second);
  if (expected_layer_sizes && net.layer_sizes() != *expected_layer_sizes) {
    throw FormatError("weights: architecture mismatch");
  }
  return net;
}

}  // namespace glucolab::nn
