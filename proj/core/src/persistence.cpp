#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "locfit/error.hpp"
#include "locfit/models.hpp"

// On-disk layout of a model directory:
//   manifest.json  topology, normalization, loss weights, config echo and
//                  the SHA-256 of weights.bin
//   weights.bin    for each layer in order: weight matrix (row-major,
//                  out_dim x in_dim) followed by the bias vector, all as
//                  little-endian IEEE-754 binary32

namespace locfit {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "locfit-model";
constexpr int kFormatVersion = 1;

void put_f32(std::string& out, double v) {
  const auto f = static_cast<float>(v);
  auto bits = std::bit_cast<std::uint32_t>(f);
  if constexpr (std::endian::native == std::endian::big) {
    bits = ((bits & 0xffu) << 24) | ((bits & 0xff00u) << 8) | ((bits >> 8) & 0xff00u) | (bits >> 24);
  }
  char b[4];
  std::memcpy(b, &bits, 4);
  out.append(b, 4);
}

double get_f32(const std::string& in, std::size_t& pos) {
  std::uint32_t bits = 0;
  std::memcpy(&bits, in.data() + pos, 4);
  if constexpr (std::endian::native == std::endian::big) {
    bits = ((bits & 0xffu) << 24) | ((bits & 0xff00u) << 8) | ((bits >> 8) & 0xff00u) | (bits >> 24);
  }
  pos += 4;
  return static_cast<double>(std::bit_cast<float>(bits));
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + p.string());
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw SchemaError(std::string("manifest is missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("manifest field '") + key + "': " + e.what());
  }
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

void save_model(const LocModel& model, const std::filesystem::path& dir) {
  model.topology.validate();
  if (model.params.layers.size() != model.topology.layers.size()) {
    throw SchemaError("model parameters do not match topology");
  }
  std::string blob;
  blob.reserve(model.params.parameter_count() * 4);
  for (const auto& l : model.params.layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) put_f32(blob, l.weight(r, c));
    }
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) put_f32(blob, l.bias[i]);
  }

  json layers = json::array();
  for (const auto& s : model.topology.layers) {
    layers.push_back({{"in_dim", s.in_dim},
                      {"out_dim", s.out_dim},
                      {"activation", std::string(to_string(s.activation))},
                      {"dropout_rate", s.dropout_rate},
                      {"input", s.input}});
  }
  json config = json::parse(model.config_echo, nullptr, false);
  if (config.is_discarded()) config = json::object();

  const auto& n = model.norm;
  json manifest = {
      {"format", kFormat},
      {"version", kFormatVersion},
      {"kind", std::string(to_string(model.kind))},
      {"layer_count", model.topology.layers.size()},
      {"layers", layers},
      {"heads", model.topology.heads},
      {"n_floors", model.n_floors},
      {"floor_height", model.floor_height},
      {"loss_weights", {{"floor", model.floor_loss_weight}, {"coord", model.coord_loss_weight}}},
      {"normalization",
       {{"rss_min", n.rss_min},
        {"rss_max", n.rss_max},
        {"center_x", n.center_x},
        {"center_y", n.center_y},
        {"center_z", n.center_z},
        {"coord_scale", n.coord_scale}}},
      {"config", config},
      {"weights_file", "weights.bin"},
      {"weights_bytes", blob.size()},
      {"weights_sha256", sha256_hex(blob)},
  };

  std::filesystem::create_directories(dir);
  write_file(dir / "weights.bin", blob);
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

LocModel load_model(const std::filesystem::path& dir) {
  const std::string manifest_text = read_file(dir / "manifest.json");
  json manifest = json::parse(manifest_text, nullptr, false);
  if (manifest.is_discarded()) throw SchemaError("manifest.json is not valid JSON");
  if (field<std::string>(manifest, "format") != kFormat) {
    throw SchemaError("manifest format is not " + std::string(kFormat));
  }
  if (field<int>(manifest, "version") != kFormatVersion) {
    throw SchemaError("unsupported manifest version");
  }

  LocModel model;
  const auto kind = field<std::string>(manifest, "kind");
  if (kind == "simo") {
    model.kind = ModelKind::simo;
  } else if (kind == "siso") {
    model.kind = ModelKind::siso;
  } else {
    throw SchemaError("unknown model kind '" + kind + "'");
  }

  const auto layer_count = field<std::size_t>(manifest, "layer_count");
  const auto& layers = manifest.at("layers");
  if (!layers.is_array() || layers.size() != layer_count) {
    throw SchemaError("manifest layer_count " + std::to_string(layer_count) +
                      " does not match its layer list");
  }
  for (const auto& l : layers) {
    LayerSpec s;
    s.in_dim = field<std::size_t>(l, "in_dim");
    s.out_dim = field<std::size_t>(l, "out_dim");
    s.activation = activation_from_string(field<std::string>(l, "activation"));
    s.dropout_rate = field<double>(l, "dropout_rate");
    s.input = field<int>(l, "input");
    model.topology.layers.push_back(s);
  }
  model.topology.heads = field<std::vector<std::size_t>>(manifest, "heads");
  try {
    model.topology.validate();
  } catch (const DomainError& e) {
    throw SchemaError(std::string("manifest topology: ") + e.what());
  }
  model.n_floors = field<int>(manifest, "n_floors");
  model.floor_height = field<double>(manifest, "floor_height");
  const auto& lw = manifest.at("loss_weights");
  model.floor_loss_weight = field<double>(lw, "floor");
  model.coord_loss_weight = field<double>(lw, "coord");
  const auto& nj = manifest.at("normalization");
  model.norm.rss_min = field<double>(nj, "rss_min");
  model.norm.rss_max = field<double>(nj, "rss_max");
  model.norm.center_x = field<double>(nj, "center_x");
  model.norm.center_y = field<double>(nj, "center_y");
  model.norm.center_z = field<double>(nj, "center_z");
  model.norm.coord_scale = field<double>(nj, "coord_scale");
  model.config_echo = manifest.contains("config") ? manifest.at("config").dump() : "{}";

  const auto blob = read_file(dir / field<std::string>(manifest, "weights_file"));
  if (sha256_hex(blob) != field<std::string>(manifest, "weights_sha256")) {
    throw ChecksumError("weights.bin checksum does not match manifest");
  }
  std::size_t expected = 0;
  for (const auto& s : model.topology.layers) expected += (s.in_dim * s.out_dim + s.out_dim) * 4;
  if (blob.size() != expected || blob.size() != field<std::size_t>(manifest, "weights_bytes")) {
    throw SchemaError("weights.bin size does not match manifest layer dims");
  }

  std::size_t pos = 0;
  for (const auto& s : model.topology.layers) {
    DenseParams p;
    p.weight.resize(static_cast<Eigen::Index>(s.out_dim), static_cast<Eigen::Index>(s.in_dim));
    p.bias.resize(static_cast<Eigen::Index>(s.out_dim));
    for (Eigen::Index r = 0; r < p.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.weight.cols(); ++c) p.weight(r, c) = get_f32(blob, pos);
    }
    for (Eigen::Index i = 0; i < p.bias.size(); ++i) p.bias[i] = get_f32(blob, pos);
    model.params.layers.push_back(std::move(p));
  }
  if (!model.params.all_finite()) throw SchemaError("weights.bin contains non-finite values");
  return model;
}

}  // namespace locfit
