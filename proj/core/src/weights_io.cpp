#include "spoofguard/weights_io.hpp"

#include <algorithm>
#include <map>

#include "spoofguard/binio.hpp"

namespace spoofguard {

namespace {

constexpr std::uint32_t kWeightsVersion = 1;

struct RawTensor {
  std::string name;
  std::vector<int> dims;
  std::vector<float> data;
};

double preset_id(const std::string& preset) {
  if (preset == "tiny") return 1.0;
  if (preset == "resnet34") return 2.0;
  return 0.0;  // custom
}

std::string preset_from_id(double id) {
  if (id == 1.0) return "tiny";
  if (id == 2.0) return "resnet34";
  return "custom";
}

std::vector<RawTensor> meta_tensors(const NetworkConfig& cfg) {
  std::vector<RawTensor> meta;
  meta.push_back({"meta/preset_id", {1}, {static_cast<float>(preset_id(cfg.preset))}});
  meta.push_back({"meta/stage_blocks",
                  {4},
                  {static_cast<float>(cfg.stage_blocks[0]), static_cast<float>(cfg.stage_blocks[1]),
                   static_cast<float>(cfg.stage_blocks[2]), static_cast<float>(cfg.stage_blocks[3])}});
  meta.push_back({"meta/base_channels", {1}, {static_cast<float>(cfg.base_channels)}});
  meta.push_back({"meta/input_hw", {1}, {static_cast<float>(cfg.input_hw)}});
  meta.push_back({"meta/in_channels", {1}, {static_cast<float>(cfg.in_channels)}});
  meta.push_back({"meta/num_classes", {1}, {static_cast<float>(cfg.num_classes)}});
  return meta;
}

void write_tensor(ByteWriter& w, const RawTensor& t) {
  require(t.name.size() <= 0xffff, "tensor name too long: " + t.name);
  require(t.dims.size() <= 0xff, "tensor rank too large: " + t.name);
  w.u16(static_cast<std::uint16_t>(t.name.size()));
  w.str(t.name);
  w.u8(static_cast<std::uint8_t>(t.dims.size()));
  std::size_t count = 1;
  for (int d : t.dims) {
    w.u32(static_cast<std::uint32_t>(d));
    count *= static_cast<std::size_t>(d);
  }
  require(count == t.data.size(), "tensor data does not match dims: " + t.name);
  for (float v : t.data) w.f32(v);
}

std::vector<RawTensor> read_all(const std::filesystem::path& path) {
  const auto raw = read_file(path);
  ByteReader r(raw, path.string());

  if (raw.size() < 4 || r.str(4) != "SGW1") {
    ByteReader at(raw, path.string());
    at.fail_at("bad SGW1 magic");
  }
  if (raw.size() < 8) r.fail_at("truncated header");

  // CRC covers everything before the trailing u32.
  if (raw.size() < 12) r.fail_at("file too short for CRC trailer");
  const std::size_t body_len = raw.size() - 4;
  ByteReader crc_reader(std::span(raw.data() + body_len, 4), path.string());
  const std::uint32_t stored_crc = crc_reader.u32();
  const std::uint32_t actual_crc = crc32(std::span(raw.data(), body_len));
  if (stored_crc != actual_crc) {
    fail(path.string() + ": CRC mismatch (file corrupt)");
  }

  const std::uint32_t version = r.u32();
  if (version != kWeightsVersion) {
    fail(path.string() + ": unsupported SGW1 version " + std::to_string(version));
  }
  const std::uint32_t count = r.u32();

  std::vector<RawTensor> tensors;
  tensors.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    RawTensor t;
    const std::uint16_t name_len = r.u16();
    t.name = r.str(name_len);
    const std::uint8_t rank = r.u8();
    std::size_t numel = 1;
    for (std::uint8_t d = 0; d < rank; ++d) {
      const std::uint32_t dim = r.u32();
      t.dims.push_back(static_cast<int>(dim));
      numel *= dim;
    }
    t.data.resize(numel);
    for (std::size_t j = 0; j < numel; ++j) t.data[j] = r.f32();
    tensors.push_back(std::move(t));
  }
  if (r.offset() != body_len) r.fail_at("trailing bytes before CRC");
  return tensors;
}

NetworkConfig config_from_meta(const std::vector<RawTensor>& tensors,
                               const std::filesystem::path& path) {
  std::map<std::string, const RawTensor*> by_name;
  for (const auto& t : tensors) by_name[t.name] = &t;

  auto get = [&](const char* name) -> const RawTensor& {
    auto it = by_name.find(name);
    if (it == by_name.end()) fail(path.string() + ": missing tensor '" + name + "'");
    return *it->second;
  };

  NetworkConfig cfg;
  const auto& blocks = get("meta/stage_blocks");
  require(blocks.data.size() == 4, path.string() + ": meta/stage_blocks must have 4 entries");
  for (int i = 0; i < 4; ++i) cfg.stage_blocks[i] = static_cast<int>(blocks.data[i]);
  cfg.base_channels = static_cast<int>(get("meta/base_channels").data.at(0));
  cfg.input_hw = static_cast<int>(get("meta/input_hw").data.at(0));
  cfg.in_channels = static_cast<int>(get("meta/in_channels").data.at(0));
  cfg.num_classes = static_cast<int>(get("meta/num_classes").data.at(0));
  cfg.preset = preset_from_id(get("meta/preset_id").data.at(0));
  cfg.validate();
  return cfg;
}

void apply_tensors(Network<float>& net, const std::vector<RawTensor>& tensors,
                   const std::filesystem::path& path) {
  std::map<std::string, Tensor<float>*> model;
  for (auto& named : net.state_tensors()) model[named.name] = named.tensor;

  std::size_t applied = 0;
  for (const auto& t : tensors) {
    if (t.name.rfind("meta/", 0) == 0) continue;
    auto it = model.find(t.name);
    if (it == model.end()) {
      fail(path.string() + ": tensor '" + t.name + "' does not exist in the model");
    }
    if (t.dims != it->second->shape) {
      fail(path.string() + ": shape mismatch for tensor '" + t.name + "': file has " +
           shape_string(t.dims) + ", model expects " + shape_string(it->second->shape));
    }
    std::copy(t.data.begin(), t.data.end(), it->second->data.begin());
    ++applied;
  }
  if (applied != model.size()) {
    for (const auto& [name, _] : model) {
      const bool found = std::any_of(tensors.begin(), tensors.end(),
                                     [&](const RawTensor& t) { return t.name == name; });
      if (!found) fail(path.string() + ": file is missing tensor '" + name + "'");
    }
  }
}

}  // namespace

void save_weights(Network<float>& net, const std::filesystem::path& path) {
  std::vector<RawTensor> tensors = meta_tensors(net.config());
  for (auto& named : net.state_tensors()) {
    tensors.push_back({named.name, named.tensor->shape, named.tensor->data});
  }

  ByteWriter w;
  w.str("SGW1");
  w.u32(kWeightsVersion);
  w.u32(static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) write_tensor(w, t);
  const std::uint32_t crc = crc32(std::span(w.data().data(), w.size()));
  w.u32(crc);

  write_file_atomic(path, w.data());
}

Network<float> load_network(const std::filesystem::path& path) {
  const auto tensors = read_all(path);
  Network<float> net(config_from_meta(tensors, path));
  apply_tensors(net, tensors, path);
  return net;
}

void load_into(Network<float>& net, const std::filesystem::path& path) {
  apply_tensors(net, read_all(path), path);
}

}  // namespace spoofguard
