#include "mixgan/train/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mixgan/core/error.hpp"

namespace mixgan::train {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char((v >> 8) & 0xff));
  out.push_back(char((v >> 16) & 0xff));
  out.push_back(char((v >> 24) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
         (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}

std::string hex_u64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", (unsigned long long)v);
  return buf;
}

std::uint64_t parse_hex_u64(const std::string& s) {
  try {
    return std::stoull(s, nullptr, 16);
  } catch (const std::exception&) {
    throw FormatError("checkpoint: bad RNG state word '" + s + "'");
  }
}

std::string sidecar_path(const std::string& path) {
  return path + ".losses.csv";
}

}  // namespace

void save_checkpoint(const ModelCheckpoint& ckpt, const std::string& path) {
  nlohmann::json meta;
  meta["arch"] = to_json(ckpt.arch);
  meta["config"] = to_json(ckpt.config);
  meta["stage"] = to_string(ckpt.stage);
  meta["epoch"] = ckpt.epoch;
  nlohmann::json rng = nlohmann::json::array();
  for (const std::uint64_t w : ckpt.rng_state) rng.push_back(hex_u64(w));
  meta["rng_state"] = rng;
  nlohmann::json steps = nlohmann::json::object();
  for (const auto& kv : ckpt.adam_steps) steps[kv.first] = kv.second;
  meta["adam_steps"] = steps;

  nlohmann::json dir = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& kv : ckpt.arrays) {
    nlohmann::json entry;
    entry["name"] = kv.first;
    entry["dtype"] = "f32";
    entry["shape"] = kv.second.shape();
    entry["offset"] = offset;
    dir.push_back(entry);
    offset += kv.second.size() * sizeof(float);
  }
  meta["arrays"] = dir;

  const std::string meta_text = meta.dump();
  std::string header = "MXGN";
  put_u32(header, kCheckpointVersion);
  put_u32(header, std::uint32_t(meta_text.size()));

  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write checkpoint to " + tmp);
    f.write(header.data(), std::streamsize(header.size()));
    f.write(meta_text.data(), std::streamsize(meta_text.size()));
    for (const auto& kv : ckpt.arrays)
      f.write(reinterpret_cast<const char*>(kv.second.data()),
              std::streamsize(kv.second.size() * sizeof(float)));
    if (!f) throw IoError("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoError("cannot move checkpoint into place at " + path);

  save_loss_history(ckpt.history, sidecar_path(path));
}

ModelCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "MXGN", 4) != 0)
    throw FormatError("not a checkpoint file: " + path);
  const std::uint32_t version = get_u32(p + 4);
  if (version != kCheckpointVersion)
    throw VersionError("checkpoint format version " + std::to_string(version) +
                       " (supported: " + std::to_string(kCheckpointVersion) +
                       ")");
  const std::uint32_t meta_len = get_u32(p + 8);
  if (12 + std::size_t(meta_len) > bytes.size())
    throw FormatError("checkpoint metadata truncated");

  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(bytes.begin() + 12,
                                 bytes.begin() + 12 + meta_len);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint metadata is not valid JSON: ") +
                      e.what());
  }

  ModelCheckpoint ckpt;
  try {
    ckpt.arch = arch_from_json(meta.at("arch"));
    ckpt.config = config_from_json(meta.at("config"));
    ckpt.stage = parse_stage(meta.at("stage").get<std::string>());
    ckpt.epoch = meta.at("epoch").get<std::uint64_t>();
    const auto& rng = meta.at("rng_state");
    if (!rng.is_array() || rng.size() != 4)
      throw FormatError("checkpoint: rng_state must be 4 words");
    for (std::size_t i = 0; i < 4; ++i)
      ckpt.rng_state[i] = parse_hex_u64(rng[i].get<std::string>());
    for (const auto& [key, val] : meta.at("adam_steps").items())
      ckpt.adam_steps.emplace_back(key, val.get<std::uint64_t>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint metadata incomplete: ") +
                      e.what());
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("checkpoint metadata rejected: ") +
                      e.what());
  }

  const std::size_t payload_start = 12 + meta_len;
  const std::size_t payload_size = bytes.size() - payload_start;
  try {
    for (const auto& entry : meta.at("arrays")) {
      const std::string name = entry.at("name").get<std::string>();
      if (entry.at("dtype").get<std::string>() != "f32")
        throw FormatError("checkpoint array " + name + ": unsupported dtype");
      Shape shape = entry.at("shape").get<Shape>();
      const std::uint64_t off = entry.at("offset").get<std::uint64_t>();
      Tensor<float> t(shape);
      const std::uint64_t nbytes = t.size() * sizeof(float);
      if (off + nbytes > payload_size)
        throw FormatError("checkpoint array " + name +
                          " extends past end of file");
      std::memcpy(t.data(), bytes.data() + payload_start + off, nbytes);
      ckpt.arrays.emplace_back(name, std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint array directory malformed: ") +
                      e.what());
  }

  std::ifstream side(sidecar_path(path));
  if (side.good()) ckpt.history = load_loss_history(sidecar_path(path));
  return ckpt;
}

void save_loss_history(const std::vector<LossRecord>& history,
                       const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot write loss history to " + path);
  f << "epoch,step,loss_name,value\n";
  char buf[64];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof buf, "%.17g", r.value);
    f << r.epoch << ',' << r.step << ',' << r.name << ',' << buf << '\n';
  }
  if (!f) throw IoError("short write to " + path);
}

std::vector<LossRecord> load_loss_history(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open loss history " + path);
  std::string line;
  if (!std::getline(f, line) || line != "epoch,step,loss_name,value")
    throw FormatError("loss history " + path + ": bad header");
  std::vector<LossRecord> out;
  std::size_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string epoch, step, name, value;
    if (!std::getline(row, epoch, ',') || !std::getline(row, step, ',') ||
        !std::getline(row, name, ',') || !std::getline(row, value))
      throw FormatError("loss history " + path + ": malformed line " +
                        std::to_string(lineno));
    try {
      out.push_back(LossRecord{std::stoull(epoch), std::stoull(step), name,
                               std::stod(value)});
    } catch (const std::exception&) {
      throw FormatError("loss history " + path + ": bad number on line " +
                        std::to_string(lineno));
    }
  }
  return out;
}

}  // namespace mixgan::train
