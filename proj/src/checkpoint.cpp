#include "lsr/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace lsr {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'L', 'S', 'R', 'C', 'K', 'P', 'T', '1'};

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void write_doubles(std::ostream& out, const std::vector<double>& v) {
  for (double d : v) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    write_u64(out, bits);
  }
}

void read_doubles(std::istream& in, std::vector<double>& v) {
  for (double& d : v) {
    std::uint64_t bits = read_u64(in);
    std::memcpy(&d, &bits, 8);
  }
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out.write(kMagic, 8);

  const ModelConfig& cfg = ckpt.model.cfg;
  json header;
  header["config"] = {
      {"d", cfg.d},
      {"d_emb", cfg.d_emb},
      {"blocks", cfg.blocks},
      {"sub_layers", cfg.sub_layers},
      {"k", cfg.k},
      {"dropout", cfg.dropout},
      {"mode", cfg.mode == GraphMode::WithMdp ? "with-mdp" : "full-tokens"},
      {"uniform_structure", cfg.uniform_structure},
  };
  std::vector<std::pair<std::string, int>> vocab_sorted(ckpt.model.vocab.index.begin(),
                                                        ckpt.model.vocab.index.end());
  json jvocab = json::array();
  for (const auto& [tok, row] : vocab_sorted) jvocab.push_back({{"t", tok}, {"r", row}});
  header["vocab"] = jvocab;
  header["unk_row"] = ckpt.model.vocab.unk_row;
  header["epoch"] = ckpt.epoch;
  header["threshold"] = ckpt.threshold;
  header["dev_f1_history"] = ckpt.dev_f1_history;
  json jtensors = json::array();
  for (const auto& [name, t] : ckpt.model.params.items()) {
    jtensors.push_back({{"name", name}, {"shape", t.shape}});
  }
  header["tensors"] = jtensors;

  const std::string hs = header.dump();
  write_u64(out, hs.size());
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  for (const auto& [name, t] : ckpt.model.params.items()) {
    (void)name;
    write_doubles(out, t.data);
  }
  if (!out) throw DataError("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) {
    throw DataError("not a checkpoint file (bad magic): " + path);
  }
  const std::uint64_t hlen = read_u64(in);
  std::string hs(hlen, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(hlen));
  json header = json::parse(hs);

  Checkpoint ckpt;
  const json& jc = header.at("config");
  ModelConfig& cfg = ckpt.model.cfg;
  cfg.d = jc.at("d").get<int>();
  cfg.d_emb = jc.at("d_emb").get<int>();
  cfg.blocks = jc.at("blocks").get<int>();
  cfg.sub_layers = jc.at("sub_layers").get<int>();
  cfg.k = jc.at("k").get<int>();
  cfg.dropout = jc.at("dropout").get<double>();
  cfg.mode = jc.at("mode").get<std::string>() == "full-tokens"
                 ? GraphMode::FullyConnectedTokens
                 : GraphMode::WithMdp;
  cfg.uniform_structure = jc.at("uniform_structure").get<bool>();
  for (const auto& jv : header.at("vocab")) {
    ckpt.model.vocab.index[jv.at("t").get<std::string>()] = jv.at("r").get<int>();
  }
  ckpt.model.vocab.unk_row = header.at("unk_row").get<int>();
  ckpt.epoch = header.at("epoch").get<int>();
  ckpt.threshold = header.at("threshold").get<double>();
  ckpt.dev_f1_history = header.at("dev_f1_history").get<std::vector<double>>();

  for (const auto& jt : header.at("tensors")) {
    const std::string name = jt.at("name").get<std::string>();
    Tensor t = Tensor::zeros(jt.at("shape").get<std::vector<int>>());
    read_doubles(in, t.data);
    ckpt.model.params.add(name, std::move(t));
  }
  if (!in) throw DataError("checkpoint truncated: " + path);
  return ckpt;
}

}  // namespace lsr
