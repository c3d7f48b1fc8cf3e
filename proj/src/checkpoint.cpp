#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "treeaug/tagger.hpp"

namespace treeaug {

namespace {

constexpr char kMagic[] = "TREEAUGCKPT1";
constexpr size_t kMagicLen = sizeof(kMagic) - 1;

nlohmann::json config_json(const TaggerConfig& c) {
  return {
      {"char_embed_dim", c.char_embed_dim},   {"char_hidden_dim", c.char_hidden_dim},
      {"word_embed_dim", c.word_embed_dim},   {"word_hidden_dim", c.word_hidden_dim},
      {"init_range", c.init_range},           {"lr_initial", c.lr_initial},
      {"dropout_rate", c.dropout_rate},       {"clip_norm", c.clip_norm},
      {"early_stop_patience", c.early_stop_patience},
      {"max_epochs", c.max_epochs},           {"seed", c.seed},
      {"unk_replace", c.unk_replace},         {"unk_replace_prob", c.unk_replace_prob},
  };
}

TaggerConfig config_from_json(const nlohmann::json& j) {
  TaggerConfig c;
  c.char_embed_dim = j.at("char_embed_dim").get<int>();
  c.char_hidden_dim = j.at("char_hidden_dim").get<int>();
  c.word_embed_dim = j.at("word_embed_dim").get<int>();
  c.word_hidden_dim = j.at("word_hidden_dim").get<int>();
  c.init_range = j.at("init_range").get<double>();
  c.lr_initial = j.at("lr_initial").get<double>();
  c.dropout_rate = j.at("dropout_rate").get<double>();
  c.clip_norm = j.at("clip_norm").get<double>();
  c.early_stop_patience = j.at("early_stop_patience").get<int>();
  c.max_epochs = j.at("max_epochs").get<int>();
  c.seed = j.at("seed").get<uint64_t>();
  c.unk_replace = j.at("unk_replace").get<bool>();
  c.unk_replace_prob = j.at("unk_replace_prob").get<double>();
  return c;
}

void write_u64(std::ostream& out, uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

uint64_t read_u64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

void save_checkpoint(const TaggerModel& m, const std::string& path) {
  nlohmann::json header;
  header["config"] = config_json(m.config);
  header["chars"] = m.chars.index_to_char;
  header["rare"] = m.chars.rare;
  header["tags"] = m.tags.index_to_tag;

  // tensor_views takes a mutable reference; the save path never writes.
  auto& params = const_cast<TaggerTensors&>(m.params);
  nlohmann::json shapes = nlohmann::json::array();
  for (const TensorView& v : tensor_views(params)) {
    shapes.push_back({{"name", v.name}, {"rows", v.rows}, {"cols", v.cols}});
  }
  header["tensors"] = shapes;
  header["dtype"] = "f64le";
  const std::string header_bytes = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open for writing: " + path);
  out.write(kMagic, static_cast<std::streamsize>(kMagicLen));
  write_u64(out, header_bytes.size());
  out.write(header_bytes.data(), static_cast<std::streamsize>(header_bytes.size()));
  for (const TensorView& v : tensor_views(params)) {
    out.write(reinterpret_cast<const char*>(v.data),
              static_cast<std::streamsize>(v.size * sizeof(double)));
  }
  if (!out) throw std::runtime_error("checkpoint: write failed: " + path);
}

TaggerModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open: " + path);

  char magic[kMagicLen];
  in.read(magic, static_cast<std::streamsize>(kMagicLen));
  if (!in || std::memcmp(magic, kMagic, kMagicLen) != 0) {
    throw std::runtime_error("checkpoint: bad magic in " + path);
  }
  const uint64_t header_len = read_u64(in);
  const uint64_t file_size = std::filesystem::file_size(path);
  if (!in || header_len > file_size - kMagicLen - 8) {
    throw std::runtime_error("checkpoint: truncated header in " + path);
  }
  std::string header_bytes(header_len, '\0');
  in.read(header_bytes.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw std::runtime_error("checkpoint: truncated header in " + path);

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_bytes);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("checkpoint: invalid header: ") + e.what());
  }

  TaggerModel m;
  m.config = config_from_json(header.at("config"));
  m.chars.index_to_char = header.at("chars").get<std::vector<uint32_t>>();
  m.chars.rare = header.at("rare").get<std::vector<uint8_t>>();
  for (size_t i = 0; i < m.chars.index_to_char.size(); ++i) {
    if (i == 0) continue;  // slot 0 is the unknown-character embedding
    m.chars.char_to_index[m.chars.index_to_char[i]] = static_cast<int>(i);
  }
  m.tags.index_to_tag = header.at("tags").get<std::vector<std::string>>();
  for (size_t i = 0; i < m.tags.index_to_tag.size(); ++i) {
    m.tags.tag_to_index[m.tags.index_to_tag[i]] = static_cast<int>(i);
  }

  m.params = zero_like(m);

  const nlohmann::json& shapes = header.at("tensors");
  const std::vector<TensorView> views = tensor_views(m.params);
  if (shapes.size() != views.size()) {
    throw std::runtime_error("checkpoint: tensor count mismatch in " + path);
  }
  for (size_t i = 0; i < views.size(); ++i) {
    const auto& s = shapes[i];
    if (s.at("name").get<std::string>() != views[i].name ||
        s.at("rows").get<int>() != views[i].rows || s.at("cols").get<int>() != views[i].cols) {
      throw std::runtime_error("checkpoint: shape mismatch for tensor " +
                               std::string(views[i].name) + " in " + path);
    }
    in.read(reinterpret_cast<char*>(views[i].data),
            static_cast<std::streamsize>(views[i].size * sizeof(double)));
    if (!in) {
      throw std::runtime_error("checkpoint: truncated data for tensor " +
                               std::string(views[i].name) + " in " + path);
    }
  }
  return m;
}

std::string history_tsv(const std::vector<EpochStats>& history) {
  std::ostringstream out;
  out << "epoch\ttrain_loss\tdev_score\tlr\n";
  char line[128];
  for (const EpochStats& e : history) {
    std::snprintf(line, sizeof(line), "%d\t%.6f\t%.6f\t%g\n", e.epoch, e.train_loss, e.dev_score,
                  e.lr);
    out << line;
  }
  return out.str();
}

}  // namespace treeaug
