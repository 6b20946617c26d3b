#include "tin/io.hpp"

#include <png.h>
#include <zlib.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

namespace tin {

// ---------------------------------------------------------------------------
// Manifest

Manifest parse_manifest(std::istream& in, const fs::path& base_dir) {
  Manifest manifest;
  std::set<fs::path> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos) {
      throw DataError("manifest line " + std::to_string(line_no) +
                      ": expected image_path<TAB>gt_path");
    }
    fs::path image = line.substr(0, tab), gt = line.substr(tab + 1);
    if (image.is_relative()) image = base_dir / image;
    if (gt.is_relative()) gt = base_dir / gt;
    if (!seen.insert(image.lexically_normal()).second) {
      throw DataError("manifest line " + std::to_string(line_no) + ": duplicate image '" +
                      image.string() + "'");
    }
    manifest.entries.push_back({std::move(image), std::move(gt)});
  }
  return manifest;
}

Manifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest '" + path.string() + "'");
  return parse_manifest(in, path.parent_path());
}

// ---------------------------------------------------------------------------
// Rasters

RawImage read_png(const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw DataError("cannot read PNG '" + path.string() + "': " + image.message);
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw DataError("unsupported PNG '" + path.string() + "': only 8-bit images are supported");
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  RawImage out;
  out.height = image.height;
  out.width = image.width;
  out.channels = color ? 3 : 1;
  out.pixels.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
    throw DataError("cannot decode PNG '" + path.string() + "': " + image.message);
  }
  return out;
}

void write_png(const fs::path& path, const RawImage& raw) {
  if (raw.channels != 1 && raw.channels != 3) {
    throw std::invalid_argument("write_png: only gray or RGB images");
  }
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(raw.width);
  image.height = static_cast<png_uint_32>(raw.height);
  image.format = raw.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, raw.pixels.data(), 0, nullptr)) {
    throw DataError("cannot write PNG '" + path.string() + "': " + image.message);
  }
}

RawImage read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  auto token = [&]() {
    std::string t;
    char c;
    while (in.get(c)) {
      if (c == '#') {
        std::string skip;
        std::getline(in, skip);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        if (!t.empty()) break;
      } else {
        t.push_back(c);
      }
    }
    return t;
  };
  if (token() != "P5") throw DataError("'" + path.string() + "' is not a binary PGM");
  RawImage out;
  try {
    out.width = std::stol(token());
    out.height = std::stol(token());
    const long maxval = std::stol(token());
    if (maxval < 1 || maxval > 255) {
      throw DataError("unsupported PGM '" + path.string() + "': only 8-bit maps are supported");
    }
  } catch (const std::logic_error&) {
    throw DataError("malformed PGM header in '" + path.string() + "'");
  }
  out.channels = 1;
  out.pixels.resize(static_cast<std::size_t>(out.width * out.height));
  in.read(reinterpret_cast<char*>(out.pixels.data()), static_cast<std::streamsize>(out.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(out.pixels.size())) {
    throw DataError("truncated PGM '" + path.string() + "'");
  }
  return out;
}

Tensor<float> load_image(const fs::path& path) {
  const RawImage raw = read_png(path);
  Tensor<float> t({1, 3, raw.height, raw.width});
  for (Index y = 0; y < raw.height; ++y) {
    for (Index x = 0; x < raw.width; ++x) {
      for (Index c = 0; c < 3; ++c) {
        const Index src = raw.channels == 3 ? c : 0;
        t(0, c, y, x) = static_cast<float>(
                            raw.pixels[static_cast<std::size_t>((y * raw.width + x) * raw.channels + src)]) /
                        255.0f;
      }
    }
  }
  return t;
}

GroundTruth load_gt(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  const RawImage raw = ext == ".pgm" ? read_pgm(path) : read_png(path);
  if (raw.channels != 1) throw DataError("ground truth '" + path.string() + "' must be single-channel");
  GroundTruth gt;
  gt.values = Eigen::Map<const LabelMap>(raw.pixels.data(), raw.height, raw.width);
  return gt;
}

namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

void save_image(const fs::path& path, const Tensor<float>& image) {
  RawImage raw{image.dim(2), image.dim(3), 3, {}};
  raw.pixels.resize(static_cast<std::size_t>(raw.height * raw.width * 3));
  for (Index y = 0; y < raw.height; ++y) {
    for (Index x = 0; x < raw.width; ++x) {
      for (Index c = 0; c < 3; ++c) {
        raw.pixels[static_cast<std::size_t>((y * raw.width + x) * 3 + c)] =
            to_byte(image(0, image.dim(1) == 3 ? c : 0, y, x));
      }
    }
  }
  write_png(path, raw);
}

void save_gt(const fs::path& path, const GroundTruth& gt) {
  RawImage raw{gt.height(), gt.width(), 1, {}};
  raw.pixels.assign(gt.values.data(), gt.values.data() + gt.values.size());
  write_png(path, raw);
}

void save_edge_map(const fs::path& path, const EdgeMap& map) {
  RawImage raw{map.rows(), map.cols(), 1, {}};
  raw.pixels.resize(static_cast<std::size_t>(map.size()));
  for (Index i = 0; i < map.size(); ++i) raw.pixels[static_cast<std::size_t>(i)] = to_byte(map.data()[i]);
  write_png(path, raw);
}

EdgeMap load_edge_map(const fs::path& path) {
  const RawImage raw = read_png(path);
  if (raw.channels != 1) throw DataError("edge map '" + path.string() + "' must be single-channel");
  return Eigen::Map<const LabelMap>(raw.pixels.data(), raw.height, raw.width).cast<double>() /
         255.0;
}

std::vector<Sample> load_dataset(const Manifest& manifest) {
  std::vector<Sample> data;
  data.reserve(manifest.entries.size());
  for (const ManifestEntry& e : manifest.entries) {
    if (!fs::exists(e.image)) throw DataError("missing image '" + e.image.string() + "'");
    if (!fs::exists(e.gt)) throw DataError("missing ground truth '" + e.gt.string() + "'");
    Sample s{load_image(e.image), load_gt(e.gt)};
    if (s.image.dim(2) != s.gt.height() || s.image.dim(3) != s.gt.width()) {
      throw DataError("image '" + e.image.string() + "' and ground truth sizes differ");
    }
    data.push_back(std::move(s));
  }
  return data;
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr char kMagic[8] = {'T', 'I', 'N', 'C', 'K', 'P', 'T', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t crc_of(std::span<const std::uint8_t> bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw DataError("checkpoint: unexpected end of data");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

// "enrich<k>.b<i>_d<rate>.weight" -> (k, i, rate)
bool parse_branch(const std::string& name, int& stage, int& branch, Index& rate) {
  return std::sscanf(name.c_str(), "enrich%d.b%d_d%ld.weight", &stage, &branch, &rate) == 3 &&
         name.ends_with(".weight");
}

}  // namespace

template <typename Scalar>
std::vector<std::uint8_t> encode_checkpoint(const NetworkGraph<Scalar>& graph) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_u32(out, static_cast<std::uint32_t>(graph.variant()));
  for (const auto& p : graph.params()) {
    put_u32(out, static_cast<std::uint32_t>(p.name.size()));
    out.insert(out.end(), p.name.begin(), p.name.end());
    put_u32(out, static_cast<std::uint32_t>(p.tensor.rank()));
    for (Index d : p.tensor.shape()) put_u32(out, static_cast<std::uint32_t>(d));
    for (Index i = 0; i < p.tensor.size(); ++i) {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(p.tensor.data()[i])));
    }
  }
  put_u32(out, crc_of(out));
  return out;
}

NetworkGraph<float> decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof(kMagic) + 8) throw ChecksumError("checkpoint: file too short");
  const auto body = bytes.first(bytes.size() - 4);
  Reader tail(bytes.last(4));
  if (tail.u32() != crc_of(body)) throw ChecksumError("checkpoint: CRC mismatch");
  if (!std::equal(std::begin(kMagic), std::end(kMagic), body.begin())) {
    throw DataError("checkpoint: bad magic");
  }
  Reader r(body.subspan(sizeof(kMagic)));
  const std::uint32_t tag = r.u32();
  if (tag != static_cast<std::uint32_t>(Variant::kTin1) &&
      tag != static_cast<std::uint32_t>(Variant::kTin2)) {
    throw DataError("checkpoint: unknown variant tag " + std::to_string(tag));
  }
  const auto variant = static_cast<Variant>(tag);

  std::map<std::string, Tensor<float>> tensors;
  while (!r.done()) {
    std::string name = r.str(r.u32());
    const std::uint32_t rank = r.u32();
    if (rank > 8) throw DataError("checkpoint: implausible rank for '" + name + "'");
    Shape shape;
    for (std::uint32_t i = 0; i < rank; ++i) shape.push_back(r.u32());
    Tensor<float> t(shape);
    for (Index i = 0; i < t.size(); ++i) t.data()[i] = std::bit_cast<float>(r.u32());
    if (!tensors.emplace(name, std::move(t)).second) {
      throw DataError("checkpoint: duplicate tensor '" + name + "'");
    }
  }

  // Enrichment layout is recovered from the branch tensor names.
  std::map<int, std::map<int, std::pair<Index, const Tensor<float>*>>> branches;
  for (const auto& [name, t] : tensors) {
    int stage = 0, branch = 0;
    Index rate = 0;
    if (parse_branch(name, stage, branch, rate)) {
      if (t.rank() != 4) throw DataError("checkpoint: bad shape for '" + name + "'");
      branches[stage][branch] = {rate, &t};
    }
  }
  const int stages = variant == Variant::kTin1 ? 2 : 4;
  std::vector<EnrichmentSpec> specs;
  for (int k = 1; k <= stages; ++k) {
    if (!branches.contains(k)) {
      throw DataError("checkpoint: missing enrichment stage " + std::to_string(k));
    }
    EnrichmentSpec spec;
    spec.dilation_rates.clear();
    for (const auto& [i, entry] : branches[k]) {
      spec.dilation_rates.push_back(entry.first);
      spec.out_channels = entry.second->dim(0);
      spec.in_channels = entry.second->dim(1);
    }
    specs.push_back(spec);
  }
  NetworkGraph<float> graph;
  try {
    graph = build_graph<float>(variant, specs);
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("checkpoint: inconsistent layout: ") + e.what());
  }
  if (tensors.size() != graph.params().size()) {
    throw DataError("checkpoint: expected " + std::to_string(graph.params().size()) +
                    " tensors, found " + std::to_string(tensors.size()));
  }
  for (auto& p : graph.params()) {
    auto it = tensors.find(p.name);
    if (it == tensors.end()) throw DataError("checkpoint: missing tensor '" + p.name + "'");
    if (it->second.shape() != p.tensor.shape()) {
      throw DataError("checkpoint: tensor '" + p.name + "' has shape " +
                      to_string(it->second.shape()) + ", expected " + to_string(p.tensor.shape()));
    }
    p.tensor.data() = it->second.data();
  }
  return graph;
}

template <typename Scalar>
void save_checkpoint(const NetworkGraph<Scalar>& graph, const fs::path& path) {
  const std::vector<std::uint8_t> bytes = encode_checkpoint(graph);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing checkpoint '" + path.string() + "'");
}

NetworkGraph<float> load_checkpoint(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path.string() + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

template std::vector<std::uint8_t> encode_checkpoint(const NetworkGraph<float>&);
template std::vector<std::uint8_t> encode_checkpoint(const NetworkGraph<double>&);
template void save_checkpoint(const NetworkGraph<float>&, const fs::path&);
template void save_checkpoint(const NetworkGraph<double>&, const fs::path&);

// ---------------------------------------------------------------------------
// Config

namespace {

template <typename T>
T parse_number(const std::string& text, const std::string& where) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw DataError(where + ": invalid value '" + text + "'");
  return value;
}

bool parse_flag(const std::string& text, const std::string& where) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw DataError(where + ": expected true/false, got '" + text + "'");
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& text, const std::string& where, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse(item, where));
  if (out.empty()) throw DataError(where + ": empty list");
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void apply_config(std::istream& in, TrainConfig& train, LossConfig& loss) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const std::string where = "config line " + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError(where + ": expected key=value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key == "lr0") train.lr0 = parse_number<double>(value, where);
    else if (key == "weight_decay") train.weight_decay = parse_number<double>(value, where);
    else if (key == "momentum") train.momentum = parse_number<double>(value, where);
    else if (key == "epochs") train.epochs = parse_number<int>(value, where);
    else if (key == "lr_drop_every") train.lr_drop_every = parse_number<int>(value, where);
    else if (key == "lr_drop_factor") train.lr_drop_factor = parse_number<double>(value, where);
    else if (key == "batch_size") train.batch_size = parse_number<int>(value, where);
    else if (key == "seed") train.seed = parse_number<std::uint64_t>(value, where);
    else if (key == "checkpoint_every") train.checkpoint_every = parse_number<int>(value, where);
    else if (key == "augment") train.augment = parse_flag(value, where);
    else if (key == "rotations") {
      train.augmentation.rotations_deg = parse_list<double>(value, where, parse_number<double>);
    } else if (key == "flips") {
      train.augmentation.flips = parse_list<bool>(value, where, parse_flag);
    } else if (key == "scales") {
      train.augmentation.scales = parse_list<double>(value, where, parse_number<double>);
    } else if (key == "gamma") loss.gamma = parse_number<double>(value, where);
    else if (key == "threshold") loss.threshold = parse_number<int>(value, where);
    else throw DataError(where + ": unknown key '" + key + "'");
  }
  try {
    train.validate();
    loss.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("config: ") + e.what());
  }
}

void load_config(const fs::path& path, TrainConfig& train, LossConfig& loss) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config '" + path.string() + "'");
  apply_config(in, train, loss);
}

void apply_env_overrides(TrainConfig& train) {
  if (const char* seed = std::getenv("TIN_SEED")) {
    train.seed = parse_number<std::uint64_t>(seed, "TIN_SEED");
  }
}

}  // namespace tin
