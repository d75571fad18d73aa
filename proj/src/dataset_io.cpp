#include "hypoquant/dataset_io.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <set>

#include <json.hpp>

#include "hypoquant/csv.hpp"

namespace hypoquant {

namespace {

struct NetpbmHeader {
  char kind = 0;  // '4' or '5'
  int width = 0;
  int height = 0;
  int maxval = 1;
  std::size_t payloadOffset = 0;
};

std::string at_offset(std::size_t offset) {
  return " at byte offset " + std::to_string(offset);
}

bool is_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  int read_int(const char* what) {
    skip_space_and_comments();
    std::size_t start = pos_;
    lastStart_ = start;
    long long value = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000) throw FormatError(std::string(what) + " too large" + at_offset(start));
      ++pos_;
    }
    if (pos_ == start) {
      if (pos_ >= bytes_.size())
        throw FormatError(std::string("truncated header, expected ") + what + at_offset(pos_));
      throw FormatError(std::string("expected ") + what + at_offset(pos_));
    }
    return static_cast<int>(value);
  }

  void expect_single_space() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_]))
      throw FormatError("expected whitespace before raster" + at_offset(pos_));
    ++pos_;
  }

  std::size_t pos() const { return pos_; }
  /// Offset of the most recently read integer token.
  std::size_t last_start() const { return lastStart_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::size_t lastStart_ = 0;
};

NetpbmHeader parse_header(std::span<const std::uint8_t> bytes, bool allowBitmap) {
  if (bytes.size() < 2) throw FormatError("file too short for a magic number" + at_offset(0));
  if (bytes[0] != 'P') throw FormatError("missing 'P' magic" + at_offset(0));
  NetpbmHeader h;
  h.kind = static_cast<char>(bytes[1]);
  if (h.kind != '5' && !(allowBitmap && h.kind == '4'))
    throw FormatError(std::string("unsupported magic 'P") + static_cast<char>(bytes[1]) + "'" +
                      at_offset(0));
  HeaderReader reader(bytes);
  reader.advance(2);
  h.width = reader.read_int("width");
  std::size_t widthAt = reader.last_start();
  h.height = reader.read_int("height");
  if (h.width < 1 || h.height < 1)
    throw FormatError("image dimensions must be positive" + at_offset(widthAt));
  if (h.kind == '5') {
    h.maxval = reader.read_int("maxval");
    std::size_t maxAt = reader.last_start();
    if (h.maxval < 1 || h.maxval > 65535)
      throw FormatError("maxval " + std::to_string(h.maxval) + " outside [1, 65535]" +
                        at_offset(maxAt));
  }
  reader.expect_single_space();
  h.payloadOffset = reader.pos();
  return h;
}

std::size_t payload_size(const NetpbmHeader& h) {
  auto w = static_cast<std::size_t>(h.width);
  auto rows = static_cast<std::size_t>(h.height);
  if (h.kind == '4') return (w + 7) / 8 * rows;
  return w * rows * (h.maxval > 255 ? 2u : 1u);
}

void check_payload(std::span<const std::uint8_t> bytes, const NetpbmHeader& h) {
  std::size_t need = payload_size(h);
  if (bytes.size() - h.payloadOffset < need)
    throw FormatError("truncated payload: need " + std::to_string(need) + " bytes, file ends" +
                      at_offset(bytes.size()));
}

std::vector<double> decode_samples(std::span<const std::uint8_t> bytes, const NetpbmHeader& h) {
  check_payload(bytes, h);
  std::size_t n = static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height);
  std::vector<double> out(n);
  const std::uint8_t* p = bytes.data() + h.payloadOffset;
  if (h.kind == '4') {
    std::size_t stride = (static_cast<std::size_t>(h.width) + 7) / 8;
    for (int r = 0; r < h.height; ++r)
      for (int c = 0; c < h.width; ++c) {
        std::uint8_t byte = p[static_cast<std::size_t>(r) * stride + static_cast<std::size_t>(c) / 8];
        out[static_cast<std::size_t>(r) * h.width + c] = (byte >> (7 - c % 8)) & 1u;
      }
    return out;
  }
  bool wide = h.maxval > 255;
  for (std::size_t i = 0; i < n; ++i) {
    unsigned v = wide ? (static_cast<unsigned>(p[2 * i]) << 8) | p[2 * i + 1] : p[i];
    if (v > static_cast<unsigned>(h.maxval))
      throw FormatError("sample " + std::to_string(v) + " exceeds maxval" +
                        at_offset(h.payloadOffset + (wide ? 2 * i : i)));
    out[i] = static_cast<double>(v);
  }
  return out;
}

std::string size_string(int w, int h) { return std::to_string(w) + "x" + std::to_string(h); }

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& rel) {
  std::filesystem::path p(rel);
  return p.is_absolute() ? p : base / p;
}

}  // namespace

const RoiMask& Subject::mask(Hemisphere h) const {
  auto it = masks.find(h);
  if (it == masks.end())
    throw DataError("subject '" + id + "' has no " + std::string(to_string(h)) + " mask");
  return it->second;
}

std::vector<std::string> Dataset::ids() const {
  std::vector<std::string> out;
  out.reserve(subjects.size());
  for (const auto& s : subjects) out.push_back(s.id);
  return out;
}

std::vector<Cluster> Dataset::labels() const {
  std::vector<Cluster> out;
  out.reserve(subjects.size());
  for (const auto& s : subjects) {
    if (!s.label) throw DataError("subject '" + s.id + "' has no ground-truth label");
    out.push_back(*s.label);
  }
  return out;
}

Dataset make_dataset(std::vector<Subject> subjects) {
  std::set<std::string> seen;
  bool allLabeled = true;
  ClusterSizes sizes;
  for (auto& s : subjects) {
    if (s.id.empty()) throw DataError("subject with empty id");
    if (!seen.insert(s.id).second) throw DataError("duplicate subject id '" + s.id + "'");
    for (const auto& [h, m] : s.masks)
      if (!m.matches(s.image))
        throw DataError("subject '" + s.id + "': " + std::string(to_string(h)) + " mask is " +
                        size_string(m.width(), m.height()) + " but image is " +
                        size_string(s.image.width(), s.image.height()));
    if (!s.masks.contains(Hemisphere::whole) && s.masks.contains(Hemisphere::left) &&
        s.masks.contains(Hemisphere::right))
      s.masks.emplace(Hemisphere::whole,
                      RoiMask::merge(s.masks.at(Hemisphere::left), s.masks.at(Hemisphere::right)));
    if (!s.label) {
      allLabeled = false;
      continue;
    }
    switch (*s.label) {
      case Cluster::light: ++sizes.light; break;
      case Cluster::mid: ++sizes.mid; break;
      case Cluster::dark: ++sizes.dark; break;
    }
  }
  Dataset d;
  d.subjects = std::move(subjects);
  if (allLabeled && !d.subjects.empty()) d.clusterSizes = sizes;
  return d;
}

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  NetpbmHeader h = parse_header(bytes, false);
  return GrayImage(h.width, h.height, decode_samples(bytes, h));
}

GrayImage load_pgm(const std::filesystem::path& path) {
  auto bytes = read_binary_file(path);
  try {
    return decode_pgm(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image, int maxval) {
  if (maxval < 1 || maxval > 65535)
    throw DataError("maxval " + std::to_string(maxval) + " outside [1, 65535]");
  std::string header = "P5\n" + std::to_string(image.width()) + " " +
                       std::to_string(image.height()) + "\n" + std::to_string(maxval) + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  bool wide = maxval > 255;
  out.reserve(out.size() + image.size() * (wide ? 2 : 1));
  for (double v : image.pixels()) {
    if (v < 0 || v > maxval || v != std::floor(v))
      throw DataError("sample " + std::to_string(v) + " not an integer in [0, " +
                      std::to_string(maxval) + "]");
    auto s = static_cast<unsigned>(v);
    if (wide) out.push_back(static_cast<std::uint8_t>(s >> 8));
    out.push_back(static_cast<std::uint8_t>(s & 0xFFu));
  }
  return out;
}

void save_pgm(const std::filesystem::path& path, const GrayImage& image, int maxval) {
  auto bytes = encode_pgm(image, maxval);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

RoiMask decode_mask(std::span<const std::uint8_t> bytes, const GrayImage& image,
                    Hemisphere hemisphere) {
  NetpbmHeader h = parse_header(bytes, true);
  if (h.width != image.width() || h.height != image.height())
    throw DataError("mask is " + size_string(h.width, h.height) + " but image is " +
                    size_string(image.width(), image.height()));
  auto samples = decode_samples(bytes, h);
  std::vector<Pixel> members;
  for (int r = 0; r < h.height; ++r)
    for (int c = 0; c < h.width; ++c)
      if (samples[static_cast<std::size_t>(r) * h.width + c] != 0.0) members.push_back({r, c});
  if (members.empty()) throw DataError("mask selects no pixels (empty ROI)");
  return RoiMask(h.width, h.height, std::move(members), hemisphere);
}

RoiMask load_mask(const std::filesystem::path& path, const GrayImage& image,
                  Hemisphere hemisphere) {
  auto bytes = read_binary_file(path);
  try {
    return decode_mask(bytes, image, hemisphere);
  } catch (const Error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void save_mask(const std::filesystem::path& path, const RoiMask& mask) {
  GrayImage raster(mask.width(), mask.height(), 0.0);
  for (const Pixel& p : mask.members()) raster.at(p.row, p.col) = 255.0;
  save_pgm(path, raster, 255);
}

Dataset load_manifest(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("subjects") || !doc["subjects"].is_array())
    throw FormatError(path.string() + ": manifest needs a \"subjects\" array");
  std::filesystem::path base = path.parent_path();

  std::vector<Subject> subjects;
  std::set<std::string> seen;
  std::size_t index = 0;
  for (const auto& entry : doc["subjects"]) {
    std::string where = "subject #" + std::to_string(index++);
    auto field = [&](const char* key) -> std::string {
      if (!entry.is_object() || !entry.contains(key) || !entry[key].is_string())
        throw FormatError(path.string() + ": " + where + " lacks string field \"" + key + "\"");
      return entry[key].get<std::string>();
    };
    Subject s;
    s.id = field("id");
    where = "subject '" + s.id + "'";
    if (s.id.empty()) throw DataError(path.string() + ": " + where + " has an empty id");
    if (!seen.insert(s.id).second)
      throw DataError(path.string() + ": duplicate subject id '" + s.id + "'");
    try {
      s.image = load_pgm(resolve(base, field("image")));
      RoiMask left = load_mask(resolve(base, field("roi_left")), s.image, Hemisphere::left);
      RoiMask right = load_mask(resolve(base, field("roi_right")), s.image, Hemisphere::right);
      s.masks.emplace(Hemisphere::whole, RoiMask::merge(left, right));
      s.masks.emplace(Hemisphere::left, std::move(left));
      s.masks.emplace(Hemisphere::right, std::move(right));
    } catch (const Error& e) {
      throw DataError(path.string() + ": " + where + ": " + e.what());
    }
    if (entry.contains("label") && !entry["label"].is_null()) {
      if (!entry["label"].is_string())
        throw DataError(path.string() + ": " + where + ": label must be a string");
      auto label = parse_cluster(entry["label"].get<std::string>());
      if (!label)
        throw DataError(path.string() + ": " + where + ": invalid label '" +
                        entry["label"].get<std::string>() + "'");
      s.label = label;
    }
    subjects.push_back(std::move(s));
  }
  return make_dataset(std::move(subjects));
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

}  // namespace hypoquant
