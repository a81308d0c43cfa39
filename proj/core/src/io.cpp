#include "hat/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "hat/error.hpp"

namespace hat {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    ++line_no;
    fn(trim(line), line_no);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const std::size_t comma = line.find(',');
    out.push_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return out;
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + what, line_no);
}

double parse_real(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
    parse_fail(line_no, "bad number '" + std::string(field) + "'");
  }
  return v;
}

std::int64_t parse_int(std::string_view field, std::size_t line_no) {
  // Some tools write integer columns as "12.0".
  const double v = parse_real(field, line_no);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) {
    parse_fail(line_no, "expected an integer, got '" + std::string(field) + "'");
  }
  return static_cast<std::int64_t>(v);
}

Box parse_box(const std::vector<std::string_view>& f, std::size_t line_no) {
  Box b{parse_real(f[2], line_no), parse_real(f[3], line_no), parse_real(f[4], line_no),
        parse_real(f[5], line_no)};
  if (!(b.width > 0.0) || !(b.height > 0.0)) {
    parse_fail(line_no, "box width and height must be positive");
  }
  return b;
}

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
}

void put_u64(std::vector<std::byte>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
}

std::uint64_t get_le(std::span<const std::byte> bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(bytes[offset + static_cast<std::size_t>(i)]) << (8 * i);
  }
  return v;
}

constexpr std::array<char, 4> kMagic{'H', 'A', 'T', 'F'};
constexpr std::size_t kHeaderSize = 4 + 4 + 4 + 8;

}  // namespace

std::string format_number(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw Error(ErrorCode::InvalidArgument, "cannot format number");
  return std::string(buf.data(), ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

DetectionFile parse_detections(std::string_view text) {
  DetectionFile file;
  std::size_t index = 0;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (line.empty() || line.front() == '#') return;
    const auto f = split_commas(line);
    if (f.size() < 7) parse_fail(line_no, "expected at least 7 columns");
    DetectionRow row;
    row.frame = parse_int(f[0], line_no);
    if (row.frame < 1) parse_fail(line_no, "frame must be positive");
    row.id = parse_int(f[1], line_no);
    row.box = parse_box(f, line_no);
    row.confidence = parse_real(f[6], line_no);
    if (row.confidence < 0.0 || row.confidence > 1.0) {
      file.warnings.push_back("line " + std::to_string(line_no) + ": confidence " +
                              format_number(row.confidence) + " clamped to [0, 1]");
      row.confidence = std::clamp(row.confidence, 0.0, 1.0);
    }
    row.source_index = index++;
    file.rows.push_back(row);
  });
  std::stable_sort(file.rows.begin(), file.rows.end(),
                   [](const DetectionRow& a, const DetectionRow& b) { return a.frame < b.frame; });
  return file;
}

DetectionFile read_detections(const std::filesystem::path& path) {
  return parse_detections(read_text_file(path));
}

std::string format_detections(std::span<const DetectionRow> rows) {
  std::string out;
  for (const auto& r : rows) {
    out += std::to_string(r.frame) + ',' + std::to_string(r.id) + ',' +
           format_number(r.box.left) + ',' + format_number(r.box.top) + ',' +
           format_number(r.box.width) + ',' + format_number(r.box.height) + ',' +
           format_number(r.confidence) + '\n';
  }
  return out;
}

void write_detections(std::span<const DetectionRow> rows, const std::filesystem::path& path) {
  write_text_file(path, format_detections(rows));
}

std::string format_tracks(std::span<const TrackRecord> records) {
  std::vector<TrackRecord> sorted(records.begin(), records.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const TrackRecord& a, const TrackRecord& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });
  std::string out;
  for (const auto& r : sorted) {
    out += std::to_string(r.frame) + ',' + std::to_string(r.id) + ',' +
           format_number(r.box.left) + ',' + format_number(r.box.top) + ',' +
           format_number(r.box.width) + ',' + format_number(r.box.height) + ",1,-1,-1,-1\n";
  }
  return out;
}

void write_tracks(std::span<const TrackRecord> records, const std::filesystem::path& path) {
  write_text_file(path, format_tracks(records));
}

std::vector<TrackRecord> parse_gt(std::string_view text) {
  std::vector<TrackRecord> out;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (line.empty() || line.front() == '#') return;
    const auto f = split_commas(line);
    if (f.size() < 6) parse_fail(line_no, "expected at least 6 columns");
    if (f.size() >= 7 && parse_real(f[6], line_no) == 0.0) return;
    TrackRecord r;
    r.frame = parse_int(f[0], line_no);
    r.id = parse_int(f[1], line_no);
    r.box = parse_box(f, line_no);
    out.push_back(r);
  });
  return out;
}

std::vector<TrackRecord> read_gt(const std::filesystem::path& path) {
  return parse_gt(read_text_file(path));
}

FeatureBank decode_features(std::span<const std::byte> bytes) {
  if (bytes.size() < kHeaderSize) {
    throw Error(ErrorCode::Truncation, "feature file shorter than its header");
  }
  if (std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw Error(ErrorCode::Format, "feature file does not start with HATF magic");
  }
  const auto version = static_cast<std::uint32_t>(get_le(bytes, 4, 4));
  if (version != kFeatureFormatVersion) {
    throw Error(ErrorCode::Format, "unsupported feature format version " + std::to_string(version));
  }
  const auto dim = static_cast<std::uint32_t>(get_le(bytes, 8, 4));
  const std::uint64_t count = get_le(bytes, 12, 8);
  if (dim == 0) throw Error(ErrorCode::Format, "feature dim must be >= 1");

  const std::size_t payload = bytes.size() - kHeaderSize;
  if (count > payload / 4 / dim || count * dim * 4 > payload) {
    throw Error(ErrorCode::Truncation, "feature payload holds fewer than " +
                                           std::to_string(count) + " vectors of dim " +
                                           std::to_string(dim));
  }
  if (count * dim * 4 != payload) {
    throw Error(ErrorCode::Format, "feature file has trailing bytes after the payload");
  }

  FeatureBank bank;
  bank.dim = dim;
  bank.vectors.reserve(count);
  std::size_t offset = kHeaderSize;
  for (std::uint64_t v = 0; v < count; ++v) {
    FeatureVector f(dim);
    for (std::uint32_t k = 0; k < dim; ++k, offset += 4) {
      const auto bits = static_cast<std::uint32_t>(get_le(bytes, offset, 4));
      float x;
      std::memcpy(&x, &bits, sizeof x);
      if (!std::isfinite(x)) {
        const std::size_t index = static_cast<std::size_t>(v) * dim + k;
        throw Error(ErrorCode::Data, "non-finite feature value at index " + std::to_string(index),
                    index);
      }
      f[k] = x;
    }
    bank.vectors.push_back(std::move(f));
  }
  return bank;
}

std::vector<std::byte> encode_features(const FeatureBank& bank) {
  if (bank.dim == 0) throw Error(ErrorCode::Format, "feature dim must be >= 1");
  std::vector<std::byte> out;
  out.reserve(kHeaderSize + bank.count() * bank.dim * 4);
  for (char c : kMagic) out.push_back(static_cast<std::byte>(c));
  put_u32(out, kFeatureFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(bank.dim));
  put_u64(out, bank.count());
  for (std::size_t v = 0; v < bank.count(); ++v) {
    const auto& f = bank.vectors[v];
    if (f.size() != bank.dim) {
      throw Error(ErrorCode::DimensionMismatch, "vector " + std::to_string(v) + " has dim " +
                                                    std::to_string(f.size()));
    }
    for (double x : f) {
      const auto fx = static_cast<float>(x);
      std::uint32_t bits;
      std::memcpy(&bits, &fx, sizeof bits);
      put_u32(out, bits);
    }
  }
  return out;
}

FeatureBank read_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_features(std::as_bytes(std::span<const char>(raw)));
}

void write_features(const FeatureBank& bank, const std::filesystem::path& path) {
  const auto bytes = encode_features(bank);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

FeatureBank parse_features_csv(std::string_view text) {
  FeatureBank bank;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (line.empty() || line.front() == '#') return;
    const auto fields = split_commas(line);
    FeatureVector f;
    f.reserve(fields.size());
    for (auto field : fields) f.push_back(parse_real(field, line_no));
    if (bank.dim == 0) bank.dim = f.size();
    if (f.size() != bank.dim) {
      parse_fail(line_no, "expected " + std::to_string(bank.dim) + " values, got " +
                              std::to_string(f.size()));
    }
    bank.vectors.push_back(std::move(f));
  });
  return bank;
}

FeatureBank read_features_csv(const std::filesystem::path& path) {
  return parse_features_csv(read_text_file(path));
}

std::vector<FrameInput> assemble_frames(const DetectionFile& dets, const FeatureBank& feats) {
  if (dets.rows.size() != feats.count()) {
    throw Error(ErrorCode::Alignment, std::to_string(dets.rows.size()) + " detections but " +
                                          std::to_string(feats.count()) + " feature vectors");
  }
  std::vector<FrameInput> frames;
  for (const auto& row : dets.rows) {
    if (frames.empty() || frames.back().frame != row.frame) {
      frames.push_back(FrameInput{row.frame, {}, {}, {}});
    }
    FrameInput& f = frames.back();
    f.boxes.push_back(row.box);
    f.confidences.push_back(row.confidence);
    f.features.push_back(feats.vectors[row.source_index]);
  }
  return frames;
}

}  // namespace hat
