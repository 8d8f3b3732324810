#include "nlx/index_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <zlib.h>

#include "nlx/error.hpp"

namespace nlx {

namespace {

constexpr char kIndexMagic[4] = {'N', 'L', 'X', '1'};
constexpr char kModelMagic[4] = {'N', 'L', 'M', '1'};
constexpr std::size_t kHeaderBytes = 16;  // magic, version, total length
constexpr std::uint8_t kIdentityModel = 0;
constexpr std::uint8_t kCcaModel = 1;

class Writer {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void string32(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void reals(const double* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) f64(data[i]);
  }

  // Fills in the total length at offset 8 and appends the CRC-32 trailer.
  std::vector<std::uint8_t> finish() {
    const std::uint64_t total = out_.size() + 4;
    for (int i = 0; i < 8; ++i) out_[8 + i] = static_cast<std::uint8_t>(total >> (8 * i));
    const auto crc = crc32(0L, out_.data(), static_cast<uInt>(out_.size()));
    u32(static_cast<std::uint32_t>(crc));
    return std::move(out_);
  }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (n > data_.size() - pos_) throw Error(ErrorCode::kParse, "file structure overruns its payload");
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8() { return take(1)[0]; }
  std::uint32_t u32() {
    auto s = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{s[i]} << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    auto s = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{s[i]} << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string string32() {
    const auto n = u32();
    auto s = take(n);
    return {reinterpret_cast<const char*>(s.data()), s.size()};
  }
  void reals(double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f64();
  }
  std::size_t remaining() const { return data_.size() - pos_; }
  // Guards count fields before allocating.
  std::size_t count(std::uint64_t n, std::size_t min_bytes_each) {
    if (min_bytes_each > 0 && n > remaining() / min_bytes_each) {
      throw Error(ErrorCode::kParse, "file structure overruns its payload");
    }
    return static_cast<std::size_t>(n);
  }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

void write_header(Writer& w, const char (&magic)[4], std::uint32_t version) {
  w.bytes(magic, 4);
  w.u32(version);
  w.u64(0);  // patched by finish()
}

// Validates magic, version, length and checksum; returns a reader positioned
// after the header and limited to the payload.
Reader open_payload(std::span<const std::uint8_t> bytes, const char (&magic)[4],
                    std::uint32_t version, const char* what) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), magic, 4) != 0) {
    throw Error(ErrorCode::kParse, std::string("not an ") + what + " file (bad magic)");
  }
  if (bytes.size() < kHeaderBytes + 4) throw Error(ErrorCode::kTruncated, std::string(what) + " file is truncated");
  Reader header(bytes.subspan(4, 12));
  const auto file_version = header.u32();
  if (file_version != version) {
    throw Error(ErrorCode::kVersion, std::string(what) + " format version " + std::to_string(file_version) +
                                         " is not supported (expected " + std::to_string(version) + ")");
  }
  const auto total = header.u64();
  if (bytes.size() < total) throw Error(ErrorCode::kTruncated, std::string(what) + " file is truncated");
  if (bytes.size() > total) throw Error(ErrorCode::kParse, std::string(what) + " file has trailing bytes");
  const auto body = bytes.first(bytes.size() - 4);
  const auto stored = Reader(bytes.last(4)).u32();
  const auto crc = static_cast<std::uint32_t>(crc32(0L, body.data(), static_cast<uInt>(body.size())));
  if (crc != stored) throw Error(ErrorCode::kChecksum, std::string(what) + " file checksum mismatch");
  return Reader(body.subspan(kHeaderBytes));
}

void write_config(Writer& w, const PhocConfig& config) { w.string32(config.to_text()); }

PhocConfig read_config(Reader& r) { return PhocConfig::from_text(r.string32()); }

void write_model(Writer& w, const CcaModel& m) {
  const auto d = m.dimension();
  const auto p = m.projection_dim();
  w.u64(d);
  w.u64(p);
  w.f64(m.lambda);
  w.reals(m.mean_x.data(), d);
  w.reals(m.mean_y.data(), d);
  w.reals(m.wx.data(), d * p);
  w.reals(m.wy.data(), d * p);
  w.reals(m.correlations.data(), p);
}

CcaModel read_model(Reader& r) {
  CcaModel m;
  const auto d64 = r.u64();
  const auto p64 = r.u64();
  const std::size_t d = r.count(d64, 16);
  const std::size_t p = r.count(p64, 8);
  if (d == 0 || p == 0 || p > d || d * p > r.remaining() / 16) {
    throw Error(ErrorCode::kParse, "model block has invalid dimensions");
  }
  const auto rows = static_cast<Eigen::Index>(d);
  const auto cols = static_cast<Eigen::Index>(p);
  m.lambda = r.f64();
  m.mean_x.resize(rows);
  m.mean_y.resize(rows);
  m.wx.resize(rows, cols);
  m.wy.resize(rows, cols);
  m.correlations.resize(cols);
  r.reals(m.mean_x.data(), d);
  r.reals(m.mean_y.data(), d);
  r.reals(m.wx.data(), d * p);
  r.reals(m.wy.data(), d * p);
  r.reals(m.correlations.data(), p);
  return m;
}

}  // namespace

std::vector<std::uint8_t> serialize_index(const SearchIndex& index) {
  Writer w;
  write_header(w, kIndexMagic, kIndexFormatVersion);
  write_config(w, index.config());
  if (index.model()) {
    w.u8(kCcaModel);
    write_model(w, *index.model());
  } else {
    w.u8(kIdentityModel);
  }
  const std::size_t m = index.size();
  w.u64(m);
  w.u64(index.k());
  for (const auto& token : index.vocab().tokens) w.string32(token);
  for (bool v : index.valid()) w.u8(v ? 1 : 0);
  const std::size_t row_bytes = (index.config().dimension() + 7) / 8;
  w.u64(row_bytes);
  for (const auto& bits : index.phoc()) {
    const auto packed = bits.pack();
    w.bytes(packed.data(), packed.size());
  }
  if (index.model()) {
    w.reals(index.projected().data(), static_cast<std::size_t>(index.projected().size()));
  }
  w.reals(index.rk().data(), m);
  for (const auto& occurrences : index.vocab().postings) {
    w.u64(occurrences.size());
    for (const auto& o : occurrences) {
      w.string32(o.page_id);
      w.u64(o.word_id);
      w.i32(o.box.x0);
      w.i32(o.box.y0);
      w.i32(o.box.x1);
      w.i32(o.box.y1);
      w.u8(o.confidence ? 1 : 0);
      w.f64(o.confidence.value_or(0.0));
    }
  }
  return w.finish();
}

SearchIndex deserialize_index(std::span<const std::uint8_t> bytes) {
  Reader r = open_payload(bytes, kIndexMagic, kIndexFormatVersion, "index");
  PhocConfig config = read_config(r);
  std::optional<CcaModel> model;
  const auto kind = r.u8();
  if (kind == kCcaModel) {
    model = read_model(r);
    if (model->dimension() != config.dimension()) {
      throw Error(ErrorCode::kParse, "model dimension does not match the PHOC configuration");
    }
  } else if (kind != kIdentityModel) {
    throw Error(ErrorCode::kParse, "unknown model kind " + std::to_string(kind));
  }
  const std::size_t m = r.count(r.u64(), 4);
  const std::size_t k = static_cast<std::size_t>(r.u64());

  Vocabulary vocab;
  vocab.tokens.reserve(m);
  for (std::size_t j = 0; j < m; ++j) vocab.tokens.push_back(r.string32());
  std::vector<bool> valid(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto flag = r.u8();
    if (flag > 1) throw Error(ErrorCode::kParse, "bad validity flag");
    valid[j] = flag == 1;
  }
  const std::size_t d = config.dimension();
  const auto row_bytes = r.u64();
  if (row_bytes != (d + 7) / 8) throw Error(ErrorCode::kParse, "packed PHOC row size mismatch");
  std::vector<PhocVector> phoc;
  phoc.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    try {
      phoc.push_back(PhocVector::unpack(r.take(static_cast<std::size_t>(row_bytes)), d));
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse, e.what());
    }
  }
  Eigen::MatrixXd projected;
  if (model) {
    const std::size_t p = model->projection_dim();
    r.count(p * m, 8);
    projected.resize(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(m));
    r.reals(projected.data(), p * m);
  }
  std::vector<double> rk(m);
  r.reals(rk.data(), m);
  vocab.postings.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t n = r.count(r.u64(), 37);
    auto& occurrences = vocab.postings[j];
    occurrences.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      Occurrence o;
      o.page_id = r.string32();
      o.word_id = r.u64();
      o.box.x0 = r.i32();
      o.box.y0 = r.i32();
      o.box.x1 = r.i32();
      o.box.y1 = r.i32();
      const auto has_confidence = r.u8();
      const double confidence = r.f64();
      if (has_confidence > 1) throw Error(ErrorCode::kParse, "bad confidence flag");
      if (has_confidence == 1) o.confidence = confidence;
      occurrences.push_back(std::move(o));
    }
  }
  if (r.remaining() != 0) throw Error(ErrorCode::kParse, "index payload has unread bytes");
  return SearchIndex::from_parts(std::move(config), std::move(model), std::move(vocab),
                                 std::move(phoc), std::move(projected), std::move(rk),
                                 std::move(valid), k);
}

std::vector<std::uint8_t> serialize_model(const ModelFile& file) {
  Writer w;
  write_header(w, kModelMagic, kModelFormatVersion);
  write_config(w, file.config);
  write_model(w, file.model);
  return w.finish();
}

ModelFile deserialize_model(std::span<const std::uint8_t> bytes) {
  Reader r = open_payload(bytes, kModelMagic, kModelFormatVersion, "model");
  PhocConfig config = read_config(r);
  CcaModel model = read_model(r);
  if (model.dimension() != config.dimension()) {
    throw Error(ErrorCode::kParse, "model dimension does not match the PHOC configuration");
  }
  if (r.remaining() != 0) throw Error(ErrorCode::kParse, "model payload has unread bytes");
  return {std::move(config), std::move(model)};
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "read error on '" + path + "'");
  return bytes;
}

void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write error on '" + path + "'");
}

void save_index(const SearchIndex& index, const std::string& path) {
  write_file_bytes(path, serialize_index(index));
}

SearchIndex load_index(const std::string& path) { return deserialize_index(read_file_bytes(path)); }

void save_model(const ModelFile& model, const std::string& path) {
  write_file_bytes(path, serialize_model(model));
}

ModelFile load_model(const std::string& path) { return deserialize_model(read_file_bytes(path)); }

}  // namespace nlx
