#include <array>
#include <bit>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "rirkit/codec.hpp"
#include "rirkit/error.hpp"

namespace rirkit {
namespace {

constexpr std::array<char, 4> kCodebookMagic{'R', 'V', 'Q', '1'};
constexpr std::array<char, 4> kCodegramMagic{'R', 'V', 'Q', 'C'};

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  }
  void magic(const std::array<char, 4>& m) { out_.write(m.data(), 4); }
  void u32(std::uint32_t v) { little_endian(v, 4); }
  void u16(std::uint16_t v) { little_endian(v, 2); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void finish() {
    out_.flush();
    if (!out_) throw Error(ErrorCode::kIo, "failed writing " + path_.string());
  }

 private:
  void little_endian(std::uint32_t v, int bytes) {
    char buf[4];
    for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    out_.write(buf, bytes);
  }
  std::filesystem::path path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  }
  void expect_magic(const std::array<char, 4>& m) {
    std::array<char, 4> got{};
    read(got.data(), 4);
    if (got != m) {
      throw Error(ErrorCode::kIo, path_.string() + ": bad magic, expected " +
                                      std::string(m.data(), 4));
    }
  }
  std::uint32_t u32() { return little_endian(4); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(little_endian(2)); }
  float f32() { return std::bit_cast<float>(u32()); }

 private:
  std::uint32_t little_endian(int bytes) {
    unsigned char buf[4] = {};
    read(reinterpret_cast<char*>(buf), bytes);
    std::uint32_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
    return v;
  }
  void read(char* dst, int bytes) {
    in_.read(dst, bytes);
    if (!in_) throw Error(ErrorCode::kIo, path_.string() + ": truncated file");
  }
  std::filesystem::path path_;
  std::ifstream in_;
};

}  // namespace

void save_codebooks(const RvqCodebooks& cb, const std::filesystem::path& path) {
  validate(cb);
  Writer w(path);
  w.magic(kCodebookMagic);
  w.u32(static_cast<std::uint32_t>(cb.num_stages));
  w.u32(static_cast<std::uint32_t>(cb.codebook_size));
  w.u32(static_cast<std::uint32_t>(cb.frame_len));
  w.u32(static_cast<std::uint32_t>(cb.sample_rate_hz));
  for (double v : cb.vectors) w.f32(static_cast<float>(v));
  w.finish();
}

RvqCodebooks load_codebooks(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic(kCodebookMagic);
  RvqCodebooks cb;
  cb.num_stages = static_cast<int>(r.u32());
  cb.codebook_size = static_cast<int>(r.u32());
  cb.frame_len = static_cast<int>(r.u32());
  cb.sample_rate_hz = static_cast<int>(r.u32());
  if (cb.num_stages < 1 || cb.num_stages > 64 || cb.codebook_size < 2 ||
      cb.codebook_size > 65536 || cb.frame_len < 1 || cb.frame_len > (1 << 20)) {
    throw Error(ErrorCode::kIo, path.string() + ": implausible codebook header");
  }
  const std::size_t count = static_cast<std::size_t>(cb.num_stages) *
                            static_cast<std::size_t>(cb.codebook_size) *
                            static_cast<std::size_t>(cb.frame_len);
  cb.vectors.resize(count);
  for (double& v : cb.vectors) v = r.f32();
  validate(cb);
  return cb;
}

void save_codegram_raw(const Codegram& c, const std::filesystem::path& path) {
  Writer w(path);
  w.magic(kCodegramMagic);
  w.u32(static_cast<std::uint32_t>(c.num_stages));
  w.u32(static_cast<std::uint32_t>(c.num_frames));
  w.u32(static_cast<std::uint32_t>(c.num_samples));
  for (int code : c.codes) {
    if (code < 0 || code > 0xFFFF) {
      throw Error(ErrorCode::kCorruptCodegram, "code " + std::to_string(code) +
                                                   " does not fit 16 bits");
    }
    w.u16(static_cast<std::uint16_t>(code));
  }
  w.finish();
}

Codegram load_codegram_raw(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic(kCodegramMagic);
  Codegram c;
  c.num_stages = static_cast<int>(r.u32());
  c.num_frames = r.u32();
  c.num_samples = r.u32();
  if (c.num_stages < 1 || c.num_stages > 64) {
    throw Error(ErrorCode::kCorruptCodegram, path.string() + ": implausible stage count");
  }
  c.codes.resize(static_cast<std::size_t>(c.num_stages) * c.num_frames);
  for (int& code : c.codes) code = r.u16();
  return c;
}

std::string codegram_to_json(const Codegram& c) {
  nlohmann::json j;
  j["num_stages"] = c.num_stages;
  j["num_frames"] = c.num_frames;
  j["num_samples"] = c.num_samples;
  nlohmann::json rows = nlohmann::json::array();
  for (int stage = 0; stage < c.num_stages; ++stage) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t t = 0; t < c.num_frames; ++t) row.push_back(c.at(stage, t));
    rows.push_back(std::move(row));
  }
  j["codes"] = std::move(rows);
  return j.dump();
}

Codegram codegram_from_json(const std::string& text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    Codegram c;
    c.num_stages = j.at("num_stages").get<int>();
    c.num_frames = j.at("num_frames").get<std::size_t>();
    c.num_samples = j.value("num_samples", std::size_t{0});
    const auto& rows = j.at("codes");
    if (c.num_stages < 1 || rows.size() != static_cast<std::size_t>(c.num_stages)) {
      throw Error(ErrorCode::kCorruptCodegram, "codegram JSON has inconsistent stage rows");
    }
    c.codes.reserve(static_cast<std::size_t>(c.num_stages) * c.num_frames);
    for (const auto& row : rows) {
      if (row.size() != c.num_frames) {
        throw Error(ErrorCode::kCorruptCodegram, "codegram JSON row length differs from T");
      }
      for (const auto& v : row) c.codes.push_back(v.get<int>());
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptCodegram, std::string("codegram JSON: ") + e.what());
  }
}

}  // namespace rirkit
