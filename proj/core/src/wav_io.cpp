#include "rirkit/wav_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "rirkit/error.hpp"

namespace rirkit {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

double decode_sample(const unsigned char* p, WavSampleFormat fmt) {
  switch (fmt) {
    case WavSampleFormat::kPcm16: {
      const auto v = static_cast<std::int16_t>(read_u16(p));
      return v / 32768.0;
    }
    case WavSampleFormat::kPcm24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v |= ~0xFFFFFF;
      return v / 8388608.0;
    }
    case WavSampleFormat::kPcm32: {
      const auto v = static_cast<std::int32_t>(read_u32(p));
      return v / 2147483648.0;
    }
    case WavSampleFormat::kFloat32: {
      const std::uint32_t bits = read_u32(p);
      float f;
      std::memcpy(&f, &bits, sizeof f);
      return f;
    }
    case WavSampleFormat::kFloat64: {
      std::uint64_t bits = 0;
      for (int i = 7; i >= 0; --i) bits = (bits << 8) | p[i];
      double d;
      std::memcpy(&d, &bits, sizeof d);
      return d;
    }
  }
  return 0.0;
}

int bytes_per_sample(WavSampleFormat fmt) {
  switch (fmt) {
    case WavSampleFormat::kPcm16: return 2;
    case WavSampleFormat::kPcm24: return 3;
    case WavSampleFormat::kPcm32: return 4;
    case WavSampleFormat::kFloat32: return 4;
    case WavSampleFormat::kFloat64: return 8;
  }
  return 0;
}

}  // namespace

WavReadResult read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  const auto fail = [&](const std::string& why) {
    return Error(ErrorCode::kIo, path.string() + ": " + why);
  };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw fail("not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t format_tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || size > available) throw fail("truncated fmt chunk");
      format_tag = read_u16(chunk + 8);
      channels = read_u16(chunk + 10);
      rate = read_u32(chunk + 12);
      bits = read_u16(chunk + 22);
      if (format_tag == kFormatExtensible) {
        if (size < 40) throw fail("truncated WAVE_FORMAT_EXTENSIBLE header");
        format_tag = read_u16(chunk + 8 + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = std::min<std::size_t>(size, available);
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) throw fail("missing fmt chunk");
  if (data == nullptr) throw fail("missing data chunk");
  if (channels == 0) throw fail("zero channels");

  WavSampleFormat fmt;
  if (format_tag == kFormatPcm && bits == 16) {
    fmt = WavSampleFormat::kPcm16;
  } else if (format_tag == kFormatPcm && bits == 24) {
    fmt = WavSampleFormat::kPcm24;
  } else if (format_tag == kFormatPcm && bits == 32) {
    fmt = WavSampleFormat::kPcm32;
  } else if (format_tag == kFormatFloat && bits == 32) {
    fmt = WavSampleFormat::kFloat32;
  } else if (format_tag == kFormatFloat && bits == 64) {
    fmt = WavSampleFormat::kFloat64;
  } else {
    throw fail("unsupported sample format (tag " + std::to_string(format_tag) + ", " +
               std::to_string(bits) + " bits)");
  }

  const std::size_t frame_bytes = static_cast<std::size_t>(bytes_per_sample(fmt)) * channels;
  const std::size_t frames = data_size / frame_bytes;

  WavReadResult result;
  result.channels = channels;
  result.format = fmt;
  result.waveform.sample_rate_hz = static_cast<int>(rate);
  result.waveform.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    result.waveform.samples[i] = decode_sample(data + i * frame_bytes, fmt);
  }
  if (channels > 1) {
    result.warnings.push_back(path.string() + ": " + std::to_string(channels) +
                              " channels, using channel 0");
  }
  return result;
}

void write_wav(const std::filesystem::path& path, const Waveform& w, WavSampleFormat format) {
  if (format != WavSampleFormat::kFloat32 && format != WavSampleFormat::kPcm16) {
    throw Error(ErrorCode::kConfiguration, "write_wav supports float32 and pcm16 only");
  }
  const bool is_float = format == WavSampleFormat::kFloat32;
  const std::uint16_t bits = is_float ? 32 : 16;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(w.samples.size() * (bits / 8));
  const auto rate = static_cast<std::uint32_t>(w.sample_rate_hz);

  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, is_float ? kFormatFloat : kFormatPcm);
  put_u16(out, 1);
  put_u32(out, rate);
  put_u32(out, rate * (bits / 8));
  put_u16(out, bits / 8);
  put_u16(out, bits);
  out += "data";
  put_u32(out, data_bytes);
  for (double v : w.samples) {
    if (is_float) {
      const float f = static_cast<float>(v);
      std::uint32_t b;
      std::memcpy(&b, &f, sizeof b);
      put_u32(out, b);
    } else {
      const double c = std::clamp(v, -1.0, 1.0);
      const auto s = static_cast<std::int16_t>(std::clamp<long>(std::lround(c * 32768.0), -32768, 32767));
      put_u16(out, static_cast<std::uint16_t>(s));
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

}  // namespace rirkit
