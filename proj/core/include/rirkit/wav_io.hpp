#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rirkit/waveform.hpp"

namespace rirkit {

enum class WavSampleFormat { kPcm16, kPcm24, kPcm32, kFloat32, kFloat64 };

struct WavReadResult {
  Waveform waveform;  // channel 0 only
  int channels = 1;
  WavSampleFormat format = WavSampleFormat::kPcm16;
  std::vector<std::string> warnings;
};

/// Reads a RIFF/WAVE file. Accepts PCM (16/24/32-bit), IEEE float (32/64-bit)
/// and WAVE_FORMAT_EXTENSIBLE wrappers of those. Multi-channel files keep
/// channel 0 and report a warning. Throws Error(kIo) on malformed input.
WavReadResult read_wav(const std::filesystem::path& path);

/// Writes mono 32-bit float (default) or 16-bit PCM (clipped to [-1, 1]).
void write_wav(const std::filesystem::path& path, const Waveform& w,
               WavSampleFormat format = WavSampleFormat::kFloat32);

}  // namespace rirkit
