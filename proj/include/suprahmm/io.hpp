// suprahmm/io.hpp

// Copyright 2026  The suprahmm Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// RIFF WAV (PCM 16-bit mono) reading/writing and the feature dump format:
//   little-endian u32 T, u32 D, then T*D float64 row-major.
// Prosody tracks reuse the same layout with D = 3 (log_f0, voiced, log_energy).

#ifndef SUPRAHMM_IO_HPP_
#define SUPRAHMM_IO_HPP_

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "suprahmm/features.hpp"

namespace suprahmm {

static_assert(std::endian::native == std::endian::little,
              "feature and WAV I/O assume a little-endian host");

namespace detail {

template <typename T>
void PutLe(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T GetLe(std::istream& is, const std::string& what) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw Error(ErrorKind::kParse, "truncated " + what);
  return v;
}

inline std::ifstream OpenIn(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw Error(ErrorKind::kIo, "cannot open " + p.string());
  return is;
}

inline std::ofstream OpenOut(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorKind::kIo, "cannot write " + p.string());
  return os;
}

}  // namespace detail

inline AudioClip ReadWav(const std::filesystem::path& path) {
  auto is = detail::OpenIn(path);
  char tag[4];
  auto read_tag = [&](const char* expect) {
    if (!is.read(tag, 4) || std::memcmp(tag, expect, 4) != 0)
      throw Error(ErrorKind::kParse, path.string() + ": expected '" + expect + "' chunk");
  };
  read_tag("RIFF");
  detail::GetLe<std::uint32_t>(is, "RIFF size");
  read_tag("WAVE");
  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0, format = 0;
  std::uint32_t rate = 0;
  while (is.read(tag, 4)) {
    const auto size = detail::GetLe<std::uint32_t>(is, "chunk size");
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      format = detail::GetLe<std::uint16_t>(is, "fmt");
      channels = detail::GetLe<std::uint16_t>(is, "fmt");
      rate = detail::GetLe<std::uint32_t>(is, "fmt");
      detail::GetLe<std::uint32_t>(is, "fmt");
      detail::GetLe<std::uint16_t>(is, "fmt");
      bits = detail::GetLe<std::uint16_t>(is, "fmt");
      if (size > 16) is.seekg(size - 16 + (size & 1), std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (!have_fmt) throw Error(ErrorKind::kParse, path.string() + ": data before fmt");
      if (format != 1 || bits != 16 || channels != 1)
        throw Error(ErrorKind::kParse,
                    path.string() + ": only mono 16-bit PCM WAV is supported");
      AudioClip clip;
      clip.sample_rate_hz = static_cast<int>(rate);
      clip.samples.resize(size / 2);
      for (auto& s : clip.samples)
        s = detail::GetLe<std::int16_t>(is, "sample data") / 32768.0;
      return clip;
    } else {
      is.seekg(size + (size & 1), std::ios::cur);
    }
  }
  throw Error(ErrorKind::kParse, path.string() + ": no data chunk");
}

inline void WriteWav(const std::filesystem::path& path, const AudioClip& clip) {
  auto os = detail::OpenOut(path);
  const auto n = static_cast<std::uint32_t>(clip.samples.size());
  os.write("RIFF", 4);
  detail::PutLe<std::uint32_t>(os, 36 + 2 * n);
  os.write("WAVEfmt ", 8);
  detail::PutLe<std::uint32_t>(os, 16);
  detail::PutLe<std::uint16_t>(os, 1);
  detail::PutLe<std::uint16_t>(os, 1);
  detail::PutLe<std::uint32_t>(os, static_cast<std::uint32_t>(clip.sample_rate_hz));
  detail::PutLe<std::uint32_t>(os, static_cast<std::uint32_t>(clip.sample_rate_hz) * 2);
  detail::PutLe<std::uint16_t>(os, 2);
  detail::PutLe<std::uint16_t>(os, 16);
  os.write("data", 4);
  detail::PutLe<std::uint32_t>(os, 2 * n);
  for (double s : clip.samples) {
    const double v = std::clamp(s, -1.0, 32767.0 / 32768.0) * 32768.0;
    detail::PutLe<std::int16_t>(os, static_cast<std::int16_t>(std::lround(v)));
  }
  if (!os) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

inline void WriteFeatures(const std::filesystem::path& path, const FeatureSequence& seq) {
  auto os = detail::OpenOut(path);
  detail::PutLe<std::uint32_t>(os, static_cast<std::uint32_t>(seq.NumFrames()));
  detail::PutLe<std::uint32_t>(os, static_cast<std::uint32_t>(seq.Dim()));
  for (double x : seq.Data()) detail::PutLe<double>(os, x);
  if (!os) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

inline FeatureSequence ReadFeatures(const std::filesystem::path& path,
                                    double frame_shift_ms = 10.0) {
  auto is = detail::OpenIn(path);
  const auto t = detail::GetLe<std::uint32_t>(is, "feature header");
  const auto d = detail::GetLe<std::uint32_t>(is, "feature header");
  std::vector<double> data(static_cast<std::size_t>(t) * d);
  for (auto& x : data) x = detail::GetLe<double>(is, "feature body");
  if (is.peek() != std::char_traits<char>::eof())
    throw Error(ErrorKind::kParse, path.string() + ": trailing bytes after feature body");
  return FeatureSequence(t, d, std::move(data), frame_shift_ms);
}

/// Debug export: header row f0..f{D-1}, one frame per line, 17 significant digits.
inline void WriteFeaturesCsv(const std::filesystem::path& path, const FeatureSequence& seq) {
  auto os = detail::OpenOut(path);
  os << std::setprecision(17);
  for (std::size_t d = 0; d < seq.Dim(); ++d) os << (d ? "," : "") << 'f' << d;
  os << '\n';
  for (std::size_t t = 0; t < seq.NumFrames(); ++t) {
    for (std::size_t d = 0; d < seq.Dim(); ++d) os << (d ? "," : "") << seq(t, d);
    os << '\n';
  }
}

inline FeatureSequence ProsodyTrackToMatrix(const ProsodyTrack& tr) {
  FeatureSequence m(tr.NumFrames(), 3);
  for (std::size_t t = 0; t < tr.NumFrames(); ++t) {
    m(t, 0) = tr.log_f0[t];
    m(t, 1) = tr.voiced[t] ? 1.0 : 0.0;
    m(t, 2) = tr.log_energy[t];
  }
  return m;
}

inline ProsodyTrack MatrixToProsodyTrack(const FeatureSequence& m) {
  if (m.Dim() != 3) throw Error(ErrorKind::kDimensionMismatch, "prosody track needs D = 3");
  ProsodyTrack tr;
  for (std::size_t t = 0; t < m.NumFrames(); ++t) {
    tr.log_f0.push_back(m(t, 0));
    tr.voiced.push_back(m(t, 1) > 0.5);
    tr.log_energy.push_back(m(t, 2));
  }
  return tr;
}

inline void WriteProsodyTrack(const std::filesystem::path& path, const ProsodyTrack& tr) {
  WriteFeatures(path, ProsodyTrackToMatrix(tr));
}

inline ProsodyTrack ReadProsodyTrack(const std::filesystem::path& path) {
  return MatrixToProsodyTrack(ReadFeatures(path));
}

inline std::string ReadTextFile(const std::filesystem::path& path) {
  auto is = detail::OpenIn(path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  auto os = detail::OpenOut(path);
  os << text;
  if (!os) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

}  // namespace suprahmm

#endif  // SUPRAHMM_IO_HPP_
