// suprahmm/features.hpp

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

// MFCC front-end (pre-emphasis, framing, Hamming window, power spectrum,
// mel filterbank, log, DCT-II), delta regression, and frame-level prosody
// tracks summarized into per-segment prosody vectors.

#ifndef SUPRAHMM_FEATURES_HPP_
#define SUPRAHMM_FEATURES_HPP_

#include <array>
#include <complex>
#include <sstream>

#include "suprahmm/common.hpp"

namespace suprahmm {

struct AudioClip {
  std::vector<double> samples;  // normalized to [-1, 1]
  int sample_rate_hz = 16000;

  void Validate() const {
    if (samples.empty()) throw Error(ErrorKind::kEmptyInput, "audio clip has no samples");
    if (sample_rate_hz <= 0)
      throw Error(ErrorKind::kInvalidArgument, "sample rate must be positive");
    for (double s : samples)
      if (!std::isfinite(s)) throw Error(ErrorKind::kNumeric, "non-finite audio sample");
  }
};

struct MfccConfig {
  int sample_rate_hz = 16000;
  double preemphasis_coeff = 0.97;
  double frame_length_ms = 25.0;
  double frame_shift_ms = 10.0;
  int fft_size = 512;
  int num_mel_filters = 26;
  int num_cepstra = 16;
  int delta_window = 2;
  double log_floor = 1e-10;

  int FrameLength() const {
    return static_cast<int>(std::lround(frame_length_ms * sample_rate_hz / 1000.0));
  }
  int FrameShift() const {
    return static_cast<int>(std::lround(frame_shift_ms * sample_rate_hz / 1000.0));
  }
  int FeatureDim() const { return 2 * num_cepstra; }

  void Validate() const {
    auto bad = [](const std::string& m) { throw Error(ErrorKind::kConfig, m); };
    if (sample_rate_hz <= 0) bad("sample_rate_hz must be positive");
    if (!(preemphasis_coeff >= 0.0 && preemphasis_coeff < 1.0))
      bad("preemphasis_coeff must lie in [0, 1)");
    if (!(frame_length_ms > 0.0) || !(frame_shift_ms > 0.0))
      bad("frame length and shift must be positive");
    if (frame_shift_ms > frame_length_ms) bad("frame_shift_ms exceeds frame_length_ms");
    if (FrameLength() < 1 || FrameShift() < 1) bad("frame shorter than one sample");
    if (fft_size < 1 || (fft_size & (fft_size - 1)) != 0 || fft_size < FrameLength())
      bad("fft_size must be a power of two no smaller than the frame");
    if (num_mel_filters < 1) bad("num_mel_filters must be positive");
    if (num_cepstra < 1 || num_cepstra > num_mel_filters)
      bad("num_cepstra must lie in [1, num_mel_filters]");
    if (delta_window < 1) bad("delta_window must be positive");
    if (!(log_floor > 0.0)) bad("log_floor must be positive");
  }

  /// Stable text identity of the feature pipeline; banks record it so that
  /// features from a different front-end are rejected at scoring time.
  std::string Fingerprint() const {
    std::ostringstream os;
    os << "mfcc:sr=" << sample_rate_hz << ";pre=" << preemphasis_coeff
       << ";len=" << frame_length_ms << ";shift=" << frame_shift_ms
       << ";fft=" << fft_size << ";mel=" << num_mel_filters
       << ";cep=" << num_cepstra << ";dw=" << delta_window << ";D=" << FeatureDim();
    return os.str();
  }
};

/// T x D observation matrix, row-major. The static half precedes the deltas.
class FeatureSequence {
 public:
  FeatureSequence() = default;
  FeatureSequence(std::size_t num_frames, std::size_t dim, double frame_shift_ms = 10.0)
      : num_frames_(num_frames), dim_(dim), frame_shift_ms_(frame_shift_ms),
        data_(num_frames * dim, 0.0) {}
  FeatureSequence(std::size_t num_frames, std::size_t dim, std::vector<double> data,
                  double frame_shift_ms = 10.0)
      : num_frames_(num_frames), dim_(dim), frame_shift_ms_(frame_shift_ms),
        data_(std::move(data)) {
    if (data_.size() != num_frames_ * dim_)
      throw Error(ErrorKind::kDimensionMismatch, "feature data size does not match T x D");
  }

  std::size_t NumFrames() const { return num_frames_; }
  std::size_t Dim() const { return dim_; }
  double FrameShiftMs() const { return frame_shift_ms_; }
  bool Empty() const { return num_frames_ == 0; }

  std::span<const double> Frame(std::size_t t) const {
    return {data_.data() + t * dim_, dim_};
  }
  std::span<double> Frame(std::size_t t) { return {data_.data() + t * dim_, dim_}; }
  double operator()(std::size_t t, std::size_t d) const { return data_[t * dim_ + d]; }
  double& operator()(std::size_t t, std::size_t d) { return data_[t * dim_ + d]; }

  const std::vector<double>& Data() const { return data_; }

  void Validate() const {
    if (num_frames_ < 1) throw Error(ErrorKind::kEmptyInput, "feature sequence has no frames");
    for (double x : data_)
      if (!std::isfinite(x)) throw Error(ErrorKind::kNumeric, "non-finite feature value");
  }

  bool operator==(const FeatureSequence& o) const {
    return num_frames_ == o.num_frames_ && dim_ == o.dim_ && data_ == o.data_;
  }

 private:
  std::size_t num_frames_ = 0;
  std::size_t dim_ = 0;
  double frame_shift_ms_ = 10.0;
  std::vector<double> data_;
};

/// Frame-synchronous prosodic measurements, aligned with the MFCC frames.
struct ProsodyTrack {
  std::vector<double> log_f0;      // 0 on unvoiced frames
  std::vector<bool> voiced;
  std::vector<double> log_energy;

  std::size_t NumFrames() const { return log_energy.size(); }
};

/// Fixed-length prosodic summary of one segment of frames. Unvoiced-only
/// segments carry mean_log_f0 = std_log_f0 = 0 with voiced_ratio = 0.
struct ProsodySegmentVector {
  static constexpr std::size_t kDim = 6;

  double mean_log_f0 = 0.0;
  double std_log_f0 = 0.0;
  double voiced_ratio = 0.0;
  double mean_log_energy = 0.0;
  double energy_range = 0.0;
  double duration_frames = 1.0;

  std::array<double, kDim> ToArray() const {
    return {mean_log_f0, std_log_f0, voiced_ratio, mean_log_energy, energy_range,
            duration_frames};
  }
  static ProsodySegmentVector FromArray(std::span<const double> a) {
    if (a.size() != kDim)
      throw Error(ErrorKind::kDimensionMismatch, "prosody vector must have 6 entries");
    return {a[0], a[1], a[2], a[3], a[4], a[5]};
  }
};

// ---------------------------------------------------------------------------

inline AudioClip Preemphasize(const AudioClip& clip, double coeff) {
  if (clip.samples.empty()) throw Error(ErrorKind::kEmptyInput, "preemphasis of empty clip");
  if (!(coeff >= 0.0 && coeff <= 1.0))
    throw Error(ErrorKind::kInvalidArgument, "preemphasis coefficient outside [0, 1]");
  AudioClip out{std::vector<double>(clip.samples.size()), clip.sample_rate_hz};
  out.samples[0] = clip.samples[0];
  for (std::size_t n = 1; n < clip.samples.size(); ++n)
    out.samples[n] = clip.samples[n] - coeff * clip.samples[n - 1];
  return out;
}

inline std::vector<double> HammingWindow(int length) {
  std::vector<double> w(static_cast<std::size_t>(length), 1.0);
  if (length == 1) return w;
  for (int n = 0; n < length; ++n)
    w[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / (length - 1));
  return w;
}

inline std::size_t NumFrames(std::size_t num_samples, int frame_length, int frame_shift) {
  if (num_samples < static_cast<std::size_t>(frame_length)) return 0;
  return 1 + (num_samples - frame_length) / frame_shift;
}

/// Slices the clip into frames of cfg.FrameLength() samples every
/// cfg.FrameShift(); the trailing partial frame is dropped.
inline std::vector<std::vector<double>> FrameSignal(const AudioClip& clip,
                                                    const MfccConfig& cfg,
                                                    bool apply_window) {
  const int len = cfg.FrameLength(), shift = cfg.FrameShift();
  const std::size_t n = NumFrames(clip.samples.size(), len, shift);
  if (n == 0)
    throw Error(ErrorKind::kTooShort, "clip of " + std::to_string(clip.samples.size()) +
                                          " samples is shorter than one frame (" +
                                          std::to_string(len) + ")");
  const std::vector<double> window =
      apply_window ? HammingWindow(len) : std::vector<double>(len, 1.0);
  std::vector<std::vector<double>> frames(n, std::vector<double>(len));
  for (std::size_t t = 0; t < n; ++t)
    for (int i = 0; i < len; ++i) frames[t][i] = clip.samples[t * shift + i] * window[i];
  return frames;
}

inline std::vector<std::vector<double>> FrameAndWindow(const AudioClip& clip,
                                                       const MfccConfig& cfg) {
  return FrameSignal(clip, cfg, true);
}

/// In-place iterative radix-2 FFT; size must be a power of two.
inline void Fft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = a[i + k], v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

/// |X[k]|^2 for k = 0..fft_size/2 of a zero-padded frame.
inline std::vector<double> PowerSpectrum(std::span<const double> frame, int fft_size) {
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(fft_size));
  for (std::size_t i = 0; i < frame.size() && i < buf.size(); ++i) buf[i] = frame[i];
  Fft(buf);
  std::vector<double> power(static_cast<std::size_t>(fft_size / 2 + 1));
  for (std::size_t k = 0; k < power.size(); ++k) power[k] = std::norm(buf[k]);
  return power;
}

inline double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Triangular filters evenly spaced on the mel scale between 0 Hz and
/// Nyquist. Weights are evaluated at the exact bin frequencies, so narrow
/// low-frequency filters never come out empty.
class MelFilterbank {
 public:
  MelFilterbank(int num_filters, int fft_size, int sample_rate_hz)
      : num_bins_(fft_size / 2 + 1) {
    const double nyquist = sample_rate_hz / 2.0;
    const double mel_hi = HzToMel(nyquist);
    std::vector<double> edges(static_cast<std::size_t>(num_filters) + 2);
    for (std::size_t i = 0; i < edges.size(); ++i)
      edges[i] = MelToHz(mel_hi * static_cast<double>(i) / (num_filters + 1));
    centers_.assign(edges.begin() + 1, edges.end() - 1);
    weights_.assign(num_filters, std::vector<double>(num_bins_, 0.0));
    for (int m = 0; m < num_filters; ++m) {
      const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
      for (std::size_t k = 0; k < num_bins_; ++k) {
        const double f = static_cast<double>(k) * sample_rate_hz / fft_size;
        double w = 0.0;
        if (f > lo && f <= mid) w = (f - lo) / (mid - lo);
        else if (f > mid && f < hi) w = (hi - f) / (hi - mid);
        weights_[m][k] = w;
      }
    }
  }

  int NumFilters() const { return static_cast<int>(centers_.size()); }
  std::size_t NumBins() const { return num_bins_; }
  const std::vector<double>& CentersHz() const { return centers_; }
  const std::vector<double>& Weights(int m) const { return weights_[m]; }

  std::vector<double> Apply(std::span<const double> power) const {
    std::vector<double> e(centers_.size(), 0.0);
    for (std::size_t m = 0; m < centers_.size(); ++m)
      for (std::size_t k = 0; k < num_bins_; ++k) e[m] += weights_[m][k] * power[k];
    return e;
  }

 private:
  std::size_t num_bins_;
  std::vector<double> centers_;
  std::vector<std::vector<double>> weights_;
};

/// Linear (pre-log) mel filterbank energies, one row per frame.
inline std::vector<std::vector<double>> FilterbankEnergies(const AudioClip& clip,
                                                           const MfccConfig& cfg) {
  cfg.Validate();
  clip.Validate();
  const AudioClip emph = Preemphasize(clip, cfg.preemphasis_coeff);
  const auto frames = FrameAndWindow(emph, cfg);
  const MelFilterbank fb(cfg.num_mel_filters, cfg.fft_size, clip.sample_rate_hz);
  std::vector<std::vector<double>> out;
  out.reserve(frames.size());
  for (const auto& f : frames) {
    const auto power = PowerSpectrum(f, cfg.fft_size);
    for (double p : power)
      if (!std::isfinite(p)) throw Error(ErrorKind::kNumeric, "NaN in power spectrum");
    out.push_back(fb.Apply(power));
  }
  return out;
}

/// Unnormalized DCT-II: c_n = sum_m x_m cos(pi n (m + 1/2) / K).
inline std::vector<double> DctII(std::span<const double> x, int num_out) {
  const std::size_t k = x.size();
  std::vector<double> c(static_cast<std::size_t>(num_out), 0.0);
  for (int n = 0; n < num_out; ++n)
    for (std::size_t m = 0; m < k; ++m)
      c[n] += x[m] * std::cos(std::numbers::pi * n * (m + 0.5) / static_cast<double>(k));
  return c;
}

/// Static MFCCs (c0 included) in the first num_cepstra columns of a
/// 2*num_cepstra-wide sequence; the delta half is left at zero.
inline FeatureSequence Mfcc(const AudioClip& clip, const MfccConfig& cfg) {
  if (clip.sample_rate_hz != cfg.sample_rate_hz)
    throw Error(ErrorKind::kInvalidArgument,
                "clip sample rate " + std::to_string(clip.sample_rate_hz) +
                    " does not match configured " + std::to_string(cfg.sample_rate_hz));
  const auto energies = FilterbankEnergies(clip, cfg);
  FeatureSequence seq(energies.size(), static_cast<std::size_t>(cfg.FeatureDim()),
                      cfg.frame_shift_ms);
  std::vector<double> logs(static_cast<std::size_t>(cfg.num_mel_filters));
  for (std::size_t t = 0; t < energies.size(); ++t) {
    for (std::size_t m = 0; m < logs.size(); ++m)
      logs[m] = std::log(std::max(energies[t][m], cfg.log_floor));
    const auto c = DctII(logs, cfg.num_cepstra);
    std::copy(c.begin(), c.end(), seq.Frame(t).begin());
  }
  return seq;
}

/// Fills the delta half by regression over +/- window frames with edge
/// replication: delta[t] = sum_k k (s[t+k] - s[t-k]) / (2 sum_k k^2).
inline FeatureSequence AppendDeltas(const FeatureSequence& seq, int delta_window) {
  if (delta_window < 1) throw Error(ErrorKind::kInvalidArgument, "delta_window must be >= 1");
  seq.Validate();
  if (seq.Dim() % 2 != 0)
    throw Error(ErrorKind::kDimensionMismatch, "feature dimension must be even");
  const std::size_t half = seq.Dim() / 2;
  const long T = static_cast<long>(seq.NumFrames());
  double denom = 0.0;
  for (int k = 1; k <= delta_window; ++k) denom += static_cast<double>(k) * k;
  denom *= 2.0;
  FeatureSequence out = seq;
  auto clamp = [T](long t) { return std::clamp(t, 0L, T - 1); };
  for (long t = 0; t < T; ++t) {
    for (std::size_t d = 0; d < half; ++d) {
      double acc = 0.0;
      for (int k = 1; k <= delta_window; ++k)
        acc += k * (seq(clamp(t + k), d) - seq(clamp(t - k), d));
      out(t, half + d) = acc / denom;
    }
  }
  return out;
}

/// Full 2*num_cepstra-dimensional observation sequence.
inline FeatureSequence ComputeFeatures(const AudioClip& clip, const MfccConfig& cfg) {
  return AppendDeltas(Mfcc(clip, cfg), cfg.delta_window);
}

// ---------------------------------------------------------------------------
// Prosody

struct PitchConfig {
  double min_f0_hz = 60.0;
  double max_f0_hz = 400.0;
  double voicing_threshold = 0.45;  // normalized autocorrelation peak
  double silence_power = 1e-8;      // mean-square below this is unvoiced
  double energy_floor = 1e-10;
};

/// Autocorrelation pitch estimate of one (unwindowed) frame. Returns 0 when
/// the frame is judged unvoiced.
inline double EstimateF0(std::span<const double> frame, int sample_rate_hz,
                         const PitchConfig& pc = {}) {
  const std::size_t n = frame.size();
  double r0 = 0.0;
  for (double x : frame) r0 += x * x;
  if (r0 / static_cast<double>(n) < pc.silence_power) return 0.0;
  const auto min_lag = static_cast<std::size_t>(std::ceil(sample_rate_hz / pc.max_f0_hz));
  const auto max_lag = std::min<std::size_t>(
      static_cast<std::size_t>(std::floor(sample_rate_hz / pc.min_f0_hz)), n - 2);
  if (min_lag >= max_lag) return 0.0;
  auto acf = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += frame[i] * frame[i + lag];
    return s / r0;
  };
  std::size_t best = min_lag;
  double best_r = acf(min_lag);
  for (std::size_t lag = min_lag + 1; lag <= max_lag; ++lag) {
    const double r = acf(lag);
    if (r > best_r) best_r = r, best = lag;
  }
  if (best_r < pc.voicing_threshold) return 0.0;
  // Parabolic refinement around the integer peak.
  double lag = static_cast<double>(best);
  if (best > min_lag && best < max_lag) {
    const double a = acf(best - 1), b = best_r, c = acf(best + 1);
    const double den = a - 2.0 * b + c;
    if (den < 0.0) lag += 0.5 * (a - c) / den;
  }
  return sample_rate_hz / lag;
}

/// Per-frame log F0 / voicing / log energy, on the same frame grid as Mfcc().
inline ProsodyTrack ComputeProsodyTrack(const AudioClip& clip, const MfccConfig& cfg,
                                        const PitchConfig& pc = {}) {
  clip.Validate();
  const auto frames = FrameSignal(clip, cfg, false);
  ProsodyTrack tr;
  for (const auto& f : frames) {
    double ms = 0.0;
    for (double x : f) ms += x * x;
    ms /= static_cast<double>(f.size());
    const double f0 = EstimateF0(f, clip.sample_rate_hz, pc);
    tr.voiced.push_back(f0 > 0.0);
    tr.log_f0.push_back(f0 > 0.0 ? std::log(f0) : 0.0);
    tr.log_energy.push_back(std::log(ms + pc.energy_floor));
  }
  return tr;
}

/// Summarizes frames [begin, begin + length) of a track.
inline ProsodySegmentVector SummarizeProsody(const ProsodyTrack& track, std::size_t begin,
                                             std::size_t length) {
  if (length == 0) throw Error(ErrorKind::kDegenerateSegment, "empty prosody segment");
  if (begin + length > track.NumFrames())
    throw Error(ErrorKind::kDimensionMismatch, "segment extends past the prosody track");
  ProsodySegmentVector v;
  v.duration_frames = static_cast<double>(length);
  double sum_f0 = 0.0, sum_f0_sq = 0.0, sum_e = 0.0;
  double e_min = std::numeric_limits<double>::infinity(), e_max = -e_min;
  std::size_t voiced = 0;
  for (std::size_t t = begin; t < begin + length; ++t) {
    const double e = track.log_energy[t];
    sum_e += e;
    e_min = std::min(e_min, e);
    e_max = std::max(e_max, e);
    if (track.voiced[t]) {
      ++voiced;
      sum_f0 += track.log_f0[t];
      sum_f0_sq += track.log_f0[t] * track.log_f0[t];
    }
  }
  v.mean_log_energy = sum_e / static_cast<double>(length);
  v.energy_range = e_max - e_min;
  v.voiced_ratio = static_cast<double>(voiced) / static_cast<double>(length);
  if (voiced > 0) {
    v.mean_log_f0 = sum_f0 / static_cast<double>(voiced);
    v.std_log_f0 = std::sqrt(
        std::max(0.0, sum_f0_sq / static_cast<double>(voiced) - v.mean_log_f0 * v.mean_log_f0));
  }
  return v;
}

/// Groups frames by a frame->segment map (segment ids contiguous from 0 and
/// non-decreasing) and summarizes each group.
inline std::vector<ProsodySegmentVector> SummarizeSegments(
    const ProsodyTrack& track, std::span<const int> frame_to_segment) {
  if (frame_to_segment.size() != track.NumFrames())
    throw Error(ErrorKind::kDimensionMismatch, "alignment does not cover every frame");
  std::vector<ProsodySegmentVector> out;
  std::size_t begin = 0;
  for (std::size_t t = 1; t <= frame_to_segment.size(); ++t) {
    if (t == frame_to_segment.size() || frame_to_segment[t] != frame_to_segment[begin]) {
      if (frame_to_segment[begin] != static_cast<int>(out.size()))
        throw Error(ErrorKind::kDegenerateSegment,
                    "segment ids must be contiguous and start at 0");
      out.push_back(SummarizeProsody(track, begin, t - begin));
      begin = t;
    }
  }
  return out;
}

inline std::vector<ProsodySegmentVector> ExtractProsody(const AudioClip& clip,
                                                        std::span<const int> frame_to_segment,
                                                        const MfccConfig& cfg,
                                                        const PitchConfig& pc = {}) {
  return SummarizeSegments(ComputeProsodyTrack(clip, cfg, pc), frame_to_segment);
}

}  // namespace suprahmm

#endif  // SUPRAHMM_FEATURES_HPP_
