// tests/test_dsp.cpp — framing, power spectrum, MFCC, RASTA-PLP, deltas, LLD.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "voxkit/framing.hpp"
#include "voxkit/lld.hpp"
#include "voxkit/mfcc.hpp"
#include "voxkit/rasta_plp.hpp"
#include "voxkit/spectrogram.hpp"

using namespace voxkit;

namespace {

AudioClip make_clip(std::vector<double> samples, int rate = 48000) {
  AudioClip clip;
  clip.samples = std::move(samples);
  clip.sample_rate = rate;
  clip.source_id = "test";
  return clip;
}

AudioClip tone_clip(double freq, double duration_s, int rate, double amp = 0.5) {
  std::vector<double> s(static_cast<std::size_t>(duration_s * rate));
  for (std::size_t i = 0; i < s.size(); ++i)
    s[i] = amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / rate);
  return make_clip(std::move(s), rate);
}

FrameSpec raw_spec(std::size_t frame_samples, std::size_t hop_samples, int rate,
                   std::size_t fft = 0, double preemph = 0.0) {
  FrameSpec spec;
  spec.frame_len_s = static_cast<double>(frame_samples) / rate;
  spec.hop_s = static_cast<double>(hop_samples) / rate;
  spec.fft_size = fft;
  spec.preemphasis = preemph;
  return spec;
}

}  // namespace

TEST_CASE("frame_signal: frame counts") {
  FrameSpec spec = raw_spec(400, 160, 48000);
  REQUIRE(frame_signal(make_clip(std::vector<double>(400, 0.1)), spec).size() == 1);
  REQUIRE(frame_signal(make_clip(std::vector<double>(720, 0.1)), spec).size() == 3);
  REQUIRE_THROWS_AS(frame_signal(make_clip(std::vector<double>(399, 0.1)), spec),
                    PreconditionError);
}

TEST_CASE("frame_signal: pre-emphasis of a constant clip") {
  // Oracle: y[n] = x[n] - 0.97*x[n-1] applied by hand to the first samples.
  const double c = 0.8;
  FrameSpec spec = raw_spec(5, 5, 48000);
  spec.preemphasis = 0.97;
  spec.window = WindowKind::kHamming;
  auto frames = frame_signal(make_clip(std::vector<double>(10, c)), spec);
  std::vector<double> win = make_window(WindowKind::kHamming, 5);
  REQUIRE(frames[0][0] == Catch::Approx(c * win[0]));
  for (std::size_t n = 1; n < 5; ++n)
    REQUIRE(frames[0][n] == Catch::Approx((1.0 - 0.97) * c * win[n]));
  // Second frame has no boundary sample at all.
  for (std::size_t n = 0; n < 5; ++n)
    REQUIRE(frames[1][n] == Catch::Approx((1.0 - 0.97) * c * win[n]));
}

TEST_CASE("power_spectrum: tone lands in the analytic bin") {
  // bin = round(f * fft_size / rate) = round(1000/46.875) = 21 at 48 kHz/1024.
  FrameSpec spec = raw_spec(1024, 1024, 48000, 1024);
  spec.window = WindowKind::kHamming;
  PowerSpectrogram ps = power_spectrum(tone_clip(1000.0, 1024.0 / 48000.0, 48000), spec);
  REQUIRE(ps.frames() == 1);
  REQUIRE(ps.bins() == 513);
  std::size_t argmax = 0;
  for (std::size_t k = 1; k < ps.bins(); ++k)
    if (ps.power.at(0, k) > ps.power.at(0, argmax)) argmax = k;
  REQUIRE(argmax == 21);
  REQUIRE(ps.bin_hz == Catch::Approx(46.875));
}

TEST_CASE("power_spectrum: zero frame gives a zero row") {
  FrameSpec spec = raw_spec(256, 256, 16000, 256);
  PowerSpectrogram ps = power_spectrum(make_clip(std::vector<double>(256, 0.0), 16000), spec);
  for (std::size_t k = 0; k < ps.bins(); ++k) REQUIRE(ps.power.at(0, k) == 0.0);
}

TEST_CASE("power_spectrum: Parseval per frame") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const std::size_t n = 512;
  std::vector<double> frame(n);
  for (double& v : frame) v = dist(rng);

  std::vector<double> bins = power_bins(frame, n);
  // Full-spectrum sum reconstructed from the half spectrum of a real frame.
  double spec_sum = bins[0] + bins[n / 2];
  for (std::size_t k = 1; k < n / 2; ++k) spec_sum += 2.0 * bins[k];
  double time_sum = 0.0;
  for (double v : frame) time_sum += v * v;
  REQUIRE(std::abs(spec_sum / static_cast<double>(n) - time_sum) <= 1e-6 * time_sum);
}

TEST_CASE("mfcc: output width is 25") {
  FrameSpec spec = raw_spec(512, 256, 16000, 512);
  PowerSpectrogram ps = power_spectrum(tone_clip(440.0, 0.25, 16000), spec);
  Matrix m = mfcc(ps);
  REQUIRE(m.cols == 25);
  REQUIRE(m.rows == ps.frames());
}

TEST_CASE("mfcc: all-zero spectrogram hits the log floor") {
  // DCT of a constant vector: c0 = sqrt(n_mels)*log(floor), others 0.
  FrameSpec spec = raw_spec(256, 256, 16000, 256);
  PowerSpectrogram ps = power_spectrum(make_clip(std::vector<double>(256, 0.0), 16000), spec);
  MfccConfig cfg;
  Matrix m = mfcc(ps, cfg);
  double expected_c0 = std::sqrt(static_cast<double>(cfg.n_mels)) * std::log(cfg.log_floor);
  REQUIRE(m.at(0, 0) == Catch::Approx(expected_c0).epsilon(1e-12));
  for (std::size_t k = 1; k < 25; ++k)
    REQUIRE(std::abs(m.at(0, k)) < 1e-9);
}

TEST_CASE("mfcc: matches the naive filterbank+DCT oracle") {
  FrameSpec spec = raw_spec(512, 256, 16000, 512);
  MfccConfig cfg;

  SECTION("single tone frame") {
    PowerSpectrogram ps = power_spectrum(tone_clip(700.0, 0.2, 16000), spec);
    Matrix m = mfcc(ps, cfg);
    for (std::size_t t = 0; t < ps.frames(); ++t) {
      std::vector<double> row(ps.power.row(t), ps.power.row(t) + ps.bins());
      std::vector<double> expected =
          oracles::naive_mfcc_row(row, cfg.n_mels, cfg.n_coeffs, ps.bin_hz, 8000.0, cfg.log_floor);
      for (std::size_t k = 0; k < cfg.n_coeffs; ++k)
        REQUIRE(std::abs(m.at(t, k) - expected[k]) <= 1e-8);
    }
  }

  SECTION("random spectrograms (property)") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> dist(0.0, 10.0);
    for (int trial = 0; trial < 10; ++trial) {
      PowerSpectrogram ps;
      ps.sample_rate = 16000;
      ps.fft_size = 512;
      ps.bin_hz = 16000.0 / 512.0;
      ps.power = Matrix(3, 257);
      for (double& v : ps.power.data) v = dist(rng);
      Matrix m = mfcc(ps, cfg);
      for (std::size_t t = 0; t < 3; ++t) {
        std::vector<double> row(ps.power.row(t), ps.power.row(t) + ps.bins());
        std::vector<double> expected = oracles::naive_mfcc_row(row, cfg.n_mels, cfg.n_coeffs,
                                                               ps.bin_hz, 8000.0, cfg.log_floor);
        for (std::size_t k = 0; k < cfg.n_coeffs; ++k)
          REQUIRE(std::abs(m.at(t, k) - expected[k]) <= 1e-8);
      }
    }
  }
}

TEST_CASE("rasta filter: DC is killed") {
  SECTION("transfer function at DC is exactly zero") {
    REQUIRE(std::abs(rasta_filter_gain(0.0, 100.0)) <= 1e-9);
  }
  SECTION("constant trajectory settles to zero") {
    std::vector<double> x(250, 3.7);
    std::vector<double> y = rasta_filter(x, 0.94);
    for (std::size_t t = 200; t < y.size(); ++t) REQUIRE(std::abs(y[t]) <= 1e-6);
  }
  SECTION("peak response lies in the 1-16 Hz modulation band") {
    double best_f = 0.0, best_g = -1.0;
    for (double f = 0.1; f <= 50.0; f += 0.1) {
      double g = rasta_filter_gain(f, 100.0);
      if (g > best_g) {
        best_g = g;
        best_f = f;
      }
    }
    REQUIRE(best_f >= 1.0);
    REQUIRE(best_f <= 16.0);
  }
}

TEST_CASE("levinson_durbin: white noise gives stable reflection coefficients") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> x(4096);
  for (double& v : x) v = dist(rng);
  // Biased autocorrelation, positive definite for nonzero signals.
  std::vector<double> r(13, 0.0);
  for (std::size_t lag = 0; lag < 13; ++lag)
    for (std::size_t n = lag; n < x.size(); ++n) r[lag] += x[n] * x[n - lag];
  for (double& v : r) v /= static_cast<double>(x.size());

  LevinsonResult res = levinson_durbin(r, 12);
  REQUIRE(res.reflection.size() == 12);
  for (double k : res.reflection) {
    REQUIRE(k > -1.0);
    REQUIRE(k < 1.0);
  }
  REQUIRE(res.gain > 0.0);

  // The solution actually solves the normal equations: sum_k a_k r[|m-k|] = -r[m].
  for (std::size_t m = 1; m <= 12; ++m) {
    double acc = 0.0;
    for (std::size_t k = 1; k <= 12; ++k)
      acc += res.lpc[k] * r[static_cast<std::size_t>(std::abs(static_cast<long long>(m) -
                                                              static_cast<long long>(k)))];
    REQUIRE(acc == Catch::Approx(-r[m]).margin(1e-9));
  }
}

TEST_CASE("levinson_durbin: degenerate autocorrelation is a numeric error") {
  std::vector<double> r(13, 0.0);
  REQUIRE_THROWS_AS(levinson_durbin(r, 12), NumericError);
}

TEST_CASE("rasta_plp: width 13 and the 38-LLD ledger") {
  FrameSpec spec = raw_spec(400, 160, 16000, 512);
  std::mt19937_64 rng(37);
  std::normal_distribution<double> dist(0.0, 0.1);
  std::vector<double> noise(16000);
  for (double& v : noise) v = dist(rng);
  PowerSpectrogram ps = power_spectrum(make_clip(std::move(noise), 16000), spec);
  Matrix plp = rasta_plp(ps);
  REQUIRE(plp.cols == 13);
  REQUIRE(plp.rows == ps.frames());
  REQUIRE(kMfccCount + kPlpCount == 38);
  for (double v : plp.data) REQUIRE(std::isfinite(v));
}

TEST_CASE("rasta_plp: needs at least five frames") {
  FrameSpec spec = raw_spec(400, 160, 16000, 512);
  PowerSpectrogram ps = power_spectrum(make_clip(std::vector<double>(800, 0.1), 16000), spec);
  REQUIRE(ps.frames() < 5);
  REQUIRE_THROWS_AS(rasta_plp(ps), PreconditionError);
}

TEST_CASE("rasta_plp autocorrelation: closed form equals a literal IDFT") {
  // The per-frame autocorrelation inside rasta_plp uses a cosine closed form
  // of the inverse DFT of the symmetric band spectrum; verify against a
  // direct complex-exponential sum.
  std::mt19937_64 rng(97);
  std::uniform_real_distribution<double> dist(0.1, 5.0);
  const std::size_t m = 21;
  std::vector<double> spec(m);
  for (double& v : spec) v = dist(rng);

  const std::size_t n = 2 * (m - 1);
  std::vector<std::complex<double>> sym(n);
  for (std::size_t j = 0; j < m; ++j) sym[j] = spec[j];
  for (std::size_t j = m; j < n; ++j) sym[j] = spec[n - j];

  for (std::size_t k = 0; k <= 12; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      acc += sym[j] * std::polar(1.0, 2.0 * std::numbers::pi *
                                          static_cast<double>(j * k) / static_cast<double>(n));
    double direct = acc.real() / static_cast<double>(n);

    double closed = spec[0] + spec[m - 1] * std::cos(std::numbers::pi * static_cast<double>(k));
    for (std::size_t j = 1; j + 1 < m; ++j)
      closed += 2.0 * spec[j] *
                std::cos(2.0 * std::numbers::pi * static_cast<double>(j * k) /
                         static_cast<double>(n));
    closed /= static_cast<double>(n);
    REQUIRE(direct == Catch::Approx(closed).margin(1e-12));
  }
}

TEST_CASE("bark filterbank: band count rule") {
  REQUIRE(bark_band_count(24000.0) ==
          static_cast<std::size_t>(std::ceil(hz_to_bark(24000.0))) + 1);
  REQUIRE(bark_band_count(8000.0) ==
          static_cast<std::size_t>(std::ceil(hz_to_bark(8000.0))) + 1);
}

TEST_CASE("deltas: constant, linear, and random contours") {
  SECTION("constant contour has zero delta") {
    Matrix x(10, 3, 4.2);
    Matrix d = deltas(x, 2);
    for (double v : d.data) REQUIRE(v == 0.0);
  }
  SECTION("linear contour: interior delta equals the slope exactly") {
    const double a = 0.25;  // power of two keeps the arithmetic exact
    Matrix x(12, 1);
    for (std::size_t t = 0; t < 12; ++t) x.at(t, 0) = a * static_cast<double>(t);
    Matrix d = deltas(x, 2);
    for (std::size_t t = 2; t < 10; ++t) REQUIRE(d.at(t, 0) == a);
  }
  SECTION("random contour matches the brute-force formula") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    Matrix x(10, 4);
    for (double& v : x.data) v = dist(rng);
    std::vector<std::vector<double>> rows(10, std::vector<double>(4));
    for (std::size_t t = 0; t < 10; ++t)
      for (std::size_t c = 0; c < 4; ++c) rows[t][c] = x.at(t, c);
    auto expected = oracles::naive_deltas(rows, 2);
    Matrix d = deltas(x, 2);
    for (std::size_t t = 0; t < 10; ++t)
      for (std::size_t c = 0; c < 4; ++c)
        REQUIRE(d.at(t, c) == Catch::Approx(expected[t][c]).margin(1e-15));
  }
}

TEST_CASE("extract_lld: 114 columns, deterministic, tail-sample invariant") {
  FrameSpec spec = raw_spec(400, 160, 16000, 512);
  std::mt19937_64 rng(43);
  std::normal_distribution<double> dist(0.0, 0.1);
  std::vector<double> samples(1680);  // 9 frames
  for (double& v : samples) v = dist(rng);
  AudioClip clip = make_clip(samples, 16000);

  LldMatrix a = extract_lld(clip, spec);
  REQUIRE(a.dims() == 114);
  REQUIRE(a.frames() == 9);

  LldMatrix b = extract_lld(clip, spec);
  REQUIRE(a.values.data == b.values.data);  // bit-identical

  // One appended sample falls outside the last frame.
  AudioClip longer = clip;
  longer.samples.push_back(0.0);
  LldMatrix c = extract_lld(longer, spec);
  REQUIRE(c.frames() == a.frames());
  REQUIRE(c.values.data == a.values.data);
}

TEST_CASE("extract_lld: shifting by one hop shifts rows by one") {
  FrameSpec spec = raw_spec(400, 160, 16000, 512);
  spec.preemphasis = 0.97;
  std::mt19937_64 rng(47);
  std::normal_distribution<double> dist(0.0, 0.1);
  std::vector<double> samples(16000 * 7);
  for (double& v : samples) v = dist(rng);
  AudioClip clip = make_clip(samples, 16000);

  AudioClip shifted = clip;
  shifted.samples.erase(shifted.samples.begin(), shifted.samples.begin() + 160);

  LldMatrix full = extract_lld(clip, spec);
  LldMatrix shift = extract_lld(shifted, spec);
  REQUIRE(shift.frames() == full.frames() - 1);

  // Interior rows, far enough from the start for the RASTA IIR transient to
  // decay and clear of delta edge replication at both ends.
  for (std::size_t t = 450; t + 10 < shift.frames(); ++t)
    for (std::size_t k = 0; k < 114; ++k)
      REQUIRE(shift.values.at(t, k) == Catch::Approx(full.values.at(t + 1, k)).margin(1e-9));
}

TEST_CASE("lld column names: layout ledger") {
  std::vector<std::string> names = lld_column_names();
  REQUIRE(names.size() == 114);
  REQUIRE(names[0] == "mfcc0");
  REQUIRE(names[24] == "mfcc24");
  REQUIRE(names[25] == "plpcep0");
  REQUIRE(names[37] == "plpcep12");
  REQUIRE(names[38] == "d_mfcc0");
  REQUIRE(names[76] == "dd_mfcc0");
  REQUIRE(names[113] == "dd_plpcep12");
}
