#include "tmse/synth.hpp"

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "tmse/fft.hpp"
#include "tmse/rng.hpp"

namespace tmse {

namespace {
constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

std::vector<double> white_noise(int64_t n, Pcg32& rng) {
  std::vector<double> x(static_cast<size_t>(n));
  for (auto& v : x) v = rng.next_normal();
  return x;
}

// -3 dB/octave shaping of white noise in the frequency domain (the DC bin
// is zeroed). n must be even.
std::vector<double> pink_noise(int64_t n, Pcg32& rng) {
  int64_t m = n + (n & 1);
  std::vector<double> w = white_noise(m, rng);
  auto bins = fft::rdft_onesided(w.data(), static_cast<int>(m));
  bins[0] = 0.0;
  for (size_t j = 1; j < bins.size(); ++j) bins[j] /= std::sqrt(static_cast<double>(j));
  auto shaped = fft::irdft_onesided(bins.data(), static_cast<int>(m));
  shaped.resize(static_cast<size_t>(n));
  return shaped;
}

double energy(const std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += v * v;
  return s;
}
}  // namespace

void SynthSpec::validate() const {
  if (n_utts < 1 || duration_s <= 0 || sample_rate < 1)
    throw std::invalid_argument("SynthSpec: bad sizes");
  if (min_harmonics < 1 || max_harmonics < min_harmonics)
    throw std::invalid_argument("SynthSpec: bad harmonic range");
  if (noise != "white" && noise != "pink")
    throw std::invalid_argument("SynthSpec: noise must be white or pink");
  if (snr_max_db < snr_min_db) throw std::invalid_argument("SynthSpec: snr range inverted");
}

std::vector<UttPair> generate(const SynthSpec& spec) {
  spec.validate();
  const int64_t n = static_cast<int64_t>(std::llround(spec.duration_s * spec.sample_rate));
  std::vector<UttPair> out;
  out.reserve(static_cast<size_t>(spec.n_utts));

  for (int u = 0; u < spec.n_utts; ++u) {
    // per-utterance derived stream keeps generation order-independent
    Pcg32 rng(spec.seed, 0x5CA1E000ULL + static_cast<uint64_t>(u));

    const int n_harm =
        spec.min_harmonics +
        static_cast<int>(rng.next_u32() % static_cast<uint32_t>(spec.max_harmonics - spec.min_harmonics + 1));
    const double f0 = rng.uniform(150.0, 400.0);
    const double am_rate = rng.uniform(1.0, 4.0);
    const double am_phase = rng.uniform(0.0, kTwoPi);

    std::vector<double> clean(static_cast<size_t>(n), 0.0);
    for (int h = 1; h <= n_harm; ++h) {
      const double amp = 1.0 / h;
      const double ph = rng.uniform(0.0, kTwoPi);
      const double w = kTwoPi * f0 * h / spec.sample_rate;
      for (int64_t i = 0; i < n; ++i)
        clean[static_cast<size_t>(i)] += amp * std::sin(w * static_cast<double>(i) + ph);
    }
    for (int64_t i = 0; i < n; ++i) {
      const double tsec = static_cast<double>(i) / spec.sample_rate;
      const double env = 0.55 + 0.45 * std::sin(kTwoPi * am_rate * tsec + am_phase);
      clean[static_cast<size_t>(i)] *= env;
    }
    // headroom so noisy mixtures at 0 dB stay inside [-1, 1]
    double peak = 0;
    for (double v : clean) peak = std::max(peak, std::fabs(v));
    if (peak > 0)
      for (auto& v : clean) v *= 0.2 / peak;

    const double snr_db = rng.uniform(spec.snr_min_db, spec.snr_max_db);
    std::vector<double> noise =
        spec.noise == "white" ? white_noise(n, rng) : pink_noise(n, rng);

    double gain = 0.0;
    if (snr_db < kInfiniteSnr) {
      const double e_clean = energy(clean);
      const double e_noise = energy(noise);
      if (e_noise > 0) gain = std::sqrt(e_clean / e_noise) * std::pow(10.0, -snr_db / 20.0);
    }

    UttPair pair;
    pair.snr_db = snr_db;
    pair.clean.sample_rate = spec.sample_rate;
    pair.clean.samples = clean;
    pair.noisy.sample_rate = spec.sample_rate;
    pair.noisy.samples.resize(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i)
      pair.noisy.samples[static_cast<size_t>(i)] =
          clean[static_cast<size_t>(i)] + gain * noise[static_cast<size_t>(i)];
    out.push_back(std::move(pair));
  }
  return out;
}

void dump_pairs(const std::vector<UttPair>& pairs, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "clean");
  fs::create_directories(fs::path(out_dir) / "noisy");
  for (size_t i = 0; i < pairs.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "utt%04zu.wav", i);
    save_wav(pairs[i].clean, (fs::path(out_dir) / "clean" / name).string());
    save_wav(pairs[i].noisy, (fs::path(out_dir) / "noisy" / name).string());
  }
}

}  // namespace tmse
