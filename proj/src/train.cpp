#include "tmse/train.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "tmse/mel.hpp"
#include "tmse/rng.hpp"

namespace tmse {

namespace {

Tensor mel_weights_t(const MelFilterbank& fb) {
  Tensor w({fb.n_mels, fb.n_freq});
  for (int f = 0; f < fb.n_freq; ++f)
    for (int m = 0; m < fb.n_mels; ++m) w.at2(m, f) = fb.at(f, m);
  return w;
}

struct SignalLossNodes {
  int mel = -1;
  int sisnr = -1;
};

// wav_hat = istft(decompress(x0_hat)); mel is a sum of per-scale mean-L1
// terms against precomputed references, si-SDR follows the metric exactly.
SignalLossNodes build_signal_losses(ad::Tape& tape, int x0_hat, const TrainItem& item,
                                    const TrainConfig& cfg) {
  SignalLossNodes out;
  const int64_t n = static_cast<int64_t>(item.clean_wav.samples.size());
  const int raw = tape.decompress(x0_hat, cfg.comp);
  const int wav = tape.istft(raw, cfg.stft, n);

  if (cfg.weights.lambda_mel != 0.0) {
    int mel_total = -1;
    for (size_t j = 0; j < cfg.mel.scales.size(); ++j) {
      const StftConfig scfg = cfg.mel.scale_stft(static_cast<int>(j));
      const MelFilterbank fb = build_mel_filterbank(
          scfg.n_freq(), cfg.mel.scales[j].n_mels, item.clean_wav.sample_rate,
          item.clean_wav.sample_rate / 2.0);
      const int wt = tape.input(mel_weights_t(fb), false);
      const int mag = tape.cmag(tape.stft(wav, scfg));
      const int mel = tape.matmul(wt, mag);
      const int ref = tape.input(item.mel_refs[j], false);
      const int l1 = tape.mean_all(tape.unary(tape.sub(mel, ref), ad::Unary::Abs));
      mel_total = mel_total < 0 ? l1 : tape.add(mel_total, l1);
    }
    out.mel = mel_total;
  }

  if (cfg.weights.lambda_sisnr != 0.0) {
    Tensor rt({static_cast<int>(n)});
    double ref2 = 0;
    for (int64_t i = 0; i < n; ++i) {
      rt[i] = item.clean_wav.samples[static_cast<size_t>(i)];
      ref2 += rt[i] * rt[i];
    }
    const int ref = tape.input(std::move(rt), false);
    const int dot = tape.sum_all(tape.mul(wav, ref));
    const int a = tape.scale(dot, 1.0 / (ref2 + kSiSdrEps));
    const int target = tape.mul(ref, a);
    const int err = tape.sub(wav, target);
    const int t2 = tape.sum_all(tape.unary(target, ad::Unary::Square));
    const int e2 = tape.add_const(tape.sum_all(tape.unary(err, ad::Unary::Square)), kSiSdrEps);
    const int db = tape.scale(tape.unary(tape.div(t2, e2), ad::Unary::Log), 10.0 / std::log(10.0));
    out.sisnr = tape.scale(tape.clamp_max(db, kSiSdrCapDb), -1.0);
  }
  return out;
}

}  // namespace

TrainItem make_train_item(const Waveform& clean, const Waveform& noisy, const TrainConfig& cfg) {
  if (clean.samples.size() != noisy.samples.size())
    throw std::invalid_argument("make_train_item: clean/noisy length mismatch");
  TrainItem item;
  item.clean_wav = clean;
  item.x0_spec = compress_tensor(spectrogram_to_tensor(stft(clean, cfg.stft)), cfg.comp);
  item.x1_spec = compress_tensor(spectrogram_to_tensor(stft(noisy, cfg.stft)), cfg.comp);
  if (cfg.weights.lambda_mel != 0.0) {
    for (size_t j = 0; j < cfg.mel.scales.size(); ++j) {
      const StftConfig scfg = cfg.mel.scale_stft(static_cast<int>(j));
      const MelFilterbank fb = build_mel_filterbank(scfg.n_freq(), cfg.mel.scales[j].n_mels,
                                                    clean.sample_rate, clean.sample_rate / 2.0);
      const ComplexSpectrogram s = stft(clean, scfg);
      std::vector<double> mag(s.v.size());
      for (size_t i = 0; i < s.v.size(); ++i) mag[i] = std::abs(s.v[i]);
      const std::vector<double> mel = apply_mel(mag, s.n_freq, s.n_frames, fb);
      Tensor ref({fb.n_mels, s.n_frames});
      for (int64_t i = 0; i < ref.size(); ++i) ref[i] = mel[static_cast<size_t>(i)];
      item.mel_refs.push_back(std::move(ref));
    }
  }
  return item;
}

std::vector<EpochLog> train(std::vector<TrainItem>& items, const ProbabilityPath& path,
                            TrainablePredictor& predictor, const TrainConfig& cfg) {
  if (items.empty()) throw std::invalid_argument("train: empty dataset");
  if (!(cfg.t_eps < cfg.t_max)) throw std::invalid_argument("train: need t_eps < t_max");

  Pcg32 rng(cfg.seed, 0x7EA1);
  std::vector<Tensor*> params = predictor.parameters();
  std::vector<EpochLog> logs;
  logs.reserve(static_cast<size_t>(cfg.epochs));

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    EpochLog log;
    log.epoch = epoch;
    for (size_t step = 0; step < items.size(); ++step) {
      TrainItem& item = items[step];
      const double t = rng.uniform(cfg.t_eps, cfg.t_max);
      PerturbedSample ps = sample_perturbed(path, t, item.x0_spec, item.x1_spec, rng);

      ad::Tape tape;
      auto [x0_hat, param_ids] = predictor.build(tape, ps.x_t, item.x1_spec, t);
      const int x0c = tape.input(item.x0_spec, false);
      const int tm = tape.mean_all(tape.unary(tape.sub(x0_hat, x0c), ad::Unary::Square));

      int loss = tm;
      SignalLossNodes sig;
      if (cfg.weights.lambda_mel != 0.0 || cfg.weights.lambda_sisnr != 0.0) {
        sig = build_signal_losses(tape, x0_hat, item, cfg);
        if (sig.mel >= 0) loss = tape.add(loss, tape.scale(sig.mel, cfg.weights.lambda_mel));
        if (sig.sisnr >= 0) loss = tape.add(loss, tape.scale(sig.sisnr, cfg.weights.lambda_sisnr));
      }

      const double total = tape.val(loss)[0];
      if (!std::isfinite(total))
        throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch) +
                                 " step " + std::to_string(step));

      tape.backward(loss);
      for (size_t p = 0; p < params.size(); ++p) {
        const Tensor& g = tape.grad(param_ids[p]);
        Tensor& w = *params[p];
        for (int64_t i = 0; i < w.size(); ++i) w[i] -= cfg.lr * g[i];
      }

      log.tm += tape.val(tm)[0];
      if (sig.mel >= 0) log.mel += tape.val(sig.mel)[0];
      if (sig.sisnr >= 0) log.sisnr += tape.val(sig.sisnr)[0];
      log.total += total;
    }
    const double inv = 1.0 / static_cast<double>(items.size());
    log.tm *= inv;
    log.mel *= inv;
    log.sisnr *= inv;
    log.total *= inv;
    logs.push_back(log);
  }
  return logs;
}

void write_loss_csv(const std::vector<EpochLog>& logs, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_loss_csv: cannot open " + path);
  f << "epoch,loss_tm,loss_mel,loss_sisnr,loss_total\n";
  f.precision(12);
  for (const auto& l : logs)
    f << l.epoch << "," << l.tm << "," << l.mel << "," << l.sisnr << "," << l.total << "\n";
}

}  // namespace tmse
