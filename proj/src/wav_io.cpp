#include "tmse/wav_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace tmse {

namespace {

uint32_t rd_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t rd_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::vector<uint8_t>& v, uint32_t x) {
  v.push_back(static_cast<uint8_t>(x & 0xff));
  v.push_back(static_cast<uint8_t>((x >> 8) & 0xff));
  v.push_back(static_cast<uint8_t>((x >> 16) & 0xff));
  v.push_back(static_cast<uint8_t>((x >> 24) & 0xff));
}
void wr_u16(std::vector<uint8_t>& v, uint16_t x) {
  v.push_back(static_cast<uint8_t>(x & 0xff));
  v.push_back(static_cast<uint8_t>((x >> 8) & 0xff));
}

}  // namespace

Waveform load_wav(const std::string& path, ChannelPolicy policy) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_wav: cannot open " + path);
  std::vector<uint8_t> buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw std::runtime_error("load_wav: not a RIFF/WAVE file: " + path);

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const uint8_t* data = nullptr;
  uint32_t data_len = 0;
  bool have_fmt = false;

  size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const uint8_t* hdr = buf.data() + pos;
    uint32_t chunk_len = rd_u32(hdr + 4);
    size_t body = pos + 8;
    if (body + chunk_len > buf.size()) chunk_len = static_cast<uint32_t>(buf.size() - body);
    if (std::memcmp(hdr, "fmt ", 4) == 0 && chunk_len >= 16) {
      format = rd_u16(buf.data() + body);
      channels = rd_u16(buf.data() + body + 2);
      rate = rd_u32(buf.data() + body + 4);
      bits = rd_u16(buf.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = buf.data() + body;
      data_len = chunk_len;
    }
    pos = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }

  if (!have_fmt) throw std::runtime_error("load_wav: missing fmt chunk: " + path);
  if (!data) throw std::runtime_error("load_wav: missing data chunk: " + path);
  if (channels == 0 || rate == 0) throw std::runtime_error("load_wav: malformed fmt chunk: " + path);

  const bool pcm16 = (format == 1 && bits == 16);
  const bool f32 = (format == 3 && bits == 32);
  if (!pcm16 && !f32)
    throw std::runtime_error("load_wav: unsupported encoding (want PCM16 or float32): " + path);

  const uint32_t bytes_per = bits / 8;
  const uint32_t frame_bytes = bytes_per * channels;
  const uint32_t n_frames = data_len / frame_bytes;
  if (n_frames == 0) throw std::runtime_error("load_wav: empty data chunk: " + path);

  Waveform w;
  w.sample_rate = static_cast<int>(rate);
  w.samples.resize(n_frames);
  for (uint32_t i = 0; i < n_frames; ++i) {
    double acc = 0;
    const uint32_t n_used = (policy == ChannelPolicy::First) ? 1 : channels;
    for (uint32_t c = 0; c < n_used; ++c) {
      const uint8_t* p = data + static_cast<size_t>(i) * frame_bytes + c * bytes_per;
      if (pcm16) {
        int16_t s = static_cast<int16_t>(p[0] | (p[1] << 8));
        acc += static_cast<double>(s) / 32768.0;
      } else {
        float s;
        std::memcpy(&s, p, 4);
        acc += static_cast<double>(s);
      }
    }
    w.samples[i] = acc / n_used;
  }
  return w;
}

size_t save_wav(const Waveform& wave, const std::string& path, WavEncoding encoding) {
  for (double s : wave.samples)
    if (!std::isfinite(s)) throw std::invalid_argument("save_wav: non-finite sample");
  if (wave.sample_rate <= 0) throw std::invalid_argument("save_wav: sample_rate must be positive");

  const uint16_t bits = (encoding == WavEncoding::Pcm16) ? 16 : 32;
  const uint16_t format = (encoding == WavEncoding::Pcm16) ? 1 : 3;
  const uint32_t n = static_cast<uint32_t>(wave.samples.size());
  const uint32_t data_len = n * (bits / 8u);

  std::vector<uint8_t> out;
  out.reserve(44 + data_len);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  wr_u32(out, 36 + data_len);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  wr_u32(out, 16);
  wr_u16(out, format);
  wr_u16(out, 1);  // mono
  wr_u32(out, static_cast<uint32_t>(wave.sample_rate));
  wr_u32(out, static_cast<uint32_t>(wave.sample_rate) * (bits / 8u));
  wr_u16(out, bits / 8);
  wr_u16(out, bits);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  wr_u32(out, data_len);

  size_t clipped = 0;
  for (double s : wave.samples) {
    double c = s;
    if (c > 1.0) {
      c = 1.0;
      ++clipped;
    } else if (c < -1.0) {
      c = -1.0;
      ++clipped;
    }
    if (encoding == WavEncoding::Pcm16) {
      // round-to-nearest onto the 16-bit grid; +1.0 maps to 32767
      int v = static_cast<int>(std::lround(c * 32768.0));
      v = std::clamp(v, -32768, 32767);
      wr_u16(out, static_cast<uint16_t>(static_cast<int16_t>(v)));
    } else {
      float fv = static_cast<float>(c);
      uint8_t b[4];
      std::memcpy(b, &fv, 4);
      out.insert(out.end(), b, b + 4);
    }
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_wav: cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("save_wav: write failed: " + path);
  return clipped;
}

}  // namespace tmse
