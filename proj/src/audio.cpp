#include "warpq/audio.hpp"

#include "warpq/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace warpq {
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

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

struct FormatChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

double decode_sample(const unsigned char* p, const FormatChunk& fmt) {
  if (fmt.format == kFormatFloat) {
    float f;
    std::uint32_t bits = read_u32(p);
    std::memcpy(&f, &bits, sizeof f);
    return static_cast<double>(f);
  }
  if (fmt.bits == 16) return static_cast<std::int16_t>(read_u16(p)) / 32768.0;
  // 24-bit: sign-extend from bit 23.
  std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
  if (v & 0x800000) v -= 0x1000000;
  return v / 8388608.0;
}

}  // namespace

Waveform load_waveform(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorKind::kIo, "read failed: " + path.string());

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw Error(ErrorKind::kUnsupportedFormat, "not a RIFF/WAVE file: " + path.string());

  FormatChunk fmt;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::size_t len = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = std::min(len, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) throw Error(ErrorKind::kUnsupportedFormat, "truncated fmt chunk");
      const unsigned char* f = bytes.data() + body;
      fmt.format = read_u16(f);
      fmt.channels = read_u16(f + 2);
      fmt.sample_rate = read_u32(f + 4);
      fmt.bits = read_u16(f + 14);
      if (fmt.format == kFormatExtensible) {
        if (avail < 26) throw Error(ErrorKind::kUnsupportedFormat, "truncated extensible fmt");
        fmt.format = read_u16(f + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_len = avail;
    }
    pos = body + len + (len & 1);
  }

  if (!have_fmt) throw Error(ErrorKind::kUnsupportedFormat, "missing fmt chunk");
  if (!data) throw Error(ErrorKind::kUnsupportedFormat, "missing data chunk");
  const bool pcm_ok = fmt.format == kFormatPcm && (fmt.bits == 16 || fmt.bits == 24);
  const bool float_ok = fmt.format == kFormatFloat && fmt.bits == 32;
  if (!pcm_ok && !float_ok)
    throw Error(ErrorKind::kUnsupportedFormat,
                "unsupported encoding (format " + std::to_string(fmt.format) + ", " +
                    std::to_string(fmt.bits) + " bits)");
  if (fmt.channels < 1 || fmt.channels > 2)
    throw Error(ErrorKind::kUnsupportedFormat,
                "unsupported channel count " + std::to_string(fmt.channels));
  if (fmt.sample_rate == 0) throw Error(ErrorKind::kUnsupportedFormat, "zero sample rate");

  const std::size_t bytes_per_sample = fmt.bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
  const std::size_t frames = data_len / frame_bytes;
  if (frames == 0) throw Error(ErrorKind::kEmptyAudio, "no audio samples in " + path.string());

  Waveform w;
  w.sample_rate_hz = static_cast<int>(fmt.sample_rate);
  w.samples.resize(static_cast<Eigen::Index>(frames));
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < fmt.channels; ++c)
      acc += decode_sample(data + i * frame_bytes + c * bytes_per_sample, fmt);
    acc /= fmt.channels;
    if (!std::isfinite(acc))
      throw Error(ErrorKind::kUnsupportedFormat, "non-finite sample in " + path.string());
    w.samples(static_cast<Eigen::Index>(i)) = std::clamp(acc, -1.0, 1.0);
  }
  return w;
}

void save_waveform_pcm16(const std::filesystem::path& path, const Waveform& w) {
  if (w.sample_rate_hz <= 0) throw Error(ErrorKind::kInvalidArgument, "invalid sample rate");
  const auto n = static_cast<std::uint32_t>(w.samples.size());
  std::vector<unsigned char> out;
  out.reserve(44 + 2 * n);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + 2 * n);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate_hz));
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate_hz) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, 2 * n);
  for (Eigen::Index i = 0; i < w.samples.size(); ++i) {
    const long v = std::clamp(std::lround(w.samples(i) * 32768.0), -32768L, 32767L);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

}  // namespace warpq
