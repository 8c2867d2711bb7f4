#include "warpq/audio.hpp"
#include "warpq/error.hpp"

#include "support/wav_writer.hpp"

#include "doctest.h"

using namespace warpq;
using namespace warpq::testing;

namespace {

ErrorKind load_error(const std::filesystem::path& p) {
  try {
    load_waveform(p);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected load_waveform to throw");
  return ErrorKind::kInternal;
}

}  // namespace

TEST_CASE("load_waveform: 16-bit mono scaling") {
  const auto dir = scratch_dir("audio16");
  write_bytes(dir / "a.wav", wav_bytes({1, 1, 16000, 16}, pcm16_payload({0, 16384, -32768})));
  const Waveform w = load_waveform(dir / "a.wav");
  CHECK(w.sample_rate_hz == 16000);
  REQUIRE(w.size() == 3);
  CHECK(w.samples(0) == 0.0);
  CHECK(w.samples(1) == 0.5);
  CHECK(w.samples(2) == -1.0);
}

TEST_CASE("load_waveform: stereo is averaged") {
  const auto dir = scratch_dir("stereo");
  write_bytes(dir / "s.wav", wav_bytes({3, 2, 44100, 32}, float_payload({0.2f, 0.4f})));
  const Waveform w = load_waveform(dir / "s.wav");
  REQUIRE(w.size() == 1);
  CHECK(w.samples(0) == doctest::Approx(0.3).epsilon(1e-7));
  CHECK(w.sample_rate_hz == 44100);
}

TEST_CASE("load_waveform: header rate passthrough") {
  const auto dir = scratch_dir("nb");
  write_bytes(dir / "nb.wav", wav_bytes({1, 1, 8000, 16}, pcm16_payload(std::vector<std::int16_t>(8000, 7))));
  const Waveform w = load_waveform(dir / "nb.wav");
  CHECK(w.size() == 8000);
  CHECK(w.sample_rate_hz == 8000);
}

TEST_CASE("load_waveform: 24-bit PCM") {
  const auto dir = scratch_dir("pcm24");
  write_bytes(dir / "p.wav", wav_bytes({1, 1, 48000, 24}, pcm24_payload({4194304, -8388608, -1})));
  const Waveform w = load_waveform(dir / "p.wav");
  REQUIRE(w.size() == 3);
  CHECK(w.samples(0) == 0.5);
  CHECK(w.samples(1) == -1.0);
  CHECK(w.samples(2) == -1.0 / 8388608.0);
}

TEST_CASE("load_waveform: float samples are clamped to [-1, 1]") {
  const auto dir = scratch_dir("float");
  write_bytes(dir / "f.wav", wav_bytes({3, 1, 16000, 32}, float_payload({1.5f, -0.25f})));
  const Waveform w = load_waveform(dir / "f.wav");
  CHECK(w.samples(0) == 1.0);
  CHECK(w.samples(1) == -0.25);
}

TEST_CASE("load_waveform: distinct error kinds") {
  const auto dir = scratch_dir("errors");
  CHECK(load_error(dir / "missing.wav") == ErrorKind::kIo);

  write_bytes(dir / "adpcm.wav", wav_bytes({2, 1, 16000, 4}, {1, 2, 3, 4}));
  CHECK(load_error(dir / "adpcm.wav") == ErrorKind::kUnsupportedFormat);

  write_bytes(dir / "pcm8.wav", wav_bytes({1, 1, 16000, 8}, {1, 2, 3, 4}));
  CHECK(load_error(dir / "pcm8.wav") == ErrorKind::kUnsupportedFormat);

  write_bytes(dir / "multi.wav", wav_bytes({1, 3, 16000, 16}, pcm16_payload({1, 2, 3})));
  CHECK(load_error(dir / "multi.wav") == ErrorKind::kUnsupportedFormat);

  write_bytes(dir / "empty.wav", wav_bytes({1, 1, 16000, 16}, {}));
  CHECK(load_error(dir / "empty.wav") == ErrorKind::kEmptyAudio);

  write_bytes(dir / "text.wav", {'h', 'e', 'l', 'l', 'o'});
  CHECK(load_error(dir / "text.wav") == ErrorKind::kUnsupportedFormat);
}

TEST_CASE("save_waveform_pcm16 round-trips through the decoder") {
  const auto dir = scratch_dir("save");
  Waveform w;
  w.sample_rate_hz = 22050;
  w.samples.resize(4);
  w.samples << 0.0, 0.5, -1.0, 0.25;
  save_waveform_pcm16(dir / "o.wav", w);
  const Waveform back = load_waveform(dir / "o.wav");
  CHECK(back.sample_rate_hz == 22050);
  CHECK(back.samples == w.samples);
}
