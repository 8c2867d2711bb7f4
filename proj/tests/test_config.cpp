#include "warpq/config.hpp"

#include "support/wav_writer.hpp"

#include "doctest.h"

#include <fstream>

using namespace warpq;

TEST_CASE("parse_step_set") {
  const StepSet s = parse_step_set("1,1; 3,2 ;1,3");
  REQUIRE(s.steps.size() == 3);
  CHECK(s.steps[1].rows == 3);
  CHECK(s.steps[1].cols == 2);
  CHECK(format_step_set(s) == "1,1;3,2;1,3");

  const StepSet w = parse_step_set("1,1,2,0.5");
  CHECK(w.steps[0].mul == 2.0);
  CHECK(w.steps[0].add == 0.5);
  CHECK(format_step_set(w) == "1,1,2,0.5");

  CHECK_THROWS_AS(parse_step_set(""), Error);
  CHECK_THROWS_AS(parse_step_set("1"), Error);
  CHECK_THROWS_AS(parse_step_set("a,b"), Error);
  CHECK_THROWS_AS(parse_step_set("-1,2"), Error);
}

TEST_CASE("apply_config_value and config files") {
  WarpQConfig c;
  apply_config_value(c, "patch_frames", "80");
  apply_config_value(c, " patch_overlap ", "0.25");
  apply_config_value(c, "vad_aggressiveness", "3");
  apply_config_value(c, "f_max", "4000");
  CHECK(c.patch_frames == 80);
  CHECK(c.patch_overlap == 0.25);
  CHECK(c.vad.aggressiveness == 3);
  CHECK(c.f_max_hz == 4000.0);
  CHECK(c.patch_stride() == 60);
  CHECK_THROWS_AS(apply_config_value(c, "nope", "1"), Error);
  CHECK_THROWS_AS(apply_config_value(c, "hop_ms", "4ms"), Error);

  const auto dir = testing::scratch_dir("config");
  std::ofstream(dir / "c.txt") << "# comment\n\nhop_ms=8\nwindow_ms = 32\n";
  WarpQConfig d;
  apply_config_file(d, dir / "c.txt");
  CHECK(d.hop_ms == 8);
  CHECK(d.mfcc_options().frames.hop_samples == 128);

  std::ofstream(dir / "bad.txt") << "hop_ms 8\n";
  CHECK_THROWS_AS(apply_config_file(d, dir / "bad.txt"), Error);
  CHECK_THROWS_AS(apply_config_file(d, dir / "missing.txt"), Error);
}
