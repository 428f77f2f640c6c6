#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cssk/core/rng.hpp"
#include "cssk/io/cli.hpp"
#include "cssk/io/config.hpp"
#include "cssk/io/csv.hpp"
#include "cssk/io/formats.hpp"
#include "cssk/maskselect/maskselect.hpp"

using namespace cssk;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<uint64_t> counter{std::random_device{}()};
    path = fs::temp_directory_path() / ("cssk-test-" + std::to_string(counter.fetch_add(1)));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << bytes;
  REQUIRE(f.good());
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoError;
}

int run_cli(std::vector<const char*> argv) {
  argv.insert(argv.begin(), "cssk");
  return io::run_subcommand(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("frame stacks survive a write/read cycle at float precision") {
  TempDir tmp;
  Rng rng(5);
  std::vector<Image> frames(2, Image(16, 8));
  for (auto& img : frames) {
    for (auto& v : img.data) v = rng.normal() * 100.0;
  }
  const std::string path = tmp.file("frames.cssk");
  io::write_frames(path, frames);

  std::vector<Image> back = io::read_frames(path);
  REQUIRE(back.size() == 2);
  for (size_t f = 0; f < 2; ++f) {
    CHECK(back[f].width == 16);
    CHECK(back[f].height == 8);
    for (size_t i = 0; i < frames[f].data.size(); ++i) {
      CHECK(back[f].data[i] == static_cast<double>(static_cast<float>(frames[f].data[i])));
    }
  }

  const std::string again = tmp.file("again.cssk");
  io::write_frames(again, back);
  CHECK(slurp(path) == slurp(again));

  CHECK_THROWS_AS(io::write_frames(tmp.file("none.cssk"), {}), Error);
}

TEST_CASE("frame files reject tampering") {
  TempDir tmp;
  const std::string path = tmp.file("frames.cssk");
  io::write_frames(path, {Image(8, 8, std::vector<double>(64, 1.5))});
  const std::string good = slurp(path);

  std::string bad = good;
  bad.replace(0, 4, "XXXX");
  spit(path, bad);
  CHECK(code_of([&] { io::read_frames(path); }) == ErrorCode::BadMagic);

  bad = good;
  bad[4] = 9;
  spit(path, bad);
  CHECK(code_of([&] { io::read_frames(path); }) == ErrorCode::UnsupportedVersion);

  spit(path, good.substr(0, good.size() - 3));
  CHECK(code_of([&] { io::read_frames(path); }) == ErrorCode::TruncatedFile);

  spit(path, good + "z");
  CHECK(code_of([&] { io::read_frames(path); }) == ErrorCode::ValidationError);

  CHECK_THROWS_AS(io::read_frames(tmp.file("missing.cssk")), Error);
}

TEST_CASE("masks round-trip bit-exactly, even at full sensor size") {
  TempDir tmp;
  Mask big = maskselect::generate_mask(2560, 512, 4, 4, MaskKind::OnePerBlock, 99);
  const std::string path = tmp.file("mask.csmk");
  io::write_mask(path, big);
  Mask back = io::read_mask(path);
  CHECK(back == big);

  const std::string again = tmp.file("again.csmk");
  io::write_mask(again, back);
  CHECK(slurp(path) == slurp(again));
}

TEST_CASE("a flipped mask bit no longer satisfies its block structure") {
  TempDir tmp;
  const std::string path = tmp.file("mask.csmk");
  io::write_mask(path, maskselect::generate_mask(64, 64, 2, 2, MaskKind::OnePerBlock, 7));
  std::string bytes = slurp(path);
  bytes[27] = static_cast<char>(bytes[27] ^ 1);  // first bitmap byte, position (0,0)
  spit(path, bytes);
  CHECK(code_of([&] { io::read_mask(path); }) == ErrorCode::ValidationError);
}

TEST_CASE("measurements round-trip exactly") {
  TempDir tmp;
  Rng rng(11);
  MeasurementSet meas;
  meas.mask_id = 0xfeedbeef12345678ull;
  meas.noise_sigma = 0.25;
  for (int i = 0; i < 10; ++i) meas.values.push_back({rng.normal(), rng.normal()});

  const std::string path = tmp.file("m.csms");
  io::write_measurements(path, meas, 8, 8);
  io::StoredMeasurements back = io::read_measurements(path);
  CHECK(back.width == 8);
  CHECK(back.height == 8);
  CHECK(back.meas.mask_id == meas.mask_id);
  CHECK(back.meas.noise_sigma == meas.noise_sigma);
  REQUIRE(back.meas.values.size() == meas.values.size());
  for (size_t i = 0; i < meas.values.size(); ++i) CHECK(back.meas.values[i] == meas.values[i]);

  MeasurementSet fat = meas;
  fat.values.resize(5);
  CHECK_THROWS_AS(io::write_measurements(tmp.file("fat.csms"), fat, 2, 2), Error);

  // shrink the stored count: the leftover pairs become trailing garbage
  std::string bytes = slurp(path);
  bytes[30] = static_cast<char>(bytes[30] - 1);
  spit(path, bytes);
  CHECK(code_of([&] { io::read_measurements(path); }) == ErrorCode::ValidationError);
}

TEST_CASE("pgm previews stretch to the full gray range") {
  TempDir tmp;
  const std::string path = tmp.file("img.pgm");
  io::write_pgm(path, Image(2, 2, {0.0, 1.0, 2.0, 4.0}));
  const std::string want = std::string("P5\n2 2\n255\n") + '\0' + '\x40' + char(0x80) + '\xff';
  CHECK(slurp(path) == want);

  io::write_pgm(path, Image(2, 2, {3.0, 3.0, 3.0, 3.0}));
  CHECK(slurp(path) == std::string("P5\n2 2\n255\n") + '\0' + '\0' + '\0' + '\0');
}

TEST_CASE("doubles print in shortest round-trip form") {
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(1.0) == "1");
  CHECK(io::format_double(-2.5) == "-2.5");
  for (double v : {1.0 / 3.0, 1e-300, 12345.6789, 6.02214076e23, -0.0}) {
    CHECK(std::strtod(io::format_double(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("csv writers emit the documented tables") {
  TempDir tmp;

  eval::CompareReport report;
  report.frame_count = 3;
  eval::MethodReport mr;
  mr.method = "conventional-full-res";
  mr.roc = {{4.0, 1, 2}, {2.0, 3, 9}};
  mr.wall_seconds = 0.5;
  report.methods.push_back(mr);
  io::write_roc_csv(tmp.file("roc.csv"), report);
  CHECK(slurp(tmp.file("roc.csv")) ==
        "threshold,detections,frames,false_alarms,method\n"
        "4,1,3,2,conventional-full-res\n"
        "2,3,3,9,conventional-full-res\n");

  io::write_timing_csv(tmp.file("timing.csv"), report);
  CHECK(slurp(tmp.file("timing.csv")) ==
        "method,frames,total_seconds,per_frame_seconds\n"
        "conventional-full-res,3,0.5," + io::format_double(0.5 / 3) + "\n");

  io::write_trace_csv(tmp.file("trace.csv"), {{0, 1.5, 0.25}, {1, 1.0, 0.125}});
  CHECK(slurp(tmp.file("trace.csv")) ==
        "iter,objective,gradient_norm\n0,1.5,0.25\n1,1,0.125\n");

  std::vector<std::vector<Exceedance>> per_frame = {{{5, 6, 2.5}}, {}};
  io::write_exceedances_csv(tmp.file("x.csv"), per_frame);
  CHECK(slurp(tmp.file("x.csv")) == "frame,rank,row,col,score\n0,0,5,6,2.5\n");

  SceneTruth truth;
  truth.target = {30, 40, 8.5, 0.0, 0.0};
  truth.clutter = {{1, 2, 3.0, 0.0, 0.0}};
  io::write_truth_csv(tmp.file("truth.csv"), truth);
  CHECK(slurp(tmp.file("truth.csv")) ==
        "kind,row,col,amplitude,dy,dx\ntarget,30,40,8.5,0,0\nclutter,1,2,3,0,0\n");

  std::vector<maskselect::MaskScore> scores(2);
  scores[0] = {7, 3, std::nullopt};
  scores[1] = {9, std::nullopt, 0.5};
  io::write_mask_scores_csv(tmp.file("scores.csv"), scores);
  CHECK(slurp(tmp.file("scores.csv")) == "mask_seed,fa_count,recon_mse\n7,3,\n9,,0.5\n");
}

TEST_CASE("an empty config produces the documented defaults") {
  io::RunConfig c = io::parse_run_config("{}");
  CHECK(c.seed == 1);
  CHECK(c.frames == 1);
  CHECK(c.out_dir == "out");
  CHECK(c.scene.width == 640);
  CHECK(c.scene.height == 128);
  CHECK(c.scene.seed == 1);
  CHECK(c.mask.seed == 1);
  CHECK(c.mask.block_w == 2);
  REQUIRE(c.methods.size() == 2);
  CHECK(c.methods[0] == "conventional-full-res");
  CHECK(c.methods[1] == "cs-zerofill");
  CHECK(!c.greedy.stop_threshold.has_value());
}

TEST_CASE("the global seed drives scene and mask seeds unless overridden") {
  io::RunConfig c = io::parse_run_config(R"({"seed": 9})");
  CHECK(c.seed == 9);
  CHECK(c.scene.seed == 9);
  CHECK(c.mask.seed == 9);

  c = io::parse_run_config(R"({"seed": 9, "scene": {"seed": 4}, "mask": {"seed": 2}})");
  CHECK(c.scene.seed == 4);
  CHECK(c.mask.seed == 2);
}

TEST_CASE("config parsing rejects malformed input") {
  CHECK(code_of([] { io::parse_run_config("{"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { io::parse_run_config(R"({"frames": 0})"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { io::parse_run_config(R"({"target_jitter": 1.5})"); }) ==
        ErrorCode::ConfigError);
  CHECK(code_of([] { io::parse_run_config(R"({"mask": {"kind": "plaid"}})"); }) ==
        ErrorCode::ConfigError);
  CHECK(code_of([] { io::parse_run_config(R"({"methods": ["nope"]})"); }) ==
        ErrorCode::ConfigError);
  CHECK(code_of([] { io::parse_run_config(R"({"frontend": {"var_guard": 4}})"); }) ==
        ErrorCode::ConfigError);
}

TEST_CASE("configs survive a json round trip") {
  io::RunConfig c = io::parse_run_config(
      R"({"seed": 6, "frames": 4, "target_jitter": 0.5,
          "mask": {"kind": "bernoulli", "block_w": 4, "block_h": 4},
          "greedy": {"stop_threshold": 2.5},
          "eval": {"thresholds": [9.0, 3.0, 1.0]}})");
  io::RunConfig back = io::parse_run_config(io::run_config_to_json(c));
  CHECK(back.seed == c.seed);
  CHECK(back.frames == c.frames);
  CHECK(back.target_jitter == c.target_jitter);
  CHECK(back.mask.kind == MaskKind::Bernoulli);
  CHECK(back.mask.block_w == 4);
  REQUIRE(back.greedy.stop_threshold.has_value());
  CHECK(*back.greedy.stop_threshold == 2.5);
  CHECK(back.eval.thresholds == c.eval.thresholds);
  CHECK(io::run_config_to_json(back) == io::run_config_to_json(c));
}

TEST_CASE("cli usage errors exit with 2") {
  CHECK(run_cli({}) == 2);
  CHECK(run_cli({"no-such-command"}) == 2);
  CHECK(run_cli({"gen-scene", "--no-such-flag"}) == 2);
  CHECK(run_cli({"gen-scene", "--config", "/no/such/file.json"}) == 2);
  CHECK(run_cli({"--help"}) == 0);
}

TEST_CASE("gen-mask is reproducible from the command line") {
  TempDir a;
  TempDir b;
  CHECK(run_cli({"gen-mask", "--seed", "7", "--block", "4", "--out", a.path.string().c_str()}) ==
        0);
  CHECK(run_cli({"gen-mask", "--seed", "7", "--block", "4", "--out", b.path.string().c_str()}) ==
        0);
  CHECK(slurp(a.file("mask.csmk")) == slurp(b.file("mask.csmk")));

  Mask m = io::read_mask(a.file("mask.csmk"));
  CHECK(m.block_w == 4);
  CHECK(m.seed == 7);
  CHECK(fs::exists(a.file("mask.pgm")));
}

TEST_CASE("a small comparison reruns byte-identically") {
  TempDir tmp;
  const std::string cfg = tmp.file("run.json");
  spit(cfg, R"({
    "seed": 3,
    "frames": 2,
    "methods": ["conventional-full-res", "cs-zerofill"],
    "scene": {"width": 64, "height": 64, "horizon_row": 32, "glint_count": 3,
              "target_row": 20, "target_col": 30, "target_amp": 40.0},
    "eval": {"threshold_count": 8}
  })");

  TempDir a;
  TempDir b;
  CHECK(run_cli({"compare", "--config", cfg.c_str(), "--out", a.path.string().c_str()}) == 0);
  CHECK(run_cli({"compare", "--config", cfg.c_str(), "--out", b.path.string().c_str()}) == 0);
  CHECK(slurp(a.file("roc.csv")) == slurp(b.file("roc.csv")));
  CHECK(!slurp(a.file("roc.csv")).empty());
  CHECK(fs::exists(a.file("timing.csv")));
}

TEST_CASE("gen-scene writes frames the reader accepts") {
  TempDir tmp;
  const std::string cfg = tmp.file("run.json");
  spit(cfg, R"({"frames": 3, "scene": {"width": 64, "height": 64, "horizon_row": 32,
                "glint_count": 2, "target_row": 20, "target_col": 30}})");
  CHECK(run_cli({"gen-scene", "--config", cfg.c_str(), "--out", tmp.path.string().c_str()}) == 0);
  std::vector<Image> frames = io::read_frames(tmp.file("frames.cssk"));
  CHECK(frames.size() == 3);
  CHECK(frames[0].width == 64);
  CHECK(fs::exists(tmp.file("truth.csv")));
}
