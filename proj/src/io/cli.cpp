#include "cssk/io/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include "cssk/core/parallel.hpp"
#include "cssk/core/rng.hpp"
#include "cssk/eval/roc.hpp"
#include "cssk/io/config.hpp"
#include "cssk/io/csv.hpp"
#include "cssk/io/formats.hpp"
#include "cssk/maskselect/maskselect.hpp"
#include "cssk/sensing/operator.hpp"
#include "cssk/sim/scene.hpp"
#include "cssk/solvers/greedy.hpp"
#include "cssk/solvers/ist.hpp"
#include "cssk/solvers/ncg.hpp"

namespace cssk::io {

namespace {

namespace fs = std::filesystem;

struct Flags {
  std::string config_path;
  uint64_t seed = 0;
  int frames = 0;
  int block = 0;
  std::vector<std::string> methods;
  std::string out;

  int candidates = 32;
  std::string metric = "fa";
  std::string mask_path;
  std::string measurements_path;
};

void add_common(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON run configuration file");
  cmd->add_option("--seed", flags.seed, "global seed override");
  cmd->add_option("--frames", flags.frames, "frame count override");
  cmd->add_option("--block", flags.block, "square mask block size override");
  cmd->add_option("--method", flags.methods, "method override (repeatable)");
  cmd->add_option("--out", flags.out, "output directory override");
}

RunConfig resolve_config(const CLI::App* cmd, const Flags& flags) {
  RunConfig c = flags.config_path.empty() ? parse_run_config("{}")
                                          : load_run_config(flags.config_path);
  if (cmd->count("--seed") > 0) {
    c.seed = flags.seed;
    c.scene.seed = flags.seed;
    c.mask.seed = flags.seed;
  }
  if (cmd->count("--frames") > 0) c.frames = flags.frames;
  if (cmd->count("--block") > 0) c.mask.block_w = c.mask.block_h = flags.block;
  if (cmd->count("--method") > 0) c.methods = flags.methods;
  if (cmd->count("--out") > 0) c.out_dir = flags.out;
  c.validate();
  return c;
}

fs::path ensure_out_dir(const RunConfig& c) {
  fs::path dir(c.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) raise(ErrorCode::IoError, "cannot create output directory '" + c.out_dir + "'");
  return dir;
}

Mask build_mask(const RunConfig& c) {
  return maskselect::generate_mask(c.scene.width, c.scene.height, c.mask.block_w,
                                   c.mask.block_h, c.mask.kind, c.mask.seed);
}

eval::CompareConfig build_compare_config(const RunConfig& c, bool need_mask) {
  eval::CompareConfig cc;
  if (need_mask) cc.mask = build_mask(c);
  cc.frontend = c.frontend;
  cc.solver = c.solver;
  cc.greedy = c.greedy;
  cc.eval = c.eval;
  cc.measure_noise_sigma = c.measure_noise_sigma;
  cc.seed = c.seed;
  return cc;
}

bool needs_mask(const std::vector<std::string>& methods) {
  for (const std::string& m : methods) {
    if (eval::parse_method(m) != eval::Method::ConventionalFullRes) return true;
  }
  return false;
}

Image mask_image(const Mask& mask) {
  Image img(mask.width, mask.height);
  for (size_t i = 0; i < mask.open.size(); ++i) img.data[i] = mask.open[i] ? 1.0 : 0.0;
  return img;
}

std::string frame_file_name(int index) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "measurements-%03d.csms", index);
  return buf;
}

void write_targets_csv(const fs::path& path, const std::vector<sim::Scene>& scenes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) raise(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  f << "frame,row,col,amplitude,dy,dx\n";
  for (size_t i = 0; i < scenes.size(); ++i) {
    const PointSource& t = scenes[i].truth.target;
    f << i << ',' << t.row << ',' << t.col << ',' << format_double(t.amplitude) << ','
      << format_double(t.dy) << ',' << format_double(t.dx) << '\n';
  }
  if (!f) raise(ErrorCode::IoError, "short write to '" + path.string() + "'");
}

int cmd_gen_scene(const RunConfig& c) {
  fs::path dir = ensure_out_dir(c);
  std::vector<sim::Scene> scenes = sim::generate_sequence(c.scene, c.frames, c.target_jitter);
  std::vector<Image> frames;
  frames.reserve(scenes.size());
  for (const sim::Scene& s : scenes) frames.push_back(s.image);
  write_frames((dir / "frames.cssk").string(), frames);
  write_truth_csv((dir / "truth.csv").string(), scenes.front().truth);
  write_targets_csv(dir / "targets.csv", scenes);
  write_pgm((dir / "preview.pgm").string(), frames.front());
  std::cout << "wrote " << frames.size() << " frame(s) to " << (dir / "frames.cssk").string()
            << "\n";
  return 0;
}

int cmd_gen_mask(const RunConfig& c) {
  fs::path dir = ensure_out_dir(c);
  Mask mask = build_mask(c);
  write_mask((dir / "mask.csmk").string(), mask);
  write_pgm((dir / "mask.pgm").string(), mask_image(mask));
  std::cout << "wrote mask (open fraction " << format_double(mask.open_fraction()) << ") to "
            << (dir / "mask.csmk").string() << "\n";
  return 0;
}

int cmd_select_mask(const RunConfig& c, const Flags& flags) {
  fs::path dir = ensure_out_dir(c);
  if (flags.candidates < 1) raise(ErrorCode::ConfigError, "--candidates must be >= 1");
  maskselect::MaskMetric metric;
  if (flags.metric == "fa") {
    metric = maskselect::MaskMetric::FaCount;
  } else if (flags.metric == "mse") {
    metric = maskselect::MaskMetric::ReconMse;
  } else {
    raise(ErrorCode::ConfigError, "--metric must be fa or mse");
  }

  sim::Scene calib = sim::generate_scene(c.scene, 0);
  std::vector<uint64_t> seeds(flags.candidates);
  for (int i = 0; i < flags.candidates; ++i) {
    seeds[i] = derive_seed(c.seed, "mask.candidate", static_cast<uint64_t>(i));
  }

  std::vector<maskselect::MaskScore> scores(seeds.size());
  parallel_for(seeds.size(), [&](size_t i) {
    Mask mask = maskselect::generate_mask(c.scene.width, c.scene.height, c.mask.block_w,
                                          c.mask.block_h, c.mask.kind, seeds[i]);
    scores[i] = metric == maskselect::MaskMetric::FaCount
                    ? maskselect::score_mask_fa(mask, calib.image, calib.truth, c.frontend)
                    : maskselect::score_mask_mse(mask, calib.image);
  });
  write_mask_scores_csv((dir / "mask_scores.csv").string(), scores);

  maskselect::MaskSelectConfig select_config;
  select_config.block_w = c.mask.block_w;
  select_config.block_h = c.mask.block_h;
  select_config.kind = c.mask.kind;
  select_config.metric = metric;
  select_config.frontend = c.frontend;
  auto [best_mask, best_score] =
      maskselect::select_best_mask(seeds, calib.image, calib.truth, select_config);
  write_mask((dir / "best_mask.csmk").string(), best_mask);
  write_pgm((dir / "best_mask.pgm").string(), mask_image(best_mask));

  std::cout << "best mask seed " << best_score.mask_seed;
  if (best_score.fa_count) std::cout << " fa_count " << *best_score.fa_count;
  if (best_score.recon_mse) std::cout << " recon_mse " << format_double(*best_score.recon_mse);
  std::cout << "\n";
  return 0;
}

int cmd_measure(const RunConfig& c) {
  fs::path dir = ensure_out_dir(c);
  std::vector<sim::Scene> scenes = sim::generate_sequence(c.scene, c.frames, c.target_jitter);
  Mask mask = build_mask(c);
  sensing::MeasurementOperator op(mask);
  write_mask((dir / "mask.csmk").string(), mask);

  std::vector<Image> frames;
  frames.reserve(scenes.size());
  for (const sim::Scene& s : scenes) frames.push_back(s.image);
  write_frames((dir / "frames.cssk").string(), frames);
  write_truth_csv((dir / "truth.csv").string(), scenes.front().truth);

  for (size_t f = 0; f < scenes.size(); ++f) {
    MeasurementSet meas = op.forward(scenes[f].image, c.measure_noise_sigma,
                                     derive_seed(c.seed, "eval.frame", f));
    write_measurements((dir / frame_file_name(static_cast<int>(f))).string(), meas,
                       mask.width, mask.height);
  }
  std::cout << "wrote " << scenes.size() << " measurement file(s) ("
            << op.measurement_count() << " samples each) to " << dir.string() << "\n";
  return 0;
}

int cmd_reconstruct(const RunConfig& c, const Flags& flags) {
  fs::path dir = ensure_out_dir(c);
  const std::string method_name = c.methods.empty() ? "cs-zerofill" : c.methods.front();
  const eval::Method method = eval::parse_method(method_name);
  if (method == eval::Method::ConventionalFullRes) {
    raise(ErrorCode::UnknownMethod, "conventional-full-res has no reconstruction step");
  }

  const std::string mask_path =
      flags.mask_path.empty() ? (dir / "mask.csmk").string() : flags.mask_path;
  const std::string meas_path = flags.measurements_path.empty()
                                    ? (dir / frame_file_name(0)).string()
                                    : flags.measurements_path;
  Mask mask = read_mask(mask_path);
  StoredMeasurements stored = read_measurements(meas_path);
  validate_pairing(stored.width, stored.height, mask, stored.meas);
  sensing::MeasurementOperator op(mask);

  Image recon;
  switch (method) {
    case eval::Method::CsZerofill:
      recon = op.zero_fill_reconstruct(stored.meas);
      break;
    case eval::Method::CsNcgTv: {
      solvers::NcgResult result = solvers::ncg_solve(stored.meas, op, c.frontend, c.solver);
      write_trace_csv((dir / "trace.csv").string(), result.trace);
      recon = std::move(result.x);
      break;
    }
    case eval::Method::CsIst: {
      solvers::IstResult result = solvers::ist_solve(stored.meas, op, c.solver);
      write_trace_csv((dir / "trace.csv").string(), result.trace);
      recon = std::move(result.x);
      break;
    }
    case eval::Method::CsGreedy: {
      solvers::GreedyResult result = solvers::greedy_detect(stored.meas, op, c.frontend, c.greedy);
      std::vector<std::vector<Exceedance>> per_frame = {result.detections};
      write_exceedances_csv((dir / "detections.csv").string(), per_frame);
      recon = op.zero_fill_reconstruct(result.residual);
      break;
    }
    default:
      raise(ErrorCode::UnknownMethod, "unknown reconstruction method");
  }

  write_frames((dir / "recon.cssk").string(), {recon});
  write_pgm((dir / "recon.pgm").string(), recon);
  std::cout << "wrote " << method_name << " reconstruction to "
            << (dir / "recon.cssk").string() << "\n";
  return 0;
}

int cmd_detect(const RunConfig& c) {
  fs::path dir = ensure_out_dir(c);
  if (c.methods.empty()) raise(ErrorCode::UnknownMethod, "empty method list");
  const std::string method_name = c.methods.front();
  const eval::Method method = eval::parse_method(method_name);

  std::vector<sim::Scene> scenes = sim::generate_sequence(c.scene, c.frames, c.target_jitter);
  eval::CompareConfig cc = build_compare_config(c, method != eval::Method::ConventionalFullRes);
  eval::FramePipeline pipeline = eval::make_pipeline(method, cc);

  std::vector<std::vector<Exceedance>> per_frame(scenes.size());
  parallel_for(
      scenes.size(),
      [&](size_t f) {
        std::vector<Exceedance> xcds = pipeline(scenes[f].image, static_cast<int>(f));
        std::erase_if(xcds, [&](const Exceedance& x) { return x.score < c.frontend.threshold; });
        per_frame[f] = std::move(xcds);
      },
      c.eval.max_threads < 0 ? 0u : static_cast<unsigned>(c.eval.max_threads));
  write_exceedances_csv((dir / "exceedances.csv").string(), per_frame);

  std::ofstream summary(dir / "summary.csv", std::ios::binary | std::ios::trunc);
  if (!summary) raise(ErrorCode::IoError, "cannot open summary.csv for writing");
  summary << "frame,method,detected,xcds_above_target\n";
  for (size_t f = 0; f < scenes.size(); ++f) {
    auto above = eval::xcds_above_target(per_frame[f], scenes[f].truth, c.eval.match_radius);
    summary << f << ',' << method_name << ',' << (above.has_value() ? 1 : 0) << ',';
    if (above) summary << *above;
    summary << '\n';
  }
  if (!summary) raise(ErrorCode::IoError, "short write to summary.csv");
  std::cout << "wrote exceedances for " << scenes.size() << " frame(s) to "
            << (dir / "exceedances.csv").string() << "\n";
  return 0;
}

void write_method_previews(const RunConfig& c, const eval::CompareConfig& cc,
                           const sim::Scene& frame0, const fs::path& dir) {
  frontend::FrontendParams capture_all = c.frontend;
  capture_all.threshold = std::numeric_limits<double>::lowest();

  for (const std::string& name : c.methods) {
    const eval::Method method = eval::parse_method(name);
    Image preview;
    if (method == eval::Method::ConventionalFullRes) {
      preview = frontend_pipeline(frame0.image, capture_all).norm_img;
    } else {
      sensing::MeasurementOperator op(cc.mask);
      MeasurementSet y = op.forward(frame0.image, cc.measure_noise_sigma,
                                    derive_seed(cc.seed, "eval.frame", 0));
      switch (method) {
        case eval::Method::CsZerofill:
          preview = op.zero_fill_reconstruct(y);
          break;
        case eval::Method::CsGreedy:
          preview = op.zero_fill_reconstruct(
              solvers::greedy_detect(y, op, cc.frontend, cc.greedy).residual);
          break;
        case eval::Method::CsNcgTv:
          preview = solvers::ncg_solve(y, op, cc.frontend, cc.solver).x;
          break;
        case eval::Method::CsIst:
          preview = solvers::ist_solve(y, op, cc.solver).x;
          break;
        default:
          continue;
      }
    }
    write_pgm((dir / ("preview-" + name + ".pgm")).string(), preview);
  }
}

int cmd_compare(const RunConfig& c, bool roc_only_first_method, bool timing_only) {
  fs::path dir = ensure_out_dir(c);
  std::vector<std::string> methods = c.methods;
  if (roc_only_first_method && methods.size() > 1) methods.resize(1);
  if (methods.empty()) raise(ErrorCode::UnknownMethod, "empty method list");

  std::vector<sim::Scene> scenes = sim::generate_sequence(c.scene, c.frames, c.target_jitter);
  eval::CompareConfig cc = build_compare_config(c, needs_mask(methods));
  eval::CompareReport report = eval::compare_methods(scenes, methods, cc);

  write_timing_csv((dir / "timing.csv").string(), report);
  if (!timing_only) {
    write_roc_csv((dir / "roc.csv").string(), report);
    write_pgm((dir / "preview-frame.pgm").string(), scenes.front().image);
    RunConfig pc = c;
    pc.methods = methods;
    write_method_previews(pc, cc, scenes.front(), dir);
  }

  for (const eval::MethodReport& mr : report.methods) {
    std::cout << mr.method << ": " << format_double(mr.wall_seconds) << " s over "
              << report.frame_count << " frame(s)\n";
  }
  return 0;
}

}  // namespace

int run_subcommand(int argc, const char* const* argv) {
  CLI::App app{"compressive-sensing point-target detection toolkit"};
  app.require_subcommand(1);
  Flags flags;

  CLI::App* gen_scene = app.add_subcommand("gen-scene", "render synthetic frames");
  add_common(gen_scene, flags);

  CLI::App* gen_mask = app.add_subcommand("gen-mask", "generate a sampling mask");
  add_common(gen_mask, flags);

  CLI::App* select_mask =
      app.add_subcommand("select-mask", "pick the best mask from a candidate pool");
  add_common(select_mask, flags);
  select_mask->add_option("--candidates", flags.candidates, "candidate pool size");
  select_mask->add_option("--metric", flags.metric, "selection metric: fa or mse");

  CLI::App* measure = app.add_subcommand("measure", "write masked Fourier measurements");
  add_common(measure, flags);

  CLI::App* reconstruct =
      app.add_subcommand("reconstruct", "reconstruct an image from measurements");
  add_common(reconstruct, flags);
  reconstruct->add_option("--mask", flags.mask_path, "mask file (default out/mask.csmk)");
  reconstruct->add_option("--measurements", flags.measurements_path,
                          "measurement file (default out/measurements-000.csms)");

  CLI::App* detect = app.add_subcommand("detect", "run one method's detection pass");
  add_common(detect, flags);

  CLI::App* roc = app.add_subcommand("roc", "ROC curve for the first configured method");
  add_common(roc, flags);

  CLI::App* compare = app.add_subcommand("compare", "ROC comparison across methods");
  add_common(compare, flags);

  CLI::App* bench = app.add_subcommand("bench", "timing comparison across methods");
  add_common(bench, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    const RunConfig c = resolve_config(active, flags);
    if (active == gen_scene) return cmd_gen_scene(c);
    if (active == gen_mask) return cmd_gen_mask(c);
    if (active == select_mask) return cmd_select_mask(c, flags);
    if (active == measure) return cmd_measure(c);
    if (active == reconstruct) return cmd_reconstruct(c, flags);
    if (active == detect) return cmd_detect(c);
    if (active == roc) return cmd_compare(c, true, false);
    if (active == compare) return cmd_compare(c, false, false);
    if (active == bench) return cmd_compare(c, false, true);
    raise(ErrorCode::ConfigError, "no subcommand selected");
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.code() == ErrorCode::ConfigError ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace cssk::io
