#include "cssk/io/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace cssk::io {

namespace {

using nlohmann::json;

void parse_psf(const json& j, sim::PsfModel& p) {
  p.kernel_radius = j.value("kernel_radius", p.kernel_radius);
  p.sigma = j.value("sigma", p.sigma);
}

json psf_json(const sim::PsfModel& p) {
  return json{{"kernel_radius", p.kernel_radius}, {"sigma", p.sigma}};
}

MaskKind parse_kind(const std::string& name) {
  if (name == "one-per-block") return MaskKind::OnePerBlock;
  if (name == "bernoulli") return MaskKind::Bernoulli;
  raise(ErrorCode::ConfigError, "unknown mask kind '" + name + "'");
}

std::string kind_name(MaskKind kind) {
  return kind == MaskKind::OnePerBlock ? "one-per-block" : "bernoulli";
}

RunConfig parse_json(const json& j) {
  RunConfig c;
  c.seed = j.value("seed", c.seed);
  c.out_dir = j.value("out_dir", c.out_dir);
  c.frames = j.value("frames", c.frames);
  c.target_jitter = j.value("target_jitter", c.target_jitter);
  c.measure_noise_sigma = j.value("measure_noise_sigma", c.measure_noise_sigma);
  if (j.contains("methods")) c.methods = j.at("methods").get<std::vector<std::string>>();

  c.scene.seed = c.seed;
  if (j.contains("scene")) {
    const json& s = j.at("scene");
    c.scene.width = s.value("width", c.scene.width);
    c.scene.height = s.value("height", c.scene.height);
    c.scene.background_level = s.value("background_level", c.scene.background_level);
    c.scene.horizon_row = s.value("horizon_row", c.scene.horizon_row);
    c.scene.glint_count = s.value("glint_count", c.scene.glint_count);
    c.scene.glint_amp_lo = s.value("glint_amp_lo", c.scene.glint_amp_lo);
    c.scene.glint_amp_hi = s.value("glint_amp_hi", c.scene.glint_amp_hi);
    c.scene.target_amp = s.value("target_amp", c.scene.target_amp);
    c.scene.target_row = s.value("target_row", c.scene.target_row);
    c.scene.target_col = s.value("target_col", c.scene.target_col);
    c.scene.target_dy = s.value("target_dy", c.scene.target_dy);
    c.scene.target_dx = s.value("target_dx", c.scene.target_dx);
    c.scene.read_noise_sigma = s.value("read_noise_sigma", c.scene.read_noise_sigma);
    if (s.contains("psf")) parse_psf(s.at("psf"), c.scene.psf);
    c.scene.seed = s.value("seed", c.scene.seed);
  }

  c.mask.seed = c.seed;
  if (j.contains("mask")) {
    const json& m = j.at("mask");
    c.mask.block_w = m.value("block_w", c.mask.block_w);
    c.mask.block_h = m.value("block_h", c.mask.block_h);
    if (m.contains("kind")) c.mask.kind = parse_kind(m.at("kind").get<std::string>());
    c.mask.seed = m.value("seed", c.mask.seed);
  }

  if (j.contains("frontend")) {
    const json& fe = j.at("frontend");
    c.frontend.demean_len = fe.value("demean_len", c.frontend.demean_len);
    if (fe.contains("psf")) parse_psf(fe.at("psf"), c.frontend.psf);
    c.frontend.var_window = fe.value("var_window", c.frontend.var_window);
    c.frontend.var_guard = fe.value("var_guard", c.frontend.var_guard);
    c.frontend.var_floor = fe.value("var_floor", c.frontend.var_floor);
    c.frontend.threshold = fe.value("threshold", c.frontend.threshold);
  }

  if (j.contains("solver")) {
    const json& sp = j.at("solver");
    c.solver.lambda_sparse = sp.value("lambda_sparse", c.solver.lambda_sparse);
    c.solver.lambda_tv = sp.value("lambda_tv", c.solver.lambda_tv);
    c.solver.epsilon_data = sp.value("epsilon_data", c.solver.epsilon_data);
    c.solver.smooth_mu = sp.value("smooth_mu", c.solver.smooth_mu);
    c.solver.max_iters = sp.value("max_iters", c.solver.max_iters);
    c.solver.grad_tol = sp.value("grad_tol", c.solver.grad_tol);
    c.solver.alpha0 = sp.value("alpha0", c.solver.alpha0);
    c.solver.backtrack_factor = sp.value("backtrack_factor", c.solver.backtrack_factor);
    c.solver.max_backtracks = sp.value("max_backtracks", c.solver.max_backtracks);
  }

  if (j.contains("greedy")) {
    const json& g = j.at("greedy");
    c.greedy.group_size = g.value("group_size", c.greedy.group_size);
    c.greedy.max_rounds = g.value("max_rounds", c.greedy.max_rounds);
    if (g.contains("stop_threshold") && !g.at("stop_threshold").is_null()) {
      c.greedy.stop_threshold = g.at("stop_threshold").get<double>();
    }
    if (g.contains("psf")) parse_psf(g.at("psf"), c.greedy.subtract_psf);
  }

  if (j.contains("eval")) {
    const json& e = j.at("eval");
    c.eval.match_radius = e.value("match_radius", c.eval.match_radius);
    c.eval.threshold_count = e.value("threshold_count", c.eval.threshold_count);
    c.eval.max_threads = e.value("max_threads", c.eval.max_threads);
    if (e.contains("thresholds")) {
      c.eval.thresholds = e.at("thresholds").get<std::vector<double>>();
    }
  }
  return c;
}

}  // namespace

void RunConfig::validate() const {
  if (frames < 1) raise(ErrorCode::ConfigError, "frames must be >= 1");
  if (target_jitter < 0.0 || target_jitter >= 1.0) {
    raise(ErrorCode::ConfigError, "target_jitter must lie in [0, 1)");
  }
  if (measure_noise_sigma < 0.0) {
    raise(ErrorCode::ConfigError, "measure_noise_sigma must be >= 0");
  }
  if (out_dir.empty()) raise(ErrorCode::ConfigError, "out_dir must not be empty");
  try {
    scene.validate();
    frontend.validate();
    solver.validate();
    greedy.validate();
    eval.validate();
    if (mask.block_w < 1 || mask.block_h < 1) {
      raise(ErrorCode::ValidationError, "mask blocks must be >= 1");
    }
    for (const std::string& m : methods) eval::parse_method(m);
  } catch (const Error& e) {
    raise(ErrorCode::ConfigError, e.what());
  }
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
    RunConfig c = parse_json(j);
    c.validate();
    return c;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    raise(ErrorCode::ConfigError, e.what());
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) raise(ErrorCode::ConfigError, "cannot open config '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_run_config(buf.str());
}

std::string run_config_to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  j["frames"] = c.frames;
  j["target_jitter"] = c.target_jitter;
  j["measure_noise_sigma"] = c.measure_noise_sigma;
  j["methods"] = c.methods;
  j["scene"] = json{{"width", c.scene.width},
                    {"height", c.scene.height},
                    {"background_level", c.scene.background_level},
                    {"horizon_row", c.scene.horizon_row},
                    {"glint_count", c.scene.glint_count},
                    {"glint_amp_lo", c.scene.glint_amp_lo},
                    {"glint_amp_hi", c.scene.glint_amp_hi},
                    {"target_amp", c.scene.target_amp},
                    {"target_row", c.scene.target_row},
                    {"target_col", c.scene.target_col},
                    {"target_dy", c.scene.target_dy},
                    {"target_dx", c.scene.target_dx},
                    {"read_noise_sigma", c.scene.read_noise_sigma},
                    {"psf", psf_json(c.scene.psf)},
                    {"seed", c.scene.seed}};
  j["mask"] = json{{"block_w", c.mask.block_w},
                   {"block_h", c.mask.block_h},
                   {"kind", kind_name(c.mask.kind)},
                   {"seed", c.mask.seed}};
  j["frontend"] = json{{"demean_len", c.frontend.demean_len},
                       {"psf", psf_json(c.frontend.psf)},
                       {"var_window", c.frontend.var_window},
                       {"var_guard", c.frontend.var_guard},
                       {"var_floor", c.frontend.var_floor},
                       {"threshold", c.frontend.threshold}};
  j["solver"] = json{{"lambda_sparse", c.solver.lambda_sparse},
                     {"lambda_tv", c.solver.lambda_tv},
                     {"epsilon_data", c.solver.epsilon_data},
                     {"smooth_mu", c.solver.smooth_mu},
                     {"max_iters", c.solver.max_iters},
                     {"grad_tol", c.solver.grad_tol},
                     {"alpha0", c.solver.alpha0},
                     {"backtrack_factor", c.solver.backtrack_factor},
                     {"max_backtracks", c.solver.max_backtracks}};
  j["greedy"] = json{{"group_size", c.greedy.group_size},
                     {"max_rounds", c.greedy.max_rounds},
                     {"psf", psf_json(c.greedy.subtract_psf)}};
  if (c.greedy.stop_threshold) {
    j["greedy"]["stop_threshold"] = *c.greedy.stop_threshold;
  } else {
    j["greedy"]["stop_threshold"] = nullptr;
  }
  j["eval"] = json{{"match_radius", c.eval.match_radius},
                   {"threshold_count", c.eval.threshold_count},
                   {"max_threads", c.eval.max_threads},
                   {"thresholds", c.eval.thresholds}};
  return j.dump(2) + "\n";
}

void save_run_config(const RunConfig& config, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) raise(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  f << run_config_to_json(config);
  if (!f) raise(ErrorCode::IoError, "short write to '" + path + "'");
}

}  // namespace cssk::io
