#include "cssk/eval/roc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>

#include "cssk/core/parallel.hpp"
#include "cssk/core/rng.hpp"
#include "cssk/sensing/operator.hpp"

namespace cssk::eval {

void EvalConfig::validate() const {
  if (match_radius < 0) raise(ErrorCode::ValidationError, "match_radius must be >= 0");
  if (threshold_count < 1) raise(ErrorCode::ValidationError, "threshold_count must be >= 1");
  for (size_t i = 1; i < thresholds.size(); ++i) {
    if (!(thresholds[i] < thresholds[i - 1])) {
      raise(ErrorCode::ValidationError, "thresholds must be strictly descending");
    }
  }
}

namespace {

bool matches_target(const Exceedance& xcd, const SceneTruth& truth, int radius) {
  return std::abs(xcd.row - truth.target.row) <= radius &&
         std::abs(xcd.col - truth.target.col) <= radius;
}

}  // namespace

std::optional<long long> xcds_above_target(const std::vector<Exceedance>& xcds,
                                           const SceneTruth& truth, int match_radius) {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (const Exceedance& xcd : xcds) {
    if (matches_target(xcd, truth, match_radius)) {
      best = xcd.score;
      break;  // list is sorted descending, first match is the best
    }
  }
  if (std::isnan(best)) return std::nullopt;
  long long above = 0;
  for (const Exceedance& xcd : xcds) {
    if (xcd.score > best) ++above;
  }
  return above;
}

std::vector<double> auto_threshold_grid(std::vector<double> scores, int count) {
  if (count < 1) raise(ErrorCode::ValidationError, "threshold count must be >= 1");
  std::erase_if(scores, [](double s) { return !std::isfinite(s); });
  if (scores.empty()) return {0.0};
  std::sort(scores.begin(), scores.end());
  const double hi = scores.back();
  const double lo = scores[scores.size() / 2];

  std::vector<double> grid;
  grid.reserve(count);
  if (count == 1 || !(lo < hi)) {
    grid.push_back(hi);
  } else if (lo > 0.0) {
    const double ratio = lo / hi;
    for (int i = 0; i < count; ++i) {
      grid.push_back(hi * std::pow(ratio, static_cast<double>(i) / (count - 1)));
    }
  } else {
    const double step = (hi - lo) / (count - 1);
    for (int i = 0; i < count; ++i) grid.push_back(hi - step * i);
  }

  // Collapse numerically equal neighbors so the grid is strictly descending.
  std::vector<double> out;
  for (double t : grid) {
    if (out.empty() || t < out.back()) out.push_back(t);
  }
  return out;
}

namespace {

std::vector<std::vector<Exceedance>> run_pipeline(const std::vector<sim::Scene>& frames,
                                                  const FramePipeline& pipeline,
                                                  int max_threads) {
  std::vector<std::vector<Exceedance>> candidates(frames.size());
  parallel_for(
      frames.size(),
      [&](size_t f) { candidates[f] = pipeline(frames[f].image, static_cast<int>(f)); },
      max_threads < 0 ? 0u : static_cast<unsigned>(max_threads));
  return candidates;
}

std::vector<RocPoint> sweep(const std::vector<sim::Scene>& frames,
                            const std::vector<std::vector<Exceedance>>& candidates,
                            const std::vector<double>& thresholds, int match_radius) {
  const size_t n = frames.size();
  std::vector<double> target_score(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::vector<double>> fa_scores(n);
  for (size_t f = 0; f < n; ++f) {
    for (const Exceedance& xcd : candidates[f]) {
      if (matches_target(xcd, frames[f].truth, match_radius)) {
        if (std::isnan(target_score[f]) || xcd.score > target_score[f]) {
          target_score[f] = xcd.score;
        }
      } else {
        fa_scores[f].push_back(xcd.score);
      }
    }
    std::sort(fa_scores[f].begin(), fa_scores[f].end(), std::greater<>());
  }

  std::vector<RocPoint> roc;
  roc.reserve(thresholds.size());
  for (double t : thresholds) {
    RocPoint point;
    point.threshold = t;
    for (size_t f = 0; f < n; ++f) {
      if (!std::isnan(target_score[f]) && target_score[f] >= t) ++point.detections;
      auto first_below = std::lower_bound(fa_scores[f].begin(), fa_scores[f].end(), t,
                                          [](double s, double thr) { return s >= thr; });
      point.false_alarms += first_below - fa_scores[f].begin();
    }
    roc.push_back(point);
  }
  return roc;
}

std::vector<double> pooled_scores(const std::vector<std::vector<Exceedance>>& candidates) {
  std::vector<double> scores;
  for (const auto& list : candidates) {
    for (const Exceedance& xcd : list) scores.push_back(xcd.score);
  }
  return scores;
}

}  // namespace

std::vector<RocPoint> roc_curve(const std::vector<sim::Scene>& frames,
                                const FramePipeline& pipeline, const EvalConfig& config) {
  config.validate();
  if (frames.empty()) raise(ErrorCode::ValidationError, "roc_curve needs at least one frame");
  auto candidates = run_pipeline(frames, pipeline, config.max_threads);
  std::vector<double> thresholds = config.thresholds;
  if (thresholds.empty()) {
    thresholds = auto_threshold_grid(pooled_scores(candidates), config.threshold_count);
  }
  return sweep(frames, candidates, thresholds, config.match_radius);
}

Method parse_method(const std::string& name) {
  if (name == "conventional-full-res") return Method::ConventionalFullRes;
  if (name == "cs-zerofill") return Method::CsZerofill;
  if (name == "cs-greedy") return Method::CsGreedy;
  if (name == "cs-ncg-tv") return Method::CsNcgTv;
  if (name == "cs-ist") return Method::CsIst;
  raise(ErrorCode::UnknownMethod, "unknown method '" + name + "'");
}

std::string method_name(Method method) {
  switch (method) {
    case Method::ConventionalFullRes: return "conventional-full-res";
    case Method::CsZerofill: return "cs-zerofill";
    case Method::CsGreedy: return "cs-greedy";
    case Method::CsNcgTv: return "cs-ncg-tv";
    case Method::CsIst: return "cs-ist";
  }
  raise(ErrorCode::UnknownMethod, "unknown method enum value");
}

FramePipeline make_pipeline(Method method, const CompareConfig& config) {
  frontend::FrontendParams capture_all = config.frontend;
  capture_all.threshold = std::numeric_limits<double>::lowest();

  if (method == Method::ConventionalFullRes) {
    return [capture_all](const Image& frame, int) {
      return frontend_pipeline(frame, capture_all).xcds;
    };
  }

  auto op = std::make_shared<sensing::MeasurementOperator>(config.mask);
  const double noise = config.measure_noise_sigma;
  const uint64_t seed = config.seed;

  switch (method) {
    case Method::CsZerofill:
      return [op, capture_all, noise, seed](const Image& frame, int index) {
        MeasurementSet y =
            op->forward(frame, noise, derive_seed(seed, "eval.frame", index));
        return frontend_pipeline(op->zero_fill_reconstruct(y), capture_all).xcds;
      };
    case Method::CsGreedy: {
      frontend::FrontendParams fe = config.frontend;
      solvers::GreedyParams greedy = config.greedy;
      return [op, fe, greedy, noise, seed](const Image& frame, int index) {
        MeasurementSet y =
            op->forward(frame, noise, derive_seed(seed, "eval.frame", index));
        return solvers::greedy_detect(y, *op, fe, greedy).detections;
      };
    }
    case Method::CsNcgTv: {
      frontend::FrontendParams fe = config.frontend;
      solvers::SolverParams sp = config.solver;
      return [op, fe, sp, capture_all, noise, seed](const Image& frame, int index) {
        MeasurementSet y =
            op->forward(frame, noise, derive_seed(seed, "eval.frame", index));
        solvers::NcgResult result = solvers::ncg_solve(y, *op, fe, sp);
        return frontend_pipeline(result.x, capture_all).xcds;
      };
    }
    case Method::CsIst: {
      solvers::SolverParams sp = config.solver;
      return [op, sp, capture_all, noise, seed](const Image& frame, int index) {
        MeasurementSet y =
            op->forward(frame, noise, derive_seed(seed, "eval.frame", index));
        solvers::IstResult result = solvers::ist_solve(y, *op, sp);
        return frontend_pipeline(result.x, capture_all).xcds;
      };
    }
    default:
      raise(ErrorCode::UnknownMethod, "unknown method enum value");
  }
}

CompareReport compare_methods(const std::vector<sim::Scene>& frames,
                              const std::vector<std::string>& methods,
                              const CompareConfig& config) {
  if (methods.empty()) raise(ErrorCode::UnknownMethod, "empty method list");
  config.eval.validate();
  if (frames.empty()) {
    raise(ErrorCode::ValidationError, "compare_methods needs at least one frame");
  }

  std::vector<Method> parsed;
  parsed.reserve(methods.size());
  bool any_cs = false;
  for (const std::string& name : methods) {
    Method m = parse_method(name);
    parsed.push_back(m);
    any_cs = any_cs || m != Method::ConventionalFullRes;
  }
  if (any_cs) {
    config.mask.validate();
    if (config.mask.width != frames.front().image.width ||
        config.mask.height != frames.front().image.height) {
      raise(ErrorCode::DimensionMismatch, "mask dimensions do not match the frames");
    }
  }

  CompareReport report;
  report.frame_count = static_cast<int>(frames.size());

  std::vector<std::vector<std::vector<Exceedance>>> per_method(parsed.size());
  for (size_t m = 0; m < parsed.size(); ++m) {
    FramePipeline pipeline = make_pipeline(parsed[m], config);
    auto start = std::chrono::steady_clock::now();
    per_method[m] = run_pipeline(frames, pipeline, config.eval.max_threads);
    auto stop = std::chrono::steady_clock::now();
    MethodReport mr;
    mr.method = methods[m];
    mr.wall_seconds = std::chrono::duration<double>(stop - start).count();
    report.methods.push_back(std::move(mr));
  }

  report.thresholds = config.eval.thresholds;
  if (report.thresholds.empty()) {
    std::vector<double> scores;
    for (const auto& method_candidates : per_method) {
      std::vector<double> s = pooled_scores(method_candidates);
      scores.insert(scores.end(), s.begin(), s.end());
    }
    report.thresholds = auto_threshold_grid(std::move(scores), config.eval.threshold_count);
  }

  for (size_t m = 0; m < parsed.size(); ++m) {
    report.methods[m].roc =
        sweep(frames, per_method[m], report.thresholds, config.eval.match_radius);
  }
  return report;
}

}  // namespace cssk::eval
