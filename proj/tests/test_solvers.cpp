#include <doctest.h>

#include <cmath>

#include "cssk/core/rng.hpp"
#include "cssk/maskselect/maskselect.hpp"
#include "cssk/sim/scene.hpp"
#include "cssk/solvers/greedy.hpp"
#include "cssk/solvers/ist.hpp"
#include "cssk/solvers/ncg.hpp"
#include "oracles.hpp"

using namespace cssk;
using namespace cssk::solvers;

namespace {

Image random_image(int w, int h, uint64_t seed) {
  Rng rng(seed);
  Image img(w, h);
  for (auto& v : img.data) v = rng.normal();
  return img;
}

Mask full_mask(int w, int h) {
  return maskselect::generate_mask(w, h, 1, 1, MaskKind::OnePerBlock, 0);
}

double l2(const Image& img) {
  double s = 0.0;
  for (double v : img.data) s += v * v;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("objective vanishes on an exact fit with priors off") {
  Mask full = full_mask(16, 16);
  sensing::MeasurementOperator op(full);
  Image x = random_image(16, 16, 5);
  MeasurementSet y = op.forward(x);

  SolverParams sp;
  sp.lambda_sparse = 0.0;
  sp.lambda_tv = 0.0;
  frontend::FrontendParams fp;
  fp.demean_len = 11;  // the default 21 taps would not fit a 16-wide frame

  auto ev = objective(x, y, op, fp, sp);
  CHECK(ev.value < 1e-15);
  CHECK(ev.data_term < 1e-15);
  CHECK(l2(ev.gradient) < 1e-7);

  MeasurementSet zero_y = op.forward(Image(16, 16));
  auto ez = objective(Image(16, 16), zero_y, op, fp, sp);
  CHECK(ez.value == 0.0);
}

TEST_CASE("analytic gradient matches central differences") {
  Mask mask = maskselect::generate_mask(16, 16, 2, 2, MaskKind::OnePerBlock, 11);
  sensing::MeasurementOperator op(mask);

  SolverParams sp;
  sp.lambda_sparse = 0.05;
  sp.lambda_tv = 0.05;
  sp.smooth_mu = 1e-2;

  frontend::FrontendParams fp;
  fp.demean_len = 11;

  for (uint64_t seed : {1u, 2u, 3u}) {
    Image scene = random_image(16, 16, seed);
    MeasurementSet y = op.forward(scene, 0.1, derive_seed(99, "grad-test", seed));
    Objective obj(op, y, fp, sp);

    Image x = random_image(16, 16, 100 + seed);
    auto ev = obj.value_and_gradient(x);
    Image fd = oracle::fd_gradient([&](const Image& p) { return obj.value(p); }, x, 1e-4);

    double num = 0.0;
    double den = 1.0;
    for (size_t i = 0; i < fd.data.size(); ++i) {
      num = std::max(num, std::abs(ev.gradient.data[i] - fd.data[i]));
      den = std::max(den, std::abs(fd.data[i]));
    }
    CHECK(num / den < 1e-4);
  }
}

TEST_CASE("ncg recovers the scene exactly through a full-open mask") {
  Mask full = full_mask(16, 16);
  sensing::MeasurementOperator op(full);
  Image scene = random_image(16, 16, 42);
  MeasurementSet y = op.forward(scene);

  SolverParams sp;
  sp.lambda_sparse = 0.0;
  sp.lambda_tv = 0.0;
  frontend::FrontendParams fp;
  fp.demean_len = 11;

  NcgResult res = ncg_solve(y, op, fp, sp);
  CHECK(oracle::max_abs_diff(res.x, scene) < 1e-6);
  CHECK(!res.line_search_failed);
}

TEST_CASE("ncg objective trace never rises") {
  frontend::FrontendParams fp;
  SolverParams sp;
  sp.lambda_sparse = 0.01;
  sp.lambda_tv = 0.01;
  sp.max_iters = 25;

  for (uint64_t seed = 0; seed < 5; ++seed) {
    Mask mask = maskselect::generate_mask(32, 32, 2, 2, MaskKind::OnePerBlock, seed);
    sensing::MeasurementOperator op(mask);
    Image scene = random_image(32, 32, 500 + seed);
    MeasurementSet y = op.forward(scene, 0.05, derive_seed(7, "ncg-trace", seed));

    NcgResult res = ncg_solve(y, op, fp, sp);
    REQUIRE(res.trace.size() >= 2);
    for (size_t i = 1; i < res.trace.size(); ++i) {
      CHECK(res.trace[i].objective <= res.trace[i - 1].objective + 1e-12);
    }
  }
}

TEST_CASE("ncg pulls a point source out of a sixteenth of the spectrum") {
  Mask mask = maskselect::generate_mask(64, 64, 4, 4, MaskKind::OnePerBlock, 3);
  sensing::MeasurementOperator op(mask);

  Image scene(64, 64);
  scene.at(30, 41) = 32.0;
  MeasurementSet y = op.forward(scene);

  SolverParams sp;
  sp.lambda_sparse = 0.05;
  sp.lambda_tv = 0.01;
  sp.max_iters = 40;
  frontend::FrontendParams fp;

  NcgResult res = ncg_solve(y, op, fp, sp);
  size_t argmax = 0;
  for (size_t i = 1; i < res.x.data.size(); ++i) {
    if (res.x.data[i] > res.x.data[argmax]) argmax = i;
  }
  CHECK(argmax == 30u * 64 + 41);
}

TEST_CASE("soft threshold shrinks toward zero") {
  CHECK(soft_threshold(2.0, 1.0) == doctest::Approx(1.0));
  CHECK(soft_threshold(-2.0, 1.0) == doctest::Approx(-1.0));
  CHECK(soft_threshold(0.5, 1.0) == 0.0);
  CHECK(soft_threshold(-0.5, 1.0) == 0.0);
  CHECK(soft_threshold(3.0, 0.0) == 3.0);

  Image img(2, 2);
  img.data = {2.0, -2.0, 0.5, -0.5};
  Image out = soft_threshold(img, 1.0);
  CHECK(out.data[0] == doctest::Approx(1.0));
  CHECK(out.data[1] == doctest::Approx(-1.0));
  CHECK(out.data[2] == 0.0);
  CHECK(out.data[3] == 0.0);

  CHECK_THROWS_AS(soft_threshold(1.0, -0.1), Error);
}

TEST_CASE("ist hits the full-open fixed point in a step or three") {
  Mask full = full_mask(16, 16);
  sensing::MeasurementOperator op(full);
  Image scene = random_image(16, 16, 8);
  MeasurementSet y = op.forward(scene);

  SolverParams sp;
  sp.lambda_sparse = 0.01;
  sp.max_iters = 50;

  IstResult res = ist_solve(y, op, sp);
  Image fixed = soft_threshold(op.adjoint(y), sp.lambda_sparse);
  CHECK(oracle::max_abs_diff(res.x, fixed) < 1e-8);
  CHECK(res.iterations <= 3);

  sp.lambda_sparse = 0.0;
  IstResult exact = ist_solve(y, op, sp);
  CHECK(oracle::max_abs_diff(exact.x, scene) < 1e-8);
}

TEST_CASE("ist surrogate trace never rises on an under-sampled mask") {
  Mask mask = maskselect::generate_mask(32, 32, 2, 2, MaskKind::Bernoulli, 13);
  sensing::MeasurementOperator op(mask);
  Image scene = random_image(32, 32, 21);
  MeasurementSet y = op.forward(scene, 0.05, 77);

  SolverParams sp;
  sp.lambda_sparse = 0.02;
  sp.max_iters = 60;

  IstResult res = ist_solve(y, op, sp);
  REQUIRE(res.trace.size() >= 2);
  for (size_t i = 1; i < res.trace.size(); ++i) {
    CHECK(res.trace[i].objective <= res.trace[i - 1].objective + 1e-12);
  }
  CHECK(res.trace.back().objective <= res.trace[1].objective);
}

TEST_CASE("greedy returns nothing for empty measurements") {
  Mask mask = maskselect::generate_mask(32, 32, 2, 2, MaskKind::OnePerBlock, 1);
  sensing::MeasurementOperator op(mask);
  MeasurementSet y = op.forward(Image(32, 32));

  frontend::FrontendParams fp;
  fp.threshold = 4.0;
  GreedyParams gp;

  GreedyResult res = greedy_detect(y, op, fp, gp);
  CHECK(res.detections.empty());
  CHECK(res.rounds == 0);
}

TEST_CASE("greedy pins a lone bright source") {
  Mask mask = maskselect::generate_mask(64, 64, 4, 4, MaskKind::OnePerBlock, 9);
  sensing::MeasurementOperator op(mask);

  sim::SceneParams p;
  p.width = 64;
  p.height = 64;
  p.background_level = 0.0;
  p.horizon_row = 32;
  p.glint_count = 0;
  p.target_amp = 120.0;
  p.target_row = 30;
  p.target_col = 40;
  p.read_noise_sigma = 0.0;
  MeasurementSet y = op.forward(sim::generate_scene(p).image);

  frontend::FrontendParams fp;
  fp.threshold = 4.0;
  GreedyParams gp;
  gp.subtract_psf = p.psf;

  GreedyResult res = greedy_detect(y, op, fp, gp);
  REQUIRE(!res.detections.empty());
  CHECK(res.detections[0].row == 30);
  CHECK(res.detections[0].col == 40);
}

TEST_CASE("greedy orders two sources by brightness and drains the residual") {
  Mask mask = maskselect::generate_mask(64, 64, 2, 2, MaskKind::OnePerBlock, 4);
  sensing::MeasurementOperator op(mask);

  sim::PsfModel psf{2, 0.7};
  Image kernel = sim::render_psf(psf, 0.0, 0.0);
  Image scene(64, 64);
  auto stamp = [&](int r0, int c0, double amp) {
    for (int i = 0; i < kernel.height; ++i) {
      for (int j = 0; j < kernel.width; ++j) {
        scene.at(r0 + i - 2, c0 + j - 2) += amp * kernel.at(i, j);
      }
    }
  };
  stamp(20, 20, 10.0);
  stamp(44, 50, 5.0);
  MeasurementSet y = op.forward(scene);

  frontend::FrontendParams fp;
  fp.threshold = 3.0;
  GreedyParams gp;
  gp.subtract_psf = psf;

  GreedyResult res = greedy_detect(y, op, fp, gp);
  REQUIRE(res.detections.size() >= 2);
  CHECK(res.detections[0].row == 20);
  CHECK(res.detections[0].col == 20);
  CHECK(res.detections[1].row == 44);
  CHECK(res.detections[1].col == 50);
  CHECK(res.detections[0].score > res.detections[1].score);

  REQUIRE(!res.residual_energy.empty());
  double prev = std::numeric_limits<double>::infinity();
  for (double e : res.residual_energy) {
    CHECK(e <= prev + 1e-9);
    prev = e;
  }
}
