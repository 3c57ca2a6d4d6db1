#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "commands.hpp"
#include "decam/aggregation.hpp"
#include "decam/kernels.hpp"
#include "decam/mask_genome.hpp"

namespace decam::cli {
namespace {

// Whole-grid evaluation of the rotated-ellipse inequality, kept apart from
// the bounded scan in rasterize().
bool brute_force_matches(const Individual& ind, int h, int w) {
  const BinaryMask mask = rasterize(ind, h, w);
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      bool inside = false;
      for (const auto& g : ind.genes) {
        const double a = std::abs(g.x1 - g.x0) / 2, b = std::abs(g.y1 - g.y0) / 2;
        const double dx = col + 0.5 - (g.x0 + g.x1) / 2, dy = row + 0.5 - (g.y0 + g.y1) / 2;
        const double u = std::cos(g.r) * dx + std::sin(g.r) * dy;
        const double v = -std::sin(g.r) * dx + std::cos(g.r) * dy;
        if ((u / a) * (u / a) + (v / b) * (v / b) <= 1.0) inside = true;
      }
      if (inside != (mask.at(row, col) != 0)) return false;
    }
  }
  return true;
}

bool check_rasterization(std::uint64_t seed) {
  Rng rng(seed);
  for (int i = 0; i < 300; ++i) {
    if (!brute_force_matches(random_individual(3, 64, 64, rng), 64, 64)) return false;
  }
  return true;
}

bool check_disc_oracle() {
  const Image image(ImageShape{24, 24, 1}, 0.5f);
  const Disc disc{12, 12, 6};
  auto oracle = make_disc_oracle(image, disc);
  BinaryMask ones(24, 24, 1), zeros(24, 24, 0), exact(24, 24, 0);
  for (int r = 0; r < 24; ++r)
    for (int c = 0; c < 24; ++c) exact.at(r, c) = disc.contains(r, c);
  const std::vector<BinaryMask> masks{ones, zeros, exact};
  const auto images = serial::apply_masks(image, masks);
  const auto logits = oracle->score_batch({images, 0}).logits;
  return logits[0] == 0.0 && logits[1] == 0.0 && logits[2] == 1.0;
}

bool check_recovery(std::uint64_t seed) {
  const Image image(ImageShape{24, 24, 1}, 0.5f);
  const Disc disc{12, 12, 6};
  auto oracle = make_disc_oracle(image, disc);
  DEConfig cfg;
  cfg.population = 60;
  cfg.max_iter = 80;
  cfg.alpha = 1.0;
  cfg.seed = seed;
  const auto run = evolve(image, *oracle, 0, cfg);
  const SaliencyMap sm = aggregate(select_candidates(run.population), 24, 24);
  double inside = 0.0, total = 0.0;
  for (int r = 0; r < 24; ++r) {
    for (int c = 0; c < 24; ++c) {
      total += sm.at(r, c);
      if (disc.contains(r, c)) inside += sm.at(r, c);
    }
  }
  return inside / total >= 0.6;
}

bool check_bridge_consistency(Scorer& bridge, std::uint64_t seed) {
  const ImageShape shape = *bridge.expected_shape();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> value(0.0f, 1.0f);
  std::vector<Image> batch;
  for (int i = 0; i < 3; ++i) {
    Image img(shape);
    for (float& v : img.data()) v = value(rng);
    batch.push_back(std::move(img));
  }
  const std::size_t classes = *bridge.num_classes();
  const auto all = bridge.score_all(batch);
  for (std::size_t c = 0; c < std::min<std::size_t>(classes, 3); ++c) {
    const auto logits = bridge.score_batch({batch, c}).logits;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (logits[i] != all[i * classes + c]) return false;
    }
  }
  return true;
}

}  // namespace

int cmd_selftest(const SelftestOptions& opts) {
  set_max_jobs(opts.jobs);
  int failures = 0;
  auto run = [&](const std::string& name, const std::function<bool()>& check) {
    bool ok = false;
    try {
      ok = check();
    } catch (const std::exception& e) {
      std::cout << name << ": " << e.what() << '\n';
    }
    std::cout << (ok ? "PASS " : "FAIL ") << name << '\n';
    if (!ok) ++failures;
  };

  run("rasterization matches brute force", [&] { return check_rasterization(opts.seed); });
  run("disc oracle closed form", [] { return check_disc_oracle(); });
  run("planted disc recovery", [&] { return check_recovery(opts.seed); });

  const bool want_bridge = opts.scorer.spec.rfind("bridge:", 0) == 0 ||
                           (opts.scorer.spec.empty() && std::getenv("DECAM_BRIDGE_CMD"));
  if (want_bridge) {
    run("bridge SCORE matches LOGITS_ALL", [&] {
      // The bridge dictates the shape; the image only matters for oracles.
      const auto resolved = resolve_scorer(opts.scorer, Image(ImageShape{20, 20, 1}, 1.0f));
      return check_bridge_consistency(*resolved.scorer, opts.seed);
    });
  }

  std::cout << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed")
            << '\n';
  return failures == 0 ? kExitOk : kExitDegenerate;
}

}  // namespace decam::cli
