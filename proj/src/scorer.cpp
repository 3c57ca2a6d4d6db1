#include "decam/scorer.hpp"

#include <cmath>
#include <condition_variable>
#include <mutex>
#include <string>

#include "decam/error.hpp"

namespace decam {
namespace {

void validate_request(const Scorer& scorer, std::span<const Image> batch) {
  if (batch.empty()) throw Error(ErrorKind::kInvalidArgument, "score request has an empty batch");
  const ImageShape& shape = batch.front().shape();
  for (const auto& img : batch) {
    if (img.shape() != shape) {
      throw Error(ErrorKind::kShapeMismatch, "score request mixes image shapes");
    }
  }
  if (auto expected = scorer.expected_shape(); expected && *expected != shape) {
    throw Error(ErrorKind::kShapeMismatch,
                "scorer expects " + std::to_string(expected->height) + "x" +
                    std::to_string(expected->width) + "x" + std::to_string(expected->channels) +
                    ", got " + std::to_string(shape.height) + "x" + std::to_string(shape.width) +
                    "x" + std::to_string(shape.channels));
  }
}

void validate_values(const std::vector<double>& values, std::size_t expected, const char* what) {
  if (values.size() != expected) {
    throw Error(ErrorKind::kScorerUnavailable, std::string(what) + ": scorer returned " +
                                                   std::to_string(values.size()) +
                                                   " values, expected " + std::to_string(expected));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorKind::kNonFiniteOutput,
                  std::string(what) + ": non-finite model output at index " + std::to_string(i));
    }
  }
}

class PooledScorer final : public Scorer {
 public:
  explicit PooledScorer(std::vector<std::unique_ptr<Scorer>> workers) : workers_(std::move(workers)) {
    if (workers_.empty()) throw Error(ErrorKind::kInvalidArgument, "scorer pool needs a worker");
    for (auto& w : workers_) idle_.push_back(w.get());
  }

  bool concurrent() const override { return true; }
  std::string identity() const override {
    return "pool(" + std::to_string(workers_.size()) + "x " + workers_.front()->identity() + ")";
  }
  std::optional<ImageShape> expected_shape() const override { return workers_.front()->expected_shape(); }
  std::optional<std::size_t> num_classes() const override { return workers_.front()->num_classes(); }

 protected:
  std::vector<double> do_score(std::span<const Image> batch, std::size_t class_index) override {
    Lease lease(*this);
    return lease.worker->score_batch({batch, class_index}).logits;
  }
  std::vector<double> do_score_all(std::span<const Image> batch) override {
    Lease lease(*this);
    return lease.worker->score_all(batch);
  }

 private:
  struct Lease {
    explicit Lease(PooledScorer& pool) : pool(pool) {
      std::unique_lock lock(pool.mu_);
      pool.cv_.wait(lock, [&] { return !pool.idle_.empty(); });
      worker = pool.idle_.back();
      pool.idle_.pop_back();
    }
    ~Lease() {
      {
        std::lock_guard lock(pool.mu_);
        pool.idle_.push_back(worker);
      }
      pool.cv_.notify_one();
    }
    PooledScorer& pool;
    Scorer* worker = nullptr;
  };

  std::vector<std::unique_ptr<Scorer>> workers_;
  std::vector<Scorer*> idle_;
  std::mutex mu_;
  std::condition_variable cv_;
};

}  // namespace

ScoreResponse Scorer::score_batch(const ScoreRequest& req) {
  validate_request(*this, req.batch);
  if (auto classes = num_classes(); classes && req.class_index >= *classes) {
    throw Error(ErrorKind::kInvalidArgument, "class index " + std::to_string(req.class_index) +
                                                 " out of range for " + std::to_string(*classes) +
                                                 " classes");
  }
  ScoreResponse resp{do_score(req.batch, req.class_index)};
  validate_values(resp.logits, req.batch.size(), identity().c_str());
  return resp;
}

std::vector<double> Scorer::score_all(std::span<const Image> batch) {
  const auto classes = num_classes();
  if (!classes) {
    throw Error(ErrorKind::kInvalidArgument, identity() + " does not expose per-class logits");
  }
  validate_request(*this, batch);
  auto values = do_score_all(batch);
  validate_values(values, batch.size() * *classes, identity().c_str());
  return values;
}

std::vector<double> Scorer::do_score_all(std::span<const Image>) {
  throw Error(ErrorKind::kInvalidArgument, identity() + " does not expose per-class logits");
}

std::unique_ptr<Scorer> make_pooled_scorer(std::vector<std::unique_ptr<Scorer>> workers) {
  return std::make_unique<PooledScorer>(std::move(workers));
}

}  // namespace decam
