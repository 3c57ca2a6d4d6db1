#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <string>

#include "decam/scorer.hpp"

namespace decam {

struct BridgeOptions {
  std::string command;  // run through /bin/sh -c
  std::chrono::milliseconds timeout{60'000};
};

/// Scorer backed by a child process speaking the line + float32 protocol
/// on its stdin/stdout:
///
///   -> HELLO DECAM 1\n                  <- OK <H> <W> <C> <num_classes>\n
///   -> SCORE <n> <class>\n + floats      <- LOGITS <n>\n + n floats
///   -> LOGITS_ALL <n>\n + floats         <- LOGITS <n*classes>\n + floats
///
/// Payloads are little-endian float32, row-major, channels last. A reply
/// line starting with "ERR " aborts with its message. Calls are
/// serialized; use make_pooled_scorer over several bridges for parallel
/// batches.
class BridgeScorer final : public Scorer {
 public:
  explicit BridgeScorer(BridgeOptions options);
  ~BridgeScorer() override;

  BridgeScorer(const BridgeScorer&) = delete;
  BridgeScorer& operator=(const BridgeScorer&) = delete;

  bool concurrent() const override { return false; }
  std::string identity() const override;
  std::optional<ImageShape> expected_shape() const override;
  std::optional<std::size_t> num_classes() const override;

 protected:
  std::vector<double> do_score(std::span<const Image> batch, std::size_t class_index) override;
  std::vector<double> do_score_all(std::span<const Image> batch) override;

 private:
  struct Process;
  std::vector<double> exchange(const std::string& header, std::span<const Image> batch,
                               std::size_t expected);

  std::unique_ptr<Process> proc_;
  BridgeOptions options_;
  ImageShape shape_;
  std::size_t num_classes_ = 0;
};

}  // namespace decam
