#pragma once

#include <cstddef>
#include <mutex>
#include <string>
#include <vector>

#include "levelset/classifier.hpp"

namespace lsq {

// Classifier served by a child process over its stdin/stdout. Each request is
// one JSON line {"r": [...], "q": [...]}, each response one line {"label": k}
// with a 1-based k. Protocol failures throw Error(Protocol).
class SubprocessClassifier final : public MonotoneClassifier {
 public:
  // argv[0] is resolved through PATH.
  SubprocessClassifier(std::vector<std::string> argv, std::size_t num_classes);
  ~SubprocessClassifier() override;

  SubprocessClassifier(const SubprocessClassifier&) = delete;
  SubprocessClassifier& operator=(const SubprocessClassifier&) = delete;

  std::size_t num_classes() const override { return k_; }
  std::size_t classify(PointView r, const SimplexVector& q) const override;
  // Writes all requests for the point, then reads the responses.
  std::vector<std::size_t> classify_batch(PointView r, std::span<const SimplexVector> qs) const override;
  bool concurrent_safe() const override { return false; }

 private:
  void write_all(const std::string& data) const;
  std::string read_line() const;

  std::size_t k_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  mutable std::string buffer_;
  mutable std::mutex mutex_;
};

}  // namespace lsq
