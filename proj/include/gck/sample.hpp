#pragma once

#include "gck/expr.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gck {

// Axis-aligned sampling box in chart coordinates.
struct Box {
  std::array<double, 4> lo{-1.0, -1.0, -1.0, -1.0};
  std::array<double, 4> hi{1.0, 1.0, 1.0, 1.0};
};

// Deterministic quasi-random point set (Halton, bases 2/3/5/7). Points
// whose distance to a declared singular locus is too small are skipped:
// a locus is the zero set of an `avoid` expression, and a candidate is
// rejected when |expr| < margin there.
class SampleSet {
 public:
  SampleSet() = default;
  explicit SampleSet(std::vector<ChartPoint> points) : points_(std::move(points)) {}

  static SampleSet generate(const Box& box, int count, std::uint64_t seed,
                            std::span<const Expr> avoid = {}, double margin = 0.05);

  const std::vector<ChartPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

 private:
  std::vector<ChartPoint> points_;
};

struct ResidualStat {
  double max_abs = 0.0;
  ChartPoint worst = ChartPoint::Zero();
};

// Largest |value| of any expression over the sample set, with the point
// attaining it.
ResidualStat max_abs_residual(std::span<const Expr> exprs, const SampleSet& samples);
ResidualStat max_abs_residual(const Expr& e, const SampleSet& samples);

struct NamedResidual {
  std::string name;
  std::string tag;
  ResidualStat stat;
};

using ResidualReport = std::vector<NamedResidual>;

NamedResidual evaluate_residual(std::string name, std::string tag, std::span<const Expr> exprs,
                                const SampleSet& samples);

}  // namespace gck
