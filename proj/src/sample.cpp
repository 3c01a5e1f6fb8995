#include "gck/sample.hpp"

#include <cmath>
#include <stdexcept>

namespace gck {
namespace {

double halton(std::uint64_t index, std::uint64_t base) {
  double f = 1.0;
  double r = 0.0;
  while (index > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

constexpr std::array<std::uint64_t, 4> kBases{2, 3, 5, 7};

}  // namespace

SampleSet SampleSet::generate(const Box& box, int count, std::uint64_t seed,
                              std::span<const Expr> avoid, double margin) {
  if (count <= 0) throw std::invalid_argument("sample count must be positive");
  Tape guard(avoid);
  std::vector<Complex> guard_vals(avoid.size());
  std::vector<ChartPoint> pts;
  pts.reserve(static_cast<std::size_t>(count));
  std::uint64_t index = 1 + seed * 1000003ull;
  std::uint64_t attempts = 0;
  const std::uint64_t max_attempts = static_cast<std::uint64_t>(count) * 1000ull + 1000ull;
  while (pts.size() < static_cast<std::size_t>(count)) {
    if (++attempts > max_attempts)
      throw std::runtime_error("sample box is almost entirely excluded by avoid constraints");
    ChartPoint p;
    for (int d = 0; d < 4; ++d) {
      double u = halton(index, kBases[d]);
      p[d] = box.lo[d] + u * (box.hi[d] - box.lo[d]);
    }
    ++index;
    bool ok = true;
    if (!avoid.empty()) {
      try {
        guard.eval_into(p, guard_vals);
        for (const Complex& v : guard_vals) {
          if (std::abs(v) < margin) {
            ok = false;
            break;
          }
        }
      } catch (const EvalError&) {
        ok = false;  // singular right on the locus
      }
    }
    if (ok) pts.push_back(p);
  }
  return SampleSet(std::move(pts));
}

ResidualStat max_abs_residual(std::span<const Expr> exprs, const SampleSet& samples) {
  ResidualStat stat;
  if (exprs.empty() || samples.empty()) return stat;
  stat.worst = samples.points().front();
  Tape tape(exprs);
  std::vector<Complex> vals(tape.output_count());
  for (const ChartPoint& p : samples.points()) {
    tape.eval_into(p, vals);
    for (const Complex& v : vals) {
      double a = std::abs(v);
      if (a > stat.max_abs) {
        stat.max_abs = a;
        stat.worst = p;
      }
    }
  }
  return stat;
}

ResidualStat max_abs_residual(const Expr& e, const SampleSet& samples) {
  return max_abs_residual(std::span<const Expr>(&e, 1), samples);
}

NamedResidual evaluate_residual(std::string name, std::string tag, std::span<const Expr> exprs,
                                const SampleSet& samples) {
  return NamedResidual{std::move(name), std::move(tag), max_abs_residual(exprs, samples)};
}

}  // namespace gck
