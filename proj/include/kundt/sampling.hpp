#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kundt/expr.hpp"

namespace kundt {

// splitmix64: tiny, portable, identical stream on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

 private:
  std::uint64_t state_;
};

struct Point {
  double u = 0.0;
  double v = 0.0;
  Eigen::VectorXd x;  // x(0) is the x3 coordinate

  int dim() const { return 2 + static_cast<int>(x.size()); }
};

struct Interval {
  double lo = -1.0;
  double hi = 1.0;
};

// Per-coordinate sampling ranges; coordinates are u, v, x3..xN.
struct SampleRanges {
  Interval u{-1.0, 1.0};
  Interval v{-1.0, 1.0};
  std::vector<Interval> x;  // size N-2

  static SampleRanges defaults(int dim);
};

std::vector<Point> sample_points(const SampleRanges& ranges, int count,
                                 std::uint64_t seed);

// Coordinate symbol names: u, v, x3..xN.
std::string coord_name(int index);              // 0 -> "u", 1 -> "v", 2 -> "x3", ...
std::vector<std::string> coord_names(int dim);  // all N of them

expr::Bindings bind_point(const Point& p);

// Worker count from KUNDT_WORKERS (default 1, clamped to [1, 64]).
int env_worker_count();

// max |e| over the samples.
double max_abs_over(const expr::Expr& e, const std::vector<Point>& samples);

// Batched version: one result per expression.  Fans the expressions out
// to env_worker_count() threads; each per-expression sweep is serial, so
// results do not depend on the worker count.
std::vector<double> max_abs_over(const std::vector<expr::Expr>& exprs,
                                 const std::vector<Point>& samples);

}  // namespace kundt
