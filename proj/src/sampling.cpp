#include "kundt/sampling.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

namespace kundt {

SampleRanges SampleRanges::defaults(int dim) {
  SampleRanges r;
  r.x.assign(static_cast<std::size_t>(dim - 2), Interval{-1.0, 1.0});
  return r;
}

std::vector<Point> sample_points(const SampleRanges& ranges, int count,
                                 std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Point p;
    p.u = rng.uniform(ranges.u.lo, ranges.u.hi);
    p.v = rng.uniform(ranges.v.lo, ranges.v.hi);
    p.x.resize(static_cast<Eigen::Index>(ranges.x.size()));
    for (std::size_t i = 0; i < ranges.x.size(); ++i)
      p.x(static_cast<Eigen::Index>(i)) = rng.uniform(ranges.x[i].lo, ranges.x[i].hi);
    pts.push_back(std::move(p));
  }
  return pts;
}

std::string coord_name(int index) {
  if (index == 0) return "u";
  if (index == 1) return "v";
  return "x" + std::to_string(index + 1);
}

std::vector<std::string> coord_names(int dim) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) names.push_back(coord_name(i));
  return names;
}

expr::Bindings bind_point(const Point& p) {
  expr::Bindings b;
  b.set("u", p.u);
  b.set("v", p.v);
  for (Eigen::Index i = 0; i < p.x.size(); ++i)
    b.set("x" + std::to_string(i + 3), p.x(i));
  return b;
}

int env_worker_count() {
  const char* env = std::getenv("KUNDT_WORKERS");
  if (!env) return 1;
  int n = std::atoi(env);
  if (n < 1) return 1;
  return n > 64 ? 64 : n;
}

double max_abs_over(const expr::Expr& e, const std::vector<Point>& samples) {
  double m = 0.0;
  for (const auto& p : samples) m = std::max(m, std::fabs(e.eval(bind_point(p))));
  return m;
}

std::vector<double> max_abs_over(const std::vector<expr::Expr>& exprs,
                                 const std::vector<Point>& samples) {
  std::vector<double> out(exprs.size(), 0.0);
  const int workers = std::min<int>(env_worker_count(), static_cast<int>(exprs.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < exprs.size(); ++i)
      out[i] = max_abs_over(exprs[i], samples);
    return out;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = static_cast<std::size_t>(w); i < exprs.size();
           i += static_cast<std::size_t>(workers))
        out[i] = max_abs_over(exprs[i], samples);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace kundt
