#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "kundt/families.hpp"

namespace kundt {

struct SpecError : std::runtime_error {
  explicit SpecError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

// On-disk description of a metric, an optional candidate, and the
// sampling setup.  Flat key = value lines inside [sections].
struct SpecFile {
  int dim = 4;
  double sigma = 0.0;
  std::vector<Expr> W1, W0;
  Expr H1{0.0}, H0{0.0};
  ExprMatrix gT;
  std::optional<KillingCandidate> cand;
  SampleRanges ranges;
  int sample_count = 100;
  std::uint64_t seed = 42;
  double tol = 1e-9;

  KundtMetric metric() const;
};

SpecFile parse_spec_text(const std::string& text, const std::string& origin);
SpecFile load_spec_file(const std::string& path);
SpecFile spec_from_family(const Family& fam);
std::string spec_to_text(const SpecFile& spec);
void write_spec_file(const SpecFile& spec, const std::string& path);

struct CheckOptions {
  std::optional<double> tol;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
};

struct ToolReport {
  std::string text;
  std::map<std::string, std::string> machine;
  int exit_code = 0;  // 0 pass, 1 check failure, 2 input error
};

ToolReport run_check(const std::string& path, const CheckOptions& opts);
ToolReport run_generate(const std::string& label, const FamilyParams& params,
                        const std::string& out_path);
ToolReport run_oracle(const std::string& path, int points);

// Shortest round-trip decimal formatting used in reports and spec files.
std::string format_double(double v);

}  // namespace kundt
