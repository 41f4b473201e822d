#include "kundt/specfile.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace kundt {

using expr::Bindings;
using expr::EvalError;
using expr::ParseError;
using expr::parse_expr;

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

KundtMetric SpecFile::metric() const {
  KundtMetric K;
  K.dim = dim;
  K.sigma = sigma;
  K.W1 = W1;
  K.W0 = W0;
  K.H1 = H1;
  K.H0 = H0;
  K.gT = gT;
  return K;
}

namespace {

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw SpecError(where + ": malformed number '" + s + "'");
  }
}

struct Line {
  std::string key, value;
  int number;
};

}  // namespace

SpecFile parse_spec_text(const std::string& text, const std::string& origin) {
  SpecFile spec;
  bool have_dim = false;

  // First pass: tokenize into (section, key, value) triples.
  std::vector<std::pair<std::string, Line>> entries;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto strip = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw SpecError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = line.substr(1, line.size() - 2);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw SpecError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    entries.push_back({section, Line{strip(line.substr(0, eq)),
                                     strip(line.substr(eq + 1)), lineno}});
  }

  // Dimension first so expression symbol tables and array sizes exist.
  for (auto& [sec, l] : entries)
    if (sec.empty() && l.key == "dimension") {
      spec.dim = static_cast<int>(parse_double(l.value, origin + ":" + std::to_string(l.number)));
      have_dim = true;
    }
  if (!have_dim) spec.dim = 4;
  if (spec.dim < 4)
    throw SpecError(origin + ": dimension must be at least 4");
  const int n = spec.dim - 2;

  spec.W1.assign(static_cast<std::size_t>(n), Expr(0.0));
  spec.W0.assign(static_cast<std::size_t>(n), Expr(0.0));
  spec.gT = KundtMetric::flat(spec.dim).gT;
  spec.ranges = SampleRanges::defaults(spec.dim);

  auto coords = coord_names(spec.dim);
  auto parse_e = [&](const Line& l) {
    try {
      return parse_expr(l.value, coords);
    } catch (const ParseError& pe) {
      throw SpecError(origin + ":" + std::to_string(l.number) + ": " + pe.what());
    }
  };
  auto coord_index = [&](const std::string& name, const Line& l) {
    for (int e = 0; e < n; ++e)
      if (name == "x" + std::to_string(e + 3) || name == std::to_string(e + 3)) return e;
    throw SpecError(origin + ":" + std::to_string(l.number) +
                    ": coordinate '" + name + "' out of range");
  };

  KillingCandidate cand;
  bool have_cand = false;

  for (auto& [sec, l] : entries) {
    const std::string where = origin + ":" + std::to_string(l.number);
    if (sec.empty()) {
      if (l.key == "dimension") continue;
      if (l.key == "sigma") {
        spec.sigma = parse_double(l.value, where);
        continue;
      }
      throw SpecError(where + ": unknown key '" + l.key + "'");
    }
    if (sec == "metric") {
      if (l.key == "H1") spec.H1 = parse_e(l);
      else if (l.key == "H0") spec.H0 = parse_e(l);
      else if (l.key.rfind("W1_", 0) == 0)
        spec.W1[static_cast<std::size_t>(coord_index(l.key.substr(3), l))] = parse_e(l);
      else if (l.key.rfind("W0_", 0) == 0)
        spec.W0[static_cast<std::size_t>(coord_index(l.key.substr(3), l))] = parse_e(l);
      else if (l.key.rfind("g_", 0) == 0) {
        auto rest = l.key.substr(2);
        auto us = rest.find('_');
        if (us == std::string::npos)
          throw SpecError(where + ": transverse entries are g_<i>_<j>");
        int i = coord_index(rest.substr(0, us), l);
        int j = coord_index(rest.substr(us + 1), l);
        Expr e = parse_e(l);
        spec.gT(i, j) = e;
        spec.gT(j, i) = e;
      } else {
        throw SpecError(where + ": unknown metric key '" + l.key + "'");
      }
      continue;
    }
    if (sec == "candidate") {
      have_cand = true;
      if (l.key == "zeta1") cand.zeta1 = parse_e(l);
      else if (l.key == "zeta30") cand.zeta30 = parse_e(l);
      else if (l.key == "zeta20") cand.zeta20 = parse_e(l);
      else throw SpecError(where + ": unknown candidate key '" + l.key + "'");
      continue;
    }
    if (sec == "sampling") {
      if (l.key == "count") {
        spec.sample_count = static_cast<int>(parse_double(l.value, where));
        if (spec.sample_count < 1)
          throw SpecError(where + ": sample count must be positive");
        continue;
      }
      if (l.key == "seed") {
        spec.seed = static_cast<std::uint64_t>(parse_double(l.value, where));
        continue;
      }
      if (l.key.rfind("range_", 0) == 0) {
        std::istringstream rs(l.value);
        double lo, hi;
        if (!(rs >> lo >> hi))
          throw SpecError(where + ": ranges are 'range_<coord> = lo hi'");
        std::string cname = l.key.substr(6);
        if (cname == "u") spec.ranges.u = {lo, hi};
        else if (cname == "v") spec.ranges.v = {lo, hi};
        else spec.ranges.x[static_cast<std::size_t>(coord_index(cname, l))] = {lo, hi};
        continue;
      }
      throw SpecError(where + ": unknown sampling key '" + l.key + "'");
    }
    if (sec == "tolerance") {
      if (l.key == "check") {
        spec.tol = parse_double(l.value, where);
        continue;
      }
      throw SpecError(where + ": unknown tolerance key '" + l.key + "'");
    }
    throw SpecError(where + ": unknown section '" + sec + "'");
  }
  if (have_cand) spec.cand = cand;
  return spec;
}

SpecFile load_spec_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot open spec file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec_text(ss.str(), path);
}

SpecFile spec_from_family(const Family& fam) {
  SpecFile spec;
  spec.dim = fam.metric.dim;
  spec.sigma = fam.metric.sigma;
  spec.W1 = fam.metric.W1;
  spec.W0 = fam.metric.W0;
  spec.H1 = fam.metric.H1;
  spec.H0 = fam.metric.H0;
  spec.gT = fam.metric.gT;
  spec.cand = fam.cand;
  spec.ranges = fam.ranges();
  return spec;
}

std::string spec_to_text(const SpecFile& spec) {
  std::ostringstream out;
  const int n = spec.dim - 2;
  out << "# kundt metric spec\n";
  out << "dimension = " << spec.dim << "\n";
  out << "sigma = " << format_double(spec.sigma) << "\n\n";
  out << "[metric]\n";
  for (int e = 0; e < n; ++e) {
    out << "W1_x" << e + 3 << " = " << spec.W1[static_cast<std::size_t>(e)].str() << "\n";
    out << "W0_x" << e + 3 << " = " << spec.W0[static_cast<std::size_t>(e)].str() << "\n";
  }
  out << "H1 = " << spec.H1.str() << "\n";
  out << "H0 = " << spec.H0.str() << "\n";
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      out << "g_x" << i + 3 << "_x" << j + 3 << " = " << spec.gT(i, j).str() << "\n";
  if (spec.cand) {
    out << "\n[candidate]\n";
    out << "zeta1 = " << spec.cand->zeta1.str() << "\n";
    out << "zeta30 = " << spec.cand->zeta30.str() << "\n";
    out << "zeta20 = " << spec.cand->zeta20.str() << "\n";
  }
  out << "\n[sampling]\n";
  out << "count = " << spec.sample_count << "\n";
  out << "seed = " << spec.seed << "\n";
  out << "range_u = " << format_double(spec.ranges.u.lo) << " "
      << format_double(spec.ranges.u.hi) << "\n";
  out << "range_v = " << format_double(spec.ranges.v.lo) << " "
      << format_double(spec.ranges.v.hi) << "\n";
  for (int e = 0; e < n; ++e)
    out << "range_x" << e + 3 << " = "
        << format_double(spec.ranges.x[static_cast<std::size_t>(e)].lo) << " "
        << format_double(spec.ranges.x[static_cast<std::size_t>(e)].hi) << "\n";
  out << "\n[tolerance]\n";
  out << "check = " << format_double(spec.tol) << "\n";
  return out.str();
}

void write_spec_file(const SpecFile& spec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SpecError("cannot write spec file '" + path + "'");
  out << spec_to_text(spec);
}

// ---------------------------------------------------------------------------
// Tool entry points

namespace {

constexpr const char* kVersion = "0.1.0";

std::string point_string(const Point& p) {
  std::string s = "(u=" + format_double(p.u) + ", v=" + format_double(p.v);
  for (Eigen::Index i = 0; i < p.x.size(); ++i)
    s += ", x" + std::to_string(i + 3) + "=" + format_double(p.x(i));
  return s + ")";
}

// Evaluates every metric and candidate expression at every sample so a
// domain error is reported with the offending point before any check runs.
void prescan_domain(const SpecFile& spec, const KundtMetric& K, const Coframe& C,
                    const std::vector<Point>& samples) {
  std::vector<Expr> exprs;
  exprs.push_back(assembled_H(K, C));
  for (int e = 0; e < K.transverse_dim(); ++e) exprs.push_back(K.W(e));
  for (int i = 0; i < K.transverse_dim(); ++i)
    for (int j = i; j < K.transverse_dim(); ++j) exprs.push_back(K.gT(i, j));
  if (spec.cand) {
    exprs.push_back(spec.cand->zeta1);
    exprs.push_back(spec.cand->zeta30);
    exprs.push_back(spec.cand->zeta20);
  }
  for (const auto& p : samples) {
    expr::Bindings b = bind_point(p);
    for (const auto& e : exprs) {
      try {
        e.eval(b);
      } catch (const EvalError& err) {
        throw SpecError(std::string("sampling hit a domain error at point ") +
                        point_string(p) + ": " + err.what());
      }
    }
  }
}

struct ReportBuilder {
  std::ostringstream text;
  std::map<std::string, std::string> machine;

  void kv(const std::string& key, const std::string& value) { machine[key] = value; }
  void kv(const std::string& key, double value) { machine[key] = format_double(value); }
  void kv(const std::string& key, bool value) { machine[key] = value ? "1" : "0"; }

  std::string finish(int exit_code) {
    machine["exit"] = std::to_string(exit_code);
    text << "\n[machine]\n";
    for (auto& [k, v] : machine) text << k << " = " << v << "\n";
    return text.str();
  }
};

}  // namespace

ToolReport run_check(const std::string& path, const CheckOptions& opts) {
  ToolReport out;
  ReportBuilder rb;
  rb.text << "kundt check report\n";
  rb.text << "version = " << kVersion << "\n";
  try {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecError("cannot open spec file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string raw = ss.str();
    SpecFile spec = parse_spec_text(raw, path);
    if (opts.tol) spec.tol = *opts.tol;
    if (opts.samples) spec.sample_count = *opts.samples;
    if (opts.seed) spec.seed = *opts.seed;

    rb.text << "input = " << path << "\n";
    rb.text << "input_digest = " << hex64(fnv1a(raw)) << "\n";
    rb.kv("version", std::string(kVersion));
    rb.kv("input_digest", hex64(fnv1a(raw)));
    rb.kv("dimension", double(spec.dim));
    rb.kv("sigma", spec.sigma);
    rb.kv("seed", std::to_string(spec.seed));

    KundtMetric K = spec.metric();
    Coframe C = build_coframe(K.gT);
    std::vector<Point> samples = sample_points(spec.ranges, spec.sample_count, spec.seed);
    prescan_domain(spec, K, C, samples);

    bool pass = true;

    CSI0Report csi = csi0_check(K, C, samples, spec.tol);
    rb.text << "\n[csi0]\n";
    rb.text << "passes = " << (csi.passes ? "true" : "false") << "\n";
    rb.text << "sigma_measured = " << format_double(csi.sigma_measured) << "\n";
    for (auto& [k, v] : csi.residuals)
      rb.text << "residual_" << k << " = " << format_double(v) << "\n";
    rb.kv("csi0.passes", csi.passes);
    rb.kv("csi0.sigma_measured", csi.sigma_measured);
    for (auto& [k, v] : csi.residuals) rb.kv("csi0." + k, v);
    pass = pass && csi.passes;

    KundtVectorReport kv = kundt_vector_check(K, C, samples, spec.tol);
    rb.text << "\n[kundt_vector]\n";
    rb.text << "form_holds = " << (kv.form_holds ? "true" : "false") << "\n";
    rb.text << "max_violation = " << format_double(kv.max_violation) << "\n";
    rb.kv("kundt_vector.form_holds", kv.form_holds);
    rb.kv("kundt_vector.max_violation", kv.max_violation);
    pass = pass && kv.form_holds;

    if (spec.cand) {
      ResidualReport kr = killing_residuals(K, C, *spec.cand, samples, spec.tol);
      rb.text << "\n[killing]\n";
      rb.text << "killing = " << (kr.killing ? "true" : "false") << "\n";
      rb.text << "max_residual = " << format_double(kr.max_residual) << "\n";
      rb.text << "oracle_max = " << format_double(kr.oracle_max) << "\n";
      rb.kv("killing.pass", kr.killing);
      rb.kv("killing.max_residual", kr.max_residual);
      rb.kv("killing.oracle_max", kr.oracle_max);
      pass = pass && kr.killing;

      CausalityReport cr = causality(K, C, *spec.cand, samples);
      rb.text << "\n[causality]\n";
      rb.text << "class = " << causality_name(cr.classification) << "\n";
      rb.text << "convention_sign = " << cr.convention_sign << "\n";
      rb.text << "max_abs_magnitude = " << format_double(cr.max_abs) << "\n";
      rb.kv("causality.class", std::string(causality_name(cr.classification)));
      rb.kv("causality.convention_sign", double(cr.convention_sign));
      rb.kv("causality.max_abs", cr.max_abs);

      CcnvReport cc = ccnv_residuals(K, C, *spec.cand, samples, spec.tol);
      rb.text << "\n[ccnv]\n";
      rb.text << "covariantly_constant = " << (cc.covariantly_constant ? "true" : "false")
              << "\n";
      rb.text << "max_residual = " << format_double(cc.max_residual) << "\n";
      rb.text << "oracle_max = " << format_double(cc.oracle_max) << "\n";
      rb.kv("ccnv.verdict", cc.covariantly_constant);
      rb.kv("ccnv.max_residual", cc.max_residual);
      rb.kv("ccnv.oracle_max", cc.oracle_max);

      CaseReport cls = classify(K, C, *spec.cand, samples);
      rb.text << "\n[classification]\n";
      rb.text << "label = " << cls.label << "\n";
      for (auto& [k, v] : cls.branch_residuals)
        rb.text << "residual_" << k << " = " << format_double(v) << "\n";
      rb.kv("classify.label", cls.label);
    }

    out.exit_code = pass ? 0 : 1;
    rb.text << "\nresult = " << (pass ? "pass" : "fail") << "\n";
  } catch (const SpecError& e) {
    rb.text << "error = " << e.what() << "\n";
    out.exit_code = 2;
  } catch (const std::exception& e) {
    rb.text << "error = " << e.what() << "\n";
    out.exit_code = 2;
  }
  out.text = rb.finish(out.exit_code);
  out.machine = rb.machine;
  return out;
}

ToolReport run_generate(const std::string& label, const FamilyParams& params,
                        const std::string& out_path) {
  ToolReport out;
  ReportBuilder rb;
  rb.text << "kundt generate report\n";
  rb.text << "version = " << kVersion << "\n";
  try {
    Family fam = make_family(label, params);
    SpecFile spec = spec_from_family(fam);
    write_spec_file(spec, out_path);
    rb.text << "label = " << fam.label << "\n";
    rb.text << "out = " << out_path << "\n";
    rb.text << "x3_interval = " << format_double(fam.x3.lo) << " "
            << format_double(fam.x3.hi) << "\n";
    for (auto& [k, v] : fam.params) rb.kv("param." + k, v);
    rb.kv("label", fam.label);
    rb.kv("out", out_path);
    out.exit_code = 0;
  } catch (const FamilyError& e) {
    rb.text << "error = " << e.what() << "\n";
    out.exit_code = 2;
  } catch (const std::exception& e) {
    rb.text << "error = " << e.what() << "\n";
    out.exit_code = 2;
  }
  out.text = rb.finish(out.exit_code);
  out.machine = rb.machine;
  return out;
}

ToolReport run_oracle(const std::string& path, int points) {
  ToolReport out;
  ReportBuilder rb;
  rb.text << "kundt oracle report\n";
  rb.text << "version = " << kVersion << "\n";
  try {
    SpecFile spec = load_spec_file(path);
    KundtMetric K = spec.metric();
    Coframe C = build_coframe(K.gT);
    std::vector<Point> samples = sample_points(spec.ranges, points, spec.seed);
    prescan_domain(spec, K, C, samples);

    OracleComparison cmp = compare_riemann(K, C, samples, 1e-8);
    rb.text << "riemann_max_dev = " << format_double(cmp.max_dev) << "\n";
    rb.text << "global_sign = " << cmp.global_sign << "\n";
    rb.kv("riemann.max_dev", cmp.max_dev);
    rb.kv("riemann.global_sign", double(cmp.global_sign));
    rb.kv("riemann.within_tol", cmp.within_tol);

    if (spec.cand) {
      ResidualReport kr = killing_residuals(K, C, *spec.cand, samples, spec.tol);
      rb.text << "lie_oracle_max = " << format_double(kr.oracle_max) << "\n";
      rb.kv("lie.oracle_max", kr.oracle_max);
    }
    out.exit_code = cmp.within_tol ? 0 : 1;
  } catch (const EvalError& e) {
    rb.text << "error = domain error while sampling: " << e.what() << "\n";
    out.exit_code = 2;
  } catch (const std::exception& e) {
    rb.text << "error = " << e.what() << "\n";
    out.exit_code = 2;
  }
  out.text = rb.finish(out.exit_code);
  out.machine = rb.machine;
  return out;
}

}  // namespace kundt
