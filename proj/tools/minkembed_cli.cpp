// minkembed: command-line front end.
//
// Exit codes: 0 success, 2 validation error (JSON on stderr), 64 usage,
// 74 I/O.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "json_out.hpp"
#include "minkembed/alignment.hpp"
#include "minkembed/error.hpp"
#include "minkembed/field_io.hpp"
#include "minkembed/fixtures.hpp"
#include "minkembed/grid.hpp"
#include "minkembed/hypersurface.hpp"
#include "minkembed/lorentz.hpp"
#include "minkembed/manifold.hpp"
#include "minkembed/pfaff.hpp"
#include "minkembed/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace minkembed;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitUsage = 64;
constexpr int kExitIo = 74;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  bool json_out = false;
  double p = 4.0;
  double epsilon = 0.1;
  std::vector<std::size_t> x_star;
  std::vector<std::size_t> sweep;
  std::string out_dir;
  std::string encoding = "csv";
};

Matrix parse_matrix(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception&) {
    throw UsageError("not a JSON matrix: " + text);
  }
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw UsageError("matrix must be a JSON array of rows");
  Matrix m(j.size(), j[0].size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != m.cols()) throw UsageError("matrix rows must have equal length");
    for (std::size_t k = 0; k < m.cols(); ++k) {
      if (!j[i][k].is_number()) throw UsageError("matrix entries must be numbers");
      m(i, k) = j[i][k].get<double>();
    }
  }
  return m;
}

MultiIndex base_point(const Options& o, const GridChart& chart) {
  if (o.x_star.empty()) return chart.center();
  if (o.x_star.size() != chart.dim()) throw UsageError("--x-star needs one index per axis");
  if (!chart.contains(o.x_star)) throw UsageError("--x-star lies outside the chart");
  return o.x_star;
}

SweepOrder sweep_order(const Options& o) { return o.sweep; }

double parse_p(const std::string& s) {
  if (s == "inf" || s == "infinity") return kInfinity;
  try {
    std::size_t used = 0;
    const double p = std::stod(s, &used);
    if (used != s.size() || !(p >= 1.0)) throw UsageError("");
    return p;
  } catch (const std::exception&) {
    throw UsageError("--p must be a number >= 1 or 'inf'");
  }
}

void emit(const Options& o, const json& j, const std::string& text) {
  if (o.json_out)
    std::cout << j.dump(2) << '\n';
  else
    std::cout << text;
}

std::string summary(const ResidualReport& r, const std::string& title) {
  std::ostringstream s;
  s << title << ": max_abs = " << r.max_abs << ", L^" << r.p << " = " << r.lp_norm << '\n';
  for (const auto& e : r.per_equation) s << "  " << e.label << ": max_abs = " << e.max_abs << '\n';
  return s.str();
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

json base_metadata(const std::string& command, const json& extra = json::object()) {
  json m{{"command", command}, {"tool_version", kVersion}};
  m.update(extra);
  return m;
}

int lambda_of(const Dataset& ds, std::optional<int> override) {
  if (override) return *override;
  const auto& meta = ds.manifest.metadata;
  if (meta.contains("lambda") && meta["lambda"].is_number_integer()) return meta["lambda"].get<int>();
  throw UsageError("dataset has no metadata.lambda; pass --lambda");
}

FundamentalForms forms_of(const Dataset& ds, std::optional<int> lambda) {
  return {ds.manifest.chart, ds.field("g"), ds.field("K"), lambda_of(ds, lambda)};
}

bool has_rigged(const Dataset& ds) {
  for (const char* name : {"gamma", "K", "L", "M"})
    if (!ds.fields.count(name)) return false;
  return true;
}

RiggedOperators rigged_of(const Dataset& ds) {
  return {ds.manifest.chart, ds.field("gamma"), ds.field("K"), ds.field("L"), ds.field("M")};
}

PfaffCoeffs coeffs_of(const Dataset& ds) {
  if (!ds.fields.count("A0")) return PfaffCoeffs::from_christoffel(christoffel(ds.field("g")));
  const GridChart& chart = ds.manifest.chart;
  PfaffCoeffs c{chart, 0, 0, {}, {}, {}};
  for (std::size_t a = 0; a < chart.dim(); ++a) {
    const std::string ix = std::to_string(a);
    c.a.push_back(ds.field("A" + ix));
    if (ds.fields.count("B" + ix)) c.b.push_back(ds.field("B" + ix));
    if (ds.fields.count("C" + ix)) c.c.push_back(ds.field("C" + ix));
  }
  c.l = c.a[0].shape().at(0);
  c.q = !c.b.empty() ? c.b[0].shape().at(0) : !c.c.empty() ? c.c[0].shape().at(0) : c.l;
  return c;
}

void require_out(const Options& o) {
  if (o.out_dir.empty()) throw UsageError("-o/--out is required");
}

// ---- subcommands -----------------------------------------------------------

int cmd_decompose(const Options& o, const std::string& matrix, const std::string& anchor) {
  const Matrix g = parse_matrix(matrix);
  if (!g.square()) throw UsageError("--matrix must be square");
  const auto cert = certify_lorentz(SymMatrix::from_matrix(g), o.epsilon);
  const DecompAnchor base = lorentz_decompose(cert);
  json j{{"epsilon", o.epsilon}, {"eigenvalues", cli::to_json(cert.eigvals)}};
  Matrix f = base.base_f;
  if (!anchor.empty()) {
    const Matrix a = parse_matrix(anchor);
    const auto res = lorentz_decompose_anchored_ex(lorentz_decompose(certify_lorentz(SymMatrix::from_matrix(a), o.epsilon)), cert);
    f = res.f;
    j["branch"] = res.branch == DecompBranch::Identity ? "identity" : res.branch == DecompBranch::Near ? "near" : "far";
  }
  j["F"] = cli::to_json(f);
  j["defect"] = cli::number(max_abs_diff(mink_gram(f, f), g));
  std::ostringstream s;
  s << "F = " << cli::to_json(f).dump() << '\n';
  emit(o, j, s.str());
  return 0;
}

int cmd_curvature(const Options& o, const std::string& manifest, double flat_tol) {
  const Dataset ds = read_dataset(manifest);
  const auto r = flatness_residual(ds.field("g"), o.p);
  json j = cli::to_json(r);
  j["nonflat"] = r.max_abs > flat_tol;
  j["flat_tolerance"] = flat_tol;
  if (!o.out_dir.empty()) {
    fs::create_directories(o.out_dir);
    write_dataset(o.out_dir, {{"riemann", riemann(ds.field("g"))}}, parse_encoding(o.encoding),
                  base_metadata("curvature", {{"source", manifest}}));
    write_json(fs::path(o.out_dir) / "report.json", j);
  }
  emit(o, j, summary(r, r.max_abs > flat_tol ? "curvature (nonflat)" : "curvature (flat within tolerance)"));
  return 0;
}

int cmd_pfaff_check(const Options& o, const std::string& manifest) {
  const Dataset ds = read_dataset(manifest);
  const auto r = pfaff_compatibility_residual(coeffs_of(ds), o.p);
  emit(o, cli::to_json(r), summary(r, "compatibility"));
  return 0;
}

int cmd_pfaff_integrate(const Options& o, const std::string& manifest, const std::string& y0_text) {
  require_out(o);
  const Dataset ds = read_dataset(manifest);
  const PfaffCoeffs c = coeffs_of(ds);
  const Matrix y0 = y0_text.empty() ? Matrix::identity(c.l) : parse_matrix(y0_text);
  const MultiIndex x0 = base_point(o, c.chart);
  const TensorField y = pfaff_integrate(c, x0, y0, sweep_order(o));
  write_dataset(o.out_dir, {{"Y", y}}, parse_encoding(o.encoding),
                base_metadata("pfaff integrate", {{"source", manifest}, {"x0", x0}}));
  json j{{"x0", x0}, {"y0", cli::to_json(y0)}, {"max_abs", cli::number(max_norm(y))},
         {"compatibility", cli::to_json(pfaff_compatibility_residual(c, o.p))}};
  write_json(fs::path(o.out_dir) / "report.json", j);
  emit(o, j, "Y written to " + o.out_dir + "\n");
  return 0;
}

int cmd_pfaff_depend(const Options& o, const std::string& m1, const std::string& m2, const std::string& y01,
                     const std::string& y02) {
  const Dataset d1 = read_dataset(m1), d2 = read_dataset(m2);
  const PfaffCoeffs c1 = coeffs_of(d1), c2 = coeffs_of(d2);
  const Matrix a = y01.empty() ? Matrix::identity(c1.l) : parse_matrix(y01);
  const Matrix b = y02.empty() ? a : parse_matrix(y02);
  const auto gap = pfaff_dependence_gap(c1, c2, a, b, base_point(o, c1.chart), o.p, sweep_order(o));
  json j{{"gap_norm", cli::number(gap.gap_norm)}, {"input_gap", cli::number(gap.input_gap)},
         {"ratio", cli::number(gap.input_gap > 0 ? gap.gap_norm / gap.input_gap : 0.0)}};
  std::ostringstream s;
  s << "W^{1,p} gap = " << gap.gap_norm << ", input gap = " << gap.input_gap << '\n';
  emit(o, j, s.str());
  return 0;
}

int cmd_immerse(const Options& o, const std::string& manifest) {
  require_out(o);
  const Dataset ds = read_dataset(manifest);
  const TensorField& g = ds.field("g");
  const auto res = immerse_manifold(g, base_point(o, g.chart()), o.epsilon, sweep_order(o));
  const auto iso = isometry_residual(res, g, o.p);
  write_dataset(o.out_dir, {{"f", res.f}, {"frame", res.frame}}, parse_encoding(o.encoding),
                base_metadata("immerse", {{"source", manifest}, {"base_point", res.base_point}}));
  json j{{"base_point", res.base_point},
         {"base_frame", cli::to_json(res.base_frame)},
         {"min_frame_det", cli::number(res.min_frame_det)},
         {"isometry_recomputed", cli::to_json(iso.recomputed)},
         {"isometry_stored", cli::to_json(iso.stored)}};
  write_json(fs::path(o.out_dir) / "report.json", j);
  emit(o, j, summary(iso.recomputed, "isometry residual (recomputed df)") + summary(iso.stored, "isometry residual (frame)"));
  return 0;
}

int cmd_hyper_check(const Options& o, const std::string& manifest, std::optional<int> lambda) {
  const Dataset ds = read_dataset(manifest);
  json j;
  std::string text;
  if (has_rigged(ds)) {
    const auto r = generalized_gc_residual(rigged_of(ds), o.p);
    j["generalized"] = cli::to_json(r);
    text = summary(r, "generalized Gauss-Codazzi");
  } else {
    const FundamentalForms forms = forms_of(ds, lambda);
    const auto r = classical_gc_residual(forms, o.p);
    const auto gr = generalized_gc_residual(specialize_from_forms(forms), o.p);
    j["classical"] = cli::to_json(r);
    j["generalized"] = cli::to_json(gr);
    text = summary(r, "Gauss-Codazzi") + summary(gr, "generalized Gauss-Codazzi");
  }
  emit(o, j, text);
  return 0;
}

void write_rigged(const Options& o, const RiggedImmersionResult& res, const std::string& command,
                  const std::string& manifest, json j) {
  write_dataset(o.out_dir, {{"f", res.f}, {"rigging", res.rigging}, {"frame", res.frame}}, parse_encoding(o.encoding),
                base_metadata(command, {{"source", manifest}, {"base_point", res.base_point}}));
  j["base_point"] = res.base_point;
  j["base_frame"] = cli::to_json(res.base_frame);
  j["min_frame_det"] = cli::number(res.min_frame_det);
  write_json(fs::path(o.out_dir) / "report.json", j);
}

int cmd_hyper_rigged(const Options& o, const std::string& manifest, const std::string& fstar) {
  require_out(o);
  const Dataset ds = read_dataset(manifest);
  const RiggedOperators ops = rigged_of(ds);
  const Matrix f0 = fstar.empty() ? Matrix::identity(ops.chart.dim() + 1) : parse_matrix(fstar);
  const auto res = immerse_hypersurface_rigged(ops, base_point(o, ops.chart), f0, sweep_order(o));
  const auto r = rigged_structure_defect(res, ops, o.p);
  json j{{"structure_defect", cli::to_json(r)}, {"gauss_codazzi", cli::to_json(generalized_gc_residual(ops, o.p))}};
  write_rigged(o, res, "hyper immerse-rigged", manifest, j);
  emit(o, j, summary(r, "structure defect"));
  return 0;
}

int cmd_hyper_forms(const Options& o, const std::string& manifest, std::optional<int> lambda) {
  require_out(o);
  const Dataset ds = read_dataset(manifest);
  const FundamentalForms forms = forms_of(ds, lambda);
  const auto res = immerse_hypersurface_forms(forms, base_point(o, forms.chart), o.epsilon, sweep_order(o));
  const auto r = fundamental_form_defect(res, forms, o.p);
  json j{{"fundamental_form_defect", cli::to_json(r)}, {"gauss_codazzi", cli::to_json(classical_gc_residual(forms, o.p))}};
  write_rigged(o, res, "hyper immerse-forms", manifest, j);
  emit(o, j, summary(r, "fundamental form defect"));
  return 0;
}

AlignmentResult align_datasets(const Options& o, const Dataset& a, const Dataset& b, const std::string& mode,
                               bool proper, std::optional<int> lambda) {
  const MultiIndex xs = base_point(o, a.manifest.chart);
  if (mode == "manifold") {
    const auto r1 = immerse_manifold(a.field("g"), xs, o.epsilon, sweep_order(o));
    const auto r2 = immerse_manifold(b.field("g"), xs, o.epsilon, sweep_order(o));
    return align_manifold(r1, r2, a.field("g"), b.field("g"), o.p, o.epsilon);
  }
  if (mode == "rigged") {
    const RiggedOperators o1 = rigged_of(a), o2 = rigged_of(b);
    const Matrix id = Matrix::identity(o1.chart.dim() + 1);
    return align_hypersurface(immerse_hypersurface_rigged(o1, xs, id, sweep_order(o)),
                              immerse_hypersurface_rigged(o2, xs, id, sweep_order(o)), o1, o2, o.p);
  }
  if (mode == "forms") {
    const FundamentalForms f1 = forms_of(a, lambda), f2 = forms_of(b, lambda);
    return align_hypersurface(immerse_hypersurface_forms(f1, xs, o.epsilon, sweep_order(o)),
                              immerse_hypersurface_forms(f2, xs, o.epsilon, sweep_order(o)), f1, f2, o.p, o.epsilon,
                              proper);
  }
  throw UsageError("--mode must be manifold, rigged or forms");
}

int cmd_align(const Options& o, const std::string& m1, const std::string& m2, const std::string& mode, bool proper,
              std::optional<int> lambda) {
  const Dataset a = read_dataset(m1), b = read_dataset(m2);
  const auto res = align_datasets(o, a, b, mode, proper, lambda);
  json j = cli::to_json(res);
  j["mode"] = mode;
  std::ostringstream s;
  s << "aligned W^{2,p} gap = " << res.aligned_gap_w2p << ", max gap = " << res.aligned_gap_max
    << ", input gap = " << res.input_gap << '\n';
  emit(o, j, s.str());
  return 0;
}

// Seeded smooth symmetric perturbation direction: a few sine modes per
// component.
TensorField random_direction(const GridChart& chart, std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0), phase(0.0, 6.283185307179586), freq(0.5, 2.0);
  std::vector<double> coef;
  const std::size_t modes = 3;
  for (std::size_t k = 0; k < n * n * modes * (2 + chart.dim()); ++k) coef.push_back(0.0);
  for (std::size_t c = 0; c < n * n; ++c)
    for (std::size_t md = 0; md < modes; ++md) {
      const std::size_t base = (c * modes + md) * (2 + chart.dim());
      coef[base] = amp(rng);
      coef[base + 1] = phase(rng);
      for (std::size_t a = 0; a < chart.dim(); ++a) coef[base + 2 + a] = freq(rng);
    }
  TensorField h = TensorField::sample(chart, {n, n}, [&](auto x, auto out) {
    for (std::size_t c = 0; c < n * n; ++c) {
      double v = 0.0;
      for (std::size_t md = 0; md < modes; ++md) {
        const std::size_t base = (c * modes + md) * (2 + chart.dim());
        double arg = coef[base + 1];
        for (std::size_t a = 0; a < chart.dim(); ++a) arg += coef[base + 2 + a] * x[a];
        v += coef[base] * std::sin(arg);
      }
      out[c] = v;
    }
  });
  for (std::size_t pt = 0; pt < h.points(); ++pt)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) h(pt, j * n + i) = h(pt, i * n + j);
  return h;
}

TensorField add_scaled(const TensorField& base, const TensorField& dir, double delta) {
  TensorField out = base;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] += delta * dir.data()[i];
  return out;
}

int cmd_stability(const Options& o, const std::string& fixture, std::size_t samples, std::vector<double> deltas,
                  const std::string& direction, unsigned seed) {
  if (fixture != "rindler" && fixture != "hyperboloid_forms")
    throw UsageError("--fixture must be rindler or hyperboloid_forms");
  if (direction != "fixture" && direction != "random") throw UsageError("--direction must be fixture or random");
  if (deltas.empty()) throw UsageError("--deltas must not be empty");
  const GridChart chart = default_chart(fixture, samples);
  const Fixture base = generate_fixture(fixture, {}, chart);
  const TensorField dir = random_direction(chart, 2, seed);
  const MultiIndex xs = base_point(o, chart);
  json rows = json::array();
  double lo = kInfinity, hi = 0.0;
  std::ostringstream s;
  s << "delta        input_gap     aligned_gap   ratio\n";
  for (double delta : deltas) {
    AlignmentResult a;
    if (fixture == "rindler") {
      const TensorField& g = base.fields.at("g");
      const TensorField gd = direction == "fixture" ? generate_fixture(fixture, {{"delta", delta}}, chart).fields.at("g")
                                                    : add_scaled(g, dir, delta);
      a = align_manifold(immerse_manifold(g, xs, o.epsilon, sweep_order(o)),
                         immerse_manifold(gd, xs, o.epsilon, sweep_order(o)), g, gd, o.p, o.epsilon);
    } else {
      const FundamentalForms f1 = fixture_forms(base);
      FundamentalForms f2 = direction == "fixture"
                                ? fixture_forms(generate_fixture(fixture, {{"k_scale", 1.0 + delta}}, chart))
                                : FundamentalForms{chart, f1.g, add_scaled(f1.k, dir, delta), f1.lambda};
      a = align_hypersurface(immerse_hypersurface_forms(f1, xs, o.epsilon, sweep_order(o)),
                             immerse_hypersurface_forms(f2, xs, o.epsilon, sweep_order(o)), f1, f2, o.p, o.epsilon,
                             true);
    }
    const double ratio = a.aligned_gap_w2p / a.input_gap;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    rows.push_back({{"delta", delta},
                    {"input_gap", cli::number(a.input_gap)},
                    {"aligned_gap_w2p", cli::number(a.aligned_gap_w2p)},
                    {"aligned_gap_max", cli::number(a.aligned_gap_max)},
                    {"ratio", cli::number(ratio)}});
    char line[128];
    std::snprintf(line, sizeof line, "%-12.3g %-13.6g %-13.6g %.6g\n", delta, a.input_gap, a.aligned_gap_w2p, ratio);
    s << line;
  }
  json j{{"fixture", fixture}, {"samples", samples}, {"direction", direction}, {"seed", seed},
         {"rows", rows}, {"ratio_spread", cli::number(hi / lo)}};
  s << "ratio spread (max/min) = " << hi / lo << '\n';
  emit(o, j, s.str());
  return 0;
}

int cmd_generate(const Options& o, const std::string& fixture, std::size_t samples, std::size_t dim,
                 const std::vector<std::string>& axes, const std::vector<std::string>& params) {
  require_out(o);
  GridChart chart;
  if (axes.empty()) {
    chart = default_chart(fixture, samples, dim);
  } else {
    std::vector<Axis> list;
    for (const auto& a : axes) {
      Axis ax;
      char c1 = 0, c2 = 0;
      std::istringstream in(a);
      if (!(in >> ax.min >> c1 >> ax.max >> c2 >> ax.samples) || c1 != ':' || c2 != ':' || !in.eof())
        throw UsageError("--axis expects min:max:samples, got '" + a + "'");
      list.push_back(ax);
    }
    try {
      chart = GridChart(std::move(list));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  FixtureParams fp;
  for (const auto& kv : params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--param expects key=value, got '" + kv + "'");
    try {
      fp[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("--param value must be a number: '" + kv + "'");
    }
  }
  const Fixture fx = generate_fixture(fixture, fp, chart);
  json meta = base_metadata("generate", {{"generator", fixture}, {"params", fx.params}});
  if (fx.lambda != 0) meta["lambda"] = fx.lambda;
  const Manifest m = write_dataset(o.out_dir, fx.fields, parse_encoding(o.encoding), meta);
  emit(o, m.to_json(), "wrote " + (fs::path(o.out_dir) / "manifest.json").string() + '\n');
  return 0;
}

int cmd_convert(const Options& o, const std::string& manifest) {
  require_out(o);
  const Dataset ds = read_dataset(manifest);
  const Manifest m = write_dataset(o.out_dir, ds.fields, parse_encoding(o.encoding), ds.manifest.metadata);
  emit(o, m.to_json(), "wrote " + (fs::path(o.out_dir) / "manifest.json").string() + '\n');
  return 0;
}

int report_error(const Options& o, const Error& e) {
  (void)o;
  std::cerr << cli::to_json(e).dump() << '\n';
  return e.code() == ErrorCode::IoError ? kExitIo : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isometric immersions into Minkowski space from gridded data"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Options o;
  std::string p_text = "4";
  app.add_flag("--json", o.json_out, "Machine-readable JSON output");
  std::function<int()> run;

  auto common = [&](CLI::App* sub, bool with_out) {
    sub->add_option("--p", p_text, "Exponent of the L^p norms (number >= 1 or inf)")->capture_default_str();
    sub->add_option("--epsilon", o.epsilon, "Certification constant in (0, 1]")->capture_default_str();
    sub->add_option("--x-star", o.x_star, "Base point grid index, comma separated")->delimiter(',');
    sub->add_option("--sweep", o.sweep, "Axis order of the integration sweep, comma separated")->delimiter(',');
    if (with_out) {
      sub->add_option("-o,--out", o.out_dir, "Output directory");
      sub->add_option("--encoding", o.encoding, "Field encoding for outputs")
          ->check(CLI::IsMember({"csv", "raw"}))
          ->capture_default_str();
    }
  };

  std::string matrix, anchor;
  auto* dec = app.add_subcommand("decompose", "Lorentz decomposition F with F^T eta F = G");
  dec->add_option("--matrix", matrix, "Symmetric matrix as JSON rows")->required();
  dec->add_option("--anchor", anchor, "Anchor matrix for the continuation map");
  dec->add_option("--epsilon", o.epsilon, "Certification constant in (0, 1]")->capture_default_str();
  dec->callback([&] { run = [&] { return cmd_decompose(o, matrix, anchor); }; });

  std::string manifest, manifest2;
  double flat_tol = 0.05;
  auto* curv = app.add_subcommand("curvature", "Riemann tensor and flatness residual of a metric");
  curv->add_option("manifest", manifest, "Dataset manifest with field g")->required();
  curv->add_option("--flat-tol", flat_tol, "max_abs above which the metric is reported nonflat")->capture_default_str();
  common(curv, true);
  curv->callback([&] { run = [&] { return cmd_curvature(o, manifest, flat_tol); }; });

  std::string y0, y02;
  auto* pf = app.add_subcommand("pfaff", "Pfaff systems built from g (frame equation) or from fields A0.., B0.., C0..");
  pf->require_subcommand(1);
  auto* pint = pf->add_subcommand("integrate", "Integrate over the whole chart");
  pint->add_option("manifest", manifest, "Dataset manifest")->required();
  pint->add_option("--y0", y0, "Initial value as JSON rows (default identity)");
  common(pint, true);
  pint->callback([&] { run = [&] { return cmd_pfaff_integrate(o, manifest, y0); }; });
  auto* pchk = pf->add_subcommand("check", "Compatibility residual");
  pchk->add_option("manifest", manifest, "Dataset manifest")->required();
  common(pchk, false);
  pchk->callback([&] { run = [&] { return cmd_pfaff_check(o, manifest); }; });
  auto* pdep = pf->add_subcommand("depend", "Continuous dependence gap between two systems");
  pdep->add_option("first", manifest, "First dataset")->required();
  pdep->add_option("second", manifest2, "Second dataset")->required();
  pdep->add_option("--y0", y0, "Initial value of the first system");
  pdep->add_option("--y0-second", y02, "Initial value of the second system (default: same)");
  common(pdep, false);
  pdep->callback([&] { run = [&] { return cmd_pfaff_depend(o, manifest, manifest2, y0, y02); }; });

  auto* imm = app.add_subcommand("immerse", "Immersion of a Lorentzian metric");
  imm->add_option("manifest", manifest, "Dataset manifest with field g")->required();
  common(imm, true);
  imm->callback([&] { run = [&] { return cmd_immerse(o, manifest); }; });

  std::optional<int> lambda;
  std::string fstar;
  auto* hyp = app.add_subcommand("hyper", "Hypersurfaces from rigged data or fundamental forms");
  hyp->require_subcommand(1);
  auto* hgc = hyp->add_subcommand("check-gc", "Gauss-Codazzi residuals (forms g, K or rigged gamma, K, L, M)");
  hgc->add_option("manifest", manifest, "Dataset manifest")->required();
  hgc->add_option("--lambda", lambda, "eta(l, l); default from metadata")->check(CLI::IsMember({-1, 1}));
  common(hgc, false);
  hgc->callback([&] { run = [&] { return cmd_hyper_check(o, manifest, lambda); }; });
  auto* hrig = hyp->add_subcommand("immerse-rigged", "Immersion from rigged operators gamma, K, L, M");
  hrig->add_option("manifest", manifest, "Dataset manifest")->required();
  hrig->add_option("--fstar", fstar, "Initial frame as JSON rows (default identity)");
  common(hrig, true);
  hrig->callback([&] { run = [&] { return cmd_hyper_rigged(o, manifest, fstar); }; });
  auto* hfor = hyp->add_subcommand("immerse-forms", "Immersion from fundamental forms g, K");
  hfor->add_option("manifest", manifest, "Dataset manifest")->required();
  hfor->add_option("--lambda", lambda, "eta(l, l); default from metadata")->check(CLI::IsMember({-1, 1}));
  common(hfor, true);
  hfor->callback([&] { run = [&] { return cmd_hyper_forms(o, manifest, lambda); }; });

  std::string mode = "manifold";
  bool no_proper = false;
  auto* al = app.add_subcommand("align", "Reconstruct two datasets and align them at the base point");
  al->add_option("first", manifest, "First dataset")->required();
  al->add_option("second", manifest2, "Second dataset")->required();
  al->add_option("--mode", mode, "manifold, rigged or forms")->capture_default_str();
  al->add_flag("--no-proper", no_proper, "Forms mode: allow orientation-reversing maps");
  al->add_option("--lambda", lambda, "eta(l, l); default from metadata")->check(CLI::IsMember({-1, 1}));
  common(al, false);
  al->callback([&] { run = [&] { return cmd_align(o, manifest, manifest2, mode, !no_proper, lambda); }; });

  std::string fixture = "rindler", direction = "fixture";
  std::size_t samples = 33;
  std::vector<double> deltas{1e-2, 1e-3, 1e-4};
  unsigned seed = 0;
  auto* st = app.add_subcommand("stability", "Aligned gap / input gap table over perturbation sizes");
  st->add_option("--fixture", fixture, "rindler or hyperboloid_forms")->capture_default_str();
  st->add_option("--samples", samples, "Samples per axis")->capture_default_str()->check(CLI::Range(4, 100000));
  st->add_option("--deltas", deltas, "Perturbation sizes, comma separated")->delimiter(',')->capture_default_str();
  st->add_option("--direction", direction, "fixture (rindler delta / K scale) or random")->capture_default_str();
  st->add_option("--seed", seed, "Seed of the random direction")->capture_default_str();
  common(st, false);
  st->callback([&] { run = [&] { return cmd_stability(o, fixture, samples, deltas, direction, seed); }; });

  std::size_t dim = 2;
  std::vector<std::string> axes, params;
  auto* gen = app.add_subcommand("generate", "Sample a closed-form fixture");
  gen->add_option("fixture", fixture, "Fixture name")->required();
  gen->add_option("--samples", samples, "Samples per axis on the default domain")->capture_default_str();
  gen->add_option("--dim", dim, "Dimension for the dimension-free fixtures")->capture_default_str();
  gen->add_option("--axis", axes, "Explicit axis min:max:samples (repeat per axis)");
  gen->add_option("--param", params, "Fixture parameter key=value (repeatable)");
  gen->add_option("-o,--out", o.out_dir, "Output directory")->required();
  gen->add_option("--encoding", o.encoding, "Field encoding")->check(CLI::IsMember({"csv", "raw"}))->capture_default_str();
  gen->callback([&] { run = [&] { return cmd_generate(o, fixture, samples, dim, axes, params); }; });

  auto* conv = app.add_subcommand("convert", "Rewrite a dataset with another encoding");
  conv->add_option("manifest", manifest, "Dataset manifest")->required();
  conv->add_option("-o,--out", o.out_dir, "Output directory")->required();
  conv->add_option("--encoding", o.encoding, "Field encoding")->check(CLI::IsMember({"csv", "raw"}))->capture_default_str();
  conv->callback([&] { run = [&] { return cmd_convert(o, manifest); }; });

  std::function<void(CLI::App*)> fall = [&](CLI::App* a) {
    for (auto* sub : a->get_subcommands([](CLI::App*) { return true; })) {
      sub->fallthrough();
      fall(sub);
    }
  };
  fall(&app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  try {
    o.p = parse_p(p_text);
    return run();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    return report_error(o, e);
  } catch (const fs::filesystem_error& e) {
    std::cerr << json{{"error", "IoError"}, {"message", e.what()}}.dump() << '\n';
    return kExitIo;
  }
}
