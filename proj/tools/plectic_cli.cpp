#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "plectic/elliptic.hpp"
#include "plectic/harmonize.hpp"
#include "plectic/homology.hpp"

using namespace plectic;
using nlohmann::json;

namespace {

const int SCHEMA = 1;
const int EXIT_MISMATCH = 11;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::SchemaError: return 2;
    case ErrorKind::RadialContractViolation: return 3;
    case ErrorKind::DepthExceeded:
    case ErrorKind::OutOfDepth: return 4;
    case ErrorKind::OracleIncomplete: return 5;
    case ErrorKind::LiftInconsistent: return 6;
    case ErrorKind::DegenerationUnderdetermined: return 7;
    case ErrorKind::NotMultiplicative: return 8;
    case ErrorKind::EmbeddingNotInert: return 9;
    case ErrorKind::InsufficientPrecision: return 10;
    case ErrorKind::EmbeddingUnavailable: return 12;
    case ErrorKind::PrimeNotInert: return 13;
    case ErrorKind::NotASquare: return 14;
    case ErrorKind::InvalidPeriod: return 15;
    case ErrorKind::InvalidArgument: return 16;
  }
  return 1;
}

struct Config {
  std::string fixture, golden, input, cochain, out, element = "psi", kappa = "zero";
  int depth = 2, prec = 6, threads = 0, digits = -1;
  bool emit_json = false, twist = false;
  u64 seed = 1;
};

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::SchemaError, "cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SchemaError, path + ": " + e.what());
  }
}

void write_json(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  f << j.dump(2) << "\n";
}

void require(const Config& c) {
  if (c.depth < 1) throw Error(ErrorKind::InvalidArgument, "depth must be at least 1");
  if (c.prec < 2) throw Error(ErrorKind::InvalidArgument, "precision must be at least 2");
}

void emit(const Config& c, const json& machine, const std::string& text) {
  if (c.emit_json) {
    json j = machine;
    j["schema"] = SCHEMA;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << text << "\n";
  }
}

TensorValue value_of(const json& j) {
  if (j.contains("value")) return tensor_from_json(j.at("value"));
  return tensor_from_json(j);
}

// Best agreement over sign, factor swap and conjugation in each factor.
std::pair<int, std::string> best_agreement(const TensorValue& x, const TensorValue& g) {
  int best = -1;
  std::string how;
  for (int mask = 0; mask < 16; ++mask) {
    TensorValue y = x;
    if (mask & 1) y = -y;
    if (mask & 2) y = y.swapped();
    if (mask & 4) y = y.conjugated(1);
    if (mask & 8) y = y.conjugated(2);
    int k = agreement(y, g);
    if (k > best) {
      best = k;
      how = std::string(mask & 1 ? "-" : "+") + (mask & 2 ? " swap" : "") + (mask & 4 ? " conj1" : "") +
            (mask & 8 ? " conj2" : "");
    }
  }
  return {best, how};
}

int report_golden(const Config& c, const TensorValue& v, json& machine, std::string& text) {
  if (c.golden.empty()) return 0;
  TensorValue g = value_of(read_json(c.golden));
  auto [k, how] = best_agreement(v, g);
  int need = c.digits >= 0 ? c.digits : std::min(v.abs_prec(), g.abs_prec());
  machine["golden"] = {{"agreement", k}, {"required", need}, {"symmetry", how}, {"ok", k >= need}};
  text += "\ngolden: agree to O(" + std::to_string(v.prime()) + "^" + std::to_string(k) + ")";
  return k >= need ? 0 : EXIT_MISMATCH;
}

int check_fixture(const Config& c) {
  Fixture f = load_fixture(c.fixture);
  json m = {{"kind", "check-fixture"}, {"ok", true},        {"label", f.label},
            {"depth", f.depth},        {"p", f.p},          {"generators", f.generators.size()},
            {"kappa", f.kappa.kind_name()}};
  std::ostringstream t;
  t << "ok: " << f.label << ", " << f.generators.size() << " generators, depth " << f.depth << ", kappa "
    << f.kappa.kind_name();
  emit(c, m, t.str());
  return 0;
}

GroupElement element_of(const Fixture& f, const std::string& which) {
  if (which == "psi") return GroupElement::from_exact(f.psi, f.p);
  size_t i = 0;
  try {
    i = std::stoul(which);
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidArgument, "element must be psi or a generator index");
  }
  if (i >= f.generators.size()) throw Error(ErrorKind::InvalidArgument, "no generator " + which);
  return GroupElement::from_exact(f.generators[i], f.p);
}

int harmonize(const Config& c) {
  require(c);
  Fixture f = load_fixture(c.fixture);
  if (c.depth > f.depth) throw Error(ErrorKind::DepthExceeded, "fixture radial systems stop at depth " + std::to_string(f.depth));
  ShapiroCocycle sc(f);
  Harmonizer H(sc, c.depth, ppow(f.p, c.prec + 1), c.threads);
  FiniteCochain out = H.corrected(element_of(f, c.element));
  json d = dump(out);
  if (c.out.empty()) {
    std::cout << d.dump(2) << "\n";
    return 0;
  }
  write_json(c.out, d);
  json m = {{"kind", "harmonize"}, {"out", c.out}, {"m_out", out.depth()}, {"digest", digest(out)},
            {"solver", H.stats().to_json()}, {"D_digest", digest(H.D())}};
  emit(c, m, "wrote " + c.out + ": depth " + std::to_string(out.depth()) + ", digest " + digest(out));
  return 0;
}

int integrate(const Config& c) {
  require(c);
  FiniteCochain ch = load_cochain(read_json(c.cochain));
  Fixture f = load_fixture(c.fixture);
  IntegrandSpec spec = fixture_integrand(f, c.prec + 4);
  TensorValue v = riemann_log_integral(ch, spec, ch.depth(), c.threads);
  json m = {{"kind", "integrate"}, {"m", ch.depth()}, {"digest", digest(ch)}, {"value", to_json(v)}};
  std::string t = v.str();
  int rc = report_golden(c, v, m, t);
  emit(c, m, t);
  return rc;
}

int point_side_cmd(const Config& c, bool prec_given) {
  PointSideInput in = load_point_side(read_json(c.fixture));
  if (prec_given) {
    require(c);
    in.prec = c.prec;
  }
  PointSideResult r = point_side(in);
  json m = {{"kind", "point-side"},
            {"prec", in.prec},
            {"split", {r.split[0], r.split[1]}},
            {"q", {r.q[0].str(), r.q[1].str()}},
            {"value", to_json(r.value)}};
  if (r.value.is_alpha_alpha()) m["alpha_alpha"] = r.value.c[1][1].str();
  std::string t = r.value.str();
  int rc = report_golden(c, r.value, m, t);
  emit(c, m, t);
  return rc;
}

int plectic_cmd(const Config& c) {
  require(c);
  Fixture f = load_fixture(c.fixture);
  PlecticResult r = plectic_invariant(f, c.depth, c.prec, c.threads);
  json m = {{"kind", "plectic"}, {"value", to_json(r.value)}, {"diagnostics", r.diagnostics}};
  std::string t = r.value.str();
  int rc = report_golden(c, r.value, m, t);
  emit(c, m, t);
  return rc;
}

int compare(const Config& c) {
  if (c.golden.empty()) throw Error(ErrorKind::InvalidArgument, "compare needs --golden");
  TensorValue x = value_of(read_json(c.input));
  TensorValue g = value_of(read_json(c.golden));
  auto [k, how] = best_agreement(x, g);
  int need = c.digits >= 0 ? c.digits : std::min(x.abs_prec(), g.abs_prec());
  json m = {{"kind", "compare"}, {"agreement", k}, {"required", need}, {"symmetry", how}, {"ok", k >= need}};
  std::string t = (k >= need ? "agree to O(" : "disagree: best agreement O(") + std::to_string(x.prime()) + "^" +
                  std::to_string(k) + ")";
  emit(c, m, t);
  return k >= need ? 0 : EXIT_MISMATCH;
}

int synth_fixture(const Config& c) {
  SyntheticOptions o;
  o.depth = c.depth;
  o.kappa = c.kappa;
  o.twist = c.twist;
  o.seed = c.seed;
  Fixture f = synthetic_fixture(o);
  validate(f);
  write_json(c.out, to_json(f));
  json m = {{"kind", "synth-fixture"}, {"out", c.out}, {"label", f.label}, {"depth", f.depth}};
  emit(c, m, "wrote " + c.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"plectic invariants and point-side values"};
  app.require_subcommand(1);
  Config c;
  auto common = [&](CLI::App* s) {
    s->add_option("--threads", c.threads, "OpenMP threads (0 = default)");
    s->add_flag("--emit-json", c.emit_json, "machine-readable output");
  };
  auto* check = app.add_subcommand("check-fixture", "validate a fixture");
  check->add_option("--fixture", c.fixture)->required();
  common(check);

  auto* harm = app.add_subcommand("harmonize", "emit the corrected cochain of psi or a generator");
  harm->add_option("--fixture", c.fixture)->required();
  harm->add_option("--depth", c.depth);
  harm->add_option("--prec", c.prec);
  harm->add_option("--element", c.element, "psi or a generator index");
  harm->add_option("--out", c.out, "write the dump here instead of stdout");
  common(harm);

  auto* integ = app.add_subcommand("integrate", "integrate a cochain dump against the fixture cycle");
  integ->add_option("--cochain", c.cochain)->required();
  integ->add_option("--fixture", c.fixture)->required();
  integ->add_option("--prec", c.prec);
  integ->add_option("--golden", c.golden);
  integ->add_option("--digits", c.digits);
  common(integ);

  auto* ps = app.add_subcommand("point-side", "log of det_S from curve and points");
  ps->add_option("--fixture", c.fixture, "point-side input file")->required();
  auto* ps_prec = ps->add_option("--prec", c.prec);
  ps->add_option("--golden", c.golden);
  ps->add_option("--digits", c.digits);
  common(ps);

  auto* pl = app.add_subcommand("plectic", "full pipeline");
  pl->add_option("--fixture", c.fixture)->required();
  pl->add_option("--depth", c.depth);
  pl->add_option("--prec", c.prec);
  pl->add_option("--golden", c.golden);
  pl->add_option("--digits", c.digits);
  common(pl);

  auto* cmp = app.add_subcommand("compare", "digit agreement up to sign, swap and conjugation");
  cmp->add_option("--input", c.input)->required();
  cmp->add_option("--golden", c.golden)->required();
  cmp->add_option("--digits", c.digits, "required agreement (default: the smaller precision)");
  common(cmp);

  auto* syn = app.add_subcommand("synth-fixture", "write a synthetic fixture");
  syn->add_option("--out", c.out)->required();
  syn->add_option("--depth", c.depth);
  syn->add_option("--kappa", c.kappa, "zero | unit | table");
  syn->add_flag("--twist", c.twist);
  syn->add_option("--seed", c.seed);
  common(syn);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) return check_fixture(c);
    if (*harm) return harmonize(c);
    if (*integ) return integrate(c);
    if (*ps) return point_side_cmd(c, ps_prec->count() > 0);
    if (*pl) return plectic_cmd(c);
    if (*cmp) return compare(c);
    if (*syn) return synth_fixture(c);
  } catch (const Error& e) {
    json j = {{"schema", SCHEMA}, {"error", error_name(e.kind())}, {"message", e.what()}, {"exit", exit_code(e.kind())}};
    std::cerr << j.dump() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    json j = {{"schema", SCHEMA}, {"error", "Internal"}, {"message", e.what()}, {"exit", 1}};
    std::cerr << j.dump() << "\n";
    return 1;
  }
  return 1;
}
