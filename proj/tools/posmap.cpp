// posmap: classify linear maps between matrix algebras from JSON documents.
//
//   posmap classify <input> [flags]
//   posmap cone <input> --cone {cp,ccp,d,i,p} [flags]
//   posmap gallery <name> [--param k=v ...] [--seed s] [--out file]
//   posmap verify <input> <report>
//
// Exit codes: 0 ok, 2 parse/validation error, 3 numeric failure, 4 certificate check failed.

#include "posmap/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_parse = 2;
constexpr int exit_numeric = 3;
constexpr int exit_verify = 4;

struct VerifyFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  double tol = 1e-9;
  int starts = 200;
  std::uint64_t seed = 0;
  std::int64_t budget_ms = -1;
  int threads = 1;
  std::string format = "json";
  std::string out;
  bool verify = false;
  bool strict = false;
};

posmap::ConeConfig cone_config(const Flags& f) {
  posmap::ConeConfig c;
  c.tol = f.tol;
  c.solver.starts = f.starts;
  c.solver.seed = f.seed;
  c.solver.threads = f.threads;
  if (f.budget_ms >= 0) c.solver.budget_ms = f.budget_ms;
  return c;
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw posmap::ParseError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

posmap::json read_json(const std::string& path) {
  try {
    return posmap::json::parse(read_file(path));
  } catch (const posmap::json::parse_error& e) {
    throw posmap::ParseError(path + ": " + e.what());
  }
}

// Temp file in the target directory, then rename.
void write_output(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  const std::filesystem::path target(out);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    f << text;
    f.flush();
    if (!f) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, target);
}

std::string dump(const posmap::json& j) { return j.dump(2) + "\n"; }

posmap::InputDocument load_input(const std::string& path, bool strict) {
  posmap::InputDocument doc = posmap::parse_input(read_json(path), strict);
  for (const std::string& w : doc.warnings) std::cerr << "warning: " << w << "\n";
  return doc;
}

int cmd_classify(const std::string& input, const Flags& f) {
  const posmap::InputDocument doc = load_input(input, f.strict);
  if (!doc.is_map()) throw posmap::ParseError("classify: input must have kind \"map\"");
  posmap::ClassifyConfig cfg;
  cfg.cone = cone_config(f);
  std::cerr << "classifying M_" << doc.map().dim_in() << " -> M_" << doc.map().dim_out() << "\n";
  const posmap::ClassificationReport r = posmap::classify_map(doc.map(), cfg);
  const posmap::json j = posmap::report_json(r);
  write_output(f.out, f.format == "text" ? posmap::report_text(r) : dump(j));
  if (f.verify) {
    // Re-check the serialized form, not the in-memory report.
    const posmap::CheckResult res = posmap::check_report(doc.map(), posmap::report_from_json(j));
    if (!res.ok) throw VerifyFailure(res.reason);
    std::cerr << "verify: all certificates re-validated\n";
  }
  return exit_ok;
}

int cmd_cone(const std::string& input, const std::string& cone_name, const Flags& f) {
  const auto cone = posmap::cone_from_string(cone_name);
  if (!cone) throw posmap::ParseError("unknown cone '" + cone_name + "' (cp, ccp, d, i, p)");
  const posmap::InputDocument doc = load_input(input, f.strict);
  if (doc.is_map()) throw posmap::ParseError("cone: input must have kind \"operator\"");
  const posmap::ConeConfig cfg = cone_config(f);
  const posmap::Verdict v = posmap::in_cone(*cone, doc.op(), cfg);
  const posmap::json j = posmap::cone_report_json(*cone, doc.op(), v, cfg);
  write_output(f.out, f.format == "text" ? posmap::cone_report_text(*cone, doc.op(), v) : dump(j));
  if (f.verify) {
    const posmap::ConeReport back = posmap::cone_report_from_json(j);
    const posmap::CheckResult res = posmap::check_cone_verdict(back.cone, doc.op(), back.verdict, back.config);
    if (!res.ok) throw VerifyFailure(res.reason);
    std::cerr << "verify: certificate re-validated\n";
  }
  return exit_ok;
}

int cmd_gallery(const std::string& name, const std::vector<std::string>& params, std::optional<std::uint64_t> seed,
                const std::string& out) {
  posmap::Parameters p;
  for (const std::string& kv : params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw posmap::BadParameter("--param expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty())
      throw posmap::BadParameter("--param " + key + ": '" + value + "' is not a number");
    p[key] = x;
  }
  const posmap::GalleryEntry e = posmap::make(name, p, seed);
  for (const std::string& w : e.warnings) std::cerr << "warning: " << w << "\n";
  write_output(out, dump(posmap::input_document(e)));
  return exit_ok;
}

// Re-validates a saved report against the raw input document alone.
int cmd_verify(const std::string& input, const std::string& report, bool strict) {
  const posmap::InputDocument doc = load_input(input, strict);
  const posmap::json j = read_json(report);
  if (!j.is_object() || !j.contains("kind")) throw posmap::ParseError("verify: report has no 'kind'");
  posmap::CheckResult res;
  if (j.at("kind") == "classification") {
    if (!doc.is_map()) throw posmap::ParseError("verify: classification report needs a map input");
    const posmap::ClassificationReport r = posmap::report_from_json(j);
    if (r.dim_in != doc.map().dim_in() || r.dim_out != doc.map().dim_out())
      throw VerifyFailure("report dimensions do not match the input");
    if (static_cast<Eigen::Index>(r.k_positive.size()) != std::min(r.dim_in, r.dim_out))
      throw VerifyFailure("report lists the wrong number of k-positivity verdicts");
    res = posmap::check_report(doc.map(), r);
  } else if (j.at("kind") == "cone_verdict") {
    if (doc.is_map()) throw posmap::ParseError("verify: cone report needs an operator input");
    const posmap::ConeReport r = posmap::cone_report_from_json(j);
    if (r.dim_a != doc.op().dim_a() || r.dim_b != doc.op().dim_b())
      throw VerifyFailure("report dimensions do not match the input");
    res = posmap::check_cone_verdict(r.cone, doc.op(), r.verdict, r.config);
  } else {
    throw posmap::ParseError("verify: unknown report kind");
  }
  if (!res.ok) throw VerifyFailure(res.reason);
  std::cerr << "verify: ok\n";
  return exit_ok;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--tol", f.tol, "relative tolerance for cone decisions")->capture_default_str();
  sub->add_option("--starts", f.starts, "random starts for the heuristic searches")->capture_default_str();
  sub->add_option("--seed", f.seed, "master seed")->capture_default_str();
  sub->add_option("--budget-ms", f.budget_ms, "wall-clock budget per solver call");
  sub->add_option("--threads", f.threads, "worker threads for multi-start searches")->capture_default_str();
  sub->add_option("--format", f.format, "output format")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  sub->add_option("--out", f.out, "output file (default: standard output)");
  sub->add_flag("--verify", f.verify, "re-validate every certificate; exit 4 on failure");
  sub->add_flag("--strict", f.strict, "reject unknown fields in the input");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classify linear maps between matrix algebras by cone tests on their Choi matrices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", posmap::version);

  Flags flags;
  std::string input, report, cone_name, name, gallery_out;
  std::vector<std::string> params;
  std::optional<std::uint64_t> gallery_seed;
  bool verify_strict = false;

  CLI::App* classify = app.add_subcommand("classify", "classify a map document");
  classify->add_option("input", input, "input document ('-' for standard input)")->required();
  add_common(classify, flags);

  CLI::App* cone = app.add_subcommand("cone", "test an operator document against one cone");
  cone->add_option("input", input, "input document ('-' for standard input)")->required();
  cone->add_option("--cone", cone_name, "cp, ccp, d, i or p")->required();
  add_common(cone, flags);

  CLI::App* gallery = app.add_subcommand("gallery", "write a catalog object as an input document");
  std::string catalog;
  for (const std::string& n : posmap::gallery_catalog()) catalog += (catalog.empty() ? "" : ", ") + n;
  gallery->add_option("name", name, catalog)->required();
  gallery->add_option("--param", params, "parameter as key=value")->expected(0, -1);
  gallery->add_option("--seed", gallery_seed, "seed for the random entries");
  gallery->add_option("--out", gallery_out, "output file (default: standard output)");

  CLI::App* verify = app.add_subcommand("verify", "re-validate a saved report against its input");
  verify->add_option("input", input, "input document")->required();
  verify->add_option("report", report, "report document")->required();
  verify->add_flag("--strict", verify_strict, "reject unknown fields in the input");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_parse;
  }

  try {
    if (flags.starts < 1) throw posmap::ParseError("--starts must be >= 1");
    if (flags.threads < 1) throw posmap::ParseError("--threads must be >= 1");
    if (!(flags.tol > 0.0)) throw posmap::ParseError("--tol must be positive");
    if (*classify) return cmd_classify(input, flags);
    if (*cone) return cmd_cone(input, cone_name, flags);
    if (*gallery) return cmd_gallery(name, params, gallery_seed, gallery_out);
    if (*verify) return cmd_verify(input, report, verify_strict);
  } catch (const VerifyFailure& e) {
    std::cerr << "verify failed: " << e.what() << "\n";
    return exit_verify;
  } catch (const posmap::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_parse;
  } catch (const posmap::UnknownName& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_parse;
  } catch (const posmap::BadParameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_parse;
  } catch (const posmap::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_parse;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return exit_numeric;
  }
  return exit_parse;
}
