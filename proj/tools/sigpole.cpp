// sigpole: candidate poles, simplex integrals and mean signatures of fBm.
//
// Exit codes: 0 ok, 1 verification failure, 2 usage or parse error,
// 3 domain error, 4 numerical failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include "sigpole/sigpole.hpp"

namespace {

using namespace sigpole;

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kDomain = 3, kNumeric = 4 };

struct Flags {
  std::string pairs, word, set, seed, mode = "eq405-consistent", output = "json", q = "3^r", method = "auto";
  double H = 0;
  double samples = 1e6;
  double tol = 1e-8;
  int workers = 1;
  int grid = 64;
  int k = 1, d = 1;
  std::string suite = "all";
  bool quick = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--seed", f.seed, "RNG seed, decimal or 0x-hex (default 0x46424D30, env SIGPOLE_SEED)");
  cmd->add_option("--samples", f.samples, "Monte Carlo samples")->capture_default_str();
  cmd->add_option("--tol", f.tol, "quadrature tolerance")->capture_default_str();
  cmd->add_option("--mode", f.mode, "normalization: eq405-consistent or paper-406")->capture_default_str();
  cmd->add_option("--workers", f.workers, "worker threads for Monte Carlo")->capture_default_str();
  cmd->add_option("--output", f.output, "json, csv or text")->capture_default_str();
  cmd->add_option("--q", f.q, "gap function: 3^r or q(0),q(1),...")->capture_default_str();
  cmd->add_option("--method", f.method, "auto, adaptive, direct-mc, pullback-mc, closed-form, wick-grid")
      ->capture_default_str();
}

std::uint64_t parse_seed(const std::string& text) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used, 0);
    if (used != text.size()) throw ParseError("");
    return v;
  } catch (const std::exception&) {
    throw ParseError("invalid seed '" + text + "'");
  }
}

std::optional<Method> parse_method(const std::string& m) {
  if (m == "auto") return std::nullopt;
  if (m == "adaptive") return Method::adaptive;
  if (m == "direct-mc") return Method::direct_mc;
  if (m == "pullback-mc") return Method::pullback_mc;
  if (m == "closed-form") return Method::closed_form;
  if (m == "wick-grid") return Method::wick_grid;
  throw ParseError("unknown method '" + m + "'");
}

std::vector<std::int64_t> parse_q(const std::string& text) {
  if (text == "3^r") return {};
  std::vector<std::int64_t> q;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      q.push_back(std::stoll(item, &used));
      if (used != item.size()) throw ParseError("");
    } catch (const std::exception&) {
      throw ParseError("invalid --q entry '" + item + "'");
    }
  }
  GapFunction check(q);  // validates admissibility
  return q;
}

RunConfig make_config(const Flags& f) {
  RunConfig c;
  if (!f.seed.empty())
    c.seed = parse_seed(f.seed);
  else if (const char* env = std::getenv("SIGPOLE_SEED"))
    c.seed = parse_seed(env);
  if (!(f.samples >= 2) || f.samples > 1e12) throw ParseError("--samples must be in [2, 1e12]");
  c.samples = static_cast<std::uint64_t>(f.samples);
  if (!(f.tol > 0)) throw ParseError("--tol must be positive");
  c.tol = f.tol;
  c.q = parse_q(f.q);
  c.mode = parse_normalization(f.mode);
  c.output = parse_output_format(f.output);
  if (f.workers < 1 || f.workers > 256) throw ParseError("--workers must be in [1, 256]");
  c.workers = f.workers;
  c.method = parse_method(f.method);
  return c;
}

void print_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

// ---------------------------------------------------------------------------

int cmd_poles(const Flags& f, const RunConfig& c) {
  if (f.pairs.empty() == f.word.empty()) throw ParseError("poles needs exactly one of --pairs or --word");
  if (!f.set.empty() && f.pairs.empty()) throw ParseError("--set needs --pairs");
  Json j = envelope("poles", c);
  std::ostringstream text;
  std::vector<PoleContribution> csv_rows;

  if (!f.pairs.empty()) {
    const auto p = parse_pairs(f.pairs);
    const auto contributions = candidate_contributions(p);
    j["result"] = partition_poles_json(p, contributions);
    j["result"]["provenance"] = "exact";
    csv_rows = contributions;
    text << "pairs " << to_string(p) << "\n";
    const auto poles = pole_set_of(contributions);
    for (const auto& pr : poles.progressions()) text << "  " << to_string(pr) << "\n";
    text << "contributions:\n";
    for (const auto& cc : contributions)
      text << "  offset " << to_string(cc.progression.offset()) << " step " << to_string(cc.progression.step())
           << "  S=" << to_string(cc.witness) << "\n";
    if (!f.set.empty()) {
      const auto s = parse_position_set(f.set);
      const auto b = bracket_breakdown(s, p);
      Json q = to_json(b);
      q["set"] = to_string(s);
      if (b.twice_bracket > 0)
        q["progression"] =
            to_json(RationalProgression(1 - make_rational(s.size(), b.twice_bracket), make_rational(1, b.twice_bracket)));
      j["result"]["set"] = q;
      text << "S=" << to_string(s) << "  2[S|P]=" << b.twice_bracket << "\n";
    }
  } else {
    const auto w = parse_word(f.word);
    const auto report = candidate_pole_report(w);
    j["result"] = to_json(report);
    j["result"]["provenance"] = "exact";
    for (const auto& part : report.partitions)
      csv_rows.insert(csv_rows.end(), part.contributions.begin(), part.contributions.end());
    text << "word " << to_string(w) << "\n";
    if (report.partitions.empty()) text << "  empty: no refining pair partitions\n";
    for (const auto& pr : report.poles.progressions()) text << "  " << to_string(pr) << "\n";
  }

  if (c.output == OutputFormat::json)
    print_json(j);
  else if (c.output == OutputFormat::csv)
    std::cout << to_csv(csv_rows);
  else
    std::cout << text.str();
  return kOk;
}

int cmd_eval(const Flags& f, const RunConfig& c) {
  EvalResult r;
  if (c.method == Method::wick_grid) {
    if (f.word.empty()) throw ParseError("wick-grid needs --word");
    r = wick_grid_oracle(parse_word(f.word), f.H, f.grid);
  } else {
    if (f.pairs.empty()) throw ParseError("eval needs --pairs");
    r = evaluate_l(parse_pairs(f.pairs), f.H, c.eval_options());
  }
  if (c.output == OutputFormat::json) {
    Json j = envelope("eval", c);
    j["result"] = to_json(r);
    print_json(j);
  } else if (c.output == OutputFormat::csv) {
    std::cout << to_csv(r);
  } else {
    std::cout << format_double(r.value) << " +- " << format_double(r.uncertainty()) << " (" << to_string(r.method) << ")\n";
  }
  return kOk;
}

int cmd_mean_sig(const Flags& f, const RunConfig& c) {
  if (f.word.empty()) throw ParseError("mean-sig needs --word");
  const auto m = mean_iterated_integral(parse_word(f.word), f.H, c.mode, c.eval_options());
  if (c.output == OutputFormat::json) {
    Json j = envelope("mean-sig", c);
    j["result"] = to_json(m);
    print_json(j);
  } else if (c.output == OutputFormat::csv) {
    std::cout << to_csv(m, c);
  } else {
    std::cout << format_double(m.value) << " +- " << format_double(m.uncertainty) << " [" << to_string(m.mode) << "]\n";
    if (m.discrepancy) std::cout << "note: " << *m.discrepancy << "\n";
  }
  return kOk;
}

int cmd_gamma_table(const Flags& f, const RunConfig& c) {
  const auto t = gamma_table(f.k, f.d, f.H, c.mode, c.eval_options());
  if (c.output == OutputFormat::json) {
    Json j = envelope("gamma-table", c);
    j["result"] = to_json(t);
    print_json(j);
  } else if (c.output == OutputFormat::csv) {
    std::cout << to_csv(t, c);
  } else {
    for (const auto& e : t.entries) std::cout << to_string(e.word) << "  " << format_double(e.value) << "\n";
  }
  return kOk;
}

int cmd_verify(const Flags& f, const RunConfig& c) {
  VerifyOptions o{f.quick, c.q, c.seed};
  const auto checks = verify(f.suite, o);
  bool ok = true;
  for (const auto& ch : checks) ok = ok && ch.passed;
  if (c.output == OutputFormat::json) {
    Json j = envelope("verify", c);
    Json list = Json::array();
    for (const auto& ch : checks)
      list.push_back(Json{{"suite", ch.suite}, {"check", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
    j["result"] = Json{{"suite", f.suite}, {"quick", f.quick}, {"passed", ok}, {"checks", list}};
    print_json(j);
  } else {
    for (const auto& ch : checks)
      std::cout << (ch.passed ? "PASS " : "FAIL ") << ch.suite << ": " << ch.name
                << (ch.detail.empty() ? "" : "  " + ch.detail) << "\n";
  }
  if (!ok) {
    std::cerr << "failed checks:";
    for (const auto& ch : checks)
      if (!ch.passed) std::cerr << " [" << ch.suite << ": " << ch.name << "]";
    std::cerr << "\n";
  }
  return ok ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Candidate poles and simplex integrals for the mean signature of fBm", "sigpole"};
  app.set_version_flag("--version", std::string(sigpole::kVersion));
  app.require_subcommand(1);
  Flags f;

  auto* poles = app.add_subcommand("poles", "candidate pole progressions for a partition or word");
  poles->add_option("--pairs", f.pairs, "pair partition, e.g. 1-3,2-4");
  poles->add_option("--word", f.word, "word, e.g. 1,2,2,1");
  poles->add_option("--set", f.set, "position set, e.g. 2-8,10-11 (with --pairs)");
  add_common(poles, f);

  auto* eval = app.add_subcommand("eval", "evaluate L(P;H)");
  eval->add_option("--pairs", f.pairs, "pair partition");
  eval->add_option("--word", f.word, "word (wick-grid only)");
  eval->add_option("--H", f.H, "Hurst parameter")->required();
  eval->add_option("--grid", f.grid, "grid size m for wick-grid")->capture_default_str();
  add_common(eval, f);

  auto* mean = app.add_subcommand("mean-sig", "mean iterated integral of a word");
  mean->add_option("--word", f.word, "word")->required();
  mean->add_option("--H", f.H, "Hurst parameter")->required();
  add_common(mean, f);

  auto* table = app.add_subcommand("gamma-table", "coefficients for every word of length 2k over d letters");
  table->add_option("--k", f.k, "half word length")->required();
  table->add_option("--d", f.d, "alphabet size")->required();
  table->add_option("--H", f.H, "Hurst parameter")->required();
  add_common(table, f);

  auto* ver = app.add_subcommand("verify", "run self-check suites");
  ver->add_option("suite", f.suite, "combinatorics, poles, blowup, quadrature, signature or all")->capture_default_str();
  ver->add_flag("--quick", f.quick, "smaller problem sizes");
  add_common(ver, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    const auto config = make_config(f);
    if (poles->parsed()) return cmd_poles(f, config);
    if (eval->parsed()) return cmd_eval(f, config);
    if (mean->parsed()) return cmd_mean_sig(f, config);
    if (table->parsed()) return cmd_gamma_table(f, config);
    if (ver->parsed()) return cmd_verify(f, config);
  } catch (const sigpole::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomain;
  } catch (const sigpole::NumericError& e) {
    std::cerr << "error: " << e.what() << " (best estimate " << sigpole::format_double(e.best_estimate()) << ")\n";
    return kNumeric;
  } catch (const sigpole::SizeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomain;
  } catch (const std::invalid_argument& e) {  // parse, pair and dimension errors
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kUsage;
}
