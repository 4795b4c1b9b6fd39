#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "blockgroup/group.hpp"
#include "blockgroup/json_io.hpp"
#include "blockgroup/oracle.hpp"
#include "blockgroup/subset.hpp"
#include "blockgroup/verify.hpp"

#include "CLI11.hpp"

namespace blockgroup {

// Exit-status contract: 0 pass/success, 1 verification failure or
// theorem mismatch, 2 usage error.
inline constexpr int exit_ok = 0;
inline constexpr int exit_failed = 1;
inline constexpr int exit_usage = 2;

enum class Command { gens, verify, cosets, oracle, sweep };
enum class OutputFormat { text, json };

struct RunConfig {
  Command command = Command::gens;
  int n = 0;
  int t = 0;
  std::optional<std::vector<int>> base;  ///< oracle: explicit base set positions
  std::string oracle_mode = "both";      ///< v | vbar | both
  int max_n = 0;                         ///< sweep bound
  VerifyBudget verify_budget;
  OracleBudget oracle_budget;
  OutputFormat format = OutputFormat::text;
  std::optional<std::pair<int, int>> corrupt;  ///< test hook: (generator, position) bit flip
  int coset_guard = 20;
  bool show_witness = false;  ///< oracle: print the witness family
};

namespace cli_detail {

inline SubsetMask base_from_positions(int n, const std::vector<int>& positions) {
  SubsetMask s(n);
  for (int p : positions) s.set(p);
  return s;
}

inline GeneratorSet build_maybe_corrupted(int n, int t,
                                          const std::optional<std::pair<int, int>>& corrupt) {
  GeneratorSet gs = build_generator_set(n, t);
  if (corrupt) {
    return gs.with_flipped_bit(corrupt->first, corrupt->second);
  }
  return gs;
}

inline void print_verify_text(std::ostream& out, const VerificationReport& r, int n, int t,
                              const VerifyBudget& budget) {
  out << "n=" << n << " t=" << t
      << " mode=" << (r.mode == VerifyMode::exhaustive ? "exhaustive" : "sampled")
      << " combos=" << r.combos_checked << " seed=" << budget.seed << " jobs=" << budget.jobs
      << " group_order_confirmed=" << (r.group_order_confirmed ? "yes" : "no") << "\n";
  for (std::size_t i = 0; i < r.failures.size() && i < 16; ++i) {
    out << "  miss: combo_bits=" << r.failures[i].combo_bits
        << " missed_window_start=" << r.failures[i].missed_start << "\n";
  }
  if (r.failures.size() > 16) {
    out << "  ... " << r.failures.size() - 16 << " further misses\n";
  }
  out << "result: " << (r.pass() ? "PASS" : "FAIL") << " (" << std::fixed << std::setprecision(1)
      << r.elapsed_ms << " ms)\n";
  out.unsetf(std::ios_base::floatfield);
}

inline void print_oracle_text(std::ostream& out, const OracleResult& r) {
  out << (r.quantity == ExtremalQuantity::v ? "v" : "v_bar") << " = " << r.value;
  if (!r.exact()) {
    out << " (bounds " << r.lower_bound << ".." << r.upper_bound << ", search timed out)";
  } else if (r.timed_out) {
    out << " (exact via certificates, search timed out)";
  }
  out << "  nodes=" << r.nodes_explored << "\n";
}

inline void print_theorem_table(std::ostream& out, const std::vector<TheoremRow>& rows) {
  out << "   n   t          v      v_bar  predicted  agree\n";
  for (const TheoremRow& row : rows) {
    out << std::setw(4) << row.n << std::setw(4) << row.t << std::setw(11) << row.v_result.value
        << std::setw(11) << row.vbar_result.value << std::setw(11) << row.predicted
        << std::setw(7) << (row.agree ? "yes" : "NO");
    if (row.v_result.timed_out || row.vbar_result.timed_out) out << "  (timed out)";
    out << "\n";
  }
}

}  // namespace cli_detail

inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  switch (cfg.command) {
    case Command::gens: {
      if (cfg.n < 1 || cfg.t < 1 || cfg.t > cfg.n) {
        err << "gens: need 1 <= t <= n\n";
        return exit_usage;
      }
      GeneratorSet gs = build_generator_set(cfg.n, cfg.t);
      if (cfg.format == OutputFormat::json) {
        out << to_json(gs).dump() << "\n";
      } else {
        out << "n = " << cfg.n << ", t = " << cfg.t << ", euclid depth k = " << gs.euclid().k
            << "\n";
        for (int i = 1; i <= cfg.t; ++i) {
          out << "g_" << i << " = " << to_set_text(gs.generator(i)) << "\n";
        }
      }
      return exit_ok;
    }

    case Command::verify: {
      if (cfg.n < 1 || cfg.t < 1 || cfg.t > cfg.n) {
        err << "verify: need 1 <= t <= n\n";
        return exit_usage;
      }
      if (cfg.t > 63) {
        err << "verify: t <= 63 required for combo enumeration\n";
        return exit_usage;
      }
      GeneratorSet gs = build_maybe_corrupted(cfg.n, cfg.t, cfg.corrupt);
      VerificationReport report = verify_group(gs, cfg.verify_budget);
      if (cfg.format == OutputFormat::json) {
        nlohmann::json j = to_json(report, cfg.n, cfg.t);
        j["seed"] = cfg.verify_budget.seed;
        out << j.dump() << "\n";
      } else {
        print_verify_text(out, report, cfg.n, cfg.t, cfg.verify_budget);
      }
      return (report.pass() && report.group_order_confirmed) ? exit_ok : exit_failed;
    }

    case Command::cosets: {
      if (cfg.n < 1 || cfg.t < 1 || cfg.t > cfg.n) {
        err << "cosets: need 1 <= t <= n\n";
        return exit_usage;
      }
      if (cfg.n > cfg.coset_guard) {
        err << "cosets: n <= " << cfg.coset_guard << " required (full power-set enumeration)\n";
        return exit_usage;
      }
      GeneratorSet gs = build_maybe_corrupted(cfg.n, cfg.t, cfg.corrupt);
      CosetPartitionSummary summary = verify_coset_partition(gs, cfg.coset_guard);
      const std::uint64_t expected = std::uint64_t{1} << (cfg.n - cfg.t);
      const bool ok = summary.coset_count == expected && summary.agreement_violations == 0;
      if (cfg.format == OutputFormat::json) {
        nlohmann::json j;
        j["n"] = cfg.n;
        j["t"] = cfg.t;
        j["coset_count"] = summary.coset_count;
        j["expected_cosets"] = expected;
        j["agreement_violations"] = summary.agreement_violations;
        j["pass"] = ok;
        out << j.dump() << "\n";
      } else {
        out << "n=" << cfg.n << " t=" << cfg.t << " cosets=" << summary.coset_count
            << " expected=" << expected << " violations=" << summary.agreement_violations
            << "\nresult: " << (ok ? "PASS" : "FAIL") << "\n";
      }
      return ok ? exit_ok : exit_failed;
    }

    case Command::oracle: {
      if (cfg.n < 1) {
        err << "oracle: need n >= 1\n";
        return exit_usage;
      }
      if (cfg.n > cfg.oracle_budget.max_n || cfg.n > 14) {
        err << "oracle: n <= " << std::min(cfg.oracle_budget.max_n, 14)
            << " required (guard on the 2^n-vertex graph)\n";
        return exit_usage;
      }
      SubsetMask base(cfg.n);
      if (cfg.base) {
        for (int p : *cfg.base) {
          if (p < 1 || p > cfg.n) {
            err << "oracle: base position " << p << " outside [1, n]\n";
            return exit_usage;
          }
          base.set(p);
        }
      } else if (cfg.t >= 1 && cfg.t <= cfg.n) {
        for (int p = 1; p <= cfg.t; ++p) base.set(p);
      } else {
        err << "oracle: give --base or a valid --t\n";
        return exit_usage;
      }
      TranslateFamily fam = TranslateFamily::of_base(base);

      std::optional<OracleResult> rv, rvbar;
      if (cfg.oracle_mode == "v" || cfg.oracle_mode == "both") {
        rv = oracle_v(fam, cfg.oracle_budget);
      }
      if (cfg.oracle_mode == "vbar" || cfg.oracle_mode == "both") {
        rvbar = oracle_vbar(fam, cfg.oracle_budget);
      }
      if (!rv && !rvbar) {
        err << "oracle: --mode must be v, vbar, or both\n";
        return exit_usage;
      }

      bool ok = true;
      if (rv && !rv->exact()) ok = false;
      if (rvbar && !rvbar->exact()) ok = false;
      if (rv && rvbar && rv->value != rvbar->value) ok = false;

      if (cfg.format == OutputFormat::json) {
        nlohmann::json j;
        j["n"] = cfg.n;
        j["base"] = to_set_text(base);
        if (rv) j["v"] = to_json(*rv);
        if (rvbar) j["v_bar"] = to_json(*rvbar);
        j["pass"] = ok;
        out << j.dump() << "\n";
      } else {
        out << "n=" << cfg.n << " base=" << to_set_text(base) << " translates=" << fam.members.size()
            << "\n";
        if (rv) print_oracle_text(out, *rv);
        if (rvbar) print_oracle_text(out, *rvbar);
        if (cfg.show_witness) {
          for (const auto* r : {rv ? &*rv : nullptr, rvbar ? &*rvbar : nullptr}) {
            if (!r) continue;
            out << (r->quantity == ExtremalQuantity::v ? "v" : "v_bar") << " witness:";
            for (const SubsetMask& s : r->witness) out << " " << to_set_text(s);
            out << "\n";
          }
        }
      }
      return ok ? exit_ok : exit_failed;
    }

    case Command::sweep: {
      if (cfg.max_n < 1) {
        err << "sweep: need --max-n >= 1\n";
        return exit_usage;
      }
      if (cfg.max_n > 63) {
        err << "sweep: max-n <= 63 required for combo enumeration\n";
        return exit_usage;
      }
      bool all_pass = true;
      nlohmann::json jverify = nlohmann::json::array();
      std::ostringstream matrix;
      std::ostringstream failures;
      for (int n = 1; n <= cfg.max_n; ++n) {
        matrix << std::setw(4) << n << "  ";
        for (int t = 1; t <= n; ++t) {
          // The corrupt hook only applies where the target bit exists.
          std::optional<std::pair<int, int>> corrupt = cfg.corrupt;
          if (corrupt && (corrupt->first > t || corrupt->second > n)) corrupt.reset();
          GeneratorSet base_gs = build_generator_set(n, t);
          if (corrupt) {
            try {
              base_gs = base_gs.with_flipped_bit(corrupt->first, corrupt->second);
            } catch (const std::invalid_argument&) {
              // Flip inside [1, t]: rejected by the triangular construction
              // check, which counts as a detected corruption.
              all_pass = false;
              matrix << 'F';
              failures << "FAIL verify n=" << n << " t=" << t
                       << " corrupted construction rejected (triangular property)\n";
              if (cfg.format == OutputFormat::json) {
                nlohmann::json j;
                j["n"] = n;
                j["t"] = t;
                j["pass"] = false;
                j["construction_rejected"] = true;
                jverify.push_back(std::move(j));
              }
              continue;
            }
          }
          const GeneratorSet& gs = base_gs;
          VerificationReport report = verify_group(gs, cfg.verify_budget);
          const bool ok = report.pass() && report.group_order_confirmed;
          all_pass = all_pass && ok;
          matrix << (ok ? '.' : 'F');
          if (!ok) {
            failures << "FAIL verify n=" << n << " t=" << t;
            if (!report.failures.empty()) {
              failures << " witness combo_bits=" << report.failures.front().combo_bits
                       << " missed_window_start=" << report.failures.front().missed_start;
            }
            if (!report.group_order_confirmed) failures << " group_order_unconfirmed";
            failures << "\n";
          }
          if (cfg.format == OutputFormat::json) {
            nlohmann::json j = to_json(report, n, t);
            j["pass"] = ok;
            jverify.push_back(std::move(j));
          }
        }
        matrix << "\n";
      }

      std::vector<TheoremRow> rows;
      const int oracle_n = std::min(cfg.max_n, cfg.oracle_budget.max_n);
      if (oracle_n >= 1) {
        rows = check_theorems(oracle_n, cfg.oracle_budget);
        for (const TheoremRow& row : rows) all_pass = all_pass && row.agree;
      }

      if (cfg.format == OutputFormat::json) {
        nlohmann::json j;
        j["max_n"] = cfg.max_n;
        j["seed"] = cfg.verify_budget.seed;
        j["verify"] = std::move(jverify);
        nlohmann::json jrows = nlohmann::json::array();
        for (const TheoremRow& row : rows) jrows.push_back(to_json(row));
        j["theorems"] = std::move(jrows);
        j["pass"] = all_pass;
        out << j.dump() << "\n";
      } else {
        out << "hitting-verification matrix (rows n, columns t = 1..n; '.' pass, 'F' fail)\n";
        out << matrix.str();
        out << failures.str();
        if (!rows.empty()) {
          out << "\nextremal table up to n = " << oracle_n << "\n";
          cli_detail::print_theorem_table(out, rows);
          for (const TheoremRow& row : rows) {
            if (!row.agree) {
              out << "FAIL theorem row n=" << row.n << " t=" << row.t << "\n";
            }
          }
        }
        out << "seed=" << cfg.verify_budget.seed << "\n";
        out << "sweep: " << (all_pass ? "PASS" : "FAIL") << "\n";
      }
      return all_pass ? exit_ok : exit_failed;
    }
  }
  err << "unknown command\n";
  return exit_usage;
}

/// Parses command-line arguments (not including the program name) and
/// dispatches.  Worker count defaults from the BLOCKGROUP_JOBS environment
/// variable when --jobs is not given.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"construction, verification and brute-force oracles for families of subsets "
               "whose pairwise intersections contain a cyclic translate of a block"};
  app.require_subcommand(1);

  RunConfig cfg;
  if (const char* env_jobs = std::getenv("BLOCKGROUP_JOBS")) {
    try {
      cfg.verify_budget.jobs = std::max(1, std::stoi(env_jobs));
    } catch (const std::exception&) {
      err << "warning: ignoring invalid BLOCKGROUP_JOBS value\n";
    }
  }

  std::string format = "text";
  std::string corrupt_spec;

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
  };
  auto add_budget = [&](CLI::App* sub) {
    sub->add_option("--max-exhaustive-t", cfg.verify_budget.max_exhaustive_t,
                    "largest t checked exhaustively");
    sub->add_option("--samples", cfg.verify_budget.sample_count,
                    "sample count above the exhaustive threshold");
    sub->add_option("--seed", cfg.verify_budget.seed, "seed for sampled verification");
    sub->add_option("--jobs", cfg.verify_budget.jobs, "worker count")->check(CLI::PositiveNumber);
  };

  CLI::App* gens = app.add_subcommand("gens", "build the subgroup generators for (n, t)");
  gens->add_option("--n", cfg.n, "ground-set size")->required();
  gens->add_option("--t", cfg.t, "block length")->required();
  add_format(gens);

  CLI::App* verify = app.add_subcommand(
      "verify", "check that every nonzero generator sum meets every block translate");
  verify->add_option("--n", cfg.n, "ground-set size")->required();
  verify->add_option("--t", cfg.t, "block length")->required();
  add_budget(verify);
  add_format(verify);

  CLI::App* cosets =
      app.add_subcommand("cosets", "canonicalize all subsets and check the coset partition");
  cosets->add_option("--n", cfg.n, "ground-set size")->required();
  cosets->add_option("--t", cfg.t, "block length")->required();
  add_format(cosets);

  std::vector<int> base_positions;
  CLI::App* oracle = app.add_subcommand(
      "oracle", "exact maximum-family search for a base set and its cyclic translates");
  oracle->add_option("--n", cfg.n, "ground-set size")->required();
  oracle->add_option("--t", cfg.t, "block length (base = first t positions)");
  oracle->add_option("--base", base_positions, "base set, comma-separated 1-based positions")
      ->delimiter(',');
  oracle->add_option("--mode", cfg.oracle_mode, "v, vbar, or both")
      ->check(CLI::IsMember({"v", "vbar", "both"}));
  oracle->add_option("--timeout", cfg.oracle_budget.timeout_ms, "search timeout in milliseconds");
  oracle->add_option("--guard-n", cfg.oracle_budget.max_n, "largest allowed n");
  oracle->add_flag("--witness", cfg.show_witness, "print the witness family");
  add_format(oracle);

  CLI::App* sweep = app.add_subcommand(
      "sweep", "verify all (n, t) up to a bound and tabulate the extremal quantities");
  sweep->add_option("--max-n", cfg.max_n, "largest ground-set size")->required();
  add_budget(sweep);
  sweep->add_option("--timeout", cfg.oracle_budget.timeout_ms, "oracle timeout in milliseconds");
  sweep->add_option("--corrupt", corrupt_spec,
                    "test hook: GEN,POS bit flip applied to every generator set");
  add_format(sweep);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return exit_usage;
  }

  cfg.format = (format == "json") ? OutputFormat::json : OutputFormat::text;
  if (gens->parsed()) cfg.command = Command::gens;
  if (verify->parsed()) cfg.command = Command::verify;
  if (cosets->parsed()) cfg.command = Command::cosets;
  if (oracle->parsed()) {
    cfg.command = Command::oracle;
    if (!base_positions.empty()) cfg.base = base_positions;
  }
  if (sweep->parsed()) {
    cfg.command = Command::sweep;
    if (!corrupt_spec.empty()) {
      const std::size_t comma = corrupt_spec.find(',');
      try {
        if (comma == std::string::npos) throw std::invalid_argument("missing comma");
        cfg.corrupt = {std::stoi(corrupt_spec.substr(0, comma)),
                       std::stoi(corrupt_spec.substr(comma + 1))};
      } catch (const std::exception&) {
        err << "sweep: --corrupt expects GEN,POS\n";
        return exit_usage;
      }
    }
  }

  try {
    return run(cfg, out, err);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }
}

}  // namespace blockgroup
