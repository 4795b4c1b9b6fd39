#pragma once

#include <string>
#include <vector>

#include "blockgroup/group.hpp"
#include "blockgroup/oracle.hpp"
#include "blockgroup/subset.hpp"
#include "blockgroup/verify.hpp"

#include "json.hpp"

namespace blockgroup {

inline nlohmann::json to_json(const GeneratorSet& gs) {
  nlohmann::json j;
  j["n"] = gs.ground_size();
  j["t"] = gs.block_len();
  const EuclidDecomposition& dec = gs.euclid();
  j["euclid"] = {{"k", dec.k},
                 {"quotients", dec.quotients},
                 {"remainders", dec.remainders},
                 {"partial_n", dec.partial_n},
                 {"partial_t", dec.partial_t}};
  nlohmann::json gens = nlohmann::json::array();
  for (const SubsetMask& g : gs.generators()) {
    gens.push_back(g.positions());
  }
  j["generators"] = std::move(gens);
  return j;
}

/// Rebuilds a generator set from its JSON document.  The euclid block must
/// match the decomposition recomputed from (n, t) and the generators must
/// satisfy the triangular property; anything else is rejected.
inline GeneratorSet generator_set_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  const int t = j.at("t").get<int>();
  EuclidDecomposition dec = euclid_decompose(n, t);

  const nlohmann::json& e = j.at("euclid");
  if (e.at("k").get<int>() != dec.k ||
      e.at("quotients").get<std::vector<std::int64_t>>() != dec.quotients ||
      e.at("remainders").get<std::vector<std::int64_t>>() != dec.remainders ||
      e.at("partial_n").get<std::vector<std::int64_t>>() != dec.partial_n ||
      e.at("partial_t").get<std::vector<std::int64_t>>() != dec.partial_t) {
    throw std::invalid_argument("generator_set_from_json: euclid block is inconsistent with (n, t)");
  }

  std::vector<SubsetMask> gens;
  for (const nlohmann::json& arr : j.at("generators")) {
    gens.push_back(SubsetMask::from_positions(n, arr.get<std::vector<int>>()));
  }
  return GeneratorSet(std::move(dec), std::move(gens));
}

inline nlohmann::json to_json(const VerificationReport& r, int n, int t) {
  nlohmann::json j;
  j["n"] = n;
  j["t"] = t;
  j["mode"] = (r.mode == VerifyMode::exhaustive) ? "exhaustive" : "sampled";
  j["combos_checked"] = r.combos_checked;
  nlohmann::json fails = nlohmann::json::array();
  for (const VerifyFailure& f : r.failures) {
    fails.push_back({{"combo_bits", f.combo_bits}, {"missed_start", f.missed_start}});
  }
  j["failures"] = std::move(fails);
  j["group_order_confirmed"] = r.group_order_confirmed;
  j["elapsed_ms"] = r.elapsed_ms;
  return j;
}

inline nlohmann::json to_json(const OracleResult& r) {
  nlohmann::json j;
  j["quantity"] = (r.quantity == ExtremalQuantity::v) ? "v" : "v_bar";
  j["value"] = r.value;
  j["lower_bound"] = r.lower_bound;
  j["upper_bound"] = r.upper_bound;
  j["exact"] = r.exact();
  j["nodes_explored"] = r.nodes_explored;
  j["timed_out"] = r.timed_out;
  nlohmann::json w = nlohmann::json::array();
  for (const SubsetMask& s : r.witness) w.push_back(to_set_text(s));
  j["witness"] = std::move(w);
  return j;
}

inline nlohmann::json to_json(const TheoremRow& row) {
  nlohmann::json j;
  j["n"] = row.n;
  j["t"] = row.t;
  j["v"] = row.v_result.value;
  j["v_bar"] = row.vbar_result.value;
  j["predicted"] = row.predicted;
  j["agree"] = row.agree;
  j["v_timed_out"] = row.v_result.timed_out;
  j["v_bar_timed_out"] = row.vbar_result.timed_out;
  return j;
}

}  // namespace blockgroup
