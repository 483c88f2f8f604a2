#include "support/fixtures.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "idx/learning.hpp"

namespace fixtures {

const std::vector<GoldenRow>& golden_rows() {
  static const std::vector<GoldenRow> rows = {
      // w    t    p    r    o    sd-r att/sup  md-r att/sup  sd-o att/sup   md-o att/sup  cf-r !/*   cf-o !/*
      {"l", "l", "l", "+", "-", "t", "p", "", "p", "w", "t r", "w", "r", "p", "", "r", "t"},
      {"m", "l", "l", "+", "-", "t", "p", "", "p", "", "w t r", "", "r", "p", "", "", "w t r"},
      {"l", "m", "l", "+", "-", "t", "p", "", "p", "w t", "r", "w t", "r", "p", "", "r", ""},
      {"m", "m", "l", "+", "-", "t", "p", "", "p", "t", "w r", "t", "r", "p", "", "r", "w"},
      {"h", "l", "l", "+", "-", "t", "p", "", "p", "", "w t r", "", "r", "p", "", "", "w t r"},
      {"l", "h", "l", "+", "-", "", "t p", "", "t p", "w", "t r", "w", "t r", "", "t p", "", "r"},
      {"h", "m", "l", "+", "-", "t", "p", "", "p", "t", "w r", "t", "r", "p", "", "r", "w"},
      {"m", "h", "l", "+", "-", "", "t p", "", "t p", "", "w t r", "", "t r", "", "t p", "", "w r"},
      {"h", "h", "l", "+", "-", "", "t p", "", "t p", "", "w t r", "", "t r", "", "t p", "", "w r"},
      {"l", "l", "h", "-", "+", "", "t p", "", "p", "", "w t r", "", "w r", "p", "t", "w r", ""},
      {"m", "l", "h", "-", "-", "", "t p", "", "p", "t r", "w", "r", "", "p", "t", "t", "w"},
      {"l", "m", "h", "-", "+", "", "t p", "", "p", "", "w t r", "", "w t r", "p", "t", "r", "w t"},
      {"m", "m", "h", "-", "+", "", "t p", "", "p", "w", "t r", "", "t r", "p", "t", "t r", ""},
      {"h", "l", "h", "-", "-", "", "t p", "", "p", "t r", "w", "r", "", "p", "t", "t", "w"},
      {"l", "h", "h", "+", "-", "p", "t", "p", "t", "w", "t r", "w", "t r", "t", "", "", "r"},
      {"h", "m", "h", "-", "+", "", "t p", "", "p", "w", "t r", "", "t r", "p", "t", "t r", ""},
      {"m", "h", "h", "+", "-", "p", "t", "p", "t", "", "w t r", "", "t r", "t", "", "", "w r"},
      {"h", "h", "h", "+", "-", "p", "t", "p", "t", "", "w t r", "", "t r", "t", "", "", "w r"},
  };
  return rows;
}

const std::vector<GoldenProb>& golden_probs() {
  static const std::vector<GoldenProb> probs = {
      {"w", "l", "", "", .33}, {"w", "m", "", "", .33}, {"w", "h", "", "", .33},
      {"t", "l", "", "", .33}, {"t", "m", "", "", .33}, {"t", "h", "", "", .33},
      {"p", "l", "", "", .50}, {"p", "h", "", "", .50},
      {"r", "+", "", "", .67}, {"r", "-", "", "", .33},
      {"o", "+", "", "", .22}, {"o", "-", "", "", .78},
      {"t", "l", "r", "+", .25}, {"t", "m", "r", "+", .25}, {"t", "h", "r", "+", .50},
      {"p", "l", "r", "+", .75}, {"p", "h", "r", "+", .25},
      {"t", "l", "r", "-", .49}, {"t", "m", "r", "-", .49}, {"t", "h", "r", "-", .02},
      {"p", "l", "r", "-", .02}, {"p", "h", "r", "-", .98},
      {"w", "l", "o", "+", .48}, {"w", "m", "o", "+", .26}, {"w", "h", "o", "+", .26},
      {"t", "l", "o", "+", .26}, {"t", "m", "o", "+", .72}, {"t", "h", "o", "+", .02},
      {"r", "+", "o", "+", .02}, {"r", "-", "o", "+", .98},
      {"w", "l", "o", "-", .28}, {"w", "m", "o", "-", .36}, {"w", "h", "o", "-", .36},
      {"t", "l", "o", "-", .36}, {"t", "m", "o", "-", .22}, {"t", "h", "o", "-", .42},
      {"r", "+", "o", "-", .85}, {"r", "-", "o", "-", .15},
  };
  return probs;
}

std::string data_path(const std::string& name) {
  return std::string(IDX_DATA_DIR) + "/" + name;
}

idx::Dataset play_outside_data() {
  return idx::Dataset::from_csv(data_path("play_outside.csv"));
}

idx::Classifier play_outside_model() {
  idx::Hyperparams h;
  h.alpha = 0.1;
  idx::Structure s;
  s.edges = {{"o", "w"}, {"o", "t"}, {"o", "r"}, {"r", "t"}, {"r", "p"}};
  idx::Dataset d = play_outside_data();
  return idx::fit_bcc(d, {"r", "o"}, h, s);
}

idx::Assignment row_input(const GoldenRow& row) {
  return idx::Assignment().bind("w", row.w).bind("t", row.t).bind("p", row.p);
}

std::vector<std::string> names(const char* set) {
  std::vector<std::string> out;
  std::istringstream in(set);
  std::string name;
  while (in >> name) out.push_back(name);
  return out;
}

double prior_of(const idx::Classifier& c, const std::string& var, const std::string& value) {
  int v = c.require_index(var);
  return c.prior(v, c.variable(v).domain.index_of(value));
}

double conditional_of(const idx::Classifier& c, const std::string& parent,
                      const std::string& child, const std::string& child_val,
                      const std::string& parent_val) {
  int p = c.require_index(parent);
  int ch = c.require_index(child);
  return c.conditional(p, ch, c.variable(ch).domain.index_of(child_val),
                       c.variable(p).domain.index_of(parent_val));
}

idx::Idx expected_idx(const idx::ExplanationKit& kit, const GoldenRow& row,
                      const std::string& explanandum) {
  auto set_for = [&](const std::string& label, const std::string& target) -> const char* {
    bool r = target == "r";
    if (label == "monotonic-attack") return r ? row.md_att_r : row.md_att_o;
    if (label == "monotonic-support") return r ? row.md_sup_r : row.md_sup_o;
    if (label == "stochastic-attack") return r ? row.sd_att_r : row.sd_att_o;
    if (label == "stochastic-support") return r ? row.sd_sup_r : row.sd_sup_o;
    if (label == "critical") return r ? row.cf_crit_r : row.cf_crit_o;
    return r ? row.cf_pot_r : row.cf_pot_o;  // "potential"
  };

  std::vector<std::string> targets =
      explanandum == "r" ? std::vector<std::string>{"r"} : std::vector<std::string>{"r", "o"};
  std::vector<std::vector<std::pair<std::string, std::string>>> held(kit.type_count());
  for (std::size_t t = 0; t < kit.type_count(); ++t) {
    for (const auto& y : targets) {
      for (const auto& x : names(set_for(kit.type(t).label, y))) held[t].push_back({x, y});
    }
  }

  std::set<std::string> reach = {explanandum};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& edges : held) {
      for (const auto& [x, y] : edges) {
        if (reach.count(y) && !reach.count(x)) {
          reach.insert(x);
          grew = true;
        }
      }
    }
  }

  idx::Idx want;
  want.kit = kit.name();
  want.graph_kind = idx::GraphKind::Full;
  want.explanandum = explanandum;
  for (std::size_t t = 0; t < kit.type_count(); ++t) {
    idx::Idx::Relation rel;
    rel.type = kit.type(t);
    for (const auto& e : held[t]) {
      if (reach.count(e.second)) rel.edges.push_back(e);
    }
    std::sort(rel.edges.begin(), rel.edges.end());
    want.relations.push_back(std::move(rel));
  }
  want.relevant.assign(reach.begin(), reach.end());
  for (const auto& n : want.relevant) {
    if (n == "w" || n == "t" || n == "p") want.observations.push_back(n);
  }
  want.input = row_input(row);
  for (const auto& n : want.relevant) {
    if (n == "r")
      want.snapshot.bind("r", row.r);
    else if (n == "o")
      want.snapshot.bind("o", row.o);
    else
      want.snapshot.bind(n, n == "w" ? row.w : n == "t" ? row.t : row.p);
  }
  return want;
}

}  // namespace fixtures
