#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "condmc/model.hpp"

namespace condmc {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

ReactionNetwork::ReactionNetwork(std::vector<std::string> species,
                                 std::vector<Reaction> reactions, State initial_state,
                                 double horizon)
    : species_(std::move(species)),
      reactions_(std::move(reactions)),
      initial_state_(std::move(initial_state)),
      horizon_(horizon) {
  const size_t d = species_.size();
  if (d < 1) throw std::invalid_argument("network needs at least one species");
  if (reactions_.empty()) throw std::invalid_argument("network needs at least one reaction");
  if (initial_state_.size() != d) throw std::invalid_argument("initial state has wrong dimension");
  for (int64_t v : initial_state_) {
    if (v < 0) throw std::invalid_argument("initial state must be non-negative");
  }
  if (!(horizon_ > 0) || !std::isfinite(horizon_)) {
    throw std::invalid_argument("time horizon must be positive and finite");
  }

  plans_.reserve(reactions_.size());
  std::vector<std::vector<int32_t>> deps(reactions_.size());
  for (const Reaction& rx : reactions_) {
    if (rx.zeta.size() != d) throw std::invalid_argument("reaction vector has wrong dimension");
    EvalPlan plan;
    for (size_t i = 0; i < d; ++i) {
      if (rx.zeta[i] < 0) plan.guard_min.emplace_back(static_cast<int32_t>(i), -rx.zeta[i]);
    }
    std::set<int32_t> dep;
    for (const auto& [i, need] : plan.guard_min) dep.insert(i);
    if (const auto* ma = std::get_if<MassAction>(&rx.intensity)) {
      if (ma->reactant_counts.size() != d) {
        throw std::invalid_argument("mass action reactant counts have wrong dimension");
      }
      if (ma->kappa < 0 || !std::isfinite(ma->kappa)) {
        throw std::invalid_argument("rate constant must be non-negative and finite");
      }
      plan.mass_action = true;
      plan.kappa = ma->kappa;
      plan.guard_implied = true;
      for (size_t i = 0; i < d; ++i) {
        int64_t y = ma->reactant_counts[i];
        if (y < 0) throw std::invalid_argument("reactant counts must be non-negative");
        if (y > 0) {
          plan.orders.emplace_back(static_cast<int32_t>(i), y);
          dep.insert(static_cast<int32_t>(i));
        }
        if (rx.zeta[i] < 0 && y < -rx.zeta[i]) plan.guard_implied = false;
      }
    } else {
      plan.mass_action = false;
      const auto& expr = std::get<Expression>(rx.intensity);
      for (int32_t i : expr.dependencies()) dep.insert(i);
    }
    deps[plans_.size()].assign(dep.begin(), dep.end());
    plans_.push_back(std::move(plan));
  }

  // affected_[r] = reactions whose dependency set meets the species changed by r.
  affected_.resize(reactions_.size());
  for (size_t r = 0; r < reactions_.size(); ++r) {
    for (size_t q = 0; q < reactions_.size(); ++q) {
      bool hit = false;
      for (int32_t i : deps[q]) {
        if (reactions_[r].zeta[i] != 0) {
          hit = true;
          break;
        }
      }
      if (hit) affected_[r].push_back(static_cast<int32_t>(q));
    }
  }
}

int32_t ReactionNetwork::species_index(const std::string& name) const {
  auto it = std::find(species_.begin(), species_.end(), name);
  return it == species_.end() ? -1 : static_cast<int32_t>(it - species_.begin());
}

double ReactionNetwork::intensity(size_t r, const State& x) const {
  const EvalPlan& plan = plans_[r];
  if (plan.mass_action) {
    double v = plan.kappa;
    for (const auto& [i, y] : plan.orders) {
      const int64_t xi = x[i];
      if (xi < y) return 0;
      for (int64_t j = 0; j < y; ++j) v *= static_cast<double>(xi - j);
    }
    if (!plan.guard_implied) {
      for (const auto& [i, need] : plan.guard_min) {
        if (x[i] < need) return 0;
      }
    }
    return v;
  }
  for (const auto& [i, need] : plan.guard_min) {
    if (x[i] < need) return 0;
  }
  double v = std::get<Expression>(reactions_[r].intensity).eval(x);
  if (!std::isfinite(v)) {
    throw std::runtime_error("intensity expression evaluated to a non-finite value");
  }
  return v < 0 ? 0 : v;
}

double ReactionNetwork::total_intensity(const State& x) const {
  double sum = 0;
  for (size_t r = 0; r < reactions_.size(); ++r) sum += intensity(r, x);
  return sum;
}

StoichiometryMatrix ReactionNetwork::stoichiometry() const {
  StoichiometryMatrix S;
  S.rows = species_.size();
  S.cols = reactions_.size();
  S.entries.resize(S.rows * S.cols);
  for (size_t r = 0; r < S.cols; ++r) {
    for (size_t i = 0; i < S.rows; ++i) S.entries[r * S.rows + i] = reactions_[r].zeta[i];
  }
  return S;
}

namespace {

// One side of a reaction line: "2*A + B", "2A + B", or "0".
State parse_side(const std::string& text, const std::vector<std::string>& species,
                 int line, int col_base) {
  State counts(species.size(), 0);
  std::string t = trim(text);
  if (t == "0") return counts;
  if (t.empty()) throw ParseError("empty reaction side", line, col_base + 1);

  size_t pos = 0;
  while (pos < t.size()) {
    while (pos < t.size() && std::isspace(static_cast<unsigned char>(t[pos]))) ++pos;
    size_t term_start = pos;
    int64_t coeff = 1;
    if (pos < t.size() && std::isdigit(static_cast<unsigned char>(t[pos]))) {
      size_t num_start = pos;
      while (pos < t.size() && std::isdigit(static_cast<unsigned char>(t[pos]))) ++pos;
      coeff = std::stoll(t.substr(num_start, pos - num_start));
      while (pos < t.size() && std::isspace(static_cast<unsigned char>(t[pos]))) ++pos;
      if (pos < t.size() && t[pos] == '*') ++pos;
      while (pos < t.size() && std::isspace(static_cast<unsigned char>(t[pos]))) ++pos;
    }
    size_t name_start = pos;
    while (pos < t.size() && (std::isalnum(static_cast<unsigned char>(t[pos])) || t[pos] == '_')) ++pos;
    if (name_start == pos) {
      throw ParseError("expected species name in reaction side", line,
                       col_base + static_cast<int>(term_start) + 1);
    }
    std::string name = t.substr(name_start, pos - name_start);
    auto it = std::find(species.begin(), species.end(), name);
    if (it == species.end()) {
      throw ParseError("unknown species '" + name + "'", line,
                       col_base + static_cast<int>(name_start) + 1);
    }
    if (coeff < 1) {
      throw ParseError("species coefficient must be >= 1", line,
                       col_base + static_cast<int>(term_start) + 1);
    }
    counts[it - species.begin()] += coeff;

    while (pos < t.size() && std::isspace(static_cast<unsigned char>(t[pos]))) ++pos;
    if (pos == t.size()) break;
    if (t[pos] != '+') {
      throw ParseError("expected '+' between reaction terms", line,
                       col_base + static_cast<int>(pos) + 1);
    }
    ++pos;
  }
  return counts;
}

}  // namespace

ReactionNetwork parse_model(const std::string& text) {
  std::vector<std::string> species;
  bool have_species = false;
  State init;
  double horizon = -1;
  std::vector<Reaction> reactions;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.rfind("species:", 0) == 0) {
      if (have_species) throw ParseError("duplicate species declaration", line_no, 1);
      std::istringstream names(line.substr(8));
      std::string name;
      while (names >> name) {
        if (std::find(species.begin(), species.end(), name) != species.end()) {
          throw ParseError("duplicate species '" + name + "'", line_no, 1);
        }
        species.push_back(name);
      }
      if (species.empty()) throw ParseError("species list is empty", line_no, 1);
      have_species = true;
      init.assign(species.size(), 0);
      continue;
    }
    if (line.rfind("init:", 0) == 0) {
      if (!have_species) throw ParseError("init before species declaration", line_no, 1);
      std::istringstream pairs(line.substr(5));
      std::string item;
      while (pairs >> item) {
        size_t eq = item.find('=');
        if (eq == std::string::npos) {
          throw ParseError("expected Name=count in init", line_no, 1);
        }
        std::string name = item.substr(0, eq);
        auto it = std::find(species.begin(), species.end(), name);
        if (it == species.end()) {
          throw ParseError("unknown species '" + name + "' in init", line_no, 1);
        }
        int64_t v = 0;
        try {
          v = std::stoll(item.substr(eq + 1));
        } catch (const std::exception&) {
          throw ParseError("malformed count in init", line_no, 1);
        }
        if (v < 0) throw ParseError("initial counts must be non-negative", line_no, 1);
        init[it - species.begin()] = v;
      }
      continue;
    }
    if (line.rfind("t:", 0) == 0) {
      try {
        horizon = std::stod(trim(line.substr(2)));
      } catch (const std::exception&) {
        throw ParseError("malformed time horizon", line_no, 1);
      }
      continue;
    }

    // Reaction line.
    if (!have_species) throw ParseError("reaction before species declaration", line_no, 1);
    size_t arrow = line.find("->");
    if (arrow == std::string::npos) {
      throw ParseError("expected '->' in reaction", line_no, 1);
    }
    size_t at = line.find('@', arrow + 2);
    if (at == std::string::npos) {
      throw ParseError("expected '@ <rate>' in reaction", line_no, 1);
    }
    State reactants = parse_side(line.substr(0, arrow), species, line_no, 0);
    State products =
        parse_side(line.substr(arrow + 2, at - arrow - 2), species, line_no,
                   static_cast<int>(arrow) + 2);
    std::string rate = trim(line.substr(at + 1));
    if (rate.empty()) throw ParseError("missing rate", line_no, static_cast<int>(at) + 2);

    Reaction rx;
    rx.zeta.resize(species.size());
    for (size_t i = 0; i < species.size(); ++i) rx.zeta[i] = products[i] - reactants[i];

    if (rate.rfind("expr(", 0) == 0) {
      if (rate.back() != ')') {
        throw ParseError("expected closing ')' after expr(", line_no,
                         static_cast<int>(at + 1 + rate.size()) + 1);
      }
      std::string body = rate.substr(5, rate.size() - 6);
      rx.intensity = Expression::parse(body, species, line_no, static_cast<int>(at) + 6);
    } else {
      double kappa = 0;
      try {
        kappa = std::stod(rate);
      } catch (const std::exception&) {
        throw ParseError("malformed rate constant", line_no, static_cast<int>(at) + 2);
      }
      if (kappa < 0) {
        throw ParseError("negative rate constant", line_no, static_cast<int>(at) + 2);
      }
      rx.intensity = MassAction{kappa, std::move(reactants)};
    }
    reactions.push_back(std::move(rx));
  }

  if (!have_species) throw ParseError("missing species declaration", line_no, 1);
  if (horizon <= 0) throw ParseError("missing or non-positive time horizon", line_no, 1);
  return ReactionNetwork(std::move(species), std::move(reactions), std::move(init), horizon);
}

namespace {

std::string side_to_string(const State& counts, const std::vector<std::string>& species) {
  std::string out;
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    if (!out.empty()) out += " + ";
    if (counts[i] != 1) out += std::to_string(counts[i]) + "*";
    out += species[i];
  }
  return out.empty() ? "0" : out;
}

}  // namespace

std::string ReactionNetwork::serialize() const {
  std::ostringstream out;
  out << "species:";
  for (const auto& s : species_) out << ' ' << s;
  out << '\n';
  bool any_init = false;
  for (int64_t v : initial_state_) any_init |= (v != 0);
  if (any_init) {
    out << "init:";
    for (size_t i = 0; i < species_.size(); ++i) {
      if (initial_state_[i] != 0) out << ' ' << species_[i] << '=' << initial_state_[i];
    }
    out << '\n';
  }
  out << "t: " << format_double(horizon_) << '\n';
  for (const Reaction& rx : reactions_) {
    State reactants(species_.size(), 0);
    State products(species_.size(), 0);
    if (const auto* ma = std::get_if<MassAction>(&rx.intensity)) {
      reactants = ma->reactant_counts;
      for (size_t i = 0; i < species_.size(); ++i) {
        products[i] = reactants[i] + rx.zeta[i];
        if (products[i] < 0) {
          throw std::logic_error("mass action reaction consumes more than its reactants");
        }
      }
      out << side_to_string(reactants, species_) << " -> "
          << side_to_string(products, species_) << " @ " << format_double(ma->kappa) << '\n';
    } else {
      for (size_t i = 0; i < species_.size(); ++i) {
        if (rx.zeta[i] < 0) {
          reactants[i] = -rx.zeta[i];
        } else {
          products[i] = rx.zeta[i];
        }
      }
      out << side_to_string(reactants, species_) << " -> "
          << side_to_string(products, species_) << " @ expr("
          << std::get<Expression>(rx.intensity).source() << ")\n";
    }
  }
  return out.str();
}

}  // namespace condmc
