#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace condmc {

// Species counts. States live on the non-negative orthant of Z^d.
using State = std::vector<int64_t>;

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line, int column)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                           std::to_string(column) + ": " + msg),
        line(line),
        column(column) {}
  int line;
  int column;
};

namespace detail {
struct ExprNode;
}

// Arithmetic expression over species identifiers and numeric literals with
// + - * /, unary minus and parentheses. Immutable and cheap to copy.
class Expression {
 public:
  // `species` supplies the identifier scope; errors carry `line` as the
  // source line for diagnostics.
  static Expression parse(const std::string& source,
                          const std::vector<std::string>& species,
                          int line = 0, int column_base = 0);

  double eval(const State& x) const;
  const std::string& source() const { return source_; }
  // Indices of species the expression reads.
  const std::vector<int32_t>& dependencies() const { return deps_; }

 private:
  std::shared_ptr<const detail::ExprNode> root_;
  std::string source_;
  std::vector<int32_t> deps_;
};

// Stochastic mass action kinetics: kappa * prod_i x_i!/(x_i-y_i)! 1(x_i>=y_i).
struct MassAction {
  double kappa = 0;
  std::vector<int64_t> reactant_counts;  // y, length d
};

using IntensitySpec = std::variant<MassAction, Expression>;

struct Reaction {
  std::vector<int64_t> zeta;  // net state change, length d
  IntensitySpec intensity;
};

// d x R integer matrix whose r-th column is zeta_r. Column-major storage.
struct StoichiometryMatrix {
  int64_t entry(size_t row, size_t col) const { return entries[col * rows + row]; }
  size_t rows = 0;  // d
  size_t cols = 0;  // R
  std::vector<int64_t> entries;
};

class ReactionNetwork {
 public:
  ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions,
                  State initial_state, double horizon);

  size_t species_count() const { return species_.size(); }
  size_t reaction_count() const { return reactions_.size(); }
  const std::vector<std::string>& species() const { return species_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }
  const State& initial_state() const { return initial_state_; }
  double horizon() const { return horizon_; }
  int32_t species_index(const std::string& name) const;  // -1 if unknown

  // Intensity of reaction r in state x. Clamped to 0 whenever x + zeta_r
  // would leave the non-negative orthant; throws on non-finite expression
  // values (e.g. division by zero).
  double intensity(size_t r, const State& x) const;
  double total_intensity(const State& x) const;

  StoichiometryMatrix stoichiometry() const;

  // Reactions whose intensity can change when reaction r fires.
  const std::vector<int32_t>& affected_reactions(size_t r) const {
    return affected_[r];
  }

  std::string serialize() const;

 private:
  struct EvalPlan {
    bool mass_action = true;
    bool guard_implied = false;  // mass action indicator already enforces the orthant guard
    double kappa = 0;
    std::vector<std::pair<int32_t, int64_t>> orders;     // (species, y_i > 0)
    std::vector<std::pair<int32_t, int64_t>> guard_min;  // (species, -zeta_i) for zeta_i < 0
  };

  std::vector<std::string> species_;
  std::vector<Reaction> reactions_;
  State initial_state_;
  double horizon_;
  std::vector<EvalPlan> plans_;
  std::vector<std::vector<int32_t>> affected_;
};

// Parses the line-oriented model text format:
//   species: A B C
//   init: A=200 B=100        (unlisted species default to 0)
//   t: 4.0
//   2*A + B -> C @ 1.5       (mass action; "2A" is accepted for "2*A")
//   0 -> A @ expr(50/(1+2*B))
// '#' starts a comment. Throws ParseError with line/column on bad input.
ReactionNetwork parse_model(const std::string& text);

// Basis of the integer right nullspace of S (rows optionally restricted to
// `marginal_rows`). Each vector has integer entries with gcd 1; together
// they span the rational nullspace of the (restricted) matrix.
std::vector<std::vector<int64_t>> integer_nullspace_basis(
    const StoichiometryMatrix& S,
    const std::optional<std::vector<int32_t>>& marginal_rows = std::nullopt);

// All linear combinations of basis vectors with coefficients in
// {-coeff_bound..coeff_bound}, deduplicated, in lexicographic order.
// Throws std::runtime_error if (2c+1)^basis_size exceeds `cap`.
std::vector<std::vector<int64_t>> nullspace_lattice(
    const std::vector<std::vector<int64_t>>& basis, int64_t coeff_bound,
    size_t cap = 1000000);

// As above, but usable with an empty basis: `dim` fixes the vector length so
// the result is {0} in R^dim.
std::vector<std::vector<int64_t>> nullspace_lattice_dim(
    const std::vector<std::vector<int64_t>>& basis, int64_t coeff_bound, size_t dim,
    size_t cap = 1000000);

}  // namespace condmc
