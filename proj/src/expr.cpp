#include <algorithm>
#include <cctype>
#include <cmath>
#include <memory>
#include <set>

#include "condmc/model.hpp"

namespace condmc {
namespace detail {

struct ExprNode {
  enum class Kind { Number, Species, Add, Sub, Mul, Div, Neg };
  Kind kind;
  double value = 0;
  int32_t species = -1;
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
};

namespace {

double eval_node(const ExprNode& n, const State& x) {
  using Kind = ExprNode::Kind;
  switch (n.kind) {
    case Kind::Number:
      return n.value;
    case Kind::Species:
      return static_cast<double>(x[n.species]);
    case Kind::Add:
      return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
    case Kind::Sub:
      return eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
    case Kind::Mul:
      return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
    case Kind::Div:
      return eval_node(*n.lhs, x) / eval_node(*n.rhs, x);
    case Kind::Neg:
      return -eval_node(*n.lhs, x);
  }
  return 0;
}

using NodePtr = std::shared_ptr<const ExprNode>;

class ExprParser {
 public:
  ExprParser(const std::string& src, const std::vector<std::string>& species,
             int line, int column_base)
      : src_(src), species_(species), line_(line), col_base_(column_base) {}

  NodePtr parse() {
    NodePtr e = parse_sum();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_, col_base_ + static_cast<int>(pos_) + 1);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    for (;;) {
      if (consume('+')) {
        lhs = make_binary(ExprNode::Kind::Add, lhs, parse_product());
      } else if (consume('-')) {
        lhs = make_binary(ExprNode::Kind::Sub, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (consume('*')) {
        lhs = make_binary(ExprNode::Kind::Mul, lhs, parse_unary());
      } else if (consume('/')) {
        lhs = make_binary(ExprNode::Kind::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (consume('-')) {
      auto node = std::make_shared<ExprNode>();
      node->kind = ExprNode::Kind::Neg;
      node->lhs = parse_unary();
      return node;
    }
    return parse_primary();
  }

  NodePtr parse_primary() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_sum();
      if (!consume(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail("expected number, species name, or '('");
  }

  NodePtr parse_number() {
    size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.' ||
            src_[pos_] == 'e' || src_[pos_] == 'E' ||
            ((src_[pos_] == '+' || src_[pos_] == '-') && pos_ > start &&
             (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E')))) {
      ++pos_;
    }
    try {
      size_t used = 0;
      double v = std::stod(src_.substr(start, pos_ - start), &used);
      if (used != pos_ - start) fail("malformed number");
      auto node = std::make_shared<ExprNode>();
      node->kind = ExprNode::Kind::Number;
      node->value = v;
      return node;
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception&) {
      fail("malformed number");
    }
  }

  NodePtr parse_identifier() {
    size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                  src_[pos_] == '_')) {
      ++pos_;
    }
    std::string name = src_.substr(start, pos_ - start);
    auto it = std::find(species_.begin(), species_.end(), name);
    if (it == species_.end()) {
      pos_ = start;
      fail("unknown species '" + name + "'");
    }
    auto node = std::make_shared<ExprNode>();
    node->kind = ExprNode::Kind::Species;
    node->species = static_cast<int32_t>(it - species_.begin());
    return node;
  }

  static NodePtr make_binary(ExprNode::Kind kind, NodePtr lhs, NodePtr rhs) {
    auto node = std::make_shared<ExprNode>();
    node->kind = kind;
    node->lhs = std::move(lhs);
    node->rhs = std::move(rhs);
    return node;
  }

  const std::string& src_;
  const std::vector<std::string>& species_;
  int line_;
  int col_base_;
  size_t pos_ = 0;
};

void collect_deps(const ExprNode& n, std::set<int32_t>& out) {
  if (n.kind == ExprNode::Kind::Species) out.insert(n.species);
  if (n.lhs) collect_deps(*n.lhs, out);
  if (n.rhs) collect_deps(*n.rhs, out);
}

}  // namespace
}  // namespace detail

Expression Expression::parse(const std::string& source,
                             const std::vector<std::string>& species, int line,
                             int column_base) {
  Expression e;
  e.root_ = detail::ExprParser(source, species, line, column_base).parse();
  e.source_ = source;
  std::set<int32_t> deps;
  detail::collect_deps(*e.root_, deps);
  e.deps_.assign(deps.begin(), deps.end());
  return e;
}

double Expression::eval(const State& x) const { return detail::eval_node(*root_, x); }

}  // namespace condmc
