#include "qsd/expr.hpp"

#include <cctype>
#include <charconv>
#include <variant>
#include <vector>

#include "qsd/error.hpp"

namespace qsd {

enum class Primitive { A, Adag, N, Q, P, Id };

struct OperatorExpr::Node {
  enum class Kind { Scalar, Primitive, Sum, Difference, Product, Negate };
  Kind kind;
  Complex scalar{};
  Primitive primitive{};
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const OperatorExpr::Node>;
using Kind = OperatorExpr::Node::Kind;

struct Token {
  enum class Type { Number, Ident, Plus, Minus, Star, LParen, RParen, End };
  Type type;
  std::size_t column;  // 1-based
  Complex value{};
  std::string text{};
};

[[noreturn]] void fail(std::size_t column, const std::string& what) {
  throw Error(ErrorKind::Parse,
              "operator expression, column " + std::to_string(column) + ": " + what);
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    const std::size_t col = i + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    switch (c) {
      case '+': out.push_back({Token::Type::Plus, col}); ++i; continue;
      case '-': out.push_back({Token::Type::Minus, col}); ++i; continue;
      case '*': out.push_back({Token::Type::Star, col}); ++i; continue;
      case '(': out.push_back({Token::Type::LParen, col}); ++i; continue;
      case ')': out.push_back({Token::Type::RParen, col}); ++i; continue;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + s.size(), v);
      if (ec != std::errc()) fail(col, "malformed number");
      i = static_cast<std::size_t>(ptr - s.data());
      Complex value{v, 0.0};
      if (i < s.size() && s[i] == 'i' &&
          !(i + 1 < s.size() && std::isalnum(static_cast<unsigned char>(s[i + 1])))) {
        value = {0.0, v};
        ++i;
      }
      out.push_back({Token::Type::Number, col, value});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) {
        ++j;
      }
      out.push_back({Token::Type::Ident, col, {}, std::string(s.substr(i, j - i))});
      i = j;
      continue;
    }
    fail(col, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Token::Type::End, s.size() + 1});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : t_(std::move(tokens)) {}

  NodePtr parse() {
    NodePtr e = expr();
    if (peek().type != Token::Type::End) fail(peek().column, "unexpected trailing input");
    return e;
  }

 private:
  const Token& peek() const { return t_[pos_]; }
  const Token& next() { return t_[pos_++]; }

  static NodePtr binary(Kind k, NodePtr l, NodePtr r) {
    auto n = std::make_shared<OperatorExpr::Node>();
    n->kind = k;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (peek().type == Token::Type::Plus || peek().type == Token::Type::Minus) {
      const Kind k = next().type == Token::Type::Plus ? Kind::Sum : Kind::Difference;
      lhs = binary(k, lhs, term());
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = factor();
    while (peek().type == Token::Type::Star) {
      next();
      lhs = binary(Kind::Product, lhs, factor());
    }
    return lhs;
  }

  NodePtr factor() {
    const Token& tok = next();
    auto n = std::make_shared<OperatorExpr::Node>();
    switch (tok.type) {
      case Token::Type::Number:
        n->kind = Kind::Scalar;
        n->scalar = tok.value;
        return n;
      case Token::Type::Ident:
        n->kind = Kind::Primitive;
        if (tok.text == "a") n->primitive = Primitive::A;
        else if (tok.text == "adag") n->primitive = Primitive::Adag;
        else if (tok.text == "n") n->primitive = Primitive::N;
        else if (tok.text == "q") n->primitive = Primitive::Q;
        else if (tok.text == "p") n->primitive = Primitive::P;
        else if (tok.text == "id") n->primitive = Primitive::Id;
        else fail(tok.column, "unknown primitive '" + tok.text + "'");
        return n;
      case Token::Type::LParen: {
        NodePtr inner = expr();
        if (next().type != Token::Type::RParen) fail(t_[pos_ - 1].column, "expected ')'");
        return inner;
      }
      case Token::Type::Minus:
        n->kind = Kind::Negate;
        n->lhs = factor();
        return n;
      case Token::Type::End:
        fail(tok.column, "unexpected end of expression");
      default:
        fail(tok.column, "expected a scalar, primitive or '('");
    }
  }

  std::vector<Token> t_;
  std::size_t pos_ = 0;
};

// Scalars stay scalars until they meet a matrix.
using Value = std::variant<Complex, CMatrix>;

CMatrix as_matrix(const Value& v, std::size_t dim) {
  if (const auto* c = std::get_if<Complex>(&v)) {
    return *c * CMatrix::Identity(Eigen::Index(dim), Eigen::Index(dim));
  }
  return std::get<CMatrix>(v);
}

Value primitive_matrix(Primitive p, std::size_t dim) {
  switch (p) {
    case Primitive::A: return fock_annihilation(dim).entries();
    case Primitive::Adag: return fock_creation(dim).entries();
    case Primitive::N: return fock_number(dim).entries();
    case Primitive::Q: return position(dim).entries();
    case Primitive::P: return momentum(dim).entries();
    case Primitive::Id: return OperatorMatrix::identity(dim).entries();
  }
  return Complex{};
}

Value evaluate(const OperatorExpr::Node& node, std::size_t dim) {
  switch (node.kind) {
    case Kind::Scalar: return node.scalar;
    case Kind::Primitive: return primitive_matrix(node.primitive, dim);
    case Kind::Negate: {
      Value v = evaluate(*node.lhs, dim);
      if (auto* c = std::get_if<Complex>(&v)) return -*c;
      return CMatrix(-std::get<CMatrix>(v));
    }
    case Kind::Product: {
      Value l = evaluate(*node.lhs, dim);
      Value r = evaluate(*node.rhs, dim);
      const auto* lc = std::get_if<Complex>(&l);
      const auto* rc = std::get_if<Complex>(&r);
      if (lc && rc) return *lc * *rc;
      if (lc) return CMatrix(*lc * std::get<CMatrix>(r));
      if (rc) return CMatrix(std::get<CMatrix>(l) * *rc);
      return CMatrix(std::get<CMatrix>(l) * std::get<CMatrix>(r));
    }
    case Kind::Sum:
    case Kind::Difference: {
      Value l = evaluate(*node.lhs, dim);
      Value r = evaluate(*node.rhs, dim);
      const double sign = node.kind == Kind::Sum ? 1.0 : -1.0;
      const auto* lc = std::get_if<Complex>(&l);
      const auto* rc = std::get_if<Complex>(&r);
      if (lc && rc) return *lc + sign * *rc;
      CMatrix lm = as_matrix(l, dim);
      if (node.kind == Kind::Sum) return CMatrix(lm + as_matrix(r, dim));
      return CMatrix(lm - as_matrix(r, dim));
    }
  }
  return Complex{};
}

}  // namespace

OperatorExpr OperatorExpr::parse(std::string_view text) {
  Parser parser(tokenize(text));
  return OperatorExpr(parser.parse(), std::string(text));
}

OperatorMatrix OperatorExpr::eval(std::size_t dim) const {
  if (dim < 2) {
    throw Error(ErrorKind::InvalidDimension, "dimension must be >= 2");
  }
  return OperatorMatrix(as_matrix(evaluate(*root_, dim), dim));
}

}  // namespace qsd
