#include "dwgeom/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace dwgeom {
namespace detail {

enum class Kind { Number, Var, Neg, Binary, Call };

struct ExprNode {
  Kind kind;
  double number = 0.0;
  int var = -1;
  char op = 0;
  std::string fn;
  ExprPtr a, b;
};

namespace {

ExprPtr num(double v) {
  auto e = std::make_shared<ExprNode>();
  e->kind = Kind::Number;
  e->number = v;
  return e;
}

ExprPtr var(int idx) {
  auto e = std::make_shared<ExprNode>();
  e->kind = Kind::Var;
  e->var = idx;
  return e;
}

ExprPtr neg(ExprPtr a) {
  auto e = std::make_shared<ExprNode>();
  e->kind = Kind::Neg;
  e->a = std::move(a);
  return e;
}

ExprPtr bin(char op, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<ExprNode>();
  e->kind = Kind::Binary;
  e->op = op;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

ExprPtr call(std::string fn, ExprPtr a) {
  auto e = std::make_shared<ExprNode>();
  e->kind = Kind::Call;
  e->fn = std::move(fn);
  e->a = std::move(a);
  return e;
}

bool known_function(const std::string& f) {
  return f == "sin" || f == "cos" || f == "exp" || f == "sqrt" || f == "log" || f == "tanh";
}

class Parser {
 public:
  Parser(const std::string& src, const std::vector<std::string>& vars)
      : src_(src), vars_(vars) {}

  ExprPtr run() {
    ExprPtr e = expression();
    skip_space();
    if (at_ < src_.size())
      throw expr_parse_error("trailing input", at_, "operator or end of input");
    return e;
  }

 private:
  void skip_space() {
    while (at_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[at_]))) ++at_;
  }

  char peek() {
    skip_space();
    return at_ < src_.size() ? src_[at_] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++at_;
      return true;
    }
    return false;
  }

  ExprPtr expression() {
    ExprPtr e = term();
    while (true) {
      char c = peek();
      if (c == '+' || c == '-') {
        ++at_;
        e = bin(c, e, term());
      } else {
        return e;
      }
    }
  }

  ExprPtr term() {
    ExprPtr e = unary();
    while (true) {
      char c = peek();
      if (c == '*' || c == '/') {
        ++at_;
        e = bin(c, e, unary());
      } else {
        return e;
      }
    }
  }

  ExprPtr unary() {
    if (consume('-')) return neg(unary());
    return power();
  }

  ExprPtr power() {
    ExprPtr base = primary();
    if (consume('^')) return bin('^', base, unary());
    return base;
  }

  ExprPtr primary() {
    char c = peek();
    std::size_t start = at_;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number_literal();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name = identifier();
      if (known_function(name)) {
        if (!consume('('))
          throw expr_parse_error("function call needs an argument list", at_, "'('");
        ExprPtr arg = expression();
        if (!consume(')')) throw expr_parse_error("unclosed function argument", at_, "')'");
        return call(name, std::move(arg));
      }
      for (std::size_t k = 0; k < vars_.size(); ++k)
        if (vars_[k] == name) return var(static_cast<int>(k));
      throw expr_parse_error("unknown identifier '" + name + "'", start,
                             "variable or function name");
    }
    if (consume('(')) {
      ExprPtr e = expression();
      if (!consume(')')) throw expr_parse_error("unclosed parenthesis", at_, "')'");
      return e;
    }
    throw expr_parse_error("expected an operand", at_,
                           "number, identifier, function, '(' or '-'");
  }

  ExprPtr number_literal() {
    skip_space();
    std::size_t start = at_;
    while (at_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[at_]))) ++at_;
    if (at_ < src_.size() && src_[at_] == '.') {
      ++at_;
      while (at_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[at_]))) ++at_;
    }
    if (at_ < src_.size() && (src_[at_] == 'e' || src_[at_] == 'E')) {
      std::size_t mark = at_++;
      if (at_ < src_.size() && (src_[at_] == '+' || src_[at_] == '-')) ++at_;
      if (at_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[at_]))) {
        while (at_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[at_]))) ++at_;
      } else {
        at_ = mark;  // bare 'e' belongs to the next token
      }
    }
    if (at_ == start) throw expr_parse_error("malformed number", start, "digits");
    return num(std::stod(src_.substr(start, at_ - start)));
  }

  std::string identifier() {
    skip_space();
    std::size_t start = at_;
    while (at_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[at_])) || src_[at_] == '_'))
      ++at_;
    return src_.substr(start, at_ - start);
  }

  const std::string& src_;
  const std::vector<std::string>& vars_;
  std::size_t at_ = 0;
};

double eval_node(const ExprNode& e, std::span<const double> v) {
  switch (e.kind) {
    case Kind::Number:
      return e.number;
    case Kind::Var:
      return v[e.var];
    case Kind::Neg:
      return -eval_node(*e.a, v);
    case Kind::Binary: {
      double a = eval_node(*e.a, v);
      double b = eval_node(*e.b, v);
      switch (e.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/':
          if (b == 0.0) throw expr_eval_error("division by zero");
          return a / b;
        case '^': {
          double r = std::pow(a, b);
          if (!std::isfinite(r)) throw expr_eval_error("power out of domain");
          return r;
        }
      }
      throw expr_eval_error("corrupt expression");
    }
    case Kind::Call: {
      double a = eval_node(*e.a, v);
      if (e.fn == "sin") return std::sin(a);
      if (e.fn == "cos") return std::cos(a);
      if (e.fn == "exp") return std::exp(a);
      if (e.fn == "tanh") return std::tanh(a);
      if (e.fn == "sqrt") {
        if (a < 0.0) throw expr_eval_error("sqrt of a negative value");
        return std::sqrt(a);
      }
      if (e.fn == "log") {
        if (a <= 0.0) throw expr_eval_error("log of a non-positive value");
        return std::log(a);
      }
      throw expr_eval_error("corrupt expression");
    }
  }
  throw expr_eval_error("corrupt expression");
}

ExprPtr diff_node(const ExprPtr& e, int var_idx) {
  switch (e->kind) {
    case Kind::Number:
      return num(0.0);
    case Kind::Var:
      return num(e->var == var_idx ? 1.0 : 0.0);
    case Kind::Neg:
      return neg(diff_node(e->a, var_idx));
    case Kind::Binary: {
      ExprPtr da = diff_node(e->a, var_idx);
      ExprPtr db = diff_node(e->b, var_idx);
      switch (e->op) {
        case '+': return bin('+', da, db);
        case '-': return bin('-', da, db);
        case '*': return bin('+', bin('*', da, e->b), bin('*', e->a, db));
        case '/':
          return bin('/', bin('-', bin('*', da, e->b), bin('*', e->a, db)),
                     bin('^', e->b, num(2.0)));
        case '^':
          if (e->b->kind == Kind::Number)
            return bin('*', bin('*', num(e->b->number), bin('^', e->a, num(e->b->number - 1.0))),
                       da);
          // a^b * (db*log(a) + b*da/a)
          return bin('*', e,
                     bin('+', bin('*', db, call("log", e->a)),
                         bin('/', bin('*', e->b, da), e->a)));
      }
      throw expr_eval_error("corrupt expression");
    }
    case Kind::Call: {
      ExprPtr da = diff_node(e->a, var_idx);
      ExprPtr outer;
      if (e->fn == "sin") outer = call("cos", e->a);
      else if (e->fn == "cos") outer = neg(call("sin", e->a));
      else if (e->fn == "exp") outer = call("exp", e->a);
      else if (e->fn == "sqrt") outer = bin('/', num(0.5), call("sqrt", e->a));
      else if (e->fn == "log") outer = bin('/', num(1.0), e->a);
      else if (e->fn == "tanh")
        outer = bin('-', num(1.0), bin('^', call("tanh", e->a), num(2.0)));
      else throw expr_eval_error("corrupt expression");
      return bin('*', outer, da);
    }
  }
  throw expr_eval_error("corrupt expression");
}

// Precedence: + - (1), * / (2), unary - (3), ^ (4), atoms (5).
int precedence(const ExprNode& e) {
  switch (e.kind) {
    case Kind::Binary:
      return (e.op == '+' || e.op == '-') ? 1 : (e.op == '^' ? 4 : 2);
    case Kind::Neg:
      return 3;
    default:
      return 5;
  }
}

void print_node(const ExprNode& e, const std::vector<std::string>& vars, std::ostringstream& os);

void print_child(const ExprNode& child, const std::vector<std::string>& vars,
                 std::ostringstream& os, bool needs_parens) {
  if (needs_parens) os << '(';
  print_node(child, vars, os);
  if (needs_parens) os << ')';
}

void print_node(const ExprNode& e, const std::vector<std::string>& vars,
                std::ostringstream& os) {
  switch (e.kind) {
    case Kind::Number: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", e.number);
      os << buf;
      return;
    }
    case Kind::Var:
      os << vars[e.var];
      return;
    case Kind::Neg:
      os << '-';
      print_child(*e.a, vars, os, precedence(*e.a) < 3);
      return;
    case Kind::Binary: {
      int p = precedence(e);
      if (e.op == '^') {
        print_child(*e.a, vars, os, precedence(*e.a) <= 4);
        os << '^';
        print_child(*e.b, vars, os, precedence(*e.b) < 4);
      } else {
        print_child(*e.a, vars, os, precedence(*e.a) < p);
        os << e.op;
        print_child(*e.b, vars, os, precedence(*e.b) <= p);
      }
      return;
    }
    case Kind::Call:
      os << e.fn << '(';
      print_node(*e.a, vars, os);
      os << ')';
      return;
  }
}

}  // namespace
}  // namespace detail

PotentialExpr PotentialExpr::parse(const std::string& source,
                                   std::vector<std::string> variables) {
  detail::Parser p(source, variables);
  detail::ExprPtr root = p.run();
  return PotentialExpr(source, std::move(variables), std::move(root));
}

double PotentialExpr::eval(std::span<const double> values) const {
  if (values.size() != vars_.size())
    throw expr_eval_error("wrong number of variable values");
  return detail::eval_node(*root_, values);
}

PotentialExpr PotentialExpr::derivative(int var) const {
  if (var < 0 || var >= static_cast<int>(vars_.size()))
    throw expr_eval_error("derivative variable out of range");
  detail::ExprPtr d = detail::diff_node(root_, var);
  std::ostringstream os;
  detail::print_node(*d, vars_, os);
  return PotentialExpr(os.str(), vars_, std::move(d));
}

std::string PotentialExpr::print() const {
  std::ostringstream os;
  detail::print_node(*root_, vars_, os);
  return os.str();
}

}  // namespace dwgeom
