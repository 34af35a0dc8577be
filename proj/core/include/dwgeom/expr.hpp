#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwgeom {

struct expr_parse_error : std::runtime_error {
  expr_parse_error(const std::string& msg, std::size_t at, std::string expected_tokens)
      : std::runtime_error(msg), offset(at), expected(std::move(expected_tokens)) {}
  std::size_t offset;
  std::string expected;
};

struct expr_eval_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;
}  // namespace detail

/// Parsed scalar expression over a fixed variable list. Grammar: identifiers,
/// literals, + - * / ^ with ^ right-associative, unary minus between ^ and
/// * /, functions sin cos exp sqrt log tanh. Values are total on finite
/// inputs except sqrt/log domain errors, which throw expr_eval_error.
class PotentialExpr {
 public:
  static PotentialExpr parse(const std::string& source, std::vector<std::string> variables);

  double eval(std::span<const double> values) const;
  PotentialExpr derivative(int var) const;
  std::string print() const;

  const std::string& source() const { return source_; }
  const std::vector<std::string>& variables() const { return vars_; }

 private:
  PotentialExpr(std::string source, std::vector<std::string> vars, detail::ExprPtr root)
      : source_(std::move(source)), vars_(std::move(vars)), root_(std::move(root)) {}

  std::string source_;
  std::vector<std::string> vars_;
  detail::ExprPtr root_;
};

}  // namespace dwgeom
