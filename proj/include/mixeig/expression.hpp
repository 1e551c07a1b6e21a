#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mixeig {

/// Raised for malformed weight expressions; position() is a 0-based byte offset.
class ParseError : public std::invalid_argument {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::invalid_argument(what), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Arithmetic expression in one variable x, compiled to a postfix program.
///
/// Grammar:
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('+' | '-') unary | power
///   power   := primary (('^' | '**') unary)?
///   primary := number | 'x' | 'pi' | func '(' expr (',' expr)? ')' | '(' expr ')'
///   func    := exp | log | sqrt | pow | min | max
class Expression {
public:
    static Expression parse(std::string_view text);

    double operator()(double x) const;
    const std::string& text() const noexcept { return text_; }

private:
    enum class Op : unsigned char { Push, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Sqrt, Min, Max };
    struct Instr {
        Op op;
        double value;
    };

    friend class ExpressionParser;

    std::string text_;
    std::vector<Instr> program_;
    int max_stack_ = 0;
};

} // namespace mixeig
