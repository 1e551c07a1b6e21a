#include "mixeig/expression.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>

namespace mixeig {

class ExpressionParser {
public:
    explicit ExpressionParser(std::string_view text) : text_(text) {}

    Expression run() {
        Expression e;
        e.text_ = std::string(text_);
        program_ = &e.program_;
        parse_expr();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        if (e.program_.empty()) fail("empty expression");
        e.max_stack_ = max_depth_;
        return e;
    }

private:
    using Op = Expression::Op;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("expression: " + msg + " at offset " + std::to_string(pos_) + " in '" +
                             std::string(text_) + "'",
                         pos_);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(std::string_view token) {
        skip_space();
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    void emit(Op op, double value = 0.0) {
        program_->push_back({op, value});
        switch (op) {
        case Op::Push:
        case Op::Var:
            ++depth_;
            break;
        case Op::Neg:
        case Op::Exp:
        case Op::Log:
        case Op::Sqrt:
            break;
        default:
            --depth_;
            break;
        }
        if (depth_ > max_depth_) max_depth_ = depth_;
    }

    void parse_expr() {
        parse_term();
        while (true) {
            if (accept("+")) {
                parse_term();
                emit(Op::Add);
            } else if (accept("-")) {
                parse_term();
                emit(Op::Sub);
            } else {
                return;
            }
        }
    }

    void parse_term() {
        parse_unary();
        while (true) {
            skip_space();
            if (text_.substr(pos_, 2) == "**") return; // power handled below
            if (accept("*")) {
                parse_unary();
                emit(Op::Mul);
            } else if (accept("/")) {
                parse_unary();
                emit(Op::Div);
            } else {
                return;
            }
        }
    }

    void parse_unary() {
        if (accept("-")) {
            parse_unary();
            emit(Op::Neg);
        } else if (accept("+")) {
            parse_unary();
        } else {
            parse_power();
        }
    }

    void parse_power() {
        parse_primary();
        if (accept("^") || accept("**")) {
            parse_unary();
            emit(Op::Pow);
        }
    }

    void parse_primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            parse_expr();
            if (!accept(")")) fail("expected ')'");
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            parse_number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const std::string_view name = text_.substr(start, pos_ - start);
            if (name == "x") {
                emit(Op::Var);
                return;
            }
            if (name == "pi") {
                emit(Op::Push, M_PI);
                return;
            }
            Op op;
            int arity = 1;
            if (name == "exp") op = Op::Exp;
            else if (name == "log") op = Op::Log;
            else if (name == "sqrt") op = Op::Sqrt;
            else if (name == "pow") { op = Op::Pow; arity = 2; }
            else if (name == "min") { op = Op::Min; arity = 2; }
            else if (name == "max") { op = Op::Max; arity = 2; }
            else {
                pos_ = start;
                fail("unknown identifier '" + std::string(name) + "'");
            }
            if (!accept("(")) fail("expected '(' after function name");
            parse_expr();
            if (arity == 2) {
                if (!accept(",")) fail("expected ',' in two-argument function");
                parse_expr();
            }
            if (!accept(")")) fail("expected ')'");
            emit(op);
            return;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    void parse_number() {
        const char* first = text_.data() + pos_;
        char* last = nullptr;
        // strtod accepts exponents; the buffer is not NUL-terminated, so copy the token.
        std::size_t end = pos_;
        while (end < text_.size()) {
            const char ch = text_[end];
            const bool exp_sign = (ch == '+' || ch == '-') && end > pos_ &&
                                  (text_[end - 1] == 'e' || text_[end - 1] == 'E');
            if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.' || ch == 'e' || ch == 'E' || exp_sign)
                ++end;
            else
                break;
        }
        const std::string token(first, end - pos_);
        const double value = std::strtod(token.c_str(), &last);
        if (last != token.c_str() + token.size()) fail("malformed number '" + token + "'");
        pos_ = end;
        emit(Op::Push, value);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::vector<Expression::Instr>* program_ = nullptr;
    int depth_ = 0;
    int max_depth_ = 0;
};

Expression Expression::parse(std::string_view text) { return ExpressionParser(text).run(); }

double Expression::operator()(double x) const {
    constexpr int kInline = 32;
    std::array<double, kInline> small{};
    std::vector<double> big;
    double* stack = small.data();
    if (max_stack_ > kInline) {
        big.resize(max_stack_);
        stack = big.data();
    }
    int top = -1;
    for (const Instr& in : program_) {
        switch (in.op) {
        case Op::Push: stack[++top] = in.value; break;
        case Op::Var: stack[++top] = x; break;
        case Op::Add: stack[top - 1] += stack[top]; --top; break;
        case Op::Sub: stack[top - 1] -= stack[top]; --top; break;
        case Op::Mul: stack[top - 1] *= stack[top]; --top; break;
        case Op::Div: stack[top - 1] /= stack[top]; --top; break;
        case Op::Pow: stack[top - 1] = std::pow(stack[top - 1], stack[top]); --top; break;
        case Op::Min: stack[top - 1] = std::min(stack[top - 1], stack[top]); --top; break;
        case Op::Max: stack[top - 1] = std::max(stack[top - 1], stack[top]); --top; break;
        case Op::Neg: stack[top] = -stack[top]; break;
        case Op::Exp: stack[top] = std::exp(stack[top]); break;
        case Op::Log: stack[top] = std::log(stack[top]); break;
        case Op::Sqrt: stack[top] = std::sqrt(stack[top]); break;
        }
    }
    return stack[0];
}

} // namespace mixeig
