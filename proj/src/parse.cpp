#include "invforge/parse.hpp"

#include "invforge/errors.hpp"

#include <cctype>

namespace invforge {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int column;
};

class Lexer {
public:
    explicit Lexer(std::string_view s) : src_(s) {}

    Token next()
    {
        skip_space();
        int line = line_, col = col_;
        if (pos_ >= src_.size()) return {Tok::End, "", line, col};
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < src_.size() &&
                                                           std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
            std::string text;
            bool dot = false;
            while (pos_ < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[pos_])) || (src_[pos_] == '.' && !dot))) {
                if (src_[pos_] == '.') dot = true;
                text += advance();
            }
            return {Tok::Number, text, line, col};
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string text;
            while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                text += advance();
            return {Tok::Ident, text, line, col};
        }
        advance();
        switch (c) {
        case '+': return {Tok::Plus, "+", line, col};
        case '-': return {Tok::Minus, "-", line, col};
        case '*': return {Tok::Star, "*", line, col};
        case '/': return {Tok::Slash, "/", line, col};
        case '^': return {Tok::Caret, "^", line, col};
        case '(': return {Tok::LParen, "(", line, col};
        case ')': return {Tok::RParen, ")", line, col};
        default: break;
        }
        throw SyntaxError("unexpected character '" + std::string(1, c) + "'", line, col);
    }

private:
    char advance()
    {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    void skip_space()
    {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

Rational decimal(const std::string& text)
{
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(mpq_class(mpz_class(text)));
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, text.size() - dot - 1);
    if (digits.empty()) digits = "0";
    mpq_class q(mpz_class(digits), scale);
    q.canonicalize();
    return Rational(q);
}

class Parser {
public:
    Parser(std::string_view text, ParseMode mode) : lex_(text), mode_(mode) { tok_ = lex_.next(); }

    Expr parse_all()
    {
        Expr e = expr();
        if (tok_.kind != Tok::End) fail();
        return e;
    }

private:
    [[noreturn]] void fail()
    {
        if (tok_.kind == Tok::End) throw SyntaxError("unexpected end of input", tok_.line, tok_.column);
        throw SyntaxError("unexpected '" + tok_.text + "'", tok_.line, tok_.column);
    }
    void expect(Tok k)
    {
        if (tok_.kind != k) fail();
        tok_ = lex_.next();
    }

    Expr expr()
    {
        Expr e = term();
        while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
            bool minus = tok_.kind == Tok::Minus;
            tok_ = lex_.next();
            Expr r = term();
            e = minus ? e - r : e + r;
        }
        return e;
    }

    Expr term()
    {
        Expr e = unary();
        while (tok_.kind == Tok::Star || tok_.kind == Tok::Slash) {
            Token op = tok_;
            tok_ = lex_.next();
            Expr r = unary();
            if (op.kind == Tok::Star) {
                e = e * r;
            } else {
                if (r.is_zero()) throw SyntaxError("division by zero", op.line, op.column);
                e = e / r;
            }
        }
        return e;
    }

    Expr unary()
    {
        if (tok_.kind == Tok::Minus) {
            tok_ = lex_.next();
            return -unary();
        }
        if (tok_.kind == Tok::Plus) {
            tok_ = lex_.next();
            return unary();
        }
        return power();
    }

    Expr power()
    {
        Expr base = primary();
        if (tok_.kind != Tok::Caret) return base;
        Token caret = tok_;
        tok_ = lex_.next();
        Token at = tok_;
        Expr ex = unary();
        auto r = ex.as_rational();
        if (!r) throw SyntaxError("exponent must be a rational constant", at.line, at.column);
        if (base.is_zero() && r->sign() < 0) throw SyntaxError("zero raised to a negative power", caret.line, caret.column);
        return pow(base, *r);
    }

    Expr primary()
    {
        Token t = tok_;
        switch (t.kind) {
        case Tok::Number: tok_ = lex_.next(); return Expr(decimal(t.text));
        case Tok::LParen: {
            tok_ = lex_.next();
            Expr e = expr();
            expect(Tok::RParen);
            return e;
        }
        case Tok::Ident: {
            tok_ = lex_.next();
            if (t.text == "exp" || t.text == "log" || t.text == "sin" || t.text == "cos") {
                expect(Tok::LParen);
                Expr arg = expr();
                expect(Tok::RParen);
                if (t.text == "exp") return exp(arg);
                if (t.text == "sin") return sin(arg);
                if (t.text == "cos") return cos(arg);
                if (auto c = arg.as_rational(); c && c->sign() <= 0)
                    throw SyntaxError("log of a non-positive constant", t.line, t.column);
                return log(arg);
            }
            return identifier(t);
        }
        default: fail();
        }
    }

    Expr identifier(const Token& t)
    {
        if (mode_ == ParseMode::User) {
            if (t.text == "u") return Expr(Symbol::u());
            if (t.text == "v" || t.text == "ux") return Expr(Symbol::v());
            throw UnknownIdentifier(t.text, t.line, t.column);
        }
        if (auto s = symbol_from_name(t.text)) return Expr(*s);
        return Expr(Symbol::param(t.text));
    }

    Lexer lex_;
    ParseMode mode_;
    Token tok_;
};

} // namespace

Expr parse(std::string_view text, ParseMode mode) { return Parser(text, mode).parse_all(); }

} // namespace invforge
