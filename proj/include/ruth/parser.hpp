#pragma once

#include <cctype>
#include <string>

#include "ruth/poly.hpp"

namespace ruth {

/*
** Recursive-descent parser for the polynomial input grammar:
**
**   expr     := term (('+'|'-') term)*
**   term     := factor ('*' factor)*
**   factor   := base ('^' uint)?
**   base     := rational | ident | '(' expr ')'
**   rational := int ('/' uint)?
**
** Whitespace is insignificant.  Identifiers must be declared chart
** coordinates; anything else is rejected with its position.
*/
class PolyParser {
public:
    PolyParser(std::string text, VarsPtr vars) : text_(std::move(text)), vars_(std::move(vars)) {}

    Poly parse() {
        Poly p = expr();
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError(pos_, std::string("unexpected character '") + text_[pos_] + "'");
        return p;
    }

private:
    Poly expr() {
        Poly p = term();
        for (;;) {
            skip_ws();
            if (peek() == '+') {
                ++pos_;
                p += term();
            } else if (peek() == '-') {
                ++pos_;
                p -= term();
            } else {
                return p;
            }
        }
    }

    Poly term() {
        Poly p = factor();
        for (;;) {
            skip_ws();
            if (peek() == '*') {
                ++pos_;
                p *= factor();
            } else {
                return p;
            }
        }
    }

    Poly factor() {
        Poly b = base();
        skip_ws();
        if (peek() != '^') return b;
        ++pos_;
        skip_ws();
        const std::size_t at = pos_;
        if (!std::isdigit(peek())) throw ParseError(pos_, "expected exponent");
        unsigned long e = 0;
        try {
            e = std::stoul(digits());
        } catch (const std::out_of_range&) {
            throw ParseError(at, "exponent out of range");
        }
        Poly r = Poly::constant(vars_, Rat(1));
        for (unsigned long i = 0; i < e; ++i) r *= b;
        return r;
    }

    Poly base() {
        skip_ws();
        const char c = peek();
        if (c == '(') {
            ++pos_;
            Poly p = expr();
            skip_ws();
            if (peek() != ')') throw ParseError(pos_, "expected ')'");
            ++pos_;
            return p;
        }
        if (c == '-' || std::isdigit(c)) return rational();
        if (std::isalpha(c) || c == '_') {
            const std::size_t at = pos_;
            std::string name = ident();
            for (std::size_t i = 0; i < vars_->size(); ++i)
                if ((*vars_)[i] == name) return Poly::variable(vars_, i);
            throw ParseError(at, "unknown identifier '" + name + "'");
        }
        if (c == '\0') throw ParseError(pos_, "unexpected end of input");
        throw ParseError(pos_, std::string("unexpected character '") + c + "'");
    }

    Poly rational() {
        std::string num;
        if (peek() == '-') {
            num = "-";
            ++pos_;
            skip_ws();
        }
        if (!std::isdigit(peek())) throw ParseError(pos_, "expected number");
        num += digits();
        skip_ws();
        if (peek() != '/') return Poly::constant(vars_, Rat::from_decimal_strings(num, "1"));
        ++pos_;
        skip_ws();
        const std::size_t at = pos_;
        if (!std::isdigit(peek())) throw ParseError(pos_, "expected denominator");
        std::string den = digits();
        if (Rat::from_decimal_strings(den, "1").is_zero())
            throw ParseError(at, "zero denominator");
        return Poly::constant(vars_, Rat::from_decimal_strings(num, den));
    }

    std::string ident() {
        std::string s;
        while (pos_ < text_.size() && (std::isalnum(peek()) || peek() == '_')) s += text_[pos_++];
        return s;
    }

    std::string digits() {
        std::string s;
        while (pos_ < text_.size() && std::isdigit(peek())) s += text_[pos_++];
        return s;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    std::string text_;
    VarsPtr vars_;
    std::size_t pos_ = 0;
};

inline Poly parse_poly(const std::string& text, VarsPtr vars) {
    return PolyParser(text, std::move(vars)).parse();
}

}  // namespace ruth
