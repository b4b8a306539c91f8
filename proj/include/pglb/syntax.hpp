#ifndef PGLB_SYNTAX_HPP_
#define PGLB_SYNTAX_HPP_

#include <cctype>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "instruction.hpp"

namespace pglb {

inline std::string render(const Instruction& u) {
    switch (u.kind()) {
    case Kind::Plain: return u.basic().str();
    case Kind::PosTest: return "+" + u.basic().str();
    case Kind::NegTest: return "-" + u.basic().str();
    case Kind::FwdJump: return "#" + std::to_string(u.distance());
    case Kind::BwdJump: return "\\#" + std::to_string(u.distance());
    case Kind::RegSet: return "set:" + std::to_string(u.reg()) + ":" + std::to_string(u.value());
    case Kind::IndFwdJump: return "i#" + std::to_string(u.reg());
    case Kind::IndBwdJump: return "i\\#" + std::to_string(u.reg());
    case Kind::Halt: return "!";
    }
    return {};
}

inline std::string render_program(const Program& p) {
    std::string out;
    for (const auto& u : p) {
        if (!out.empty()) out += " ; ";
        out += render(u);
    }
    return out;
}

namespace detail {

// Recursive-descent reader for the program grammar:
//   program := instr (';' instr)*
//   instr   := '!' | '#' NAT | '\#' NAT | 'set:' NAT ':' NAT | 'i#' NAT
//            | 'i\#' NAT | BASIC | '+' BASIC | '-' BASIC
// Whitespace and '//' comments may appear around instructions and ';'.
class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Program parse() {
        std::vector<Instruction> out;
        skip_blank();
        if (at_end()) fail("empty program");
        for (;;) {
            out.push_back(instr());
            skip_blank();
            if (at_end()) break;
            if (peek() != ';') fail("expected ';'");
            advance();
            skip_blank();
            if (at_end()) fail("expected an instruction after ';'");
        }
        return Program(std::move(out));
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_blank() {
        while (!at_end()) {
            if (std::isspace(static_cast<unsigned char>(peek()))) {
                advance();
            } else if (peek() == '/' && peek(1) == '/') {
                while (!at_end() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    [[noreturn]] void fail(const std::string& what) const {
        std::size_t end = pos_;
        while (end < text_.size() && text_[end] != ';' &&
               !std::isspace(static_cast<unsigned char>(text_[end])))
            ++end;
        throw ParseError(line_, col_, std::string(text_.substr(pos_, end - pos_)), what);
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        advance();
    }

    std::uint64_t nat() {
        if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected a natural number");
        std::uint64_t n = 0;
        constexpr auto limit = std::numeric_limits<std::uint64_t>::max() / 10 - 9;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            if (n > limit) fail("number too large");
            n = n * 10 + static_cast<std::uint64_t>(peek() - '0');
            advance();
        }
        return n;
    }

    std::uint64_t reg_index() {
        const auto save_line = line_, save_col = col_;
        const auto save_pos = pos_;
        const auto i = nat();
        if (i == 0) {
            pos_ = save_pos, line_ = save_line, col_ = save_col;
            fail("register index must be >= 1");
        }
        return i;
    }

    static bool lower_or_digit(char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    }
    static bool alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

    std::string focus_ident() {
        if (!(peek() >= 'a' && peek() <= 'z')) fail("expected an instruction");
        std::string f;
        while (lower_or_digit(peek())) {
            f += peek();
            advance();
        }
        return f;
    }

    std::string method() {
        if (!std::isalpha(static_cast<unsigned char>(peek()))) fail("expected a method name");
        std::string m;
        while (alnum(peek())) {
            m += peek();
            advance();
        }
        while (peek() == ':' && alnum(peek(1))) {
            m += ':';
            advance();
            while (alnum(peek())) {
                m += peek();
                advance();
            }
        }
        return m;
    }

    BasicInstruction basic() {
        const auto f = focus_ident();
        if (f == "set") fail("'set' is a reserved focus");
        expect('.');
        return {f, method()};
    }

    Instruction instr() {
        switch (peek()) {
        case '!': advance(); return Instruction::halt();
        case '#': advance(); return Instruction::fwd_jump(nat());
        case '\\': advance(); expect('#'); return Instruction::bwd_jump(nat());
        case '+': advance(); return Instruction::pos_test(basic());
        case '-': advance(); return Instruction::neg_test(basic());
        default: break;
        }
        if (peek() == 'i' && peek(1) == '#') {
            advance(), advance();
            return Instruction::ind_fwd_jump(reg_index());
        }
        if (peek() == 'i' && peek(1) == '\\') {
            advance(), advance();
            expect('#');
            return Instruction::ind_bwd_jump(reg_index());
        }
        const auto save_pos = pos_;
        const auto save_line = line_, save_col = col_;
        const auto f = focus_ident();
        if (f == "set" && peek() == ':') {
            advance();
            const auto i = reg_index();
            expect(':');
            const auto vpos = pos_;
            const auto vline = line_, vcol = col_;
            const auto n = nat();
            if (n == 0) {
                pos_ = vpos, line_ = vline, col_ = vcol;
                fail("register value must be >= 1");
            }
            return Instruction::reg_set(i, n);
        }
        pos_ = save_pos, line_ = save_line, col_ = save_col;
        return Instruction::plain(basic());
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

}  // namespace detail

// Parses program text; throws ParseError with a 1-based line/column.
inline Program parse_program(std::string_view text) { return detail::Parser(text).parse(); }

}  // namespace pglb

#endif  // PGLB_SYNTAX_HPP_
