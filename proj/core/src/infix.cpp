#include "srgp/infix.hpp"

#include "srgp/telemetry.hpp"

#include <cctype>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>

namespace srgp {

namespace {

std::string var_name(int index, const std::vector<std::string>& names) {
    if (index >= 0 && static_cast<std::size_t>(index) < names.size()) {
        return names[static_cast<std::size_t>(index)];
    }
    return "x" + std::to_string(index + 1);
}

void write_node(std::ostringstream& out, const ExprTree& tree, std::size_t index,
                const std::vector<std::string>& names) {
    const Node& n = tree.nodes()[index];
    std::int32_t ch[3];
    switch (n.op) {
    case Op::Constant:
        out << format_value(n.value);
        return;
    case Op::Variable:
        if (n.has_slot()) {
            out << format_value(n.value) << '*' << var_name(n.var_index, names);
        } else {
            out << var_name(n.var_index, names);
        }
        return;
    case Op::Add:
    case Op::Mul:
    case Op::Div: {
        tree.child_indices(index, ch);
        const char sep = n.op == Op::Add ? '+' : (n.op == Op::Mul ? '*' : '/');
        out << '(';
        for (std::uint8_t c = 0; c < n.arity; ++c) {
            if (c > 0) out << ' ' << sep << ' ';
            write_node(out, tree, static_cast<std::size_t>(ch[c]), names);
        }
        out << ')';
        return;
    }
    case Op::Aq: {
        tree.child_indices(index, ch);
        out << "aq(";
        write_node(out, tree, static_cast<std::size_t>(ch[0]), names);
        out << ", ";
        write_node(out, tree, static_cast<std::size_t>(ch[1]), names);
        out << ')';
        return;
    }
    default: {
        tree.child_indices(index, ch);
        out << op_name(n.op) << '(';
        write_node(out, tree, static_cast<std::size_t>(ch[0]), names);
        out << ')';
        return;
    }
    }
}

} // namespace

std::string to_infix(const ExprTree& tree, const std::vector<std::string>& names) {
    std::ostringstream out;
    write_node(out, tree, 0, names);
    return out.str();
}

namespace {

enum class Tok { Number, Ident, LParen, RParen, Comma, Plus, Star, Slash, End };

struct Token {
    Tok kind = Tok::End;
    double number = 0.0;
    std::string text;
    std::size_t begin = 0;
    std::size_t end = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    const Token& peek(int ahead = 0) {
        while (static_cast<int>(buffer_.size()) <= ahead) buffer_.push_back(lex());
        return buffer_[static_cast<std::size_t>(ahead)];
    }

    Token take() {
        Token t = peek();
        buffer_.erase(buffer_.begin());
        return t;
    }

private:
    [[noreturn]] void fail(const std::string& what, std::size_t at) const {
        throw std::invalid_argument("infix parse error at offset " + std::to_string(at) + ": " +
                                    what);
    }

    Token lex() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        Token t;
        t.begin = pos_;
        if (pos_ >= text_.size()) {
            t.kind = Tok::End;
            t.end = pos_;
            return t;
        }
        char c = text_[pos_];
        auto single = [&](Tok kind) {
            t.kind = kind;
            t.text = c;
            t.end = ++pos_;
            return t;
        };
        switch (c) {
        case '(': return single(Tok::LParen);
        case ')': return single(Tok::RParen);
        case ',': return single(Tok::Comma);
        case '+': return single(Tok::Plus);
        case '*': return single(Tok::Star);
        case '/': return single(Tok::Slash);
        default: break;
        }
        bool negative_number = c == '-' && pos_ + 1 < text_.size() &&
                               (std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) ||
                                text_[pos_ + 1] == '.' || text_[pos_ + 1] == 'i' ||
                                text_[pos_ + 1] == 'n');
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || negative_number ||
            text_.compare(pos_, 3, "inf") == 0 || text_.compare(pos_, 3, "nan") == 0) {
            const char* start = text_.c_str() + pos_;
            char* after = nullptr;
            double v = std::strtod(start, &after);
            if (after == start) fail("malformed number", pos_);
            t.kind = Tok::Number;
            t.number = v;
            t.text.assign(start, static_cast<std::size_t>(after - start));
            pos_ += static_cast<std::size_t>(after - start);
            t.end = pos_;
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t e = pos_;
            while (e < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[e])) ||
                                        text_[e] == '_')) {
                ++e;
            }
            t.kind = Tok::Ident;
            t.text = text_.substr(pos_, e - pos_);
            pos_ = e;
            t.end = pos_;
            return t;
        }
        fail(std::string("unexpected character '") + c + "'", pos_);
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    std::vector<Token> buffer_;
};

class Parser {
public:
    Parser(const std::string& text, const std::vector<std::string>& names) : lexer_(text) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            name_to_index_[names[i]] = static_cast<int>(i);
        }
    }

    build::Fragment parse() {
        build::Fragment f = parse_primary();
        expect(Tok::End, "trailing input after expression");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("infix parse error near offset " +
                                    std::to_string(lexer_.peek().begin) + ": " + what);
    }

    Token expect(Tok kind, const std::string& what) {
        Token t = lexer_.take();
        if (t.kind != kind) fail(what);
        return t;
    }

    int variable_index(const std::string& name) {
        auto it = name_to_index_.find(name);
        if (it == name_to_index_.end()) fail("unknown variable '" + name + "'");
        return it->second;
    }

    static Op unary_by_name(const std::string& name) {
        static const std::map<std::string, Op> table = {
            {"logabs", Op::LogAbs}, {"exp", Op::Exp},         {"sin", Op::Sin},
            {"cos", Op::Cos},       {"tanh", Op::Tanh},       {"sqr", Op::Square},
            {"sqrtabs", Op::SqrtAbs}, {"cbrt", Op::Cbrt},
        };
        auto it = table.find(name);
        return it == table.end() ? Op::Variable : it->second;
    }

    build::Fragment parse_primary() {
        const Token& t = lexer_.peek();
        switch (t.kind) {
        case Tok::Number: {
            Token num = lexer_.take();
            // `1.5*x2` written tightly is one coefficiented variable.
            if (lexer_.peek(0).kind == Tok::Star && lexer_.peek(1).kind == Tok::Ident &&
                lexer_.peek(0).begin == num.end &&
                lexer_.peek(1).begin == lexer_.peek(0).end) {
                lexer_.take();
                Token ident = lexer_.take();
                return build::variable(variable_index(ident.text), num.number);
            }
            return build::constant(num.number);
        }
        case Tok::Ident: {
            Token ident = lexer_.take();
            if (lexer_.peek().kind == Tok::LParen) {
                lexer_.take();
                if (ident.text == "aq") {
                    build::Fragment a = parse_primary();
                    expect(Tok::Comma, "expected ',' in aq(a, b)");
                    build::Fragment b = parse_primary();
                    expect(Tok::RParen, "expected ')' after aq arguments");
                    return build::nary(Op::Aq, std::move(a), std::move(b));
                }
                Op op = unary_by_name(ident.text);
                if (op == Op::Variable) fail("unknown function '" + ident.text + "'");
                build::Fragment a = parse_primary();
                expect(Tok::RParen, "expected ')' after function argument");
                return build::unary(op, std::move(a));
            }
            return build::bare_variable(variable_index(ident.text));
        }
        case Tok::LParen: {
            lexer_.take();
            std::vector<build::Fragment> operands;
            operands.push_back(parse_primary());
            Tok op_kind = lexer_.peek().kind;
            if (op_kind != Tok::Plus && op_kind != Tok::Star && op_kind != Tok::Slash) {
                fail("expected an operator inside parentheses");
            }
            while (lexer_.peek().kind == op_kind) {
                lexer_.take();
                operands.push_back(parse_primary());
            }
            expect(Tok::RParen, "expected ')'");
            Op op = op_kind == Tok::Plus ? Op::Add : (op_kind == Tok::Star ? Op::Mul : Op::Div);
            if (op == Op::Div && operands.size() != 2) {
                fail("division takes exactly two operands");
            }
            if (operands.size() == 2) {
                return build::nary(op, std::move(operands[0]), std::move(operands[1]));
            }
            if (operands.size() == 3 && is_nary(op)) {
                return build::nary(op, std::move(operands[0]), std::move(operands[1]),
                                   std::move(operands[2]));
            }
            fail("operator chains longer than three operands are not written by the serializer");
        }
        default:
            fail("expected an expression");
        }
    }

    Lexer lexer_;
    std::map<std::string, int> name_to_index_;
};

} // namespace

ExprTree parse_infix(const std::string& text, const std::vector<std::string>& names) {
    Parser parser(text, names);
    return ExprTree(parser.parse());
}

} // namespace srgp
