// Copyright 2026 The tsvflab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tsvflab/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace tsvflab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::size_t kMaxDiagnostics = 64;

struct Token {
    enum class Kind {
        Ident,
        Number,
        LBrace,
        RBrace,
        LParen,
        RParen,
        Comma,
        Semicolon,
        Arrow,
        End,
        Bad
    } kind = Kind::End;
    std::string text;
    double number = 0.0;
    bool is_integer = false;
    std::uint64_t uint_value = 0;
    bool fits_uint = false;
    std::int64_t int_value = 0;
    bool fits_int = false;
    int line = 1;
    int col = 1;
};

class Lexer {
  public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run(std::vector<ParseDiagnostic> &diags) {
        std::vector<Token> tokens;
        while (true) {
            skip_space_and_comments();
            Token tok;
            tok.line = line_;
            tok.col = col_;
            if (pos_ >= text_.size()) {
                tok.kind = Token::Kind::End;
                tokens.push_back(tok);
                break;
            }
            const char c = text_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                tok.kind = Token::Kind::Ident;
                tok.text = read_while([](char x) {
                    return std::isalnum(static_cast<unsigned char>(x)) ||
                           x == '_';
                });
            } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                       ((c == '+' || c == '-') && pos_ + 1 < text_.size() &&
                        std::isdigit(static_cast<unsigned char>(
                            text_[pos_ + 1])))) {
                lex_number(tok, diags);
            } else if (c == '-' && pos_ + 1 < text_.size() &&
                       text_[pos_ + 1] == '>') {
                tok.kind = Token::Kind::Arrow;
                tok.text = "->";
                advance();
                advance();
            } else {
                switch (c) {
                case '{': tok.kind = Token::Kind::LBrace; break;
                case '}': tok.kind = Token::Kind::RBrace; break;
                case '(': tok.kind = Token::Kind::LParen; break;
                case ')': tok.kind = Token::Kind::RParen; break;
                case ',': tok.kind = Token::Kind::Comma; break;
                case ';': tok.kind = Token::Kind::Semicolon; break;
                default:
                    tok.kind = Token::Kind::Bad;
                    if (diags.size() < kMaxDiagnostics) {
                        diags.push_back({tok.line, tok.col,
                                         std::string("unexpected character '") +
                                             printable(c) + "'",
                                         ParseDiagnostic::Severity::Error});
                    }
                    break;
                }
                tok.text = std::string(1, c);
                advance();
            }
            tokens.push_back(std::move(tok));
            if (tokens.size() > 1u << 20) {
                // Hard cap for pathological input; terminate the stream so
                // the parser always sees an explicit end.
                Token end;
                end.kind = Token::Kind::End;
                end.line = line_;
                end.col = col_;
                tokens.push_back(end);
                break;
            }
        }
        return tokens;
    }

  private:
    static std::string printable(char c) {
        if (std::isprint(static_cast<unsigned char>(c))) {
            return std::string(1, c);
        }
        char buf[8];
        std::snprintf(buf, sizeof(buf), "\\x%02x",
                      static_cast<unsigned char>(c));
        return buf;
    }

    void advance() {
        if (pos_ < text_.size()) {
            if (text_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
    }

    void skip_space_and_comments() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') {
                    advance();
                }
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    template <typename Pred> std::string read_while(Pred pred) {
        std::string out;
        while (pos_ < text_.size() && pred(text_[pos_])) {
            out += text_[pos_];
            advance();
        }
        return out;
    }

    void lex_number(Token &tok, std::vector<ParseDiagnostic> &diags) {
        std::string raw;
        auto take = [&](auto pred) {
            while (pos_ < text_.size() && pred(text_[pos_])) {
                raw += text_[pos_];
                advance();
            }
        };
        if (text_[pos_] == '+' || text_[pos_] == '-') {
            raw += text_[pos_];
            advance();
        }
        auto is_digit = [](char x) {
            return std::isdigit(static_cast<unsigned char>(x));
        };
        take(is_digit);
        bool integral = true;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            integral = false;
            raw += '.';
            advance();
            take(is_digit);
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            integral = false;
            raw += text_[pos_];
            advance();
            if (pos_ < text_.size() &&
                (text_[pos_] == '+' || text_[pos_] == '-')) {
                raw += text_[pos_];
                advance();
            }
            take(is_digit);
        }
        tok.kind = Token::Kind::Number;
        tok.text = raw;
        tok.is_integer = integral;
        const char *begin = raw.data();
        const char *end = raw.data() + raw.size();
        auto [dptr, derr] = std::from_chars(begin, end, tok.number);
        if (derr != std::errc{} || dptr != end || !std::isfinite(tok.number)) {
            tok.kind = Token::Kind::Bad;
            if (diags.size() < kMaxDiagnostics) {
                diags.push_back({tok.line, tok.col,
                                 "malformed number '" + raw + "'",
                                 ParseDiagnostic::Severity::Error});
            }
            return;
        }
        if (integral) {
            const char *ibegin = raw.data();
            if (!raw.empty() && raw[0] == '+') {
                ++ibegin;
            }
            auto [p1, e1] = std::from_chars(ibegin, end, tok.int_value);
            tok.fits_int = (e1 == std::errc{} && p1 == end);
            if (!raw.empty() && raw[0] != '-') {
                auto [p2, e2] = std::from_chars(ibegin, end, tok.uint_value);
                tok.fits_uint = (e2 == std::errc{} && p2 == end);
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
  public:
    Parser(std::vector<Token> tokens, std::vector<ParseDiagnostic> &diags)
        : tokens_(std::move(tokens)), diags_(diags) {}

    std::optional<ExperimentAst> run() {
        ExperimentAst ast;
        if (!expect_keyword("experiment")) {
            return std::nullopt;
        }
        if (peek().kind != Token::Kind::Ident) {
            error(peek(), "expected an experiment name");
            return std::nullopt;
        }
        ast.name = advance().text;
        if (!expect(Token::Kind::LBrace, "expected '{'")) {
            return std::nullopt;
        }
        while (true) {
            const Token &tok = peek();
            if (tok.kind == Token::Kind::RBrace) {
                advance();
                break;
            }
            if (tok.kind == Token::Kind::End) {
                error(tok, "unexpected end of input: missing '}'");
                break;
            }
            parse_statement(ast);
            if (diags_.size() >= kMaxDiagnostics) {
                break;
            }
        }
        if (peek().kind != Token::Kind::End &&
            diags_.size() < kMaxDiagnostics) {
            error(peek(), "unexpected trailing input after '}'");
        }
        return ast;
    }

  private:
    const Token &peek(std::size_t ahead = 0) const {
        const std::size_t idx = std::min(pos_ + ahead, tokens_.size() - 1);
        return tokens_[idx];
    }

    const Token &advance() {
        const Token &tok = tokens_[std::min(pos_, tokens_.size() - 1)];
        if (pos_ + 1 < tokens_.size()) {
            ++pos_;
        } else {
            pos_ = tokens_.size() - 1;
        }
        return tok;
    }

    void error(const Token &at, const std::string &message) {
        if (diags_.size() < kMaxDiagnostics) {
            diags_.push_back({at.line, at.col, message,
                              ParseDiagnostic::Severity::Error});
        }
    }

    bool expect(Token::Kind kind, const std::string &message) {
        if (peek().kind != kind) {
            error(peek(), message + ", got '" + describe(peek()) + "'");
            return false;
        }
        advance();
        return true;
    }

    bool expect_keyword(const std::string &word) {
        if (peek().kind != Token::Kind::Ident || peek().text != word) {
            error(peek(), "expected '" + word + "', got '" + describe(peek()) +
                              "'");
            return false;
        }
        advance();
        return true;
    }

    static std::string describe(const Token &tok) {
        if (tok.kind == Token::Kind::End) {
            return "<end of input>";
        }
        return tok.text;
    }

    /// Skips to just past the next ';', or to '}' / end-of-input.
    void synchronize() {
        while (true) {
            const Token &tok = peek();
            if (tok.kind == Token::Kind::End ||
                tok.kind == Token::Kind::RBrace) {
                return;
            }
            if (tok.kind == Token::Kind::Semicolon) {
                advance();
                return;
            }
            advance();
        }
    }

    std::optional<std::string> parse_port() {
        if (peek().kind != Token::Kind::Ident) {
            error(peek(), "expected a port name, got '" + describe(peek()) +
                              "'");
            return std::nullopt;
        }
        return advance().text;
    }

    std::optional<std::array<std::string, 2>> parse_port_pair() {
        if (!expect(Token::Kind::LParen, "expected '('")) {
            return std::nullopt;
        }
        auto a = parse_port();
        if (!a || !expect(Token::Kind::Comma, "expected ','")) {
            return std::nullopt;
        }
        auto b = parse_port();
        if (!b || !expect(Token::Kind::RParen, "expected ')'")) {
            return std::nullopt;
        }
        return std::array<std::string, 2>{*a, *b};
    }

    std::optional<double> parse_number(const char *what) {
        if (peek().kind != Token::Kind::Number) {
            error(peek(), std::string("expected ") + what + ", got '" +
                              describe(peek()) + "'");
            return std::nullopt;
        }
        return advance().number;
    }

    void parse_statement(ExperimentAst &ast) {
        const Token &head = peek();
        if (head.kind != Token::Kind::Ident) {
            error(head, "expected a statement keyword, got '" +
                            describe(head) + "'");
            synchronize();
            return;
        }
        const std::string keyword = head.text;
        const int line = head.line;
        const int col = head.col;
        advance();
        bool ok = false;
        if (keyword == "source") {
            if (auto port = parse_port()) {
                ast.elements.push_back(AstSource{*port, line, col});
                ok = true;
            }
        } else if (keyword == "beamsplitter") {
            ok = parse_beamsplitter(ast, line, col);
        } else if (keyword == "probe") {
            ok = parse_probe(ast, line, col);
        } else if (keyword == "block") {
            if (auto port = parse_port()) {
                ast.elements.push_back(AstBlock{*port, line, col});
                ok = true;
            }
        } else if (keyword == "detect") {
            if (auto pair = parse_port_pair()) {
                ast.elements.push_back(AstDetect{*pair, line, col});
                ok = true;
            }
        } else if (keyword == "run") {
            parse_run(ast, line, col);
            return; // the run block has no trailing semicolon
        } else {
            error(head, "unknown statement '" + keyword + "'");
        }
        if (!ok) {
            synchronize();
            return;
        }
        if (!expect(Token::Kind::Semicolon, "expected ';'")) {
            synchronize();
        }
    }

    bool parse_beamsplitter(ExperimentAst &ast, int line, int col) {
        if (peek().kind != Token::Kind::Ident) {
            error(peek(), "expected a beam splitter name");
            return false;
        }
        AstBeamSplitter bs;
        bs.name = advance().text;
        bs.line = line;
        bs.col = col;
        auto in = parse_port_pair();
        if (!in) {
            return false;
        }
        bs.in = *in;
        if (!expect(Token::Kind::Arrow, "expected '->'")) {
            return false;
        }
        auto out = parse_port_pair();
        if (!out) {
            return false;
        }
        bs.out = *out;
        if (peek().kind == Token::Kind::Ident && peek().text == "theta") {
            advance();
            auto theta = parse_number("an angle after 'theta'");
            if (!theta) {
                return false;
            }
            bs.theta = *theta;
        }
        ast.elements.push_back(std::move(bs));
        return true;
    }

    bool parse_probe(ExperimentAst &ast, int line, int col) {
        if (peek().kind != Token::Kind::Ident) {
            error(peek(), "expected a probe id");
            return false;
        }
        AstProbe probe;
        probe.id = advance().text;
        probe.line = line;
        probe.col = col;
        if (!expect_keyword("on")) {
            return false;
        }
        auto port = parse_port();
        if (!port) {
            return false;
        }
        probe.port = *port;
        if (!expect_keyword("strength")) {
            return false;
        }
        auto strength = parse_number("a coupling after 'strength'");
        if (!strength) {
            return false;
        }
        probe.strength = *strength;
        if (peek().kind == Token::Kind::Ident && peek().text == "width") {
            advance();
            auto width = parse_number("a width after 'width'");
            if (!width) {
                return false;
            }
            probe.width = *width;
        }
        ast.elements.push_back(std::move(probe));
        return true;
    }

    void parse_run(ExperimentAst &ast, int line, int col) {
        AstRun run;
        run.line = line;
        run.col = col;
        if (ast.run) {
            error(peek(), "duplicate run block");
        }
        if (!expect(Token::Kind::LBrace, "expected '{' after 'run'")) {
            synchronize();
            return;
        }
        bool have_trials = false;
        bool have_seed = false;
        while (true) {
            const Token &tok = peek();
            if (tok.kind == Token::Kind::RBrace) {
                advance();
                break;
            }
            if (tok.kind == Token::Kind::End) {
                error(tok, "unexpected end of input inside run block");
                return;
            }
            if (tok.kind != Token::Kind::Ident) {
                error(tok, "expected a run parameter name, got '" +
                               describe(tok) + "'");
                synchronize();
                return;
            }
            const std::string key = tok.text;
            advance();
            const Token &value = peek();
            if (value.kind != Token::Kind::Number) {
                error(value, "expected a number after '" + key + "'");
                synchronize();
                return;
            }
            if (key == "trials") {
                if (!value.is_integer || !value.fits_int ||
                    value.int_value < 1) {
                    error(value, "trials must be a positive integer");
                } else {
                    run.trials = value.int_value;
                    have_trials = true;
                }
            } else if (key == "seed") {
                if (!value.is_integer || !value.fits_uint) {
                    error(value, "seed must be a non-negative integer");
                } else {
                    run.seed = value.uint_value;
                    have_seed = true;
                }
            } else if (key == "cycles") {
                if (!value.is_integer || !value.fits_int ||
                    value.int_value < 1) {
                    error(value, "cycles must be a positive integer");
                } else {
                    run.cycles = value.int_value;
                }
            } else if (key == "subsample") {
                if (!(value.number > 0.0 && value.number <= 1.0)) {
                    error(value, "subsample must be in (0, 1]");
                } else {
                    run.subsample = value.number;
                }
            } else {
                error(tok, "unknown run parameter '" + key + "'");
            }
            advance();
        }
        if (!have_trials) {
            error(peek(), "run block is missing 'trials'");
        }
        if (!have_seed) {
            error(peek(), "run block is missing 'seed'");
        }
        if (!ast.run) {
            ast.run = run;
        }
    }

    std::vector<Token> tokens_;
    std::vector<ParseDiagnostic> &diags_;
    std::size_t pos_ = 0;
};

void format_number(std::ostringstream &os, double v) {
    char buf[64];
    auto [ptr, err] = std::to_chars(buf, buf + sizeof(buf), v);
    if (err == std::errc{}) {
        os << std::string_view(buf, ptr - buf);
    } else {
        os << v;
    }
}

/// Chain-wiring validation; appends diagnostics.
void validate_ast(const ExperimentAst &ast,
                  std::vector<ParseDiagnostic> &diags) {
    auto add = [&diags](int line, int col, const std::string &message) {
        if (diags.size() < kMaxDiagnostics) {
            diags.push_back({line, col, message,
                             ParseDiagnostic::Severity::Error});
        }
    };

    std::set<std::string> declared;
    std::set<std::string> probe_ids;
    std::optional<std::array<std::string, 2>> frontier;
    std::string source;
    bool seen_source = false;
    bool seen_detect = false;
    bool seen_bs = false;

    for (const AstElement &elem : ast.elements) {
        if (seen_detect) {
            const auto [line, col] = std::visit(
                [](const auto &e) { return std::pair(e.line, e.col); }, elem);
            add(line, col, "no elements are allowed after 'detect'");
            return;
        }
        if (const auto *src = std::get_if<AstSource>(&elem)) {
            if (seen_source) {
                add(src->line, src->col, "duplicate source declaration");
            } else if (seen_bs) {
                add(src->line, src->col,
                    "source must be declared before any beamsplitter");
            } else {
                seen_source = true;
                source = src->port;
                declared.insert(src->port);
            }
        } else if (const auto *bs = std::get_if<AstBeamSplitter>(&elem)) {
            if (!seen_source) {
                add(bs->line, bs->col,
                    "beamsplitter declared before the source");
                return;
            }
            if (bs->in[0] == bs->in[1] || bs->out[0] == bs->out[1]) {
                add(bs->line, bs->col,
                    "beam splitter ports within a pair must be distinct");
                return;
            }
            if (!seen_bs) {
                // The first splitter's second input is the unoccupied
                // companion of the source; it is declared here.
                if (bs->in[0] != source && bs->in[1] != source) {
                    add(bs->line, bs->col,
                        "the first beamsplitter must consume the source port '" +
                            source + "'");
                    return;
                }
                const std::string &companion =
                    bs->in[0] == source ? bs->in[1] : bs->in[0];
                if (declared.count(companion) != 0) {
                    add(bs->line, bs->col, "companion input port '" +
                                               companion +
                                               "' is already declared");
                    return;
                }
                declared.insert(companion);
            } else {
                for (const auto &port : bs->in) {
                    if (declared.count(port) == 0) {
                        add(bs->line, bs->col,
                            "undeclared port '" + port + "'");
                        return;
                    }
                }
                const bool matches =
                    (bs->in[0] == (*frontier)[0] && bs->in[1] == (*frontier)[1]) ||
                    (bs->in[0] == (*frontier)[1] && bs->in[1] == (*frontier)[0]);
                if (!matches) {
                    add(bs->line, bs->col,
                        "beam splitter inputs (" + bs->in[0] + "," + bs->in[1] +
                            ") do not match the live pair (" + (*frontier)[0] +
                            "," + (*frontier)[1] + ")");
                    return;
                }
            }
            for (const auto &port : bs->out) {
                if (!declared.insert(port).second) {
                    add(bs->line, bs->col, "output port '" + port +
                                               "' is already declared");
                    return;
                }
            }
            frontier = bs->out;
            seen_bs = true;
            if (bs->theta &&
                !(*bs->theta >= 0.0 && *bs->theta <= kPi / 2.0 + 1e-9)) {
                add(bs->line, bs->col, "theta must lie in [0, pi/2]");
            }
        } else if (const auto *probe = std::get_if<AstProbe>(&elem)) {
            if (declared.count(probe->port) == 0) {
                add(probe->line, probe->col,
                    "undeclared port '" + probe->port + "'");
                return;
            }
            if (!frontier || (probe->port != (*frontier)[0] &&
                              probe->port != (*frontier)[1])) {
                add(probe->line, probe->col,
                    "probe port '" + probe->port + "' is not in the live pair");
                return;
            }
            if (!probe_ids.insert(probe->id).second) {
                add(probe->line, probe->col,
                    "duplicate probe id '" + probe->id + "'");
            }
            if (!(probe->strength >= 0.0)) {
                add(probe->line, probe->col, "strength must be >= 0");
            }
            if (probe->width && !(*probe->width > 0.0)) {
                add(probe->line, probe->col, "width must be > 0");
            }
        } else if (const auto *block = std::get_if<AstBlock>(&elem)) {
            if (declared.count(block->port) == 0) {
                add(block->line, block->col,
                    "undeclared port '" + block->port + "'");
                return;
            }
            if (!frontier || (block->port != (*frontier)[0] &&
                              block->port != (*frontier)[1])) {
                add(block->line, block->col,
                    "block port '" + block->port + "' is not in the live pair");
                return;
            }
        } else if (const auto *detect = std::get_if<AstDetect>(&elem)) {
            if (!frontier) {
                add(detect->line, detect->col,
                    "detect requires at least one beamsplitter before it");
                return;
            }
            for (const auto &port : detect->ports) {
                if (declared.count(port) == 0) {
                    add(detect->line, detect->col,
                        "undeclared port '" + port + "'");
                    return;
                }
            }
            const bool matches = (detect->ports[0] == (*frontier)[0] &&
                                  detect->ports[1] == (*frontier)[1]) ||
                                 (detect->ports[0] == (*frontier)[1] &&
                                  detect->ports[1] == (*frontier)[0]);
            if (!matches) {
                add(detect->line, detect->col,
                    "detect ports do not match the live pair (" +
                        (*frontier)[0] + "," + (*frontier)[1] + ")");
                return;
            }
            seen_detect = true;
        }
    }
    if (!seen_source) {
        add(1, 1, "experiment has no source declaration");
    }
    if (!seen_detect) {
        add(1, 1, "experiment has no detect declaration");
    }
}

} // namespace

ParseResult parse(std::string_view text) {
    ParseResult result;
    Lexer lexer(text);
    auto tokens = lexer.run(result.diagnostics);
    Parser parser(std::move(tokens), result.diagnostics);
    auto ast = parser.run();
    const bool lex_or_parse_errors = !result.diagnostics.empty();
    if (!ast || lex_or_parse_errors) {
        return result;
    }
    validate_ast(*ast, result.diagnostics);
    if (result.diagnostics.empty()) {
        result.ast = std::move(ast);
    }
    return result;
}

std::string serialize(const ExperimentAst &ast) {
    std::ostringstream os;
    os << "experiment " << ast.name << " {\n";
    for (const AstElement &elem : ast.elements) {
        os << "  ";
        std::visit(
            [&os](const auto &e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, AstSource>) {
                    os << "source " << e.port << ";";
                } else if constexpr (std::is_same_v<T, AstBeamSplitter>) {
                    os << "beamsplitter " << e.name << " (" << e.in[0] << ", "
                       << e.in[1] << ") -> (" << e.out[0] << ", " << e.out[1]
                       << ")";
                    if (e.theta) {
                        os << " theta ";
                        format_number(os, *e.theta);
                    }
                    os << ";";
                } else if constexpr (std::is_same_v<T, AstProbe>) {
                    os << "probe " << e.id << " on " << e.port << " strength ";
                    format_number(os, e.strength);
                    if (e.width) {
                        os << " width ";
                        format_number(os, *e.width);
                    }
                    os << ";";
                } else if constexpr (std::is_same_v<T, AstBlock>) {
                    os << "block " << e.port << ";";
                } else {
                    os << "detect (" << e.ports[0] << ", " << e.ports[1]
                       << ");";
                }
            },
            elem);
        os << "\n";
    }
    if (ast.run) {
        os << "  run { trials " << ast.run->trials << " seed "
           << ast.run->seed;
        if (ast.run->cycles) {
            os << " cycles " << *ast.run->cycles;
        }
        if (ast.run->subsample) {
            os << " subsample ";
            format_number(os, *ast.run->subsample);
        }
        os << " }\n";
    }
    os << "}\n";
    return os.str();
}

LowerResult lower(const ExperimentAst &ast) {
    LowerResult result;
    std::vector<ParseDiagnostic> pre_check;
    validate_ast(ast, pre_check);
    if (!pre_check.empty()) {
        result.diagnostics = std::move(pre_check);
        return result;
    }

    CircuitSpec spec;
    spec.name = ast.name;
    std::optional<std::array<std::string, 2>> frontier;
    for (const AstElement &elem : ast.elements) {
        if (const auto *src = std::get_if<AstSource>(&elem)) {
            spec.source_port = src->port;
        } else if (const auto *bs = std::get_if<AstBeamSplitter>(&elem)) {
            BeamSplitterElem stage;
            stage.name = bs->name;
            stage.in = bs->in;
            stage.out = bs->out;
            stage.theta = bs->theta.value_or(kPi / 4.0);
            spec.stages.push_back(std::move(stage));
            frontier = bs->out;
        } else if (const auto *probe = std::get_if<AstProbe>(&elem)) {
            ProbeElem stage;
            stage.id = probe->id;
            stage.ports = *frontier;
            stage.target = probe->port == (*frontier)[0] ? 0 : 1;
            stage.cfg = PointerConfig{probe->strength,
                                      probe->width.value_or(1.0)};
            spec.stages.push_back(std::move(stage));
        } else if (const auto *block = std::get_if<AstBlock>(&elem)) {
            BlockElem stage;
            stage.ports = *frontier;
            stage.target = block->port == (*frontier)[0] ? 0 : 1;
            spec.stages.push_back(std::move(stage));
        } else if (const auto *detect = std::get_if<AstDetect>(&elem)) {
            spec.final_basis = detect->ports;
        }
    }
    if (ast.run) {
        result.run.trials = static_cast<std::size_t>(ast.run->trials);
        result.run.seed = ast.run->seed;
        if (ast.run->cycles) {
            result.run.cycles = static_cast<std::size_t>(*ast.run->cycles);
        }
        result.run.subsample = ast.run->subsample;
    }
    try {
        spec.validate();
    } catch (const ValidationError &err) {
        result.diagnostics.push_back(
            {1, 1, std::string("lowering failed: ") + err.what(),
             ParseDiagnostic::Severity::Error});
        return result;
    }
    result.spec = std::move(spec);
    return result;
}

} // namespace tsvflab
