#include "minicminor/parser.hpp"

#include <cctype>
#include <set>

#include "minicminor/env.hpp"

namespace cminor {

namespace {

bool is_keyword(const std::string& s) {
  static const std::set<std::string> kw = {"skip", "if", "else", "loop", "block", "exit", "extcall", "init"};
  return kw.count(s) != 0;
}

struct Token {
  enum class Kind { Ident, Keyword, Int, Symbol, End };
  Kind kind;
  std::string text;
  Value ivalue = 0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, current_.line, current_.col);
  }

 private:
  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) consume();
    current_.line = line_;
    current_.col = col_;
    if (pos_ >= text_.size()) {
      current_.kind = Token::Kind::End;
      current_.text = "<end of input>";
      return;
    }
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      lex_int();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        word += text_[pos_];
        consume();
      }
      current_.kind = is_keyword(word) ? Token::Kind::Keyword : Token::Kind::Ident;
      current_.text = word;
      return;
    }
    // multi-char symbols first
    if (c == ':' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
      symbol(":=");
      return;
    }
    if (c == '=' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
      symbol("==");
      return;
    }
    static const std::string singles = "+-*/<(){};,=";
    if (singles.find(c) != std::string::npos) {
      symbol(std::string(1, c));
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
  }

  void lex_int() {
    std::uint64_t acc = 0;
    int start_line = line_, start_col = col_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      int d = text_[pos_] - '0';
      if (acc > (0x8000000000000000ULL - d) / 10)
        throw ParseError("integer literal too large", start_line, start_col);
      acc = acc * 10 + static_cast<std::uint64_t>(d);
      consume();
    }
    current_.kind = Token::Kind::Int;
    current_.ivalue = static_cast<Value>(acc);  // 2^63 maps to INT64_MIN; only reachable via "-"
    current_.text = std::to_string(acc);
  }

  void symbol(const std::string& s) {
    current_.kind = Token::Kind::Symbol;
    current_.text = s;
    for (std::size_t i = 0; i < s.size(); ++i) consume();
  }

  void consume() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token current_;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  Program parse() {
    Program p;
    while (at_keyword("init")) parse_init_header(p);
    p.body = parse_stmt();
    if (lex_.peek().kind != Token::Kind::End) lex_.fail("expected end of input, got '" + lex_.peek().text + "'");
    return p;
  }

 private:
  bool at_keyword(const char* kw) const {
    return lex_.peek().kind == Token::Kind::Keyword && lex_.peek().text == kw;
  }

  bool at_symbol(const char* sym) const {
    return lex_.peek().kind == Token::Kind::Symbol && lex_.peek().text == sym;
  }

  Token expect_symbol(const char* sym) {
    if (!at_symbol(sym)) lex_.fail(std::string("expected '") + sym + "', got '" + lex_.peek().text + "'");
    return lex_.take();
  }

  std::string expect_ident(const char* what) {
    if (lex_.peek().kind != Token::Kind::Ident)
      lex_.fail(std::string("expected ") + what + ", got '" + lex_.peek().text + "'");
    return lex_.take().text;
  }

  void parse_init_header(Program& p) {
    lex_.take();  // init
    while (true) {
      Token name_tok = lex_.peek();
      std::string name = expect_ident("register name");
      expect_symbol("=");
      Value v = parse_int_literal();
      if (p.initial_regs.count(name))
        throw ParseError("duplicate initial register '" + name + "'", name_tok.line, name_tok.col);
      p.initial_regs[name] = v;
      if (at_symbol(","))
        lex_.take();
      else
        break;
    }
  }

  Value parse_int_literal() {
    bool neg = false;
    if (at_symbol("-")) {
      lex_.take();
      neg = true;
    }
    if (lex_.peek().kind != Token::Kind::Int) lex_.fail("expected integer, got '" + lex_.peek().text + "'");
    Value v = lex_.take().ivalue;
    return neg ? wrap_sub(0, v) : v;
  }

  // ";" is right-associative
  StmtPtr parse_stmt() {
    StmtPtr first = parse_simple_stmt();
    if (at_symbol(";")) {
      lex_.take();
      return seq(std::move(first), parse_stmt());
    }
    return first;
  }

  StmtPtr parse_braced() {
    expect_symbol("{");
    StmtPtr s = parse_stmt();
    expect_symbol("}");
    return s;
  }

  StmtPtr parse_simple_stmt() {
    const Token& t = lex_.peek();
    if (t.kind == Token::Kind::Keyword) {
      if (t.text == "skip") {
        lex_.take();
        return skip();
      }
      if (t.text == "exit") {
        lex_.take();
        if (lex_.peek().kind != Token::Kind::Int)
          lex_.fail("expected exit level, got '" + lex_.peek().text + "'");
        return exit_stmt(static_cast<std::uint64_t>(lex_.take().ivalue));
      }
      if (t.text == "if") {
        lex_.take();
        ExprPtr cond = parse_expr();
        StmtPtr then_branch = parse_braced();
        if (!at_keyword("else")) lex_.fail("expected 'else', got '" + lex_.peek().text + "'");
        lex_.take();
        StmtPtr else_branch = parse_braced();
        return if_stmt(std::move(cond), std::move(then_branch), std::move(else_branch));
      }
      if (t.text == "loop") {
        lex_.take();
        return loop(parse_braced());
      }
      if (t.text == "block") {
        lex_.take();
        return block(parse_braced());
      }
      lex_.fail("unexpected keyword '" + t.text + "'");
    }
    if (t.kind == Token::Kind::Ident) {
      std::string target = lex_.take().text;
      expect_symbol(":=");
      if (at_keyword("extcall")) {
        lex_.take();
        std::string fn = expect_ident("external function name");
        expect_symbol("(");
        ExprPtr arg = parse_expr();
        expect_symbol(")");
        return extcall(std::move(fn), std::move(arg), std::move(target));
      }
      return store(std::move(target), parse_expr());
    }
    lex_.fail("expected statement, got '" + t.text + "'");
  }

  // precedence: < == (lowest), + -, * / (highest); all left-associative
  ExprPtr parse_expr() { return parse_cmp(); }

  ExprPtr parse_cmp() {
    ExprPtr lhs = parse_add();
    while (at_symbol("<") || at_symbol("==")) {
      BinOpKind op = lex_.take().text == "<" ? BinOpKind::Lt : BinOpKind::Eq;
      lhs = binop(op, std::move(lhs), parse_add());
    }
    return lhs;
  }

  ExprPtr parse_add() {
    ExprPtr lhs = parse_mul();
    while (at_symbol("+") || at_symbol("-")) {
      BinOpKind op = lex_.take().text == "+" ? BinOpKind::Add : BinOpKind::Sub;
      lhs = binop(op, std::move(lhs), parse_mul());
    }
    return lhs;
  }

  ExprPtr parse_mul() {
    ExprPtr lhs = parse_primary();
    while (at_symbol("*") || at_symbol("/")) {
      BinOpKind op = lex_.take().text == "*" ? BinOpKind::Mul : BinOpKind::Div;
      lhs = binop(op, std::move(lhs), parse_primary());
    }
    return lhs;
  }

  ExprPtr parse_primary() {
    const Token& t = lex_.peek();
    if (t.kind == Token::Kind::Int || at_symbol("-")) return constant(parse_int_literal());
    if (t.kind == Token::Kind::Ident) return reg(lex_.take().text);
    if (at_symbol("(")) {
      lex_.take();
      ExprPtr e = parse_expr();
      expect_symbol(")");
      return e;
    }
    lex_.fail("expected expression, got '" + t.text + "'");
  }

  Lexer lex_;
};

using RegNames = std::set<std::string>;

void check_expr_reads(const ExprPtr& e, const RegNames& defined, std::optional<std::string>& offender) {
  if (offender) return;
  std::visit(overloaded{
                 [](const Expr::Const&) {},
                 [&](const Expr::Reg& r) {
                   if (!defined.count(r.name)) offender = r.name;
                 },
                 [&](const Expr::BinOp& b) {
                   check_expr_reads(b.lhs, defined, offender);
                   check_expr_reads(b.rhs, defined, offender);
                 },
             },
             e->node);
}

// Must-define: returns the registers surely written once s completes
// normally. Loops and blocks contribute nothing beyond their entry set
// because exits may skip any suffix of their bodies.
RegNames check_defined(const StmtPtr& s, RegNames defined, std::optional<std::string>& offender) {
  if (offender) return defined;
  return std::visit(
      overloaded{
          [&](const Stmt::Skip&) { return defined; },
          [&](const Stmt::Store& st) {
            check_expr_reads(st.value, defined, offender);
            defined.insert(st.reg);
            return defined;
          },
          [&](const Stmt::If& st) {
            check_expr_reads(st.cond, defined, offender);
            RegNames d1 = check_defined(st.then_branch, defined, offender);
            RegNames d2 = check_defined(st.else_branch, defined, offender);
            RegNames both;
            for (const auto& r : d1)
              if (d2.count(r)) both.insert(r);
            return both;
          },
          [&](const Stmt::Seq& st) {
            return check_defined(st.second, check_defined(st.first, std::move(defined), offender), offender);
          },
          [&](const Stmt::Loop& st) {
            check_defined(st.body, defined, offender);
            return defined;
          },
          [&](const Stmt::Block& st) {
            check_defined(st.body, defined, offender);
            return defined;
          },
          [&](const Stmt::Exit&) { return defined; },
          [&](const Stmt::ExtCall& st) {
            check_expr_reads(st.arg, defined, offender);
            defined.insert(st.ret_reg);
            return defined;
          },
      },
      s->node);
}

}  // namespace

std::optional<std::string> find_unbound_register(const Program& p) {
  RegNames defined;
  for (const auto& [name, _] : p.initial_regs) defined.insert(name);
  std::optional<std::string> offender;
  check_defined(p.body, std::move(defined), offender);
  return offender;
}

Program parse_program(const std::string& text) {
  Program p = Parser(text).parse();
  if (auto offender = find_unbound_register(p)) throw UnboundRegisterError(*offender);
  return p;
}

}  // namespace cminor
