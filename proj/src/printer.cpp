#include "minicminor/printer.hpp"

namespace cminor {

namespace {

int precedence(BinOpKind op) {
  switch (op) {
    case BinOpKind::Lt:
    case BinOpKind::Eq: return 1;
    case BinOpKind::Add:
    case BinOpKind::Sub: return 2;
    case BinOpKind::Mul:
    case BinOpKind::Div: return 3;
  }
  return 0;
}

// min_prec: parenthesize when this subexpression binds looser than required
void print_expr(const ExprPtr& e, int min_prec, std::string& out) {
  std::visit(overloaded{
                 [&](const Expr::Const& c) { out += std::to_string(c.value); },
                 [&](const Expr::Reg& r) { out += r.name; },
                 [&](const Expr::BinOp& b) {
                   int prec = precedence(b.op);
                   bool parens = prec < min_prec;
                   if (parens) out += '(';
                   print_expr(b.lhs, prec, out);
                   out += ' ';
                   out += binop_symbol(b.op);
                   out += ' ';
                   print_expr(b.rhs, prec + 1, out);  // left-associative
                   if (parens) out += ')';
                 },
             },
             e->node);
}

void indent(int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
}

void print_stmt(const StmtPtr& s, int depth, std::string& out);

void print_braced(const StmtPtr& body, int depth, std::string& out) {
  out += "{\n";
  indent(depth + 1, out);
  print_stmt(body, depth + 1, out);
  out += '\n';
  indent(depth, out);
  out += '}';
}

void print_stmt(const StmtPtr& s, int depth, std::string& out) {
  std::visit(overloaded{
                 [&](const Stmt::Skip&) { out += "skip"; },
                 [&](const Stmt::Store& st) {
                   out += st.reg;
                   out += " := ";
                   print_expr(st.value, 0, out);
                 },
                 [&](const Stmt::If& st) {
                   out += "if ";
                   print_expr(st.cond, 0, out);
                   out += ' ';
                   print_braced(st.then_branch, depth, out);
                   out += " else ";
                   print_braced(st.else_branch, depth, out);
                 },
                 [&](const Stmt::Seq& st) {
                   print_stmt(st.first, depth, out);
                   out += ";\n";
                   indent(depth, out);
                   print_stmt(st.second, depth, out);
                 },
                 [&](const Stmt::Loop& st) {
                   out += "loop ";
                   print_braced(st.body, depth, out);
                 },
                 [&](const Stmt::Block& st) {
                   out += "block ";
                   print_braced(st.body, depth, out);
                 },
                 [&](const Stmt::Exit& st) {
                   out += "exit ";
                   out += std::to_string(st.level);
                 },
                 [&](const Stmt::ExtCall& st) {
                   out += st.ret_reg;
                   out += " := extcall ";
                   out += st.fn;
                   out += '(';
                   print_expr(st.arg, 0, out);
                   out += ')';
                 },
             },
             s->node);
}

}  // namespace

std::string pretty(const ExprPtr& e) {
  std::string out;
  print_expr(e, 0, out);
  return out;
}

std::string pretty(const StmtPtr& s) {
  std::string out;
  print_stmt(s, 0, out);
  return out;
}

std::string pretty_program(const Program& p) {
  std::string out;
  if (!p.initial_regs.empty()) {
    out += "init ";
    bool first = true;
    for (const auto& [name, v] : p.initial_regs) {
      if (!first) out += ", ";
      out += name;
      out += " = ";
      out += std::to_string(v);
      first = false;
    }
    out += '\n';
  }
  out += pretty(p.body);
  out += '\n';
  return out;
}

}  // namespace cminor
