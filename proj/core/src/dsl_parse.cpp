#include <cctype>
#include <sstream>

#include "bvgraded/dsl.hpp"

namespace bvg::dsl {

Diagnostic::Diagnostic(ErrorKind kind, SourcePos pos, const std::string& message)
    : Error(kind, std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message),
      pos_(pos),
      message_(message) {}

namespace {

enum class Tok { Ident, Number, String, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourcePos pos;
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  SourcePos pos;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++pos.line;
        pos.column = 1;
      } else {
        ++pos.column;
      }
    }
  };
  while (i < src.size()) {
    const char ch = src[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(1);
      continue;
    }
    if (ch == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.pos = pos;
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        ++j;
      if (j < src.size() && src[j] == '+') ++j;  // dagger
      t.kind = Tok::Ident;
      t.text = src.substr(i, j - i);
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && src[j] == '/' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      t.kind = Tok::Number;
      t.text = src.substr(i, j - i);
      advance(j - i);
    } else if (ch == '"') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
      if (j >= src.size() || src[j] != '"') throw Diagnostic(ErrorKind::SyntaxError, pos, "unterminated string");
      t.kind = Tok::String;
      t.text = src.substr(i + 1, j - i - 1);
      advance(j + 1 - i);
    } else if (std::string_view("+-^*()[],=;:").find(ch) != std::string_view::npos) {
      t.kind = Tok::Punct;
      t.text = std::string(1, ch);
      advance(1);
    } else {
      throw Diagnostic(ErrorKind::SyntaxError, pos, std::string("unexpected character '") + ch + "'");
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.pos = pos;
  out.push_back(end);
  return out;
}

Rational parseNumber(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(std::stoll(s));
  const auto den = std::stoll(s.substr(slash + 1));
  if (den == 0) throw Error(ErrorKind::SyntaxError, "zero denominator in " + s);
  return Rational(std::stoll(s.substr(0, slash)), den);
}

const std::vector<std::string>& reserved() {
  static const std::vector<std::string> words{"Tr", "F", "d", "D", "i", "lie", "L", "top", "expi", "Lambda"};
  return words;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  bool atEnd() const { return peek().kind == Tok::End; }
  bool isPunct(const char* p, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Punct && peek(ahead).text == p;
  }
  bool isWord(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    const std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw Diagnostic(ErrorKind::SyntaxError, t.pos, msg + ", found " + found);
  }

  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  void expectPunct(const char* p) {
    if (!isPunct(p)) fail(std::string("expected '") + p + "'");
    take();
  }
  void expectWord(const char* w) {
    if (!isWord(w)) fail(std::string("expected '") + w + "'");
    take();
  }
  std::string expectIdent(const char* what) {
    if (peek().kind != Tok::Ident) fail(std::string("expected ") + what);
    return take().text;
  }
  int expectInt() {
    bool neg = false;
    if (isPunct("-")) {
      take();
      neg = true;
    }
    if (peek().kind != Tok::Number || peek().text.find('/') != std::string::npos) fail("expected integer");
    const int v = std::stoi(take().text);
    return neg ? -v : v;
  }
  std::string expectString() {
    if (peek().kind != Tok::String) fail("expected string");
    return take().text;
  }

  NodePtr expression() {
    auto sum = std::make_shared<Node>();
    sum->kind = NodeKind::Sum;
    sum->pos = peek().pos;
    int sign = 1;
    if (isPunct("-")) {
      take();
      sign = -1;
    }
    for (;;) {
      sum->children.push_back(product());
      sum->signs.push_back(sign);
      if (isPunct("+"))
        sign = 1;
      else if (isPunct("-"))
        sign = -1;
      else
        break;
      take();
    }
    if (sum->children.size() == 1 && sum->signs[0] == 1) return sum->children[0];
    return sum;
  }

 private:
  NodePtr product() {
    auto prod = std::make_shared<Node>();
    prod->kind = NodeKind::Product;
    prod->pos = peek().pos;
    prod->children.push_back(atom());
    while (isPunct("^") || isPunct("*")) {
      prod->ops.push_back(take().text[0]);
      prod->children.push_back(atom());
    }
    if (prod->children.size() == 1) return prod->children[0];
    return prod;
  }

  NodePtr call(NodeKind kind, const Token& head, int arity, const char* open, const char* close) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->pos = head.pos;
    expectPunct(open);
    for (int k = 0; k < arity; ++k) {
      if (k) expectPunct(",");
      n->children.push_back(expression());
    }
    expectPunct(close);
    return n;
  }

  NodePtr atom() {
    const Token t = peek();
    if (t.kind == Tok::Number) {
      take();
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::Number;
      n->pos = t.pos;
      try {
        n->value = parseNumber(t.text);
      } catch (const std::exception&) {
        throw Diagnostic(ErrorKind::SyntaxError, t.pos, "bad number '" + t.text + "'");
      }
      return n;
    }
    if (isPunct("(")) {
      take();
      NodePtr inner = expression();
      expectPunct(")");
      return inner;
    }
    if (isPunct("[")) return call(NodeKind::Bracket, t, 2, "[", "]");
    if (t.kind != Tok::Ident) fail("expected expression");
    take();
    const bool bracketNext = isPunct("[");
    const bool parenNext = isPunct("(");
    if (t.text == "Lambda") {
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::Lambda;
      n->pos = t.pos;
      return n;
    }
    if (t.text == "Tr" && bracketNext) return call(NodeKind::Trace, t, 1, "[", "]");
    if (t.text == "F" && bracketNext) return call(NodeKind::Curvature, t, 1, "[", "]");
    if (parenNext) {
      if (t.text == "d") return call(NodeKind::ExtD, t, 1, "(", ")");
      if (t.text == "D") return call(NodeKind::CovD, t, 2, "(", ")");
      if (t.text == "i") return call(NodeKind::Iota, t, 2, "(", ")");
      if (t.text == "lie") return call(NodeKind::Lie, t, 3, "(", ")");
      if (t.text == "L") return call(NodeKind::LieFlat, t, 2, "(", ")");
      if (t.text == "top") return call(NodeKind::Top, t, 1, "(", ")");
      if (t.text == "expi") return call(NodeKind::ExpIota, t, 2, "(", ")");
    }
    for (const auto& w : reserved())
      if (t.text == w) throw Diagnostic(ErrorKind::SyntaxError, t.pos, "'" + w + "' is reserved");
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Field;
    n->pos = t.pos;
    n->name = t.text;
    return n;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::string numberText(const Rational& r) {
  std::ostringstream os;
  os << r.numerator();
  if (r.denominator() != 1) os << '/' << r.denominator();
  return os.str();
}

std::string kindName(IndexKind k) {
  switch (k) {
    case IndexKind::Scalar: return "scalar";
    case IndexKind::Internal: return "internal";
    case IndexKind::Tangent: return "vector";
    case IndexKind::Cotangent: return "covector";
  }
  return "?";
}

IndexKind kindFromName(const std::string& s, SourcePos pos) {
  if (s == "scalar") return IndexKind::Scalar;
  if (s == "internal") return IndexKind::Internal;
  if (s == "vector") return IndexKind::Tangent;
  if (s == "covector") return IndexKind::Cotangent;
  throw Diagnostic(ErrorKind::SyntaxError, pos, "unknown field kind '" + s + "'");
}

void header(Parser& p, const char* magic, int& version) {
  if (!p.isWord(magic)) p.fail(std::string("expected header '") + magic + " <version>'");
  p.take();
  const Token v = p.peek();
  version = p.expectInt();
  if (version != 1) throw Diagnostic(ErrorKind::SyntaxError, v.pos, "unsupported version " + std::to_string(version));
}

FieldDecl fieldDecl(Parser& p, SourcePos pos) {
  FieldDecl d;
  d.pos = pos;
  d.name = p.expectIdent("field name");
  p.expectPunct(":");
  const Token k = p.peek();
  d.kind = kindFromName(p.expectIdent("field kind"), k.pos);
  p.expectWord("form");
  d.form = p.expectInt();
  p.expectWord("ghost");
  d.ghost = p.expectInt();
  if (p.isWord("maxjet")) {
    p.take();
    d.maxJet = p.expectInt();
  }
  return d;
}

std::string printField(const FieldDecl& d) {
  return "field " + d.name + " : " + kindName(d.kind) + " form " + std::to_string(d.form) + " ghost " +
         std::to_string(d.ghost) + " maxjet " + std::to_string(d.maxJet) + ";\n";
}

bool sameFields(const std::vector<FieldDecl>& a, const std::vector<FieldDecl>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto &x = a[i], &y = b[i];
    if (x.name != y.name || x.kind != y.kind || x.form != y.form || x.ghost != y.ghost || x.maxJet != y.maxJet)
      return false;
  }
  return true;
}

bool sameReadings(const std::vector<Reading>& a, const std::vector<Reading>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].label != b[i].label || a[i].target != b[i].target || !sameTree(*a[i].body, *b[i].body)) return false;
  return true;
}

Reading reading(Parser& p, SourcePos pos) {
  Reading r;
  r.pos = pos;
  r.label = p.expectString();
  r.target = p.expectIdent("reading target");
  p.expectPunct("=");
  r.body = p.expression();
  return r;
}

std::string printStatementExpr(const Node& n) {
  if (n.kind != NodeKind::Sum || n.children.size() < 2) return " " + print(n);
  std::string out;
  for (std::size_t k = 0; k < n.children.size(); ++k) {
    const Node& c = *n.children[k];
    const bool paren = c.kind == NodeKind::Sum;
    const std::string body = paren ? "(" + print(c) + ")" : print(c);
    if (k == 0)
      out += "\n    " + std::string(n.signs[k] < 0 ? "-" : "") + body;
    else
      out += "\n  " + std::string(n.signs[k] < 0 ? "- " : "+ ") + body;
  }
  return out;
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

bool sameAssignments(const std::vector<Assignment>& a, const std::vector<Assignment>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].target != b[i].target || !sameTree(*a[i].body, *b[i].body)) return false;
  return true;
}

}  // namespace

bool sameTree(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.name != b.name || a.value != b.value || a.signs != b.signs || a.ops != b.ops ||
      a.children.size() != b.children.size())
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!sameTree(*a.children[i], *b.children[i])) return false;
  return true;
}

NodePtr parseExpression(const std::string& text) {
  Parser p(text);
  NodePtr n = p.expression();
  if (!p.atEnd()) p.fail("expected end of expression");
  return n;
}

std::string print(const Node& n) {
  auto arg = [](const Node& c) { return print(c); };
  switch (n.kind) {
    case NodeKind::Field: return n.name;
    case NodeKind::Number: return numberText(n.value);
    case NodeKind::Lambda: return "Lambda";
    case NodeKind::Sum: {
      std::string out;
      for (std::size_t k = 0; k < n.children.size(); ++k) {
        const Node& c = *n.children[k];
        const std::string body = c.kind == NodeKind::Sum ? "(" + print(c) + ")" : print(c);
        if (k == 0)
          out += (n.signs[k] < 0 ? "-" : "") + body;
        else
          out += (n.signs[k] < 0 ? " - " : " + ") + body;
      }
      return out;
    }
    case NodeKind::Product: {
      std::string out;
      for (std::size_t k = 0; k < n.children.size(); ++k) {
        const Node& c = *n.children[k];
        if (k) out += std::string(" ") + n.ops[k - 1] + " ";
        const bool paren = c.kind == NodeKind::Sum || c.kind == NodeKind::Product;
        out += paren ? "(" + print(c) + ")" : print(c);
      }
      return out;
    }
    case NodeKind::Bracket: return "[" + arg(*n.children[0]) + ", " + arg(*n.children[1]) + "]";
    case NodeKind::Trace: return "Tr[" + arg(*n.children[0]) + "]";
    case NodeKind::ExtD: return "d(" + arg(*n.children[0]) + ")";
    case NodeKind::CovD: return "D(" + arg(*n.children[0]) + ", " + arg(*n.children[1]) + ")";
    case NodeKind::Curvature: return "F[" + arg(*n.children[0]) + "]";
    case NodeKind::Iota: return "i(" + arg(*n.children[0]) + ", " + arg(*n.children[1]) + ")";
    case NodeKind::Lie:
      return "lie(" + arg(*n.children[0]) + ", " + arg(*n.children[1]) + ", " + arg(*n.children[2]) + ")";
    case NodeKind::LieFlat: return "L(" + arg(*n.children[0]) + ", " + arg(*n.children[1]) + ")";
    case NodeKind::Top: return "top(" + arg(*n.children[0]) + ")";
    case NodeKind::ExpIota: return "expi(" + arg(*n.children[0]) + ", " + arg(*n.children[1]) + ")";
  }
  return "?";
}

TheoryFile parseTheory(const std::string& text) {
  Parser p(text);
  TheoryFile f;
  header(p, "bvt", f.version);
  bool haveName = false;
  while (!p.atEnd()) {
    const Token head = p.peek();
    const std::string word = p.expectIdent("statement");
    if (word == "theory") {
      f.name = p.expectIdent("theory name");
      haveName = true;
    } else if (word == "note") {
      f.notes.push_back(p.expectString());
    } else if (word == "field") {
      f.fields.push_back(fieldDecl(p, head.pos));
    } else if (word == "pair") {
      PairDecl d;
      d.pos = head.pos;
      d.field = p.expectIdent("field name");
      d.antifield = p.expectIdent("antifield name");
      f.pairs.push_back(d);
    } else if (word == "superfield") {
      SuperfieldDecl d;
      d.pos = head.pos;
      d.name = p.expectIdent("superfield name");
      p.expectWord("degree");
      d.degree = p.expectInt();
      p.expectPunct("=");
      d.body = p.expression();
      f.superfields.push_back(d);
    } else if (word == "action") {
      if (f.action) throw Diagnostic(ErrorKind::SyntaxError, head.pos, "duplicate action");
      p.expectPunct("=");
      f.action = p.expression();
    } else if (word == "q") {
      Assignment a;
      a.pos = head.pos;
      a.target = p.expectIdent("field name");
      p.expectPunct("=");
      a.body = p.expression();
      f.q.push_back(a);
    } else if (word == "reading") {
      f.readings.push_back(reading(p, head.pos));
    } else {
      throw Diagnostic(ErrorKind::SyntaxError, head.pos, "unknown statement '" + word + "'");
    }
    p.expectPunct(";");
  }
  if (!haveName) throw Diagnostic(ErrorKind::SyntaxError, p.peek().pos, "missing 'theory' statement");
  if (!f.action) throw Diagnostic(ErrorKind::SyntaxError, p.peek().pos, "missing 'action' statement");
  return f;
}

std::string print(const TheoryFile& f) {
  std::ostringstream os;
  os << "bvt " << f.version << "\n";
  os << "theory " << f.name << ";\n";
  for (const auto& n : f.notes) os << "note " << quoted(n) << ";\n";
  os << "\n";
  for (const auto& d : f.fields) os << printField(d);
  if (!f.pairs.empty()) os << "\n";
  for (const auto& d : f.pairs) os << "pair " << d.field << " " << d.antifield << ";\n";
  if (!f.superfields.empty()) os << "\n";
  for (const auto& d : f.superfields)
    os << "superfield " << d.name << " degree " << d.degree << " =" << printStatementExpr(*d.body) << ";\n";
  os << "\naction =" << printStatementExpr(*f.action) << ";\n";
  if (!f.q.empty()) os << "\n";
  for (const auto& a : f.q) os << "q " << a.target << " =" << printStatementExpr(*a.body) << ";\n";
  if (!f.readings.empty()) os << "\n";
  for (const auto& r : f.readings)
    os << "reading " << quoted(r.label) << " " << r.target << " =" << printStatementExpr(*r.body) << ";\n";
  return os.str();
}

bool sameFile(const TheoryFile& a, const TheoryFile& b) {
  if (a.version != b.version || a.name != b.name || a.notes != b.notes) return false;
  if (!sameFields(a.fields, b.fields) || a.pairs.size() != b.pairs.size() ||
      a.superfields.size() != b.superfields.size() || !sameReadings(a.readings, b.readings))
    return false;
  for (std::size_t i = 0; i < a.pairs.size(); ++i)
    if (a.pairs[i].field != b.pairs[i].field || a.pairs[i].antifield != b.pairs[i].antifield) return false;
  for (std::size_t i = 0; i < a.superfields.size(); ++i) {
    const auto &x = a.superfields[i], &y = b.superfields[i];
    if (x.name != y.name || x.degree != y.degree || !sameTree(*x.body, *y.body)) return false;
  }
  return sameTree(*a.action, *b.action) && sameAssignments(a.q, b.q);
}

GenFunFile parseGenFun(const std::string& text) {
  Parser p(text);
  GenFunFile f;
  header(p, "bvx", f.version);
  auto names = [&](std::vector<std::string>& out) {
    while (p.peek().kind == Tok::Ident) out.push_back(p.take().text);
  };
  while (!p.atEnd()) {
    const Token head = p.peek();
    const std::string word = p.expectIdent("statement");
    if (word == "genfun") {
      f.name = p.expectIdent("generating function name");
    } else if (word == "note") {
      f.notes.push_back(p.expectString());
    } else if (word == "use") {
      names(f.uses);
    } else if (word == "old") {
      names(f.oldVars);
    } else if (word == "new") {
      names(f.newVars);
    } else if (word == "body") {
      if (f.body) throw Diagnostic(ErrorKind::SyntaxError, head.pos, "duplicate body");
      p.expectPunct("=");
      f.body = p.expression();
    } else if (word == "field") {
      f.fields.push_back(fieldDecl(p, head.pos));
    } else if (word == "let") {
      Assignment a;
      a.pos = head.pos;
      a.target = p.expectIdent("name");
      p.expectPunct("=");
      a.body = p.expression();
      f.lets.push_back(a);
    } else if (word == "rule") {
      Rule r;
      r.pos = head.pos;
      r.lhs = p.expression();
      p.expectPunct("=");
      r.rhs = p.expression();
      f.rules.push_back(r);
    } else if (word == "reading") {
      f.readings.push_back(reading(p, head.pos));
    } else {
      throw Diagnostic(ErrorKind::SyntaxError, head.pos, "unknown statement '" + word + "'");
    }
    p.expectPunct(";");
  }
  if (f.name.empty()) throw Diagnostic(ErrorKind::SyntaxError, p.peek().pos, "missing 'genfun' statement");
  if (!f.body) throw Diagnostic(ErrorKind::SyntaxError, p.peek().pos, "missing 'body' statement");
  return f;
}

std::string print(const GenFunFile& f) {
  std::ostringstream os;
  auto list = [&](const char* word, const std::vector<std::string>& v) {
    os << word;
    for (const auto& s : v) os << " " << s;
    os << ";\n";
  };
  os << "bvx " << f.version << "\n";
  os << "genfun " << f.name << ";\n";
  for (const auto& n : f.notes) os << "note " << quoted(n) << ";\n";
  os << "\n";
  list("use", f.uses);
  list("old", f.oldVars);
  list("new", f.newVars);
  if (!f.fields.empty()) os << "\n";
  for (const auto& d : f.fields) os << printField(d);
  if (!f.lets.empty()) os << "\n";
  for (const auto& a : f.lets) os << "let " << a.target << " =" << printStatementExpr(*a.body) << ";\n";
  os << "\nbody =" << printStatementExpr(*f.body) << ";\n";
  if (!f.rules.empty()) os << "\n";
  for (const auto& r : f.rules) os << "rule " << print(*r.lhs) << " =" << printStatementExpr(*r.rhs) << ";\n";
  if (!f.readings.empty()) os << "\n";
  for (const auto& r : f.readings)
    os << "reading " << quoted(r.label) << " " << r.target << " =" << printStatementExpr(*r.body) << ";\n";
  return os.str();
}

bool sameFile(const GenFunFile& a, const GenFunFile& b) {
  if (a.rules.size() != b.rules.size()) return false;
  for (std::size_t i = 0; i < a.rules.size(); ++i)
    if (!sameTree(*a.rules[i].lhs, *b.rules[i].lhs) || !sameTree(*a.rules[i].rhs, *b.rules[i].rhs)) return false;
  return a.version == b.version && a.name == b.name && a.notes == b.notes && a.uses == b.uses &&
         a.oldVars == b.oldVars && a.newVars == b.newVars && sameFields(a.fields, b.fields) &&
         sameAssignments(a.lets, b.lets) && sameTree(*a.body, *b.body) && sameReadings(a.readings, b.readings);
}

}  // namespace bvg::dsl
