#include "symslice/parser.hpp"

#include <cctype>
#include <sstream>

namespace symslice {

namespace {

const char* kBinOps[] = {"add", "sub", "mul", "udiv", "sdiv", "urem", "srem",
                         "and", "or",  "xor", "shl",  "lshr", "ashr"};
const char* kCastOps[] = {"trunc",  "zext",   "sext",     "bitcast", "ptrtoint",
                          "inttoptr", "fptoui", "fptosi", "uitofp",  "sitofp"};
const char* kAttrWords[] = {"nsw", "nuw", "exact", "inbounds", "volatile", "nonnull"};

bool is_in(const char* word, const char* const* list, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (word == std::string(list[i])) return true;
  return false;
}

bool is_binop(const std::string& w) { return is_in(w.c_str(), kBinOps, std::size(kBinOps)); }
bool is_castop(const std::string& w) { return is_in(w.c_str(), kCastOps, std::size(kCastOps)); }
bool is_attr(const std::string& w) { return is_in(w.c_str(), kAttrWords, std::size(kAttrWords)); }

struct Token {
  enum Kind { Word, Name, Global, Int, Punct, End } kind = End;
  std::string text;
  int column = 0;
};

// One logical line at a time; ';' comments stripped beforehand.
class LineLexer {
public:
  LineLexer(const std::string& line, int lineno) : line_(line), lineno_(lineno) { advance(); }

  const Token& peek() const { return tok_; }
  Token next() {
    Token t = tok_;
    advance();
    return t;
  }
  bool at_end() const { return tok_.kind == Token::End; }
  int lineno() const { return lineno_; }

private:
  void advance() {
    while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
    tok_ = Token{};
    tok_.column = static_cast<int>(pos_) + 1;
    if (pos_ >= line_.size()) return;
    char c = line_[pos_];
    auto name_char = [](char ch) {
      return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.' || ch == '-';
    };
    if (c == '%' || c == '@') {
      std::size_t start = pos_++;
      while (pos_ < line_.size() && name_char(line_[pos_])) ++pos_;
      tok_.kind = c == '%' ? Token::Name : Token::Global;
      tok_.text = line_.substr(start, pos_ - start);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos_ + 1 < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos_ + 1])))) {
      std::size_t start = pos_++;
      while (pos_ < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos_]))) ++pos_;
      tok_.kind = Token::Int;
      tok_.text = line_.substr(start, pos_ - start);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_++;
      while (pos_ < line_.size() &&
             (std::isalnum(static_cast<unsigned char>(line_[pos_])) || line_[pos_] == '_' ||
              line_[pos_] == '.'))
        ++pos_;
      tok_.kind = Token::Word;
      tok_.text = line_.substr(start, pos_ - start);
      // glue pointer stars onto type-like words: "i32*", "i32**"
      while (pos_ < line_.size() && line_[pos_] == '*') {
        tok_.text += '*';
        ++pos_;
      }
      return;
    }
    if (c == '.' && line_.compare(pos_, 3, "...") == 0) {
      tok_.kind = Token::Punct;
      tok_.text = "...";
      pos_ += 3;
      return;
    }
    tok_.kind = Token::Punct;
    tok_.text = std::string(1, c);
    ++pos_;
    if (c == '[' || c == ']' || c == '{' || c == '}' || c == '(' || c == ')' || c == ',' ||
        c == '=' || c == ':' || c == '*')
      return;
    return;
  }

  const std::string& line_;
  std::size_t pos_ = 0;
  int lineno_;
  Token tok_;
};

bool looks_like_type(const std::string& w) {
  if (w == "void" || w == "label") return true;
  if (w.size() >= 2 && w[0] == 'i' && std::isdigit(static_cast<unsigned char>(w[1]))) return true;
  if (!w.empty() && w.back() == '*') return true;
  return false;
}

class Parser {
public:
  explicit Parser(const std::string& text) : text_(text) {}

  ParseResult run() {
    ParseResult res;
    std::istringstream in(text_);
    std::string raw;
    int lineno = 0;
    std::vector<std::string> lines;
    while (std::getline(in, raw)) lines.push_back(raw);

    Function* cur_fn = nullptr;
    BasicBlock* cur_block = nullptr;
    InstrId next_id = 1;

    for (std::size_t li = 0; li < lines.size(); ++li) {
      lineno = static_cast<int>(li) + 1;
      std::string line = lines[li];
      auto sc = line.find(';');
      if (sc != std::string::npos) line.erase(sc);
      // strip "align N" attributes anywhere
      LineLexer lex(line, lineno);
      if (lex.at_end()) continue;

      Token first = lex.peek();
      if (first.kind == Token::Word && first.text == "define") {
        if (cur_fn) error(res, lineno, first.column, "missing '}' before new function");
        res.module.functions.emplace_back();
        cur_fn = &res.module.functions.back();
        cur_block = nullptr;
        parse_define(res, lex, *cur_fn);
        continue;
      }
      if (first.kind == Token::Word && first.text == "declare") {
        parse_declare(res, lex);
        continue;
      }
      if (first.kind == Token::Global) {
        // @g = global i32 0
        parse_global(res, lex);
        continue;
      }
      if (first.kind == Token::Punct && first.text == "}") {
        if (!cur_fn) error(res, lineno, first.column, "unmatched '}'");
        cur_fn = nullptr;
        cur_block = nullptr;
        continue;
      }
      if (!cur_fn) {
        error(res, lineno, first.column, "instruction outside a function");
        continue;
      }
      // label line: word ':' (allow dots)
      if ((first.kind == Token::Word || first.kind == Token::Name) && is_label_line(line)) {
        std::string label = first.text;
        if (!label.empty() && label[0] == '%') label.erase(0, 1);
        cur_fn->blocks.emplace_back();
        cur_block = &cur_fn->blocks.back();
        cur_block->label = label;
        continue;
      }
      if (!cur_block) {
        cur_fn->blocks.emplace_back();
        cur_block = &cur_fn->blocks.back();
        cur_block->label = "entry";
      }
      Instruction ins;
      ins.span = {lineno, first.column};
      if (parse_instruction(res, lex, ins)) {
        ins.id = next_id++;
        cur_block->instructions.push_back(std::move(ins));
      }
    }
    if (cur_fn) error(res, lineno, 1, "unterminated function body (missing '}')");
    if (res.module.functions.empty()) error(res, 1, 1, "module requires at least one function");
    return res;
  }

private:
  static bool is_label_line(const std::string& line) {
    // a line of the form "name:" (whitespace tolerated)
    auto colon = line.find(':');
    if (colon == std::string::npos) return false;
    for (std::size_t i = colon + 1; i < line.size(); ++i)
      if (!std::isspace(static_cast<unsigned char>(line[i]))) return false;
    for (std::size_t i = 0; i < colon; ++i) {
      char c = line[i];
      if (std::isspace(static_cast<unsigned char>(c))) continue;
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '%'))
        return false;
    }
    return true;
  }

  void error(ParseResult& res, int line, int col, std::string msg) {
    res.errors.push_back({line, col, std::move(msg)});
  }

  std::string parse_type(LineLexer& lex) {
    // types we accept: i1/i8/i32/..., void, T*, [N x T], skipping attrs
    while (lex.peek().kind == Token::Word && is_attr(lex.peek().text)) lex.next();
    if (lex.peek().kind == Token::Punct && lex.peek().text == "[") {
      std::string ty = "[";
      lex.next();
      int depth = 1;
      while (!lex.at_end() && depth > 0) {
        Token t = lex.next();
        if (t.text == "[") ++depth;
        if (t.text == "]") --depth;
        if (depth == 0) break;
        if (ty.size() > 1) ty += ' ';
        ty += t.text;
      }
      ty += "]";
      while (!lex.at_end() && lex.peek().text == "*") {
        ty += '*';
        lex.next();
      }
      return ty;
    }
    if (lex.peek().kind == Token::Word) {
      std::string ty = lex.next().text;
      while (!lex.at_end() && lex.peek().text == "*") {
        ty += '*';
        lex.next();
      }
      return ty;
    }
    return "";
  }

  Value parse_operand(LineLexer& lex, const std::string& type) {
    Token t = lex.next();
    if (t.kind == Token::Name || t.kind == Token::Global) return Value::name(t.text, type);
    return Value::constant(t.text, type);
  }

  // "type operand" where type may be omitted
  Value parse_typed_operand(LineLexer& lex) {
    std::string ty;
    if (lex.peek().kind == Token::Word && looks_like_type(lex.peek().text)) ty = parse_type(lex);
    while (lex.peek().kind == Token::Word && is_attr(lex.peek().text)) lex.next();
    return parse_operand(lex, ty);
  }

  void skip_attrs(LineLexer& lex) {
    while (lex.peek().kind == Token::Word && is_attr(lex.peek().text)) lex.next();
    // "align N"
    if (lex.peek().kind == Token::Word && lex.peek().text == "align") {
      lex.next();
      if (lex.peek().kind == Token::Int) lex.next();
    }
  }

  void expect(ParseResult& res, LineLexer& lex, const std::string& text) {
    if (lex.peek().text == text) {
      lex.next();
      return;
    }
    error(res, lex.lineno(), lex.peek().column, "expected '" + text + "'");
  }

  void parse_define(ParseResult& res, LineLexer& lex, Function& fn) {
    lex.next(); // define
    fn.ret_type = parse_type(lex);
    if (lex.peek().kind != Token::Global) {
      error(res, lex.lineno(), lex.peek().column, "expected function name after 'define'");
      return;
    }
    fn.name = lex.next().text;
    expect(res, lex, "(");
    while (!lex.at_end() && lex.peek().text != ")") {
      if (lex.peek().text == ",") {
        lex.next();
        continue;
      }
      std::string ty = parse_type(lex);
      if (lex.peek().kind == Token::Name) {
        fn.formals.push_back(lex.next().text);
        fn.formal_types.push_back(ty);
      } else {
        error(res, lex.lineno(), lex.peek().column, "malformed parameter list");
        break;
      }
    }
    expect(res, lex, ")");
    expect(res, lex, "{");
  }

  void parse_declare(ParseResult& res, LineLexer& lex) {
    lex.next(); // declare
    ExternalDecl decl;
    decl.ret_type = parse_type(lex);
    if (lex.peek().kind != Token::Global) {
      error(res, lex.lineno(), lex.peek().column, "expected function name after 'declare'");
      return;
    }
    decl.name = lex.next().text;
    expect(res, lex, "(");
    while (!lex.at_end() && lex.peek().text != ")") {
      if (lex.peek().text == ",") {
        lex.next();
        continue;
      }
      if (lex.peek().text == "...") {
        decl.variadic = true;
        lex.next();
        continue;
      }
      decl.param_types.push_back(parse_type(lex));
      if (lex.peek().kind == Token::Name) lex.next(); // optional parameter name
    }
    expect(res, lex, ")");
    res.module.externals.push_back(std::move(decl));
  }

  void parse_global(ParseResult& res, LineLexer& lex) {
    GlobalDef g;
    g.name = lex.next().text;
    expect(res, lex, "=");
    if (lex.peek().text == "global" || lex.peek().text == "constant")
      lex.next();
    else
      error(res, lex.lineno(), lex.peek().column, "expected 'global'");
    g.type = parse_type(lex);
    if (!lex.at_end()) g.init = lex.next().text;
    res.module.globals.push_back(std::move(g));
  }

  bool parse_instruction(ParseResult& res, LineLexer& lex, Instruction& ins) {
    std::string result;
    if (lex.peek().kind == Token::Name) {
      result = lex.next().text;
      if (lex.peek().text != "=") {
        error(res, ins.span.line, lex.peek().column, "expected '=' after result name");
        return false;
      }
      lex.next();
    }
    ins.result = result;
    if (lex.peek().kind != Token::Word) {
      error(res, ins.span.line, lex.peek().column, "expected opcode");
      return false;
    }
    std::string op = lex.next().text;

    if (op == "alloca") {
      ins.op = Opcode::Alloca;
      ins.type = parse_type(lex);
      skip_attrs(lex);
      return true;
    }
    if (op == "load") {
      ins.op = Opcode::Load;
      // accept "load T* %p", "load T, T* %p"
      std::string ty = parse_type(lex);
      if (lex.peek().text == ",") {
        lex.next();
        std::string pty = parse_type(lex);
        ins.type = ty;
        ins.operands.push_back(parse_operand(lex, pty));
      } else {
        ins.type = !ty.empty() && ty.back() == '*' ? ty.substr(0, ty.size() - 1) : ty;
        ins.operands.push_back(parse_operand(lex, ty));
      }
      skip_attrs(lex);
      return true;
    }
    if (op == "store") {
      ins.op = Opcode::Store;
      ins.operands.push_back(parse_typed_operand(lex));
      expect(res, lex, ",");
      ins.operands.push_back(parse_typed_operand(lex));
      skip_attrs(lex);
      return true;
    }
    if (is_binop(op)) {
      ins.op = Opcode::BinOp;
      ins.detail = op;
      skip_attrs(lex);
      ins.type = parse_type(lex);
      ins.operands.push_back(parse_operand(lex, ins.type));
      expect(res, lex, ",");
      ins.operands.push_back(parse_operand(lex, ins.type));
      return true;
    }
    if (op == "icmp") {
      ins.op = Opcode::ICmp;
      if (lex.peek().kind == Token::Word) ins.detail = lex.next().text;
      ins.type = parse_type(lex);
      ins.operands.push_back(parse_operand(lex, ins.type));
      expect(res, lex, ",");
      ins.operands.push_back(parse_operand(lex, ins.type));
      return true;
    }
    if (op == "phi") {
      ins.op = Opcode::Phi;
      ins.type = parse_type(lex);
      // [ value, %label ], [ value, %label ]  (tolerates doubled brackets)
      while (!lex.at_end()) {
        if (lex.peek().text == "," || lex.peek().text == "[") {
          lex.next();
          continue;
        }
        if (lex.peek().text == "]") {
          lex.next();
          continue;
        }
        PhiIncoming in;
        in.value = parse_operand(lex, ins.type);
        expect(res, lex, ",");
        Token lab = lex.next();
        in.pred_label = lab.text;
        if (!in.pred_label.empty() && in.pred_label[0] == '%') in.pred_label.erase(0, 1);
        ins.incomings.push_back(std::move(in));
        while (lex.peek().text == "]") lex.next();
        if (lex.peek().text == ",")
          lex.next();
        else
          break;
      }
      return true;
    }
    if (op == "select") {
      ins.op = Opcode::Select;
      ins.operands.push_back(parse_typed_operand(lex));
      expect(res, lex, ",");
      ins.operands.push_back(parse_typed_operand(lex));
      expect(res, lex, ",");
      ins.operands.push_back(parse_typed_operand(lex));
      ins.type = ins.operands.back().type;
      return true;
    }
    if (op == "br") {
      if (lex.peek().text == "label") {
        ins.op = Opcode::BrUncond;
        lex.next();
        Token t = lex.next();
        ins.labels.push_back(strip_label(t.text));
        return true;
      }
      ins.op = Opcode::BrCond;
      std::string ty = parse_type(lex);
      ins.operands.push_back(parse_operand(lex, ty));
      expect(res, lex, ",");
      expect(res, lex, "label");
      ins.labels.push_back(strip_label(lex.next().text));
      expect(res, lex, ",");
      expect(res, lex, "label");
      ins.labels.push_back(strip_label(lex.next().text));
      return true;
    }
    if (op == "switch") {
      ins.op = Opcode::Switch;
      std::string ty = parse_type(lex);
      ins.operands.push_back(parse_operand(lex, ty));
      expect(res, lex, ",");
      expect(res, lex, "label");
      ins.labels.push_back(strip_label(lex.next().text)); // default
      expect(res, lex, "[");
      while (!lex.at_end() && lex.peek().text != "]") {
        if (lex.peek().text == ",") {
          lex.next();
          continue;
        }
        parse_type(lex);
        SwitchCase c;
        c.value = lex.next().text;
        expect(res, lex, ",");
        expect(res, lex, "label");
        c.label = strip_label(lex.next().text);
        ins.labels.push_back(c.label);
        ins.cases.push_back(std::move(c));
      }
      if (lex.peek().text == "]") lex.next();
      return true;
    }
    if (op == "call") {
      ins.op = Opcode::Call;
      ins.type = parse_type(lex);
      if (lex.peek().kind != Token::Global) {
        error(res, ins.span.line, lex.peek().column, "expected callee after 'call'");
        return false;
      }
      ins.callee = lex.next().text;
      expect(res, lex, "(");
      while (!lex.at_end() && lex.peek().text != ")") {
        if (lex.peek().text == ",") {
          lex.next();
          continue;
        }
        if (lex.peek().text == "...") {
          ins.ellipsis_args = true;
          lex.next();
          continue;
        }
        ins.operands.push_back(parse_typed_operand(lex));
      }
      expect(res, lex, ")");
      return true;
    }
    if (op == "ret") {
      ins.op = Opcode::Ret;
      if (!lex.at_end()) {
        std::string ty = parse_type(lex);
        if (ty != "void" && !lex.at_end()) ins.operands.push_back(parse_operand(lex, ty));
        ins.type = ty;
      } else {
        ins.type = "void";
      }
      return true;
    }
    if (op == "getelementptr") {
      ins.op = Opcode::GetElementPtr;
      skip_attrs(lex);
      std::string ty = parse_type(lex);
      if (lex.peek().text == ",") {
        // new syntax: gep T, T* %p, indices
        lex.next();
        std::string pty = parse_type(lex);
        ins.operands.push_back(parse_operand(lex, pty));
      } else {
        ins.operands.push_back(parse_operand(lex, ty));
      }
      while (lex.peek().text == ",") {
        lex.next();
        ins.operands.push_back(parse_typed_operand(lex));
      }
      ins.type = ins.operands.front().type;
      return true;
    }
    if (is_castop(op)) {
      ins.op = Opcode::Cast;
      ins.detail = op;
      std::string ty = parse_type(lex);
      ins.operands.push_back(parse_operand(lex, ty));
      if (lex.peek().text == "to") {
        lex.next();
        ins.type = parse_type(lex);
      }
      return true;
    }
    if (op == "unreachable") {
      ins.op = Opcode::Unreachable;
      return true;
    }
    error(res, ins.span.line, 1, "unknown opcode '" + op + "'");
    return false;
  }

  static std::string strip_label(std::string l) {
    if (!l.empty() && l[0] == '%') l.erase(0, 1);
    return l;
  }

  const std::string& text_;
};

std::string operand_str(const Value& v) {
  if (v.type.empty()) return v.text;
  return v.type + " " + v.text;
}

} // namespace

ParseResult parse_module(const std::string& text) { return Parser(text).run(); }

std::string print_instruction(const Instruction& ins) {
  std::ostringstream os;
  if (!ins.result.empty()) os << ins.result << " = ";
  switch (ins.op) {
    case Opcode::Alloca:
      os << "alloca " << ins.type;
      break;
    case Opcode::Load:
      os << "load " << ins.operands[0].type << " " << ins.operands[0].text;
      break;
    case Opcode::Store:
      os << "store " << operand_str(ins.operands[0]) << ", " << operand_str(ins.operands[1]);
      break;
    case Opcode::BinOp:
      os << ins.detail << " " << ins.type << " " << ins.operands[0].text << ", "
         << ins.operands[1].text;
      break;
    case Opcode::ICmp:
      os << "icmp " << ins.detail << " " << ins.type << " " << ins.operands[0].text << ", "
         << ins.operands[1].text;
      break;
    case Opcode::Phi: {
      os << "phi " << ins.type << " ";
      for (std::size_t i = 0; i < ins.incomings.size(); ++i) {
        if (i) os << ", ";
        os << "[ " << ins.incomings[i].value.text << ", %" << ins.incomings[i].pred_label << " ]";
      }
      break;
    }
    case Opcode::Select:
      os << "select " << operand_str(ins.operands[0]) << ", " << operand_str(ins.operands[1])
         << ", " << operand_str(ins.operands[2]);
      break;
    case Opcode::BrUncond:
      os << "br label %" << ins.labels[0];
      break;
    case Opcode::BrCond:
      os << "br " << (ins.operands[0].type.empty() ? "i1" : ins.operands[0].type) << " "
         << ins.operands[0].text << ", label %" << ins.labels[0] << ", label %" << ins.labels[1];
      break;
    case Opcode::Switch: {
      os << "switch " << (ins.operands[0].type.empty() ? "i32" : ins.operands[0].type) << " "
         << ins.operands[0].text << ", label %" << ins.labels[0] << " [";
      for (std::size_t i = 0; i < ins.cases.size(); ++i)
        os << (i ? ", " : " ") << "i32 " << ins.cases[i].value << ", label %" << ins.cases[i].label;
      os << " ]";
      break;
    }
    case Opcode::Call: {
      os << "call " << (ins.type.empty() ? "void" : ins.type) << " " << ins.callee << "(";
      bool first = true;
      if (ins.ellipsis_args) {
        os << "...";
        first = false;
      }
      for (const auto& a : ins.operands) {
        if (!first) os << ", ";
        first = false;
        os << operand_str(a);
      }
      os << ")";
      break;
    }
    case Opcode::Ret:
      if (ins.operands.empty())
        os << "ret void";
      else
        os << "ret " << operand_str(ins.operands[0]);
      break;
    case Opcode::GetElementPtr: {
      os << "getelementptr " << operand_str(ins.operands[0]);
      for (std::size_t i = 1; i < ins.operands.size(); ++i) os << ", " << operand_str(ins.operands[i]);
      break;
    }
    case Opcode::Cast:
      os << ins.detail << " " << operand_str(ins.operands[0]) << " to " << ins.type;
      break;
    case Opcode::Unreachable:
      os << "unreachable";
      break;
  }
  return os.str();
}

std::string print_module(const Module& m) {
  std::ostringstream os;
  for (const auto& g : m.globals) os << g.name << " = global " << g.type << " " << g.init << "\n";
  if (!m.globals.empty()) os << "\n";
  for (std::size_t fi = 0; fi < m.functions.size(); ++fi) {
    const auto& fn = m.functions[fi];
    if (fi) os << "\n";
    os << "define " << fn.ret_type << " " << fn.name << "(";
    for (std::size_t i = 0; i < fn.formals.size(); ++i) {
      if (i) os << ", ";
      os << fn.formal_types[i] << " " << fn.formals[i];
    }
    os << ") {\n";
    for (const auto& b : fn.blocks) {
      os << b.label << ":\n";
      for (const auto& ins : b.instructions) os << "  " << print_instruction(ins) << "\n";
    }
    os << "}\n";
  }
  if (!m.externals.empty()) os << "\n";
  for (const auto& e : m.externals) {
    os << "declare " << e.ret_type << " " << e.name << "(";
    bool first = true;
    for (const auto& t : e.param_types) {
      if (!first) os << ", ";
      first = false;
      os << t;
    }
    if (e.variadic) {
      if (!first) os << ", ";
      os << "...";
    }
    os << ")\n";
  }
  return os.str();
}

} // namespace symslice
