#pragma once

// Surface syntax:
//
//   File    := Decl* ;  Decl := "def" Ident "=" Term ";"
//   Type    := AType ("->" Type)? ;  AType := "N" | "(" Type ")"
//   Term    := "\" Ident ":" Type "." Term | "mu" MIdent ":" Type "." Command
//            | "catch" MIdent ATerm | "throw" ATerm MIdent | AppChain
//   AppChain:= AppChain ATerm | "S" ATerm
//            | "nrec" "{" Type "}" "(" Term ";" Term ";" Term ")" | ATerm
//   ATerm   := Ident | DecimalNat | "(" Term ")"
//   Command := "[" MIdent "]" Term ;  MIdent := "'" Ident
//
// Comments run from "--" to end of line. Decimal literals are numerals,
// catch 'a t desugars to mu a:N.[a]t, throw t 'a to mu g:N.[a]t with g
// fresh. Later declarations reference earlier ones by token splicing
// (macro-style textual inlining), except that an identifier bound by an
// enclosing lambda shadows a declaration of the same name.

#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "lmt/reduce.hpp"
#include "lmt/term.hpp"

namespace lmt {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                           std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
};

struct DuplicateDefinition : ParseError {
  using ParseError::ParseError;
};

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace syntax {

enum class Tok : std::uint8_t {
  Ident, MIdent, Number,
  Lambda, Dot, Colon, Semi, Equal, Arrow,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  KwDef, KwMu, KwCatch, KwThrow, KwNRec, KwS, KwN,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::uint64_t number = 0;
  int line = 1, col = 1;
};

inline std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto bump = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') bump();
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      bump();
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::uint64_t n = 0;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
        n = n * 10 + static_cast<std::uint64_t>(src[i] - '0');
        bump();
      }
      t.kind = Tok::Number;
      t.number = n;
      out.push_back(t);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '\'') {
      bool isMu = c == '\'';
      if (isMu) bump();
      if (i >= src.size() ||
          !(std::isalpha(static_cast<unsigned char>(src[i])) || src[i] == '_'))
        throw ParseError("expected identifier after '", t.line, t.col);
      std::string word;
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
        word += src[i];
        bump();
      }
      if (isMu) {
        t.kind = Tok::MIdent;
        t.text = word;
      } else if (word == "def") t.kind = Tok::KwDef;
      else if (word == "mu") t.kind = Tok::KwMu;
      else if (word == "catch") t.kind = Tok::KwCatch;
      else if (word == "throw") t.kind = Tok::KwThrow;
      else if (word == "nrec") t.kind = Tok::KwNRec;
      else if (word == "S") t.kind = Tok::KwS;
      else if (word == "N") t.kind = Tok::KwN;
      else {
        t.kind = Tok::Ident;
        t.text = word;
      }
      out.push_back(t);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      t.kind = Tok::Arrow;
      bump(2);
      out.push_back(t);
      continue;
    }
    switch (c) {
      case '\\': t.kind = Tok::Lambda; break;
      case '.': t.kind = Tok::Dot; break;
      case ':': t.kind = Tok::Colon; break;
      case ';': t.kind = Tok::Semi; break;
      case '=': t.kind = Tok::Equal; break;
      case '(': t.kind = Tok::LParen; break;
      case ')': t.kind = Tok::RParen; break;
      case '{': t.kind = Tok::LBrace; break;
      case '}': t.kind = Tok::RBrace; break;
      case '[': t.kind = Tok::LBracket; break;
      case ']': t.kind = Tok::RBracket; break;
      default: throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    bump();
    out.push_back(t);
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

}  // namespace syntax

// Name -> free variable id bindings, used to parse open terms consistently
// and reported back by the pretty printer.
struct SourceMaps {
  std::map<std::string, std::uint64_t> lam;
  std::map<std::string, std::uint64_t> mu;
};

struct Decl {
  std::string name;
  TermPtr term;
};

namespace syntax {

class Parser {
 public:
  Parser(std::vector<Token> toks, SourceMaps* maps)
      : base_(std::move(toks)), maps_(maps ? *maps : ownMaps_), mapsOut_(maps) {
    frames_.push_back({&base_, 0});
  }

  std::vector<Decl> parse_file() {
    std::vector<Decl> decls;
    while (peek().kind != Tok::End) {
      expect(Tok::KwDef, "'def'");
      Token nameTok = expect(Tok::Ident, "declaration name");
      if (defs_.count(nameTok.text))
        throw DuplicateDefinition("duplicate definition of '" + nameTok.text + "'",
                                  nameTok.line, nameTok.col);
      expect(Tok::Equal, "'='");
      std::size_t start = frames_.front().pos;
      TermPtr body = parse_term();
      std::size_t stop = frames_.front().pos;
      expect(Tok::Semi, "';'");
      // Record the definiens token slice, parenthesized, for splicing.
      std::vector<Token> slice;
      Token lp;
      lp.kind = Tok::LParen;
      slice.push_back(lp);
      slice.insert(slice.end(), base_.begin() + static_cast<long>(start),
                   base_.begin() + static_cast<long>(stop));
      Token rp;
      rp.kind = Tok::RParen;
      slice.push_back(rp);
      defs_[nameTok.text] = std::move(slice);
      decls.push_back(Decl{nameTok.text, body});
    }
    return decls;
  }

  TermPtr parse_whole_term() {
    TermPtr t = parse_term();
    Token tok = peek();
    if (tok.kind != Tok::End) throw ParseError("trailing input after term", tok.line, tok.col);
    if (mapsOut_) *mapsOut_ = maps_;
    return t;
  }

 private:
  struct Frame {
    const std::vector<Token>* toks;
    std::size_t pos;
  };

  std::vector<Token> base_;
  SourceMaps ownMaps_;
  SourceMaps& maps_;
  SourceMaps* mapsOut_;
  std::vector<Frame> frames_;
  std::map<std::string, std::vector<Token>> defs_;
  std::vector<std::pair<std::string, std::uint64_t>> lamScope_;
  std::vector<std::pair<std::string, std::uint64_t>> muScope_;

  const Token& peek() {
    while (frames_.size() > 1 && frames_.back().pos >= frames_.back().toks->size())
      frames_.pop_back();
    return (*frames_.back().toks)[frames_.back().pos];
  }
  Token next() {
    Token t = peek();
    ++frames_.back().pos;
    return t;
  }
  Token expect(Tok kind, const std::string& what) {
    Token t = next();
    if (t.kind != kind) throw ParseError("expected " + what, t.line, t.col);
    return t;
  }

  TypePtr parse_atype() {
    Token t = next();
    if (t.kind == Tok::KwN) return nat_type();
    if (t.kind == Tok::LParen) {
      TypePtr ty = parse_type();
      expect(Tok::RParen, "')'");
      return ty;
    }
    throw ParseError("expected a type", t.line, t.col);
  }

  TypePtr parse_type() {
    TypePtr lhs = parse_atype();
    if (peek().kind == Tok::Arrow) {
      next();
      return arrow(lhs, parse_type());
    }
    return lhs;
  }

  std::uint64_t lookup_lam(const std::string& name) {
    for (auto it = lamScope_.rbegin(); it != lamScope_.rend(); ++it)
      if (it->first == name) return it->second;
    return 0;
  }

  std::uint64_t mu_ref(const std::string& name) {
    for (auto it = muScope_.rbegin(); it != muScope_.rend(); ++it)
      if (it->first == name) return it->second;
    auto [it, inserted] = maps_.mu.try_emplace(name, 0);
    if (inserted) it->second = fresh_id();
    return it->second;
  }

  bool starts_aterm(Tok k) const {
    return k == Tok::Ident || k == Tok::Number || k == Tok::LParen;
  }

  TermPtr parse_aterm() {
    Token t = next();
    switch (t.kind) {
      case Tok::Number: return numeral(t.number);
      case Tok::LParen: {
        TermPtr inner = parse_term();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident: {
        if (std::uint64_t id = lookup_lam(t.text)) return fvar(id, t.text);
        if (auto it = defs_.find(t.text); it != defs_.end()) {
          frames_.push_back({&it->second, 0});
          return parse_aterm();  // the spliced slice starts with '('
        }
        auto [it, inserted] = maps_.lam.try_emplace(t.text, 0);
        if (inserted) it->second = fresh_id();
        return fvar(it->second, t.text);
      }
      default: throw ParseError("expected a term", t.line, t.col);
    }
  }

  TermPtr parse_appchain() {
    TermPtr head;
    Token t = peek();
    if (t.kind == Tok::KwS) {
      next();
      head = suc(parse_aterm());
    } else if (t.kind == Tok::KwNRec) {
      next();
      expect(Tok::LBrace, "'{'");
      TypePtr ty = parse_type();
      expect(Tok::RBrace, "'}'");
      expect(Tok::LParen, "'('");
      TermPtr base = parse_term();
      expect(Tok::Semi, "';'");
      TermPtr step = parse_term();
      expect(Tok::Semi, "';'");
      TermPtr scrut = parse_term();
      expect(Tok::RParen, "')'");
      head = nrec(ty, base, step, scrut);
    } else {
      head = parse_aterm();
    }
    while (starts_aterm(peek().kind)) head = app(head, parse_aterm());
    return head;
  }

  CommandPtr parse_command() {
    expect(Tok::LBracket, "'['");
    Token tgt = expect(Tok::MIdent, "mu-identifier");
    expect(Tok::RBracket, "']'");
    TermPtr body = parse_term();
    return cmd_free(mu_ref(tgt.text), tgt.text, body);
  }

  TermPtr parse_term() {
    Token t = peek();
    switch (t.kind) {
      case Tok::Lambda: {
        next();
        Token name = expect(Tok::Ident, "binder name");
        expect(Tok::Colon, "':'");
        TypePtr ty = parse_type();
        expect(Tok::Dot, "'.'");
        std::uint64_t id = fresh_id();
        lamScope_.emplace_back(name.text, id);
        TermPtr body = parse_term();
        lamScope_.pop_back();
        return lam(ty, close_lam(body, id));
      }
      case Tok::KwMu: {
        next();
        Token name = expect(Tok::MIdent, "mu-binder name");
        expect(Tok::Colon, "':'");
        TypePtr ty = parse_type();
        expect(Tok::Dot, "'.'");
        std::uint64_t id = fresh_id();
        muScope_.emplace_back(name.text, id);
        CommandPtr body = parse_command();
        muScope_.pop_back();
        return mu(ty, close_mu(body, id));
      }
      case Tok::KwCatch: {
        next();
        Token name = expect(Tok::MIdent, "mu-identifier");
        std::uint64_t id = fresh_id();
        muScope_.emplace_back(name.text, id);
        TermPtr body = parse_aterm();
        muScope_.pop_back();
        return catch_term(nat_type(), id, name.text, body);
      }
      case Tok::KwThrow: {
        next();
        TermPtr body = parse_aterm();
        Token name = expect(Tok::MIdent, "mu-identifier");
        return throw_term(nat_type(), body, mu_ref(name.text), name.text);
      }
      default: return parse_appchain();
    }
  }
};

}  // namespace syntax

inline std::vector<Decl> parse_file(const std::string& source) {
  syntax::Parser p(syntax::lex(source), nullptr);
  return p.parse_file();
}

inline TermPtr parse_term(const std::string& source, SourceMaps* maps = nullptr) {
  syntax::Parser p(syntax::lex(source), maps);
  return p.parse_whole_term();
}

// ---------------------------------------------------------------------------
// Pretty printer
// ---------------------------------------------------------------------------

inline std::string pretty(const TypePtr& ty) {
  if (ty->kind == Type::Kind::Nat) return "N";
  std::string dom = pretty(ty->dom);
  if (ty->dom->kind == Type::Kind::Arrow) dom = "(" + dom + ")";
  return dom + " -> " + pretty(ty->cod);
}

namespace syntax {

// Precedence levels: 0 binder-like (lam/mu/catch/throw), 1 application
// chains, 2 atoms.
class Printer {
 public:
  explicit Printer(SourceMaps* maps) : maps_(maps) {}

  std::string term(const TermPtr& t, int prec) {
    if (auto n = as_numeral(t)) return std::to_string(*n);
    switch (t->kind) {
      case TermKind::BVar: throw std::logic_error("pretty: dangling bound variable");
      case TermKind::FVar: return lam_name(t->id, t->hint);
      case TermKind::Zero: return "0";
      case TermKind::Suc: return wrap(prec, 1, "S " + term(t->a, 2));
      case TermKind::App:
        return wrap(prec, 1, term(t->a, 1) + " " + term(t->b, 2));
      case TermKind::Lam: {
        OpenedLam o = open_lam_fresh(t);
        std::string name = fresh_lam_name(o.id, "x");
        return wrap(prec, 0,
                    "\\" + name + ":" + pretty(t->annot) + ". " + term(o.body, 0));
      }
      case TermKind::NRec:
        return wrap(prec, 1, "nrec{" + pretty(t->annot) + "}(" + term(t->a, 0) + "; " +
                                 term(t->b, 0) + "; " + term(t->c, 0) + ")");
      case TermKind::Mu: {
        OpenedMu o = open_mu_fresh(t, "a");
        const CommandPtr& c = o.body;
        bool self = !c->tgt_bound() && c->tgt_id == o.id;
        bool natAnnot = is_nat(t->annot);
        if (natAnnot && self) {  // catch 'a t
          std::string name = fresh_mu_name(o.id, "a");
          return wrap(prec, 0, "catch '" + name + " " + term(c->term, 2));
        }
        if (natAnnot && !self && !mu_free_in(o.id, c->term)) {  // throw t 'b
          std::string name = mu_name(c->tgt_id, c->tgt_hint);
          return wrap(prec, 0, "throw " + term(c->term, 2) + " '" + name);
        }
        std::string name = fresh_mu_name(o.id, "a");
        return wrap(prec, 0, "mu '" + name + ":" + pretty(t->annot) + ". " + command(c));
      }
    }
    throw std::logic_error("pretty: unreachable");
  }

  std::string command(const CommandPtr& c) {
    if (c->tgt_bound()) throw std::logic_error("pretty: dangling bound mu target");
    return "['" + mu_name(c->tgt_id, c->tgt_hint) + "] " + term(c->term, 0);
  }

 private:
  SourceMaps* maps_;
  std::map<std::uint64_t, std::string> lamNames_, muNames_;
  std::map<std::string, int> usedLam_, usedMu_;

  static std::string wrap(int prec, int level, const std::string& s) {
    return prec > level ? "(" + s + ")" : s;
  }

  std::string pick(std::map<std::string, int>& used, const std::string& hint) {
    std::string base = hint.empty() ? "x" : hint;
    auto [it, inserted] = used.try_emplace(base, 1);
    if (inserted) return base;
    int n = it->second;
    std::string name;
    do {
      name = base + std::to_string(n++);
    } while (used.count(name));
    it->second = n;
    used[name] = 1;
    return name;
  }

  std::string fresh_lam_name(std::uint64_t id, const std::string& hint) {
    std::string name = pick(usedLam_, hint);
    lamNames_[id] = name;
    return name;
  }
  std::string fresh_mu_name(std::uint64_t id, const std::string& hint) {
    std::string name = pick(usedMu_, hint);
    muNames_[id] = name;
    return name;
  }

  std::string lam_name(std::uint64_t id, const std::string& hint) {
    if (auto it = lamNames_.find(id); it != lamNames_.end()) return it->second;
    std::string name = pick(usedLam_, hint);
    lamNames_[id] = name;
    if (maps_) maps_->lam[name] = id;
    return name;
  }
  std::string mu_name(std::uint64_t id, const std::string& hint) {
    if (auto it = muNames_.find(id); it != muNames_.end()) return it->second;
    std::string name = pick(usedMu_, hint);
    muNames_[id] = name;
    if (maps_) maps_->mu[name] = id;
    return name;
  }
};

}  // namespace syntax

// Pretty-print; when maps is given, records the names chosen for free
// variables so parse(pretty(t), &maps) round-trips open terms exactly.
inline std::string pretty(const TermPtr& t, SourceMaps* maps = nullptr) {
  syntax::Printer p(maps);
  return p.term(t, 0);
}

inline std::string pretty(const CommandPtr& c, SourceMaps* maps = nullptr) {
  syntax::Printer p(maps);
  return p.command(c);
}

}  // namespace lmt
