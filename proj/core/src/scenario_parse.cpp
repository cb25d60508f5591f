#include <cctype>
#include <cmath>
#include <cstdlib>
#include <unordered_map>
#include <unordered_set>

#include "ppse/scenario.hpp"

namespace ppse {

namespace {

enum class Tok {
  Ident,
  Number,
  String,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Equals,
  Comma,
  Semi,
  Colon,
  Slash,
  LParen,
  RParen,
  Plus,
  Minus,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double value = 0.0;
  int line = 1;
  int col = 1;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::String: return "string";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Equals: return "'='";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Slash: return "'/'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto push = [&](Tok k, std::string t, double v = 0.0) {
    out.push_back({k, std::move(t), v, line, col});
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '\r') {
      ++i;
      continue;
    }
    if (c == '\n') {
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (c == ' ' || c == '\t') {
      ++i;
      ++col;
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    const int start_col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
        ++j;
      }
      std::string word = text.substr(i, j - i);
      col = start_col;
      push(Tok::Ident, word);
      col = start_col + int(j - i);
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < text.size() &&
         std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && text[j] == '.') {
        ++j;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
          ++k;
          while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
            ++k;
          }
          j = k;
        }
      }
      std::string num = text.substr(i, j - i);
      col = start_col;
      push(Tok::Number, num, std::strtod(num.c_str(), nullptr));
      col = start_col + int(j - i);
      i = j;
      continue;
    }
    if (c == '"') {
      size_t j = i + 1;
      while (j < text.size() && text[j] != '"' && text[j] != '\n') ++j;
      if (j >= text.size() || text[j] != '"') {
        throw ParseError("unterminated string", line, start_col, "\"");
      }
      std::string s = text.substr(i + 1, j - i - 1);
      col = start_col;
      push(Tok::String, s);
      col = start_col + int(j + 1 - i);
      i = j + 1;
      continue;
    }
    Tok k;
    switch (c) {
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case '[': k = Tok::LBracket; break;
      case ']': k = Tok::RBracket; break;
      case '=': k = Tok::Equals; break;
      case ',': k = Tok::Comma; break;
      case ';': k = Tok::Semi; break;
      case ':': k = Tok::Colon; break;
      case '/': k = Tok::Slash; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line,
                         start_col, std::string(1, c));
    }
    push(k, std::string(1, c));
    ++i;
    ++col;
  }
  out.push_back({Tok::End, "", 0.0, line, col});
  return out;
}

struct Loc {
  int line = 0;
  int col = 0;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  ScenarioSpec parse_scenario() {
    expect_ident("scenario");
    spec_.name = expect(Tok::String).text;
    expect(Tok::LBrace);
    while (!at(Tok::RBrace)) {
      const Token& t = peek();
      if (t.kind != Tok::Ident) {
        fail("expected a section keyword", t);
      }
      if (t.text == "space") {
        parse_space();
      } else if (t.text == "state") {
        parse_state();
      } else if (t.text == "unitary") {
        parse_unitary();
      } else if (t.text == "hamiltonian") {
        parse_spectral();
      } else if (t.text == "measure") {
        parse_measure();
      } else if (t.text == "preselect" || t.text == "postselect") {
        parse_select();
      } else if (t.text == "options") {
        parse_options();
      } else {
        fail("unknown section '" + t.text + "'", t);
      }
    }
    expect(Tok::RBrace);
    if (!at(Tok::End)) fail("trailing input after scenario", peek());
    finish_semantics();
    return spec_;
  }

 private:
  const Token& peek(int ahead = 0) const {
    size_t i = pos_ + size_t(ahead);
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_ident(const char* w) const {
    return peek().kind == Tok::Ident && peek().text == w;
  }
  const Token& advance() { return toks_[pos_++]; }
  [[noreturn]] void fail(const std::string& msg, const Token& t) const {
    throw ParseError(msg, t.line, t.col, t.text);
  }
  const Token& expect(Tok k) {
    const Token& t = peek();
    if (t.kind != k) {
      fail(std::string("expected ") + tok_name(k) + ", found " + tok_name(t.kind), t);
    }
    return advance();
  }
  const Token& expect_ident(const char* w) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || t.text != w) {
      fail(std::string("expected '") + w + "'", t);
    }
    return advance();
  }

  [[noreturn]] void sem_fail(const std::string& msg, Loc loc) const {
    throw SemanticError(msg, loc.line, loc.col);
  }
  static Loc loc_of(const Token& t) { return Loc{t.line, t.col}; }

  double parse_signed_real() {
    double sign = 1.0;
    if (at(Tok::Minus)) {
      advance();
      sign = -1.0;
    } else if (at(Tok::Plus)) {
      advance();
    }
    const Token& n = expect(Tok::Number);
    return sign * n.value;
  }

  int parse_int() {
    const Token& n = expect(Tok::Number);
    double v = n.value;
    int i = int(v);
    if (double(i) != v) fail("expected an integer", n);
    return i;
  }

  // factor := NUMBER | sqrt ( NUMBER )
  double parse_factor() {
    if (at_ident("sqrt")) {
      advance();
      expect(Tok::LParen);
      const Token& n = expect(Tok::Number);
      if (n.value < 0.0) fail("sqrt of a negative number", n);
      expect(Tok::RParen);
      return std::sqrt(n.value);
    }
    const Token& n = expect(Tok::Number);
    return n.value;
  }

  // ratio := factor [ / factor ]
  double parse_ratio() {
    double v = parse_factor();
    if (at(Tok::Slash)) {
      advance();
      const Token& where = peek();
      double den = parse_factor();
      if (den == 0.0) fail("division by zero in amplitude", where);
      v /= den;
    }
    return v;
  }

  bool eat_imag_marker() {
    if (peek().kind == Tok::Ident && peek().text == "i") {
      advance();
      return true;
    }
    return false;
  }

  // amp := [+|-] ratio [i]  |  [+|-] ratio (+|-) ratio i
  Cx parse_amp() {
    double sign = 1.0;
    if (at(Tok::Minus)) {
      advance();
      sign = -1.0;
    } else if (at(Tok::Plus)) {
      advance();
    }
    double first = sign * parse_ratio();
    if (eat_imag_marker()) return Cx(0.0, first);
    if (at(Tok::Plus) || at(Tok::Minus)) {
      double sign2 = at(Tok::Minus) ? -1.0 : 1.0;
      advance();
      double second = sign2 * parse_ratio();
      const Token& t = peek();
      if (!eat_imag_marker()) {
        fail("expected 'i' after the imaginary part", t);
      }
      return Cx(first, second);
    }
    return Cx(first, 0.0);
  }

  std::vector<Cx> parse_amp_list() {
    std::vector<Cx> amps;
    amps.push_back(parse_amp());
    while (at(Tok::Comma)) {
      advance();
      amps.push_back(parse_amp());
    }
    return amps;
  }

  // [ row ; row ; ... ] with rows of amps
  std::pair<std::vector<Cx>, int> parse_matrix() {
    expect(Tok::LBracket);
    std::vector<std::vector<Cx>> rows;
    rows.push_back(parse_amp_list());
    while (at(Tok::Semi)) {
      advance();
      rows.push_back(parse_amp_list());
    }
    const Token& close = expect(Tok::RBracket);
    const size_t n = rows.size();
    for (const auto& r : rows) {
      if (r.size() != n) {
        fail("matrix rows must all have length " + std::to_string(n), close);
      }
    }
    std::vector<Cx> flat;
    flat.reserve(n * n);
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return {flat, int(n)};
  }

  void parse_space() {
    const Token& kw = expect_ident("space");
    if (saw_space_) fail("duplicate space section", kw);
    saw_space_ = true;
    expect_ident("dim");
    expect(Tok::Equals);
    const Token& dim_tok = peek();
    spec_.dim = parse_int();
    if (spec_.dim < 1) fail("dim must be >= 1", dim_tok);
    expect_ident("basis");
    expect(Tok::Equals);
    expect(Tok::LBracket);
    spec_.basis_labels.push_back(expect(Tok::Ident).text);
    while (at(Tok::Comma)) {
      advance();
      spec_.basis_labels.push_back(expect(Tok::Ident).text);
    }
    const Token& close = expect(Tok::RBracket);
    if (int(spec_.basis_labels.size()) != spec_.dim) {
      throw SemanticError("space lists " + std::to_string(spec_.basis_labels.size()) +
                              " labels for dim = " + std::to_string(spec_.dim),
                          close.line, close.col);
    }
    std::unordered_set<std::string> seen;
    for (const auto& l : spec_.basis_labels) {
      if (!seen.insert(l).second) {
        throw SemanticError("duplicate basis label '" + l + "'", close.line, close.col);
      }
    }
    space_loc_ = loc_of(kw);
  }

  void parse_state() {
    const Token& kw = expect_ident("state");
    const Token& name = expect(Tok::Ident);
    if (state_locs_.count(name.text) || unitary_locs_.count(name.text)) {
      fail("duplicate declaration '" + name.text + "'", name);
    }
    expect(Tok::Equals);
    NamedState st;
    st.name = name.text;
    st.amps = parse_amp_list();
    state_locs_[st.name] = loc_of(kw);
    spec_.states.push_back(std::move(st));
  }

  void parse_unitary() {
    const Token& kw = expect_ident("unitary");
    const Token& name = expect(Tok::Ident);
    if (state_locs_.count(name.text) || unitary_locs_.count(name.text)) {
      fail("duplicate declaration '" + name.text + "'", name);
    }
    expect(Tok::Equals);
    NamedUnitary u;
    u.name = name.text;
    auto [flat, n] = parse_matrix();
    u.entries = std::move(flat);
    u.dim = n;
    unitary_locs_[u.name] = loc_of(kw);
    spec_.unitaries.push_back(std::move(u));
  }

  void parse_spectral() {
    const Token& kw = expect_ident("hamiltonian");
    if (spec_.spectral) fail("duplicate hamiltonian section", kw);
    SpectralDecl sd;
    expect(Tok::LBrace);
    while (at_ident("level")) {
      advance();
      SpectralDecl::Level lvl;
      lvl.energy = parse_signed_real();
      expect(Tok::Colon);
      if (!at(Tok::Ident) || at_ident("level")) {
        fail("expected at least one eigenvector name", peek());
      }
      while (at(Tok::Ident) && !at_ident("level")) {
        lvl.vec_refs.push_back(advance().text);
      }
      sd.levels.push_back(std::move(lvl));
    }
    if (sd.levels.empty()) fail("hamiltonian requires at least one level", peek());
    expect(Tok::RBrace);
    expect_ident("duration");
    expect(Tok::Equals);
    sd.duration = parse_signed_real();
    spectral_loc_ = loc_of(kw);
    spec_.spectral = std::move(sd);
  }

  void parse_measure() {
    const Token& kw = expect_ident("measure");
    if (saw_measure_) fail("duplicate measure section", kw);
    saw_measure_ = true;
    measure_loc_ = loc_of(kw);
    expect(Tok::LBrace);
    bool saw_blocks = false, saw_mode = false;
    while (!at(Tok::RBrace)) {
      const Token& t = peek();
      if (t.kind != Tok::Ident) fail("expected a measure field", t);
      if (t.text == "blocks") {
        advance();
        expect(Tok::Equals);
        expect(Tok::LBracket);
        spec_.measure.blocks.push_back(parse_int());
        while (at(Tok::Comma)) {
          advance();
          spec_.measure.blocks.push_back(parse_int());
        }
        expect(Tok::RBracket);
        saw_blocks = true;
      } else if (t.text == "mode") {
        advance();
        expect(Tok::Equals);
        const Token& m = expect(Tok::Ident);
        if (m.text != "nondegenerate" && m.text != "coarse" && m.text != "fine" &&
            m.text != "twostep") {
          fail("unknown mode '" + m.text + "'", m);
        }
        spec_.measure.mode = m.text;
        saw_mode = true;
      } else if (t.text == "basis") {
        advance();
        expect(Tok::Equals);
        spec_.measure.basis_ref = expect(Tok::Ident).text;
      } else if (t.text == "d") {
        advance();
        const Token& idx_tok = peek();
        int idx = parse_int();
        if (idx < 1) fail("d block index is 1-based", idx_tok);
        expect(Tok::Equals);
        auto [flat, n] = parse_matrix();
        (void)n;
        spec_.measure.dmats.emplace_back(idx, std::move(flat));
      } else {
        fail("unknown measure field '" + t.text + "'", t);
      }
    }
    const Token& close = expect(Tok::RBrace);
    if (!saw_blocks) {
      throw SemanticError("measure section lacks blocks", close.line, close.col);
    }
    if (!saw_mode) {
      throw SemanticError("measure section lacks mode", close.line, close.col);
    }
  }

  void parse_select() {
    const Token& kw = advance();  // preselect | postselect
    const bool is_pre = kw.text == "preselect";
    if ((is_pre && saw_pre_) || (!is_pre && saw_post_)) {
      fail("duplicate " + kw.text + " section", kw);
    }
    (is_pre ? saw_pre_ : saw_post_) = true;
    (is_pre ? pre_loc_ : post_loc_) = loc_of(kw);
    SelectDecl sel;
    expect(Tok::LBrace);
    while (!at(Tok::RBrace)) {
      const Token& t = peek();
      if (t.kind != Tok::Ident) fail("expected a selection field", t);
      if (t.text == "basis") {
        advance();
        expect(Tok::Equals);
        sel.basis_ref = expect(Tok::Ident).text;
      } else if (t.text == "index") {
        advance();
        expect(Tok::Equals);
        sel.index = parse_int();
      } else if (t.text == "initial" && is_pre) {
        advance();
        expect(Tok::Equals);
        sel.initial_ref = expect(Tok::Ident).text;
      } else {
        fail("unknown selection field '" + t.text + "'", t);
      }
    }
    expect(Tok::RBrace);
    if (is_pre) {
      spec_.pre = std::move(sel);
    } else {
      spec_.post = std::move(sel);
    }
  }

  void parse_options() {
    const Token& kw = expect_ident("options");
    options_loc_ = loc_of(kw);
    expect(Tok::LBrace);
    while (!at(Tok::RBrace)) {
      const Token& key = expect(Tok::Ident);
      expect(Tok::Equals);
      if (key.text == "tol") {
        spec_.options.tol = parse_signed_real();
        if (spec_.options.tol <= 0.0) {
          throw SemanticError("tol must be positive", key.line, key.col);
        }
      } else if (key.text == "strict_norm" || key.text == "strict_d" ||
                 key.text == "reset") {
        const Token& v = expect(Tok::Ident);
        if (v.text != "true" && v.text != "false") {
          fail("expected true or false", v);
        }
        bool b = v.text == "true";
        if (key.text == "strict_norm") {
          spec_.options.strict_norm = b;
        } else if (key.text == "strict_d") {
          spec_.options.strict_d = b;
        } else {
          spec_.options.reset = b;
        }
      } else if (key.text == "processes") {
        expect(Tok::LBracket);
        spec_.options.processes.clear();
        while (!at(Tok::RBracket)) {
          const Token& v = expect(Tok::Ident);
          auto p = process_from_string(v.text);
          if (!p) fail("unknown process '" + v.text + "'", v);
          spec_.options.processes.push_back(*p);
          if (at(Tok::Comma)) advance();
        }
        expect(Tok::RBracket);
      } else if (key.text == "theta") {
        spec_.options.theta_ref = expect(Tok::Ident).text;
      } else {
        throw SemanticError("unknown option '" + key.text + "'", key.line, key.col);
      }
    }
    expect(Tok::RBrace);
  }

  const NamedState* find_state(const std::string& name) const {
    for (const auto& s : spec_.states) {
      if (s.name == name) return &s;
    }
    return nullptr;
  }
  const NamedUnitary* find_unitary(const std::string& name) const {
    for (const auto& u : spec_.unitaries) {
      if (u.name == name) return &u;
    }
    return nullptr;
  }

  // Cross-cutting semantic checks with source locations. Local shape checks
  // happened during parsing; this pass validates references and numerics.
  void finish_semantics() {
    if (!saw_space_) throw SemanticError("scenario lacks a space section", 1, 1);
    if (!saw_measure_) throw SemanticError("scenario lacks a measure section", 1, 1);
    if (!saw_pre_) throw SemanticError("scenario lacks a preselect section", 1, 1);
    if (!saw_post_) throw SemanticError("scenario lacks a postselect section", 1, 1);

    const int dim = spec_.dim;
    int ptr_dim = 0;
    {
      int total = 0;
      for (int b : spec_.measure.blocks) {
        if (b < 1) sem_fail("block sizes must be >= 1", measure_loc_);
        total += b;
      }
      if (total != dim) {
        sem_fail("block sizes sum to " + std::to_string(total) + ", dim is " +
                     std::to_string(dim),
                 measure_loc_);
      }
      int outcomes = 0;
      for (int b : spec_.measure.blocks) {
        if (spec_.measure.mode == "nondegenerate") {
          if (b != 1) {
            sem_fail("nondegenerate mode requires every block to have size 1",
                     measure_loc_);
          }
          outcomes += 1;
        } else if (spec_.measure.mode == "coarse") {
          outcomes += 1;
        } else if (spec_.measure.mode == "fine") {
          outcomes += b;
        } else {
          outcomes += b * b;
        }
      }
      ptr_dim = outcomes + 1;
    }

    for (const auto& st : spec_.states) {
      const int len = int(st.amps.size());
      if (len != dim && len != dim * ptr_dim) {
        sem_fail("state '" + st.name + "' has " + std::to_string(len) +
                     " amplitudes; expected " + std::to_string(dim) +
                     " (system) or " + std::to_string(dim * ptr_dim) + " (joint)",
                 state_locs_.at(st.name));
      }
    }
    for (const auto& u : spec_.unitaries) {
      if (u.dim != dim) {
        sem_fail("unitary '" + u.name + "' is " + std::to_string(u.dim) + "x" +
                     std::to_string(u.dim) + " on a dim-" + std::to_string(dim) +
                     " space",
                 unitary_locs_.at(u.name));
      }
    }

    auto check_unitary_ref = [&](const std::string& ref, Loc loc, const char* role) {
      if (ref.empty()) return;
      const NamedUnitary* u = find_unitary(ref);
      if (!u) sem_fail(std::string(role) + " references unknown unitary '" + ref + "'", loc);
      Operator op = make_operator(make_space(spec_.basis_labels), u->entries);
      if (!is_unitary(op, std::max(spec_.options.tol, 1e-9))) {
        sem_fail(std::string(role) + " matrix '" + ref + "' is not unitary", loc);
      }
    };

    check_unitary_ref(spec_.pre.basis_ref, pre_loc_, "preselect basis");
    check_unitary_ref(spec_.post.basis_ref, post_loc_, "postselect basis");
    check_unitary_ref(spec_.measure.basis_ref, measure_loc_, "measure basis");
    check_unitary_ref(spec_.options.theta_ref, options_loc_, "theta");
    // the stage matrices are optional; validate them only when declared
    for (const char* stage : {"U1", "U2"}) {
      if (unitary_locs_.count(stage)) {
        check_unitary_ref(stage, unitary_locs_.at(stage), "stage");
      }
    }

    if (spec_.pre.basis_ref.empty()) sem_fail("preselect lacks a basis", pre_loc_);
    if (spec_.post.basis_ref.empty()) sem_fail("postselect lacks a basis", post_loc_);
    if (spec_.pre.index < 0 || spec_.pre.index >= dim) {
      sem_fail("preselect index out of range", pre_loc_);
    }
    if (spec_.post.index < 0 || spec_.post.index >= dim) {
      sem_fail("postselect index out of range", post_loc_);
    }
    if (!spec_.pre.initial_ref.empty()) {
      const NamedState* st = find_state(spec_.pre.initial_ref);
      if (!st) {
        sem_fail("initial state '" + spec_.pre.initial_ref + "' is not declared",
                 pre_loc_);
      }
      if (int(st->amps.size()) != dim) {
        sem_fail("initial state must live on the system space", pre_loc_);
      }
      double n2 = 0.0;
      for (const Cx& z : st->amps) n2 += std::norm(z);
      if (n2 < kZeroMeasure) sem_fail("initial state is null", pre_loc_);
      if (spec_.options.strict_norm && std::abs(std::sqrt(n2) - 1.0) > 1e-8) {
        sem_fail("initial state is not normalized and strict_norm is set", pre_loc_);
      }
    }

    if (spec_.measure.mode == "twostep") {
      std::unordered_set<int> seen;
      for (const auto& [idx, flat] : spec_.measure.dmats) {
        if (idx > int(spec_.measure.blocks.size())) {
          sem_fail("d block index " + std::to_string(idx) + " exceeds block count",
                   measure_loc_);
        }
        if (!seen.insert(idx).second) {
          sem_fail("duplicate d matrix for block " + std::to_string(idx), measure_loc_);
        }
        const int sz = spec_.measure.blocks[size_t(idx - 1)];
        if (int(flat.size()) != sz * sz) {
          sem_fail("d matrix for block " + std::to_string(idx) + " must be " +
                       std::to_string(sz) + "x" + std::to_string(sz),
                   measure_loc_);
        }
        for (int l = 0; l < sz; ++l) {
          double row = 0.0;
          for (int c = 0; c < sz; ++c) row += std::norm(flat[size_t(l * sz + c)]);
          if (std::abs(row - 1.0) > std::max(spec_.options.tol, 1e-9)) {
            sem_fail("d row (" + std::to_string(idx) + "," + std::to_string(l + 1) +
                         ") has squared norm " + std::to_string(row),
                     measure_loc_);
          }
        }
      }
      for (size_t b = 0; b < spec_.measure.blocks.size(); ++b) {
        if (spec_.measure.blocks[b] > 1 && !seen.count(int(b) + 1)) {
          sem_fail("twostep mode lacks a d matrix for block " + std::to_string(b + 1),
                   measure_loc_);
        }
      }
    } else if (!spec_.measure.dmats.empty()) {
      sem_fail("d matrices are only meaningful in twostep mode", measure_loc_);
    }

    if (spec_.spectral) {
      if (find_unitary("U1")) {
        sem_fail("a hamiltonian section replaces the U1 stage", spectral_loc_);
      }
      for (const auto& lvl : spec_.spectral->levels) {
        for (const auto& ref : lvl.vec_refs) {
          const NamedState* st = find_state(ref);
          if (!st) {
            sem_fail("hamiltonian references unknown state '" + ref + "'",
                     spectral_loc_);
          }
          if (int(st->amps.size()) != dim * ptr_dim) {
            sem_fail("hamiltonian eigenvector '" + ref +
                         "' must live on the joint system-pointer space",
                     spectral_loc_);
          }
        }
      }
    }
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  ScenarioSpec spec_;
  bool saw_space_ = false, saw_measure_ = false, saw_pre_ = false, saw_post_ = false;
  Loc space_loc_, measure_loc_, pre_loc_, post_loc_, options_loc_, spectral_loc_;
  std::unordered_map<std::string, Loc> state_locs_;
  std::unordered_map<std::string, Loc> unitary_locs_;
};

}  // namespace

ScenarioSpec parse(const std::string& text) { return Parser(text).parse_scenario(); }

}  // namespace ppse
