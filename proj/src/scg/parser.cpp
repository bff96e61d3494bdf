#include "scg/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace scg {

namespace {

struct Cursor {
  const std::string& s;
  int line;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line, static_cast<int>(pos) + 1, msg);
  }
  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  bool accept(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c, const std::string& what) {
    if (!accept(c)) fail("expected '" + std::string(1, c) + "' " + what);
  }
  std::string word() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() && (std::isalnum((unsigned char)s[pos]) || s[pos] == '_'))
      ++pos;
    return s.substr(start, pos - start);
  }
  long long integer() {
    skip_ws();
    size_t start = pos;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
    size_t d0 = pos;
    while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
    if (pos == d0) fail("expected integer");
    return std::stoll(s.substr(start, pos - start));
  }
};

bool looks_numeric(Cursor& c) {
  c.skip_ws();
  size_t p = c.pos;
  if (p < c.s.size() && (c.s[p] == '+' || c.s[p] == '-')) ++p;
  return p < c.s.size() && (std::isdigit((unsigned char)c.s[p]) || c.s[p] == '.');
}

// rational | decimal (optionally scientific, stored numeric)
Coeff parse_number(Cursor& c) {
  c.skip_ws();
  size_t start = c.pos;
  if (c.pos < c.s.size() && (c.s[c.pos] == '+' || c.s[c.pos] == '-')) ++c.pos;
  bool saw_dot = false, saw_exp = false;
  while (c.pos < c.s.size()) {
    char ch = c.s[c.pos];
    if (std::isdigit((unsigned char)ch)) {
      ++c.pos;
    } else if (ch == '.' && !saw_dot && !saw_exp) {
      saw_dot = true;
      ++c.pos;
    } else if ((ch == 'e' || ch == 'E') && !saw_exp && c.pos + 1 < c.s.size() &&
               (std::isdigit((unsigned char)c.s[c.pos + 1]) || c.s[c.pos + 1] == '-' ||
                c.s[c.pos + 1] == '+')) {
      saw_exp = true;
      ++c.pos;
      if (c.s[c.pos] == '+' || c.s[c.pos] == '-') ++c.pos;
    } else {
      break;
    }
  }
  std::string text = c.s.substr(start, c.pos - start);
  if (text.empty() || text == "-" || text == "+") c.fail("expected coefficient");
  if (saw_exp) return Coeff::numeric(std::stod(text));
  if (saw_dot) return Coeff::decimal(text);
  long long num = std::stoll(text);
  if (c.accept('/')) {
    long long den = c.integer();
    if (den == 0) c.fail("zero denominator");
    return Coeff::rational(Rational(num, den));
  }
  return Coeff::rational(Rational(num));
}

std::vector<int> parse_mode_list(Cursor& c) {
  std::vector<int> modes;
  modes.push_back(static_cast<int>(c.integer()));
  while (c.accept(',')) modes.push_back(static_cast<int>(c.integer()));
  if (modes.size() > 4) c.fail("at most 4 mode indices");
  return modes;
}

// trailing sub-stencil tokens, e.g. "mud1 d2sq"; which==0 accepts both
// subscripts (psi/chi), which==1 only the first (phi inside quad).
void parse_substencils(Cursor& c, SubStencil& s1, SubStencil& s2, bool allow_second) {
  for (;;) {
    c.skip_ws();
    size_t save = c.pos;
    std::string w = c.word();
    if (w == "mud1") {
      ++s1.mud;
    } else if (w == "d1sq") {
      ++s1.d2;
    } else if (w == "mud2" && allow_second) {
      ++s2.mud;
    } else if (w == "d2sq" && allow_second) {
      ++s2.d2;
    } else {
      c.pos = save;
      return;
    }
  }
}

ModelTerm parse_term(Cursor& c) {
  ModelTerm t;
  t.coeff = parse_number(c);
  bool have_u_pow = false, have_u_st = false;
  while (c.accept('*')) {
    c.skip_ws();
    if (looks_numeric(c)) {
      // literal numeric factor folds into the coefficient
      t.coeff = t.coeff * parse_number(c);
      continue;
    }
    size_t word_col = c.pos;
    std::string w = c.word();
    if (w.empty()) c.fail("expected factor");
    auto exponent = [&](int dflt) {
      if (c.accept('^')) return static_cast<int>(c.integer());
      return dflt;
    };
    if (w == "pi") {
      t.coeff = t.coeff * Coeff::pi_pow(exponent(1));
    } else if (w == "sqrt") {
      c.expect('(', "after sqrt");
      long long num = c.integer();
      long long den = 1;
      if (c.accept('/')) den = c.integer();
      c.expect(')', "after sqrt radicand");
      t.coeff = t.coeff * Coeff::sqrt_of(Rational(num, den));
    } else if (w == "sig") {
      t.p_sig += exponent(1);
    } else if (w == "gam") {
      t.p_gam += exponent(1);
    } else if (w == "alp") {
      t.p_alp += exponent(1);
    } else if (w == "h") {
      t.p_h += exponent(1);
    } else if (w == "U") {
      int p = exponent(1);
      if (p < 0 || p > 3) c.fail("U power must be in 0..3, got " + std::to_string(p));
      if (have_u_pow) c.fail("duplicate U power factor");
      t.u_pow = p;
      have_u_pow = true;
    } else if (w == "id" || w == "mud" || w == "d2" || w == "d4" || w == "mudd2") {
      c.expect('(', "after stencil");
      std::string arg = c.word();
      if (arg != "U") c.fail("stencils apply to U, got '" + arg + "'");
      c.expect(')', "after stencil argument");
      if (have_u_st) c.fail("duplicate stencil factor");
      have_u_st = true;
      if (w == "id") t.u_stencil = StencilKind::Identity;
      else if (w == "mud") t.u_stencil = StencilKind::MuDelta;
      else if (w == "d2") t.u_stencil = StencilKind::Delta2;
      else if (w == "d4") t.u_stencil = StencilKind::Delta4;
      else t.u_stencil = StencilKind::MuDelta3;
    } else if (w == "phi" || w == "psi" || w == "psihat" || w == "chi") {
      if (t.noise || t.quad) c.fail("more than one noise factor in a term");
      NoiseRef nr;
      nr.family = w == "phi" ? NoiseFamily::Phi
                 : w == "psi" ? NoiseFamily::Psi
                 : w == "psihat" ? NoiseFamily::PsiHat
                                 : NoiseFamily::Chi;
      c.expect('(', "after noise family");
      nr.modes = parse_mode_list(c);
      c.expect(')', "after mode list");
      const bool paired = nr.family == NoiseFamily::Chi ||
                          (nr.family == NoiseFamily::Psi && nr.modes.size() >= 2);
      parse_substencils(c, nr.sub1, nr.sub2, paired);
      if (nr.family == NoiseFamily::PsiHat && !nr.sub1.trivial())
        c.fail("psihat takes no subscript stencils");
      t.noise = nr;
    } else if (w == "quad") {
      if (t.noise || t.quad) c.fail("more than one noise factor in a term");
      QuadNoiseRef q;
      c.expect('(', "after quad");
      q.left_mode = static_cast<int>(c.integer());
      SubStencil dummy;
      parse_substencils(c, q.left_sub, dummy, false);
      c.expect(';', "before convolution list");
      if (!c.accept('Z')) c.fail("expected convolution 'Z k' or 'Z k,l'");
      q.chain.push_back(static_cast<int>(c.integer()));
      if (c.accept(',')) q.chain.push_back(static_cast<int>(c.integer()));
      c.expect(';', "before right noise");
      q.right_mode = static_cast<int>(c.integer());
      parse_substencils(c, dummy, q.right_sub, true);
      if (!dummy.trivial()) c.fail("right noise of quad takes mud2/d2sq stencils");
      c.expect(')', "after quad");
      t.quad = q;
    } else {
      throw ParseError(c.line, static_cast<int>(word_col) + 1,
                       "unknown factor '" + w + "'");
    }
  }
  if (!c.done()) c.fail("unexpected trailing input");
  return t;
}

int family_rank(const ModelTerm& t) {
  if (t.quad) return 5;
  if (!t.noise) return 0;
  switch (t.noise->family) {
    case NoiseFamily::Phi: return 1;
    case NoiseFamily::PsiHat: return 2;
    case NoiseFamily::Psi: return 3;
    case NoiseFamily::Chi: return 4;
  }
  return 6;
}

}  // namespace

TermTable parse_model(const std::string& text) {
  TermTable table;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string body = line;
    // meta comments: "# @key value"
    size_t hash = body.find('#');
    if (hash != std::string::npos) {
      std::string comment = body.substr(hash + 1);
      body = body.substr(0, hash);
      size_t at = comment.find('@');
      if (at != std::string::npos && comment.find_first_not_of(" \t") == at) {
        std::istringstream ms(comment.substr(at + 1));
        std::string key, value;
        ms >> key;
        std::getline(ms, value);
        size_t v0 = value.find_first_not_of(" \t");
        value = v0 == std::string::npos ? "" : value.substr(v0);
        size_t v1 = value.find_last_not_of(" \t\r");
        if (v1 != std::string::npos) value = value.substr(0, v1 + 1);
        if (key == "model") table.meta.name = value;
        else if (!key.empty()) table.meta.extra[key] = value;
      }
    }
    while (!body.empty() && (body.back() == '\r' || body.back() == ' ' || body.back() == '\t'))
      body.pop_back();
    if (body.find_first_not_of(" \t") == std::string::npos) continue;
    Cursor c{body, line_no};
    table.terms.push_back(parse_term(c));
  }
  return table;
}

TermTable load_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open model file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return parse_model(ss.str());
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string print_term(const ModelTerm& term) {
  std::string s = term.coeff.str();
  auto power = [&](const char* name, int p) {
    if (p == 0) return;
    s += " * ";
    s += name;
    if (p != 1) s += "^" + std::to_string(p);
  };
  power("sig", term.p_sig);
  power("gam", term.p_gam);
  power("alp", term.p_alp);
  power("h", term.p_h);
  if (term.u_pow > 0) s += " * U^" + std::to_string(term.u_pow);
  if (term.u_stencil)
    s += std::string(" * ") + stencil_token(*term.u_stencil) + "(U)";
  if (term.noise) s += " * " + term.noise->str();
  if (term.quad) s += " * " + term.quad->str();
  return s;
}

std::string print_model(const TermTable& table) {
  std::string out;
  if (!table.meta.name.empty()) out += "# @model " + table.meta.name + "\n";
  for (const auto& [k, v] : table.meta.extra) out += "# @" + k + " " + v + "\n";
  std::vector<const ModelTerm*> order;
  for (const auto& t : table.terms) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(),
                   [](const ModelTerm* a, const ModelTerm* b) {
                     auto ka = std::tuple(a->p_sig, a->p_gam, a->p_alp, family_rank(*a));
                     auto kb = std::tuple(b->p_sig, b->p_gam, b->p_alp, family_rank(*b));
                     return ka < kb;
                   });
  for (const auto* t : order) out += print_term(*t) + "\n";
  return out;
}

void save_model(const TermTable& table, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << print_model(table);
}

}  // namespace scg
