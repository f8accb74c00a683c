#pragma once

// Regular-language specification expressions.
//
//   expr   := term ('+' term)*
//   term   := factor+
//   factor := atom '*'?
//   atom   := IDENT | '(' expr ')' | 'pc' '(' expr ')'
//
// Juxtaposition is concatenation, '+' is union, '*' is Kleene star and
// pc(x) is the prefix closure of x. '#' starts a comment that runs to the end
// of the line. Expressions compile to minimal, trim, deterministic automata
// whose marked language is the denotation of the expression.

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "automaton.hpp"

namespace desctl {

// ---------------------------------------------------------------------------
// AST

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { epsilon, symbol, concat, alternation, star, prefix_closure };

  Kind kind = Kind::epsilon;
  std::string symbol;              // Kind::symbol
  std::vector<ExprPtr> children;   // concat/alternation: >= 2; star/prefix_closure: 1
};

inline std::string to_string(const Expr& x);

namespace expr {

inline ExprPtr epsilon() { return std::make_shared<Expr>(); }

inline ExprPtr sym(std::string id) {
  auto x = std::make_shared<Expr>();
  x->kind = Expr::Kind::symbol;
  x->symbol = std::move(id);
  return x;
}

inline ExprPtr concat(std::vector<ExprPtr> parts) {
  std::vector<ExprPtr> flat;
  for (auto& p : parts) {
    if (p->kind == Expr::Kind::concat)
      flat.insert(flat.end(), p->children.begin(), p->children.end());
    else if (p->kind != Expr::Kind::epsilon)
      flat.push_back(std::move(p));
  }
  if (flat.empty()) return epsilon();
  if (flat.size() == 1) return flat.front();
  auto x = std::make_shared<Expr>();
  x->kind = Expr::Kind::concat;
  x->children = std::move(flat);
  return x;
}

// Flattened, deduplicated and sorted by printed form so that the order of
// alternatives never affects compilation.
inline ExprPtr alternation(std::vector<ExprPtr> parts) {
  std::vector<ExprPtr> flat;
  for (auto& p : parts) {
    if (p->kind == Expr::Kind::alternation)
      flat.insert(flat.end(), p->children.begin(), p->children.end());
    else
      flat.push_back(std::move(p));
  }
  std::vector<std::pair<std::string, ExprPtr>> keyed;
  for (auto& p : flat) keyed.emplace_back(to_string(*p), std::move(p));
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  keyed.erase(std::unique(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first == b.first; }),
              keyed.end());
  if (keyed.empty()) return epsilon();
  if (keyed.size() == 1) return keyed.front().second;
  auto x = std::make_shared<Expr>();
  x->kind = Expr::Kind::alternation;
  for (auto& [k, p] : keyed) x->children.push_back(std::move(p));
  return x;
}

inline ExprPtr star(ExprPtr child) {
  auto x = std::make_shared<Expr>();
  x->kind = Expr::Kind::star;
  x->children.push_back(std::move(child));
  return x;
}

inline ExprPtr prefix_closure(ExprPtr child) {
  auto x = std::make_shared<Expr>();
  x->kind = Expr::Kind::prefix_closure;
  x->children.push_back(std::move(child));
  return x;
}

}  // namespace expr

// Printed in the parse syntax. Epsilon has no surface syntax and prints as "()".
inline std::string to_string(const Expr& x) {
  auto wrap = [](const Expr& c, bool needs) { return needs ? "(" + to_string(c) + ")" : to_string(c); };
  switch (x.kind) {
    case Expr::Kind::epsilon:
      return "()";
    case Expr::Kind::symbol:
      return x.symbol;
    case Expr::Kind::concat: {
      std::string s;
      for (const auto& c : x.children) {
        if (!s.empty()) s += ' ';
        s += wrap(*c, c->kind == Expr::Kind::alternation);
      }
      return s;
    }
    case Expr::Kind::alternation: {
      std::string s;
      for (const auto& c : x.children) {
        if (!s.empty()) s += " + ";
        s += to_string(*c);
      }
      return s;
    }
    case Expr::Kind::star: {
      const auto& c = *x.children.front();
      bool atomic = c.kind == Expr::Kind::symbol || c.kind == Expr::Kind::prefix_closure || c.kind == Expr::Kind::epsilon;
      return wrap(c, !atomic) + "*";
    }
    case Expr::Kind::prefix_closure:
      return "pc(" + to_string(*x.children.front()) + ")";
  }
  return {};
}

inline void collect_symbols(const Expr& x, std::vector<std::string>& out) {
  if (x.kind == Expr::Kind::symbol) out.push_back(x.symbol);
  for (const auto& c : x.children) collect_symbols(*c, out);
}

// ---------------------------------------------------------------------------
// Parser

class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_, column_;
};

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) { advance(); }

  ExprPtr parse_all() {
    auto x = parse_expr();
    if (tok_.kind != Tok::end) fail("unexpected " + describe(tok_));
    return x;
  }

 private:
  enum class Tok { ident, lparen, rparen, plus, star, end };
  struct Token {
    Tok kind;
    std::string text;
    std::size_t line, column;
  };

  std::string_view text_;
  std::size_t pos_ = 0, line_ = 1, col_ = 1;
  Token tok_{Tok::end, {}, 1, 1};

  static bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
  static bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9') || c == '.' || c == '_'; }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::ident: return "'" + t.text + "'";
      case Tok::end: return "end of input";
      default: return "'" + t.text + "'";
    }
  }

  [[noreturn]] void fail(const std::string& msg) const { throw parse_error(msg, tok_.line, tok_.column); }

  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void advance() {
    for (;;) {
      while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r'))
        bump();
      if (pos_ < text_.size() && text_[pos_] == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') bump();
        continue;
      }
      break;
    }
    tok_.line = line_;
    tok_.column = col_;
    tok_.text.clear();
    if (pos_ >= text_.size()) {
      tok_.kind = Tok::end;
      return;
    }
    char c = text_[pos_];
    if (ident_start(c)) {
      while (pos_ < text_.size() && ident_char(text_[pos_])) {
        tok_.text += text_[pos_];
        bump();
      }
      tok_.kind = Tok::ident;
      return;
    }
    tok_.text = std::string(1, c);
    switch (c) {
      case '(': tok_.kind = Tok::lparen; break;
      case ')': tok_.kind = Tok::rparen; break;
      case '+': tok_.kind = Tok::plus; break;
      case '*': tok_.kind = Tok::star; break;
      default: fail("unexpected character '" + tok_.text + "'");
    }
    bump();
  }

  ExprPtr parse_expr() {
    std::vector<ExprPtr> terms{parse_term()};
    while (tok_.kind == Tok::plus) {
      advance();
      terms.push_back(parse_term());
    }
    return terms.size() == 1 ? terms.front() : expr::alternation(std::move(terms));
  }

  ExprPtr parse_term() {
    std::vector<ExprPtr> factors{parse_factor()};
    while (tok_.kind == Tok::ident || tok_.kind == Tok::lparen) factors.push_back(parse_factor());
    return factors.size() == 1 ? factors.front() : expr::concat(std::move(factors));
  }

  ExprPtr parse_factor() {
    auto x = parse_atom();
    if (tok_.kind == Tok::star) {
      advance();
      x = expr::star(std::move(x));
    }
    return x;
  }

  ExprPtr parse_atom() {
    if (tok_.kind == Tok::ident) {
      std::string id = tok_.text;
      if (id == "pc") {
        advance();
        if (tok_.kind != Tok::lparen) fail("reserved word 'pc' cannot be an event id; expected '(' after 'pc'");
        advance();
        auto inner = parse_expr();
        expect_rparen();
        return expr::prefix_closure(std::move(inner));
      }
      advance();
      return expr::sym(std::move(id));
    }
    if (tok_.kind == Tok::lparen) {
      advance();
      auto inner = parse_expr();
      expect_rparen();
      return inner;
    }
    fail("expected event id, '(' or 'pc(' but found " + describe(tok_));
  }

  void expect_rparen() {
    if (tok_.kind != Tok::rparen) fail("expected ')' but found " + describe(tok_));
    advance();
  }
};

}  // namespace detail

inline ExprPtr parse(std::string_view text) { return detail::ExprParser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Minimization

// Merges language-equivalent states (same generated and marked futures) by
// partition refinement over the accessible part. Undefined transitions stay
// undefined: the implicit dead sink takes part in refinement but is not
// emitted. Each class is represented by its first member.
inline Automaton minimize(const Automaton& input) {
  Automaton a = accessible(input);
  if (a.empty()) return a;
  const std::size_t n = a.num_states();
  const std::size_t m = a.alphabet().size();
  const std::size_t sink = n;

  std::vector<std::size_t> cls(n + 1);
  cls[sink] = 0;
  for (StateIndex q = 0; q < n; ++q) cls[q] = a.is_marked(q) ? 1 : 2;
  std::size_t count = 0;

  for (;;) {
    std::map<std::vector<std::size_t>, std::size_t> ids;
    std::vector<std::size_t> refined(n + 1);
    std::vector<std::size_t> sig(m + 1);
    for (std::size_t q = 0; q <= n; ++q) {
      sig[0] = cls[q];
      for (EventIndex e = 0; e < m; ++e) {
        auto t = q == sink ? npos : a.next(q, e);
        sig[e + 1] = cls[t == npos ? sink : t];
      }
      refined[q] = ids.emplace(sig, ids.size()).first->second;
    }
    cls = std::move(refined);
    if (ids.size() == count) break;
    count = ids.size();
  }

  AutomatonBuilder b(a.name(), a.alphabet());
  std::map<std::size_t, StateIndex> rep;  // class -> new index
  std::vector<StateIndex> first;          // new index -> representative
  for (StateIndex q = 0; q < n; ++q) {
    if (rep.emplace(cls[q], first.size()).second) {
      b.add_state(a.state_name(q), a.is_marked(q));
      first.push_back(q);
    }
  }
  for (StateIndex i = 0; i < first.size(); ++i)
    for (const auto& e : a.edges(first[i])) b.add_transition(i, e.event, rep.at(cls[e.target]));
  b.set_initial(rep.at(cls[a.initial()]));
  return std::move(b).build();
}

// ---------------------------------------------------------------------------
// Language equivalence

struct EquivalenceResult {
  bool equivalent = true;
  std::optional<std::vector<std::string>> distinguishing;  // shortest
};

// Equal generated and marked languages. Events are matched by id; an event
// missing from one alphabet is simply never executable there.
inline EquivalenceResult equivalent(const Automaton& a, const Automaton& b) {
  std::vector<std::string> sigma = a.alphabet().ids();
  for (const auto& e : b.alphabet())
    if (!a.alphabet().contains(e.id)) sigma.push_back(e.id);
  std::vector<EventIndex> in_a, in_b;
  for (const auto& id : sigma) {
    in_a.push_back(a.alphabet().find(id));
    in_b.push_back(b.alphabet().find(id));
  }

  struct Node {
    StateIndex qa, qb;
    std::size_t parent;
    std::size_t via;
  };
  auto start_a = a.empty() ? npos : a.initial();
  auto start_b = b.empty() ? npos : b.initial();
  if (start_a == npos && start_b == npos) return {};

  std::vector<Node> nodes{{start_a, start_b, npos, npos}};
  std::map<std::pair<StateIndex, StateIndex>, std::size_t> seen{{{start_a, start_b}, 0}};

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto qa = nodes[i].qa, qb = nodes[i].qb;
    bool gen_a = qa != npos, gen_b = qb != npos;
    bool mark_a = gen_a && a.is_marked(qa), mark_b = gen_b && b.is_marked(qb);
    if (gen_a != gen_b || mark_a != mark_b) {
      std::vector<std::string> s;
      for (auto k = i; nodes[k].parent != npos; k = nodes[k].parent) s.push_back(sigma[nodes[k].via]);
      std::reverse(s.begin(), s.end());
      return {false, std::move(s)};
    }
    for (std::size_t e = 0; e < sigma.size(); ++e) {
      auto ta = (qa == npos || in_a[e] == npos) ? npos : a.next(qa, in_a[e]);
      auto tb = (qb == npos || in_b[e] == npos) ? npos : b.next(qb, in_b[e]);
      if (ta == npos && tb == npos) continue;
      if (seen.emplace(std::pair{ta, tb}, nodes.size()).second) nodes.push_back({ta, tb, i, e});
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Compilation: Thompson construction, subset construction, minimization.

class resolution_error : public model_error {
 public:
  explicit resolution_error(const std::string& id)
      : model_error("event '" + id + "' is not declared in the alphabet"), id_(id) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

namespace detail {

struct Nfa {
  struct Arc {
    EventIndex event;  // npos = epsilon
    std::size_t target;
  };
  std::vector<std::vector<Arc>> arcs;

  std::size_t add() {
    arcs.emplace_back();
    return arcs.size() - 1;
  }
  void link(std::size_t from, std::size_t to, EventIndex e = npos) { arcs[from].push_back({e, to}); }
};

struct Fragment {
  std::size_t start, accept;
};

inline Fragment thompson(const Expr& x, const Alphabet& sigma, Nfa& nfa) {
  using K = Expr::Kind;
  switch (x.kind) {
    case K::epsilon: {
      auto s = nfa.add(), f = nfa.add();
      nfa.link(s, f);
      return {s, f};
    }
    case K::symbol: {
      auto e = sigma.find(x.symbol);
      if (e == npos) throw resolution_error(x.symbol);
      auto s = nfa.add(), f = nfa.add();
      nfa.link(s, f, e);
      return {s, f};
    }
    case K::concat: {
      auto first = thompson(*x.children.front(), sigma, nfa);
      auto acc = first.accept;
      for (std::size_t i = 1; i < x.children.size(); ++i) {
        auto next = thompson(*x.children[i], sigma, nfa);
        nfa.link(acc, next.start);
        acc = next.accept;
      }
      return {first.start, acc};
    }
    case K::alternation: {
      auto s = nfa.add(), f = nfa.add();
      for (const auto& c : x.children) {
        auto fr = thompson(*c, sigma, nfa);
        nfa.link(s, fr.start);
        nfa.link(fr.accept, f);
      }
      return {s, f};
    }
    case K::star: {
      auto s = nfa.add(), f = nfa.add();
      auto fr = thompson(*x.children.front(), sigma, nfa);
      nfa.link(s, fr.start);
      nfa.link(s, f);
      nfa.link(fr.accept, fr.start);
      nfa.link(fr.accept, f);
      return {s, f};
    }
    case K::prefix_closure: {
      // Every state of the child fragment that can still reach its accept
      // state gets an epsilon arc to it. The fragment is closed at this point
      // (no arc leaves it), so coaccessibility is computed on [lo, hi).
      const auto lo = nfa.arcs.size();
      auto fr = thompson(*x.children.front(), sigma, nfa);
      const auto hi = nfa.arcs.size();
      std::vector<std::vector<std::size_t>> preds(hi - lo);
      for (auto q = lo; q < hi; ++q)
        for (const auto& arc : nfa.arcs[q]) preds[arc.target - lo].push_back(q);
      std::vector<char> co(hi - lo, 0);
      std::deque<std::size_t> queue{fr.accept};
      co[fr.accept - lo] = 1;
      while (!queue.empty()) {
        auto q = queue.front();
        queue.pop_front();
        for (auto p : preds[q - lo])
          if (!co[p - lo]) {
            co[p - lo] = 1;
            queue.push_back(p);
          }
      }
      for (auto q = lo; q < hi; ++q)
        if (co[q - lo] && q != fr.accept) nfa.link(q, fr.accept);
      return fr;
    }
  }
  throw std::logic_error("unreachable expression kind");
}

inline std::vector<std::size_t> epsilon_closure(const Nfa& nfa, std::vector<std::size_t> set) {
  std::vector<char> in(nfa.arcs.size(), 0);
  for (auto q : set) in[q] = 1;
  for (std::size_t i = 0; i < set.size(); ++i)
    for (const auto& arc : nfa.arcs[set[i]])
      if (arc.event == npos && !in[arc.target]) {
        in[arc.target] = 1;
        set.push_back(arc.target);
      }
  std::sort(set.begin(), set.end());
  return set;
}

// Renames states q1..qn in breadth-first order from the initial state.
inline Automaton renumber_bfs(const Automaton& a) {
  if (a.empty()) return a;
  std::vector<StateIndex> order{a.initial()};
  std::vector<StateIndex> pos(a.num_states(), npos);
  pos[a.initial()] = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (EventIndex e : a.active_events(order[i])) {
      auto t = a.next(order[i], e);
      if (pos[t] == npos) {
        pos[t] = order.size();
        order.push_back(t);
      }
    }
  AutomatonBuilder b(a.name(), a.alphabet());
  for (std::size_t i = 0; i < order.size(); ++i) b.add_state("q" + std::to_string(i + 1), a.is_marked(order[i]));
  for (std::size_t i = 0; i < order.size(); ++i)
    for (EventIndex e : a.active_events(order[i])) b.add_transition(i, e, pos[a.next(order[i], e)]);
  b.set_initial(0);
  return std::move(b).build();
}

}  // namespace detail

// The result's alphabet is `sigma` in full, not only the events the
// expression mentions.
inline Automaton compile(const Expr& x, const Alphabet& sigma, std::string name = "spec") {
  detail::Nfa nfa;
  auto fr = detail::thompson(x, sigma, nfa);

  AutomatonBuilder b(std::move(name), sigma);
  std::map<std::vector<std::size_t>, StateIndex> ids;
  std::vector<std::vector<std::size_t>> sets;
  auto intern = [&](std::vector<std::size_t> set) {
    auto it = ids.find(set);
    if (it != ids.end()) return it->second;
    bool marked = std::binary_search(set.begin(), set.end(), fr.accept);
    auto q = b.add_state("d" + std::to_string(sets.size()), marked);
    ids.emplace(set, q);
    sets.push_back(std::move(set));
    return q;
  };
  b.set_initial(intern(detail::epsilon_closure(nfa, {fr.start})));
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (EventIndex e = 0; e < sigma.size(); ++e) {
      std::vector<std::size_t> moved;
      for (auto q : sets[i])
        for (const auto& arc : nfa.arcs[q])
          if (arc.event == e) moved.push_back(arc.target);
      if (moved.empty()) continue;
      auto t = intern(detail::epsilon_closure(nfa, std::move(moved)));
      b.add_transition(i, e, t);
    }
  }
  return detail::renumber_bfs(minimize(trim(std::move(b).build())));
}

inline Automaton compile(std::string_view text, const Alphabet& sigma, std::string name = "spec") {
  return compile(*parse(text), sigma, std::move(name));
}

}  // namespace desctl
