#include "picsif/surface.hpp"
#include "picsif/vclock.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace picsif {

std::string Diagnostic::str() const {
  std::ostringstream os;
  os << span.file << ':' << span.line << ':' << span.column << ": " << message;
  if (!expected.empty()) {
    os << " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) os << (i ? ", " : "") << expected[i];
    os << ')';
  }
  return os.str();
}

namespace {

enum class Tok { ident, integer, punct, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  std::uint32_t line = 1;
  std::uint32_t column = 1;
};

struct ParseFailure {
  Diagnostic diagnostic;
};

class Lexer {
 public:
  Lexer(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= text_.size()) {
        t.kind = Tok::end;
        out.push_back(t);
        return out;
      }
      char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Tok::ident;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
          t.text += advance();
        if (pos_ + 1 < text_.size() && text_[pos_] == '~' && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
          t.text += advance();
          while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) t.text += advance();
        }
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = Tok::integer;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) t.text += advance();
      } else if (std::string_view("{}()<>[],;.|+=@^:-").find(c) != std::string_view::npos) {
        t.kind = Tok::punct;
        t.text = std::string(1, advance());
      } else {
        throw ParseFailure{Diagnostic{SourceSpan{file_, line_, col_}, std::string("unexpected character '") + c + "'", {}}};
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  std::string_view text_;
  std::string file_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
};

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {"send", "recv", "new", "rep", "match", "call"};
  return k;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, std::string file) : toks_(std::move(toks)), file_(std::move(file)) {}

  bool at_end() const { return peek().kind == Tok::end; }
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }

  [[noreturn]] void fail(const Token& at, std::string message, std::vector<std::string> expected = {}) const {
    throw ParseFailure{Diagnostic{span(at), std::move(message), std::move(expected)}};
  }

  SourceSpan span(const Token& t) const { return SourceSpan{file_, t.line, t.column}; }

  bool is_punct(const char* p) const { return peek().kind == Tok::punct && peek().text == p; }
  bool is_word(const char* w) const { return peek().kind == Tok::ident && peek().text == w; }

  Token expect_punct(const char* p) {
    if (!is_punct(p)) fail(peek(), "unexpected " + describe(peek()), {std::string("'") + p + "'"});
    return toks_[pos_++];
  }

  Token expect_ident(const char* what) {
    if (peek().kind != Tok::ident) fail(peek(), "unexpected " + describe(peek()), {what});
    return toks_[pos_++];
  }

  void expect_word(const char* w) {
    if (!is_word(w)) fail(peek(), "unexpected " + describe(peek()), {std::string("'") + w + "'"});
    ++pos_;
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::end: return "end of input";
      case Tok::integer: return "integer '" + t.text + "'";
      case Tok::ident: return "identifier '" + t.text + "'";
      case Tok::punct: return "'" + t.text + "'";
    }
    return "token";
  }

  //--------------------------------------------------------------------------
  // Processes

  Process parse_proc() {
    std::vector<Process> parts{parse_par()};
    while (is_punct("+")) {
      ++pos_;
      parts.push_back(parse_par());
    }
    Process out = parts.back();
    for (std::size_t i = parts.size() - 1; i-- > 0;) out = Process::choice(parts[i], out);
    return out;
  }

  Process parse_par() {
    std::vector<Process> parts{parse_unary()};
    while (is_punct("|")) {
      ++pos_;
      parts.push_back(parse_unary());
    }
    Process out = parts.back();
    for (std::size_t i = parts.size() - 1; i-- > 0;) out = Process::parallel(parts[i], out);
    return out;
  }

  Process parse_cont() {
    if (!is_punct(".")) return Process::inaction();
    ++pos_;
    return parse_unary();
  }

  Process parse_unary() {
    const Token t = peek();
    auto loc = [&](Process p) { return p.located(t.line, t.column); };
    if (t.kind == Tok::integer) {
      if (t.text != "0") fail(t, "unexpected " + describe(t), {"process"});
      ++pos_;
      return Process::inaction();
    }
    if (t.kind == Tok::punct) {
      if (t.text == "[") {
        ++pos_;
        expect_punct("]");
        return loc(Process::hole());
      }
      if (t.text == "{" || t.text == "(") {
        ++pos_;
        Process p = parse_proc();
        expect_punct(t.text == "{" ? "}" : ")");
        return p;
      }
    }
    if (t.kind == Tok::ident && keywords().count(t.text)) {
      ++pos_;
      if (t.text == "send") {
        ChannelId c = parse_channel();
        expect_punct("(");
        std::vector<Term> payload = parse_terms(")");
        expect_punct(")");
        return loc(Process::send(std::move(c), std::move(payload), parse_cont()));
      }
      if (t.text == "recv") {
        ChannelId c = parse_channel();
        expect_punct("<");
        std::vector<Name> slots;
        if (!is_punct(">")) {
          while (true) {
            Token s = expect_ident("binder name");
            for (const auto& e : slots)
              if (e.label() == s.text) fail(s, "duplicate binder '" + s.text + "' in receive");
            slots.push_back(Name::fresh(s.text));
            if (!is_punct(",")) break;
            ++pos_;
          }
        }
        expect_punct(">");
        for (const auto& s : slots) scope_.emplace_back(s.label(), s);
        Process cont = parse_cont();
        scope_.resize(scope_.size() - slots.size());
        return loc(Process::receive(std::move(c), std::move(slots), std::move(cont)));
      }
      if (t.text == "new") {
        Token n = expect_ident("name");
        Name fresh = Name::fresh(n.text);
        expect_punct(".");
        scope_.emplace_back(n.text, fresh);
        Process body = parse_unary();
        scope_.pop_back();
        return loc(Process::restrict(fresh, std::move(body)));
      }
      if (t.text == "rep") return loc(Process::replicate(parse_unary()));
      if (t.text == "match") {
        expect_punct("[");
        Term l = parse_term();
        expect_punct("=");
        Term r = parse_term();
        expect_punct("]");
        expect_punct(".");
        return loc(Process::match(std::move(l), std::move(r), parse_unary()));
      }
      // call
      Token f = expect_ident("function symbol");
      auto sym = symbol_from_name(f.text);
      if (!sym) fail(f, "unknown function symbol '" + f.text + "'", {"IncEle", "MaxVec", "Delete"});
      expect_punct("(");
      std::vector<Term> args = parse_terms(")");
      expect_punct(")");
      if (args.size() != symbol_arity(*sym))
        fail(f, std::string(symbol_name(*sym)) + " takes " + std::to_string(symbol_arity(*sym)) + " argument(s), got " +
                    std::to_string(args.size()));
      return loc(Process::call(*sym, std::move(args), parse_cont()));
    }
    fail(t, "unexpected " + describe(t),
         {"'0'", "'[]'", "'{'", "'('", "'send'", "'recv'", "'new'", "'rep'", "'match'", "'call'"});
  }

  std::optional<Name> lookup(const std::string& label) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == label) return it->second;
    return std::nullopt;
  }

  Name resolve_name(const std::string& label, NameKind kind) const {
    if (auto n = lookup(label)) return *n;
    return Name(label, kind);
  }

  Term parse_endpoint() {
    if (is_punct("@")) {
      ++pos_;
      return Variable{expect_ident("identity").text};
    }
    Token t = expect_ident("identity");
    if (auto n = lookup(t.text)) return *n;
    return Variable{t.text};
  }

  ChannelId parse_channel() {
    Token t = expect_ident("channel name");
    if (keywords().count(t.text)) fail(t, "keyword '" + t.text + "' used as a channel", {"channel name"});
    ChannelId c{resolve_name(t.text, NameKind::channel), std::nullopt};
    if (is_punct("^")) {
      ++pos_;
      expect_punct("{");
      Term from = parse_endpoint();
      expect_punct(",");
      Term to = parse_endpoint();
      expect_punct("}");
      c.endpoints = std::make_pair(std::move(from), std::move(to));
    }
    return c;
  }

  Term parse_term() {
    if (is_punct("@")) {
      ++pos_;
      return Variable{expect_ident("identity").text};
    }
    if (is_punct("[")) {
      Token open = toks_[pos_++];
      ClockLiteral c;
      while (true) {
        if (peek().kind != Tok::integer) fail(peek(), "unexpected " + describe(peek()), {"clock counter"});
        c.counters.push_back(std::stoull(toks_[pos_++].text));
        if (!is_punct(",")) break;
        ++pos_;
      }
      expect_punct("]");
      return c;
    }
    Token t = expect_ident("term");
    return resolve_name(t.text, NameKind::message);
  }

  std::vector<Term> parse_terms(const char* close) {
    std::vector<Term> out;
    if (is_punct(close)) return out;
    while (true) {
      out.push_back(parse_term());
      if (!is_punct(",")) return out;
      ++pos_;
    }
  }

  //--------------------------------------------------------------------------
  // Scenario files

  std::string parse_dashed_word() {
    std::string w = expect_ident("word").text;
    while (is_punct("-")) {
      ++pos_;
      w += "-" + expect_ident("word").text;
    }
    return w;
  }

  ChannelId parse_registry_channel() {
    Token t = expect_ident("channel name");
    ChannelId c{Name(t.text, NameKind::channel), std::nullopt};
    if (is_punct("^")) {
      ++pos_;
      expect_punct("{");
      Term from = Variable{expect_ident("identity").text};
      expect_punct(",");
      Term to = Variable{expect_ident("identity").text};
      expect_punct("}");
      c.endpoints = std::make_pair(std::move(from), std::move(to));
    }
    return c;
  }

  template <typename F>
  void parse_list(F item) {
    if (is_punct(";")) return;
    while (true) {
      item();
      if (!is_punct(",")) return;
      ++pos_;
    }
  }

  ScenarioFile parse_scenario_body(std::vector<Diagnostic>& diags, std::vector<SourceSpan>& actor_spans) {
    ScenarioFile s;
    bool saw_registry = false;
    while (!at_end()) {
      Token t = peek();
      if (is_word("scenario")) {
        ++pos_;
        s.name = parse_dashed_word();
        expect_punct(";");
      } else if (is_word("expect")) {
        ++pos_;
        s.expect = parse_dashed_word();
        static const std::set<std::string> ok = {"accountable", "auth-z-violated", "auth-n-violated", "both"};
        if (!ok.count(s.expect))
          fail(t, "unknown verdict '" + s.expect + "'", {"accountable", "auth-z-violated", "auth-n-violated", "both"});
        expect_punct(";");
      } else if (is_word("actor")) {
        ++pos_;
        Token n = expect_ident("actor name");
        ActorDecl a;
        a.name = n.text;
        a.span = span(n);
        expect_word("as");
        a.identities.push_back(Variable{expect_ident("identity").text});
        while (is_punct(",")) {
          ++pos_;
          a.identities.push_back(Variable{expect_ident("identity").text});
        }
        expect_punct("{");
        a.process = parse_proc();
        expect_punct("}");
        for (const auto& prev : s.actors)
          if (prev.name == a.name) diags.push_back(Diagnostic{a.span, "duplicate actor '" + a.name + "'", {}});
        actor_spans.push_back(a.span);
        s.actors.push_back(std::move(a));
      } else if (is_word("authorize")) {
        ++pos_;
        if (saw_registry) diags.push_back(Diagnostic{span(t), "duplicate authorize block", {}});
        saw_registry = true;
        expect_punct("{");
        while (!is_punct("}")) {
          Token key = expect_ident("registry field");
          expect_punct(":");
          if (key.text == "authenticated") {
            parse_list([&] { s.registry.authenticated.push_back(Variable{expect_ident("identity").text}); });
          } else if (key.text == "channels") {
            parse_list([&] { s.registry.authorized.push_back(parse_registry_channel()); });
          } else if (key.text == "unauthorized") {
            parse_list([&] { s.registry.unauthorized.push_back(parse_registry_channel()); });
          } else {
            fail(key, "unknown registry field '" + key.text + "'", {"authenticated", "channels", "unauthorized"});
          }
          expect_punct(";");
        }
        expect_punct("}");
      } else if (is_word("explore")) {
        ++pos_;
        ExplorationDecl e;
        expect_punct("{");
        while (!is_punct("}")) {
          Token key = expect_ident("exploration field");
          expect_punct(":");
          if (peek().kind != Tok::integer) fail(peek(), "unexpected " + describe(peek()), {"integer"});
          int v = std::stoi(toks_[pos_++].text);
          if (key.text == "depth") {
            e.depth = v;
          } else if (key.text == "fuel") {
            e.fuel = v;
          } else {
            fail(key, "unknown exploration field '" + key.text + "'", {"depth", "fuel"});
          }
          if (v < 1) fail(key, key.text + " must be at least 1");
          expect_punct(";");
        }
        expect_punct("}");
        s.exploration = e;
      } else {
        fail(t, "unexpected " + describe(t), {"'scenario'", "'expect'", "'actor'", "'authorize'", "'explore'"});
      }
    }
    return s;
  }

 private:
  std::vector<Token> toks_;
  std::string file_;
  std::size_t pos_ = 0;
  std::vector<std::pair<std::string, Name>> scope_;
};

//----------------------------------------------------------------------------
// Name-kind inference

void collect_channel_subjects(const Process& p, std::set<Name>& out) {
  if (p.is(Process::Kind::send) || p.is(Process::Kind::receive)) out.insert(p.channel().base);
  for (std::size_t i = 0; i < p.child_count(); ++i) collect_channel_subjects(p.child(i), out);
}

Name rekind(const Name& n, const std::set<Name>& chans) {
  return chans.count(n) ? n.with_kind(NameKind::channel) : n;
}

Term rekind(const Term& t, const std::set<Name>& chans) {
  if (auto n = as_name(t)) return rekind(*n, chans);
  return t;
}

Process apply_kinds(const Process& p, const std::set<Name>& chans) {
  auto terms = [&](const std::vector<Term>& ts) {
    std::vector<Term> out;
    for (const auto& t : ts) out.push_back(rekind(t, chans));
    return out;
  };
  Process out = p;
  switch (p.kind()) {
    case Process::Kind::send:
      out = Process::send(p.channel(), terms(p.terms()), apply_kinds(p.body(), chans));
      break;
    case Process::Kind::receive: {
      std::vector<Name> slots;
      for (const auto& s : p.slots()) slots.push_back(rekind(s, chans));
      out = Process::receive(p.channel(), std::move(slots), apply_kinds(p.body(), chans));
      break;
    }
    case Process::Kind::restriction:
      out = Process::restrict(rekind(p.bound(), chans), apply_kinds(p.body(), chans));
      break;
    case Process::Kind::call:
      out = Process::call(p.symbol(), terms(p.terms()), apply_kinds(p.body(), chans));
      break;
    case Process::Kind::match: {
      auto ts = terms(p.terms());
      out = Process::match(ts[0], ts[1], apply_kinds(p.body(), chans));
      break;
    }
    default:
      for (std::size_t i = 0; i < p.child_count(); ++i) out = out.with_child(i, apply_kinds(p.child(i), chans));
      return out;
  }
  return p.line() ? out.located(p.line(), p.column()) : out;
}

void check_channels(const Process& p, const std::set<std::string>& declared, const SourceSpan& actor,
                    std::set<std::string>& reported, std::vector<Diagnostic>& diags) {
  if ((p.is(Process::Kind::send) || p.is(Process::Kind::receive)) && p.channel().base.is_global()) {
    const auto& label = p.channel().base.label();
    if (!declared.count(label) && !reported.count(label)) {
      reported.insert(label);
      SourceSpan at = actor;
      if (p.line()) {
        at.line = p.line();
        at.column = p.column();
      }
      diags.push_back(Diagnostic{at, "channel '" + label + "' is neither authorized nor marked unauthorized", {}});
    }
  }
  for (std::size_t i = 0; i < p.child_count(); ++i) check_channels(p.child(i), declared, actor, reported, diags);
}

}  // namespace

Process infer_name_kinds(const Process& p) {
  std::set<Name> chans;
  collect_channel_subjects(p, chans);
  return apply_kinds(p, chans);
}

ProcessParse parse_process(std::string_view text, const std::string& file) {
  ProcessParse out;
  try {
    Parser parser(Lexer(text, file).run(), file);
    if (parser.at_end()) parser.fail(parser.peek(), "empty process", {"process"});
    Process p = parser.parse_proc();
    if (!parser.at_end()) parser.fail(parser.peek(), "unexpected " + Parser::describe(parser.peek()), {"end of input"});
    out.process = infer_name_kinds(p);
  } catch (const ParseFailure& f) {
    out.diagnostics.push_back(f.diagnostic);
  }
  return out;
}

ScenarioParse parse_scenario(std::string_view text, const std::string& file) {
  ScenarioParse out;
  try {
    Parser parser(Lexer(text, file).run(), file);
    if (parser.at_end()) parser.fail(parser.peek(), "empty scenario", {"'actor'"});
    std::vector<SourceSpan> spans;
    ScenarioFile s = parser.parse_scenario_body(out.diagnostics, spans);
    if (s.actors.empty()) out.diagnostics.push_back(Diagnostic{SourceSpan{file, 1, 1}, "empty scenario", {"'actor'"}});

    std::set<Name> chans;
    for (const auto& a : s.actors) collect_channel_subjects(a.process, chans);
    for (auto& a : s.actors) a.process = apply_kinds(a.process, chans);

    std::set<std::string> declared;
    for (const auto& c : s.registry.authorized) declared.insert(c.base.label());
    for (const auto& c : s.registry.unauthorized) declared.insert(c.base.label());
    std::set<std::string> reported;
    for (const auto& a : s.actors) check_channels(a.process, declared, a.span, reported, out.diagnostics);
    out.scenario = std::move(s);
  } catch (const ParseFailure& f) {
    out.diagnostics.push_back(f.diagnostic);
  }
  return out;
}

ScenarioParse parse_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ScenarioParse out;
    out.diagnostics.push_back(Diagnostic{SourceSpan{path, 1, 1}, "cannot read file", {}});
    return out;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

//----------------------------------------------------------------------------
// Printer

namespace {

void collect_endpoint_vars(const Process& p, std::set<std::string>& out) {
  if ((p.is(Process::Kind::send) || p.is(Process::Kind::receive)) && p.channel().endpoints) {
    if (auto v = as_variable(p.channel().endpoints->first)) out.insert(v->label);
    if (auto v = as_variable(p.channel().endpoints->second)) out.insert(v->label);
  }
  for (std::size_t i = 0; i < p.child_count(); ++i) collect_endpoint_vars(p.child(i), out);
}

class Printer {
 public:
  std::string label_of(const Name& n) const {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it)
      if (it->first == n) return it->second;
    return n.display();
  }

  std::string term(const Term& t) const {
    if (auto n = as_name(t)) return label_of(*n);
    if (auto v = as_variable(t)) return "@" + v->label;
    return format_clock(std::get<ClockLiteral>(t).counters);
  }

  std::string endpoint(const Term& t) const {
    if (auto v = as_variable(t)) return v->label;
    return term(t);
  }

  std::string channel(const ChannelId& c) const {
    std::string s = label_of(c.base);
    if (c.endpoints) s += "^{" + endpoint(c.endpoints->first) + "," + endpoint(c.endpoints->second) + "}";
    return s;
  }

  std::string terms(const std::vector<Term>& ts) const {
    std::string s;
    for (std::size_t i = 0; i < ts.size(); ++i) s += (i ? ", " : "") + term(ts[i]);
    return s;
  }

  // Picks printed labels for `binders` so that nothing free in `body` is
  // captured when the text is read back.
  std::vector<std::string> choose(const std::vector<Name>& binders, const Process& body) const {
    std::set<std::string> used;
    for (const auto& n : free_names(body))
      if (std::find(binders.begin(), binders.end(), n) == binders.end()) used.insert(label_of(n));
    collect_endpoint_vars(body, used);
    for (const auto& k : keywords()) used.insert(k);
    std::vector<std::string> out;
    for (const auto& b : binders) {
      std::string base = b.label();
      std::string cand = base;
      for (int k = 2; used.count(cand) || std::find(out.begin(), out.end(), cand) != out.end(); ++k)
        cand = base + "_" + std::to_string(k);
      out.push_back(cand);
    }
    return out;
  }

  std::string cont(const Process& p) {
    if (p.is(Process::Kind::inaction)) return "";
    return ". " + unary(p);
  }

  std::string unary(const Process& p) {
    if (p.is(Process::Kind::parallel) || p.is(Process::Kind::choice)) return "{ " + print(p) + " }";
    return print(p);
  }

  std::string print(const Process& p) {
    switch (p.kind()) {
      case Process::Kind::inaction: return "0";
      case Process::Kind::hole: return "[]";
      case Process::Kind::send: return "send " + channel(p.channel()) + "(" + terms(p.terms()) + ")" + cont(p.body());
      case Process::Kind::call:
        return std::string("call ") + symbol_name(p.symbol()) + "(" + terms(p.terms()) + ")" + cont(p.body());
      case Process::Kind::match:
        return "match [" + term(p.terms()[0]) + " = " + term(p.terms()[1]) + "]. " + unary(p.body());
      case Process::Kind::receive: {
        std::string head = "recv " + channel(p.channel()) + "<";
        auto labels = choose(p.slots(), p.body());
        for (std::size_t i = 0; i < labels.size(); ++i) head += (i ? ", " : "") + labels[i];
        head += ">";
        for (std::size_t i = 0; i < labels.size(); ++i) env_.emplace_back(p.slots()[i], labels[i]);
        std::string rest = cont(p.body());
        env_.resize(env_.size() - labels.size());
        return head + rest;
      }
      case Process::Kind::restriction: {
        auto label = choose({p.bound()}, p.body()).front();
        env_.emplace_back(p.bound(), label);
        std::string rest = unary(p.body());
        env_.pop_back();
        return "new " + label + ". " + rest;
      }
      case Process::Kind::replication: return "rep " + unary(p.body());
      case Process::Kind::parallel: {
        const auto& l = p.left();
        std::string ls = l.is(Process::Kind::parallel) || l.is(Process::Kind::choice) ? "{ " + print(l) + " }" : print(l);
        const auto& r = p.right();
        std::string rs = r.is(Process::Kind::choice) ? "{ " + print(r) + " }" : print(r);
        return ls + " | " + rs;
      }
      case Process::Kind::choice: {
        const auto& l = p.left();
        std::string ls = l.is(Process::Kind::choice) ? "{ " + print(l) + " }" : print(l);
        return ls + " + " + print(p.right());
      }
    }
    return "?";
  }

 private:
  std::vector<std::pair<Name, std::string>> env_;
};

std::string registry_channel(const ChannelId& c) {
  std::string s = c.base.label();
  if (c.endpoints) s += "^{" + Printer().endpoint(c.endpoints->first) + "," + Printer().endpoint(c.endpoints->second) + "}";
  return s;
}

}  // namespace

std::string pretty(const Process& p) { return Printer().print(p); }
std::string pretty(const Term& t) { return Printer().term(t); }
std::string pretty(const ChannelId& c) { return Printer().channel(c); }

std::string pretty(const ScenarioFile& s) {
  std::ostringstream os;
  if (!s.name.empty()) os << "scenario " << s.name << ";\n";
  if (!s.expect.empty()) os << "expect " << s.expect << ";\n";
  for (const auto& a : s.actors) {
    os << "\nactor " << a.name << " as ";
    for (std::size_t i = 0; i < a.identities.size(); ++i) os << (i ? ", " : "") << a.identities[i].label;
    os << " {\n";
    // One line per top-level parallel component.
    Process p = a.process;
    bool first = true;
    while (true) {
      bool chain = p.is(Process::Kind::parallel);
      Process head = chain ? p.left() : p;
      std::string text = head.is(Process::Kind::parallel) || head.is(Process::Kind::choice) ? "{ " + pretty(head) + " }"
                                                                                             : pretty(head);
      if (!chain && p.is(Process::Kind::choice)) text = pretty(p);
      os << (first ? "  " : "  | ") << text << "\n";
      first = false;
      if (!chain) break;
      p = p.right();
    }
    os << "}\n";
  }
  os << "\nauthorize {\n";
  auto list = [&](const char* key, const auto& items, auto fmt) {
    os << "  " << key << ":";
    for (std::size_t i = 0; i < items.size(); ++i) os << (i ? ", " : " ") << fmt(items[i]);
    os << ";\n";
  };
  list("authenticated", s.registry.authenticated, [](const Variable& v) { return v.label; });
  list("channels", s.registry.authorized, registry_channel);
  list("unauthorized", s.registry.unauthorized, registry_channel);
  os << "}\n";
  if (s.exploration) {
    os << "\nexplore {\n  depth: " << s.exploration->depth << ";\n  fuel: " << s.exploration->fuel << ";\n}\n";
  }
  return os.str();
}

bool scenarios_equivalent(const ScenarioFile& a, const ScenarioFile& b) {
  if (a.name != b.name || a.expect != b.expect || a.actors.size() != b.actors.size()) return false;
  for (std::size_t i = 0; i < a.actors.size(); ++i) {
    const auto& x = a.actors[i];
    const auto& y = b.actors[i];
    if (x.name != y.name || x.identities != y.identities) return false;
    if (!alpha_equivalent(x.process, y.process)) return false;
  }
  auto chans = [](const std::vector<ChannelId>& v) {
    std::vector<std::string> out;
    for (const auto& c : v) out.push_back(registry_channel(c));
    return out;
  };
  if (a.registry.authenticated != b.registry.authenticated) return false;
  if (chans(a.registry.authorized) != chans(b.registry.authorized)) return false;
  if (chans(a.registry.unauthorized) != chans(b.registry.unauthorized)) return false;
  if (a.exploration.has_value() != b.exploration.has_value()) return false;
  if (a.exploration && (a.exploration->depth != b.exploration->depth || a.exploration->fuel != b.exploration->fuel))
    return false;
  return true;
}

}  // namespace picsif
