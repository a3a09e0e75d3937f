#include <random>
#include <set>

#include "doctest.h"
#include "mathrender/embedded_data.hpp"
#include "mathrender/tex/parser.hpp"
#include "test_support.hpp"

using namespace mathrender;
using namespace mathrender::tex;

namespace {

const CommandWhitelist& wl() { return CommandWhitelist::builtin(); }

Node must_parse(std::string_view s) {
  auto r = parse(s, wl());
  INFO("input: " << s);
  REQUIRE_MESSAGE(r.ok(), (r.ok() ? "" : r.error().message));
  return r.value();
}

ParseError must_fail(std::string_view s, const Limits& limits = {}) {
  auto r = parse(s, wl(), limits);
  INFO("input: " << s);
  REQUIRE_FALSE(r.ok());
  return r.error();
}

void check_spans(const Node& n) {
  for (const Node& c : n.children) {
    CHECK_MESSAGE(n.span.contains(c.span), describe(n) << " does not contain " << describe(c));
    check_spans(c);
  }
}

void collect_commands(const Node& n, std::set<std::string>& out) {
  if (!n.command.empty()) out.insert(n.command);
  if (!n.text.empty() && n.text.front() == '\\') out.insert(n.text);
  for (const std::string* d : {&n.left, &n.right}) {
    if (!d->empty() && d->front() == '\\') out.insert(*d);
  }
  for (const Node& c : n.children) collect_commands(c, out);
}

}  // namespace

TEST_CASE("tokenize splits commands, groups and marks") {
  auto toks = tokenize("\\frac{a}{b}");
  REQUIRE(toks.ok());
  std::vector<Token> expected = {
      {TokenKind::Command, "\\frac", 0}, {TokenKind::OpenBrace, "{", 5},  {TokenKind::Letter, "a", 6},
      {TokenKind::CloseBrace, "}", 7},   {TokenKind::OpenBrace, "{", 8},  {TokenKind::Letter, "b", 9},
      {TokenKind::CloseBrace, "}", 10},
  };
  CHECK(toks.value() == expected);

  CHECK(tokenize("").value().empty());

  auto sup = tokenize("x^2").value();
  REQUIRE(sup.size() == 3);
  CHECK(sup[0].kind == TokenKind::Letter);
  CHECK(sup[1].kind == TokenKind::SuperscriptMark);
  CHECK(sup[2].kind == TokenKind::Digit);
  CHECK(sup[2].text == "2");
}

TEST_CASE("tokenize reproduces its input") {
  for (std::string_view s : {"  \\alpha\\,x  y", "\\frac {a}\t{b}", "a\\\\b&c", "\\ \\{x\\}", "ℝ × ∞", "\\"}) {
    auto toks = tokenize(s);
    REQUIRE(toks.ok());
    std::string joined;
    for (const auto& t : toks.value()) {
      CHECK(t.offset == joined.size());
      if (t.kind == TokenKind::Command) {
        CHECK(t.text.front() == '\\');
      }
      joined += t.text;
    }
    CHECK(joined == s);
  }
  auto cmd = tokenize("\\alpha2\\,").value();
  CHECK(cmd[0].text == "\\alpha");
  CHECK(cmd[2].text == "\\,");
}

TEST_CASE("tokenize enforces size and encoding") {
  Limits small;
  small.max_input_bytes = 4;
  CHECK(tokenize("abcde", small).error().code == ParseErrorCode::InputTooLarge);
  CHECK(tokenize("abcd", small).ok());
  const std::string bad = std::string("ab") + '\xC3' + "(";
  auto err = tokenize(bad);
  REQUIRE_FALSE(err.ok());
  CHECK(err.error().code == ParseErrorCode::InvalidUtf8);
  CHECK(err.error().offset == 2);
}

TEST_CASE("sample equation parses to the expected tree") {
  const Node ast = must_parse(test::kSampleEquation);
  CHECK(describe(ast) ==
        "Row[Fraction \\frac(Script(Row[Operator (, Identifier x, Operator -, Identifier h, Operator )], sup=Number 2), "
        "Script(Identifier a, sup=Number 2)), Operator -, "
        "Fraction \\frac(Script(Row[Operator (, Identifier y, Operator -, Identifier k, Operator )], sup=Number 2), "
        "Script(Identifier b, sup=Number 2)), Operator =, Number 1]");
  check_spans(ast);

  // The \left...\right spelling keeps the delimiters as a construct.
  const Node alt = must_parse(test::kSampleEquationLeftRight);
  REQUIRE(alt.kind == NodeKind::Row);
  const Node& num = alt.children.at(0).children.at(0);
  CHECK(num.kind == NodeKind::Script);
  CHECK(num.base().kind == NodeKind::Delimited);
  CHECK(num.base().left == "(");
}

TEST_CASE("parse errors") {
  auto e = must_fail("\\frac{a}{b");
  CHECK(e.code == ParseErrorCode::UnbalancedBraces);
  CHECK(e.offset == 9);

  e = must_fail("\\evilcmd x \\alsobad");
  CHECK(e.code == ParseErrorCode::UnknownCommand);
  CHECK(e.offending == std::vector<std::string>{"\\evilcmd", "\\alsobad"});
  CHECK(e.offset == 0);

  e = must_fail("\\evil x \\evil");
  CHECK(e.offending == std::vector<std::string>{"\\evil"});

  CHECK(must_fail("x^a^b").code == ParseErrorCode::DoubleScript);
  CHECK(must_fail("x_a_b").code == ParseErrorCode::DoubleScript);
  CHECK(must_fail("\\left( x").code == ParseErrorCode::UnbalancedDelimiters);
  CHECK(must_fail("x \\right)").code == ParseErrorCode::UnbalancedDelimiters);
  CHECK(must_fail("a}").code == ParseErrorCode::UnbalancedBraces);
  CHECK(must_fail("x^").code == ParseErrorCode::EmptyArgument);
  CHECK(must_fail("\\frac{a}").code == ParseErrorCode::EmptyArgument);
  CHECK(must_fail("\\sqrt").code == ParseErrorCode::EmptyArgument);
  CHECK(must_fail("a & b").code == ParseErrorCode::UnbalancedDelimiters);
  CHECK(must_fail("\\begin{matrix} a").code == ParseErrorCode::UnbalancedDelimiters);
  CHECK(must_fail("\\begin{matrix} a \\end{pmatrix}").code == ParseErrorCode::UnbalancedDelimiters);
  CHECK(must_fail("\\left< x \\right>").code == ParseErrorCode::UnbalancedDelimiters);

  e = must_fail("\\begin{evil} x \\end{evil}");
  CHECK(e.code == ParseErrorCode::UnknownCommand);
  CHECK(e.offending == std::vector<std::string>{"\\begin{evil}", "\\end{evil}"});

  // Environment names are not commands on their own.
  CHECK(must_fail("\\matrix").code == ParseErrorCode::UnknownCommand);
}

TEST_CASE("error offsets stay inside the input") {
  for (std::string_view s : {"{", "{{{", "\\frac{", "x^", "\\left(", "\\sqrt[2", "}", "\\begin{array}{lx} a \\end{array}"}) {
    auto r = parse(s, wl());
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().offset <= s.size());
  }
}

TEST_CASE("constructs") {
  Node n = must_parse("\\sqrt[3]{x}");
  CHECK(n.kind == NodeKind::Radical);
  REQUIRE(n.index());
  CHECK(n.index()->text == "3");

  n = must_parse("\\begin{pmatrix} a & b \\\\ c & d \\\\ \\end{pmatrix}");
  REQUIRE(n.kind == NodeKind::Array);
  CHECK(n.text == "pmatrix");
  REQUIRE(n.children.size() == 2);
  CHECK(n.children[1].children.size() == 2);

  n = must_parse("\\begin{array}{l|cr} 1 & 2 & 3 \\end{array}");
  CHECK(n.spec == "l|cr");

  n = must_parse("\\text{a {b} c}");
  CHECK(n.kind == NodeKind::Text);
  CHECK(n.text == "a {b} c");

  n = must_parse("\\operatorname{sgn} x");
  CHECK(n.children.at(0).kind == NodeKind::Function);
  CHECK(n.children.at(0).text == "sgn");

  n = must_parse("\\rm ab");
  CHECK(n.kind == NodeKind::Styled);
  CHECK(n.switch_style);
  CHECK(n.children.at(0).children.size() == 2);

  n = must_parse("x_1^2");
  CHECK(n.kind == NodeKind::Script);
  CHECK(n.sub()->text == "1");
  CHECK(n.sup()->text == "2");

  n = must_parse("x^23");
  REQUIRE(n.kind == NodeKind::Row);
  CHECK(n.children[0].sup()->text == "2");
  CHECK(n.children[1].text == "3");

  n = must_parse("3.14 x");
  CHECK(n.children[0].text == "3.14");

  n = must_parse("\\le \\vert");
  CHECK(n.children[0].text == "\\leq");
  CHECK(n.children[1].kind == NodeKind::Operator);
  CHECK(n.children[1].text == "|");

  n = must_parse("\\sum\\limits_{i=1}^n i");
  CHECK(n.children[0].kind == NodeKind::Script);
}

TEST_CASE("semantic macros") {
  const Node reals = must_parse("\\Reals");
  CHECK(reals.kind == NodeKind::Symbol);
  const Node expanded = expand_semantic_macros(reals, wl());
  CHECK(expanded.kind == NodeKind::Identifier);
  CHECK(expanded.text == "ℝ");
  CHECK(expanded.annotation == "set of real numbers");

  const Node plain = must_parse("\\frac{a}{b}+\\alpha");
  CHECK(expand_semantic_macros(plain, wl()) == plain);

  const Node frac = expand_semantic_macros(must_parse("\\frac{\\Reals}{\\Reals}"), wl());
  REQUIRE(frac.kind == NodeKind::Fraction);
  for (const Node& c : frac.children) {
    CHECK(c.kind == NodeKind::Identifier);
    CHECK(c.text == "ℝ");
  }

  for (const auto* e : wl().entries(CommandCategory::SemanticMacro)) {
    CHECK_FALSE(e->expansion.empty());
  }
}

TEST_CASE("normalize") {
  CHECK(normalize(must_parse(" \\frac {a} {b} ")) == "\\frac{a}{b}");
  const std::string once = normalize(must_parse("x ^ 2"));
  CHECK(once == "x^{2}");
  CHECK(normalize(must_parse(once)) == once);

  const std::string eq = normalize(must_parse(test::kSampleEquation));
  CHECK(eq == "\\frac{(x-h)^{2}}{a^{2}}-\\frac{(y-k)^{2}}{b^{2}}=1");
  CHECK(normalize(must_parse(eq)) == eq);

  CHECK(normalize(must_parse("\\alpha x")) == "\\alpha x");
  CHECK(normalize(must_parse("\\le")) == "\\leq");
  CHECK(normalize(must_parse("1{2}")) == "1{2}");
  CHECK(normalize(must_parse("a \\rm b c")) == "a{\\rm bc}");
}

TEST_CASE("round trip over the bundled corpus") {
  const auto lines = test::corpus_formulas();
  REQUIRE(lines.size() >= 100);
  for (const auto& s : lines) {
    INFO(s);
    const Node first = must_parse(s);
    check_spans(first);
    const std::string norm = normalize(first);
    INFO(norm);
    const Node second = must_parse(norm);
    CHECK(second == first);
    CHECK(normalize(second) == norm);

    std::set<std::string> cmds;
    collect_commands(first, cmds);
    for (const auto& c : cmds) CHECK_MESSAGE(wl().contains(c), c);
  }
}

TEST_CASE("fuzzed inputs either parse or fail cleanly") {
  std::mt19937_64 rng(20260915);
  const auto corpus = test::corpus_formulas();
  for (int i = 0; i < 2000; ++i) {
    const std::string s = test::fuzz_input(rng, corpus);
    auto r = parse(s, wl());
    if (r.ok()) {
      check_spans(r.value());
      const std::string norm = normalize(r.value());
      auto again = parse(norm, wl());
      INFO(s << " -> " << norm);
      REQUIRE(again.ok());
      CHECK(again.value() == r.value());
    } else {
      CHECK(r.error().offset <= s.size());
      CHECK_FALSE(r.error().message.empty());
    }
  }
}

TEST_CASE("depth limit") {
  const std::string nest = std::string(10000, '{') + "x" + std::string(10000, '}');
  auto e = must_fail(nest);
  CHECK(e.code == ParseErrorCode::DepthLimitExceeded);

  // A limit beyond what the stack can hold still fails cleanly.
  Limits reckless;
  reckless.max_depth = 100000000;
  const std::string huge = std::string(500000, '{') + "x" + std::string(500000, '}');
  reckless.max_input_bytes = huge.size();
  CHECK(parse(huge, wl(), reckless).error().code == ParseErrorCode::DepthLimitExceeded);

  std::string frac = "x";
  for (int i = 0; i < 2000; ++i) frac = "\\frac{x}{" + frac + "}";
  const Node deep = must_parse(frac);
  CHECK(depth(deep) == 2000);

  Limits tight;
  tight.max_depth = 1999;
  CHECK(must_fail(frac, tight).code == ParseErrorCode::DepthLimitExceeded);
}

TEST_CASE("large garbage input is handled within the size limit") {
  std::mt19937_64 rng(7);
  std::string junk;
  const std::string alphabet = "{}^_&\\ab1+()[]|";
  while (junk.size() < 65536) junk += alphabet[rng() % alphabet.size()];
  auto r = parse(junk, wl());
  if (!r.ok()) CHECK(r.error().offset <= junk.size());
  junk += "x";
  CHECK(must_fail(junk).code == ParseErrorCode::InputTooLarge);
}

TEST_CASE("parse honours an expired budget") {
  Budget budget(std::chrono::milliseconds(-1));
  std::string wide;
  for (int i = 0; i < 5000; ++i) wide += "x+";
  auto r = parse(wide + "x", wl(), Limits{}, &budget);
  REQUIRE_FALSE(r.ok());
  CHECK(r.error().code == ParseErrorCode::Timeout);
}

TEST_CASE("whitelist table") {
  CHECK(wl().contains("\\frac"));
  CHECK_FALSE(wl().contains("\\Frac"));
  CHECK_FALSE(wl().version().empty());
  for (auto c : {CommandCategory::Symbol, CommandCategory::Accent, CommandCategory::FunctionName,
                 CommandCategory::Environment, CommandCategory::Layout, CommandCategory::Style,
                 CommandCategory::SemanticMacro}) {
    CHECK_FALSE(wl().entries(c).empty());
  }
  CHECK_FALSE(CommandWhitelist::parse("\\x\tbogus\t0\n").ok());
  CHECK_FALSE(CommandWhitelist::parse("\\x\tsymbol\t0\n\\x\tsymbol\t0\n").ok());
  CHECK_FALSE(CommandWhitelist::parse("\\R\tsemantic-macro\t0\n").ok());
  CHECK(CommandWhitelist::parse("# format-version: 9\n\\x\tsymbol\t0\n").value().version() == "9");
}
