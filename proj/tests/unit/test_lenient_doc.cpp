#include <doctest.h>

#include <random>

#include "disambig/lenient_doc.hpp"
#include "unit/helpers.hpp"

using namespace disambig;

TEST_CASE("strict json objects parse") {
  const auto doc = parse_lenient_doc(R"({"a": "x", "b": ["y", {"c": "z"}], "e": "é\n"})");
  REQUIRE(doc.is_object());
  CHECK(doc.first("a")->text == "x");
  CHECK(doc.first("b")->is_list());
  CHECK(doc.first("b")->items[1].value.first("c")->text == "z");
  CHECK(doc.first("e")->text == "\xc3\xa9\n");
}

TEST_CASE("planner-style documents") {
  const auto doc = parse_lenient_doc(R"({
    target object: <apple> or <chocolate bar>,
    reason: <because, really>,
    direction: <ask> <Would you like one?>,
    reason: <second reason>,
    options: [
      <apple>: { target object: <apple> },
    ],
  })");
  CHECK(doc.all("reason").size() == 2);
  CHECK(doc.first("target object")->text == "<apple> or <chocolate bar>");
  CHECK(doc.first("target object")->style == TokenStyle::Angle);
  CHECK(doc.first("reason")->text == "<because, really>");
  CHECK(angle_phrases(doc.first("target object")->text) == std::vector<std::string>{"apple", "chocolate bar"});
  const LenientValue* options = doc.first("options");
  REQUIRE(options);
  REQUIRE(options->items.size() == 1);
  REQUIRE(options->items[0].key);
  CHECK(options->items[0].key->label() == "apple");
  CHECK(unwrap_angle("<apple>") == "apple");
}

TEST_CASE("commas between entries are optional") {
  const auto doc = parse_lenient_doc("{a: 1\nb: 2\n}");
  CHECK(doc.items.size() == 2);
}

TEST_CASE("errors report offsets") {
  auto offset_of = [](std::string_view text) -> std::size_t {
    try {
      (void)parse_lenient_doc(text);
    } catch (const ParseError& e) {
      return e.offset();
    }
    FAIL("expected ParseError");
    return 0;
  };
  CHECK(offset_of("{\"a\": [1, 2}") == 11);
  CHECK(offset_of("{\"a\": 1") == 0);
  CHECK(offset_of("") == 0);
  CHECK(offset_of("{a: <open}") == 4);
  CHECK(offset_of("{a: 1} trailing") == 7);
  CHECK_THROWS_AS(parse_lenient_doc("[1]"), ParseError);
}

TEST_CASE("prefix parsing skips leading text") {
  const std::string text = "Here you go:\n{\"k\": \"v\"}\nmore";
  const auto r = parse_lenient_prefix(text);
  CHECK(r.doc.first("k")->text == "v");
  CHECK(text.substr(r.end) == "\nmore");
}

TEST_CASE("template documents round trip through the printer") {
  for (const char* name : {"few_shot_response.txt", "zero_shot_output_shape.txt"}) {
    INFO(name);
    const std::string text = testing_support::fixture(name);
    for (const char* header : {"Action Planner:", "Decision Tree:"}) {
      const auto parsed = parse_lenient_prefix(text, text.find(header));
      const std::string printed = print_lenient_doc(parsed.doc);
      CHECK(parse_lenient_doc(printed) == parsed.doc);
      CHECK(print_lenient_doc(parse_lenient_doc(printed)) == printed);
    }
  }
}

TEST_CASE("printer round trip on random documents") {
  std::mt19937 gen(11);
  const std::vector<std::string> words{"apple", "left bar", "x,y", "quote\"d", "a:b", "tab\there", "<angle>"};
  std::function<LenientValue(int)> make = [&](int depth) -> LenientValue {
    std::uniform_int_distribution<int> kind(0, depth > 2 ? 0 : 2);
    std::uniform_int_distribution<std::size_t> word(0, words.size() - 1);
    std::uniform_int_distribution<int> count(0, 3);
    switch (kind(gen)) {
      case 0: return LenientValue::scalar(words[word(gen)]);
      case 1: {
        std::vector<LenientEntry> items;
        for (int i = count(gen); i > 0; --i) items.push_back({LenientKey{words[word(gen)]}, make(depth + 1)});
        return LenientValue::object(items);
      }
      default: {
        std::vector<LenientEntry> items;
        for (int i = count(gen); i > 0; --i) items.push_back({std::nullopt, make(depth + 1)});
        return LenientValue::list(items);
      }
    }
  };
  for (int i = 0; i < 300; ++i) {
    LenientValue doc = make(0);
    if (!doc.is_object()) doc = LenientValue::object({{LenientKey{"root"}, doc}});
    CHECK(parse_lenient_doc(print_lenient_doc(doc)) == doc);
  }
}
