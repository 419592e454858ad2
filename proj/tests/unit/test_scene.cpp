#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "disambig/corpus.hpp"
#include "disambig/scene.hpp"
#include "disambig/text.hpp"
#include "unit/helpers.hpp"

using namespace disambig;
using testing_support::bundled_corpus;
using testing_support::scene;

namespace {

nlohmann::json breakfast_json() {
  return nlohmann::json::parse(testing_support::read_file(DISAMBIG_DATA_DIR "/corpus/breakfast_table.json"));
}

bool has_violation(const Scene& s, ViolationKind kind) {
  for (const auto& v : validate_scene(s)) {
    if (v.kind == kind) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("text normalization and phrase search") {
  CHECK(text::normalize("  The Back-Row, please!  ") == "the back row please");
  CHECK(text::contains_phrase("the left plum", "left plum"));
  CHECK_FALSE(text::contains_phrase("the leftmost plum", "left"));
  CHECK(text::find_phrase("red and red", "red") == std::vector<std::size_t>{0, 8});
  CHECK(text::join_choices({"a"}) == "a");
  CHECK(text::join_choices({"a", "b"}) == "a or b");
  CHECK(text::join_choices({"a", "b", "c"}) == "a, b, or c");
  CHECK(text::iequals("Deliver", "dELIVER"));
}

TEST_CASE("bundled corpus loads and validates") {
  const auto& c = bundled_corpus();
  CHECK(c.scenes.size() == 12);
  for (const auto& s : c.scenes) {
    INFO(s.id);
    CHECK(validate_scene(s).empty());
    for (const auto& q : s.inquiries) CHECK_FALSE(candidates_for_inquiry(s, q).empty());
  }
  const Scene& pyramid = scene("plum_pyramid");
  CHECK(candidates_for_inquiry(pyramid, pyramid.inquiries[0]).size() == 14);
}

TEST_CASE("scene json round trip") {
  const Scene s = scene_from_json(breakfast_json());
  const Scene again = scene_from_json(nlohmann::json::parse(scene_to_json(s).dump()));
  CHECK(s == again);
}

TEST_CASE("corpus save and reload") {
  const auto dir = std::filesystem::temp_directory_path() / "disambig_corpus_roundtrip";
  std::filesystem::remove_all(dir);
  save_corpus(bundled_corpus(), dir);
  CHECK(load_corpus(dir) == bundled_corpus());
  CHECK(load_corpus(dir / "corpus.json") == bundled_corpus());
  CHECK(load_corpus(dir / "cups_line.json").scenes.size() == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("schema errors carry scene id and field path") {
  auto doc = breakfast_json();
  doc["objects"][2]["assignments"]["kind"] = "banana";
  try {
    (void)scene_from_json(doc);
    const auto dir = std::filesystem::temp_directory_path() / "disambig_bad_scene.json";
    std::ofstream(dir) << doc.dump();
    (void)load_corpus(dir);
    FAIL("expected CorpusError");
  } catch (const CorpusError& e) {
    CHECK(e.scene_id() == "breakfast_table");
    CHECK_FALSE(std::string(e.what()).empty());
  }

  auto extra = breakfast_json();
  extra["objects"][0]["colour"] = "red";
  try {
    (void)scene_from_json(extra);
    FAIL("expected CorpusError");
  } catch (const CorpusError& e) {
    CHECK(e.field_path().find("/objects/0") != std::string::npos);
  }

  auto missing = breakfast_json();
  missing.erase("description");
  CHECK_THROWS_AS((void)scene_from_json(missing), CorpusError);
}

TEST_CASE("empty corpus file is rejected") {
  const auto path = std::filesystem::temp_directory_path() / "disambig_empty_corpus.json";
  std::ofstream(path) << R"({"version": "1", "scenes": []})";
  CHECK_THROWS_AS((void)load_corpus(path), CorpusError);
}

TEST_CASE("validation catches structural problems") {
  Scene s = scene("breakfast_table");
  SUBCASE("duplicate id") {
    s.objects.push_back(s.objects[0]);
    CHECK(has_violation(s, ViolationKind::DuplicateId));
  }
  SUBCASE("dangling support") {
    s.supports.push_back({"ghost", "apple"});
    CHECK(has_violation(s, ViolationKind::DanglingReference));
  }
  SUBCASE("support cycle") {
    s.supports.push_back({"apple", "toothbrush"});
    CHECK(has_violation(s, ViolationKind::SupportCycle));
  }
  SUBCASE("inquiry without candidates") {
    s.inquiries.push_back({"bring me a spoon", PredicateKind::Class, "spoon"});
    CHECK(has_violation(s, ViolationKind::EmptyInquiry));
  }
  SUBCASE("unknown feature value") {
    s.objects[0].assignments["kind"] = "pear";
    CHECK(has_violation(s, ViolationKind::InvalidFeature));
  }
  SUBCASE("unmentioned vocabulary in the description") {
    s.description += " The left one is mine.";
    CHECK(has_violation(s, ViolationKind::DescriptionLeak));
  }
  SUBCASE("empty description") {
    s.description = " ";
    CHECK(has_violation(s, ViolationKind::EmptyDescription));
  }
}

TEST_CASE("unknown inquiry and object lookups throw") {
  const Scene& s = scene("cups_line");
  CHECK_THROWS_AS((void)candidates_for_inquiry(s, {"bring me tea", PredicateKind::Class, "cup"}), UnknownInquiry);
  CHECK_THROWS_AS((void)s.object("cup_9"), UnknownObject);
}

TEST_CASE("removal order lists everything above, topmost first") {
  const Scene& p = scene("plum_pyramid");
  CHECK(removal_order(p, "b_back_left") == std::vector<ObjectId>{"top", "m_back_left"});
  const auto centre = removal_order(p, "b_middle_middle");
  REQUIRE(centre.size() == 5);
  CHECK(centre.front() == "top");
  CHECK(removal_order(p, "top").empty());
  CHECK(removal_order(scene("breakfast_table"), "apple") == std::vector<ObjectId>{"toothbrush"});

  // Property: every object precedes all objects it rests on.
  for (const auto& o : p.objects) {
    const auto order = removal_order(p, o.id);
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (const auto& above : objects_above(p, order[i])) {
        const auto at = std::find(order.begin(), order.end(), above);
        REQUIRE(at != order.end());
        CHECK(static_cast<std::size_t>(at - order.begin()) < i);
      }
    }
  }
}

TEST_CASE("partition by feature") {
  const Scene& c = scene("cups_line");
  const CandidateSet cups = candidates_for_inquiry(c, c.inquiries[0]);
  const auto blocks = partition_by_feature(c, cups, "color");
  REQUIRE(blocks.size() == 2);
  CHECK(blocks[0].value == "blue");
  CHECK(blocks[0].members == std::vector<ObjectId>{"cup_1", "cup_3"});
  const Scene& p = scene("plum_pyramid");
  CHECK_THROWS_AS((void)partition_by_feature(p, candidates_for_inquiry(p, p.inquiries[0]), "row"),
                  UnusableFeature);
  CHECK(feature_assigned_on(p, {"b_back_left", "b_front_left"}, "row"));
}

TEST_CASE("grid cells") {
  const Scene& p = scene("plum_pyramid");
  CHECK(grid_cell(p, "b_back_left") == std::optional<std::string>("top left"));
  CHECK(grid_cell(p, "b_front_right") == std::optional<std::string>("bottom right"));
  CHECK(grid_cell(p, "b_middle_middle") == std::optional<std::string>("center"));
  CHECK(grid_cell(p, "top") == std::optional<std::string>("center"));
  CHECK(grid_cell_labels().size() == 9);
}
