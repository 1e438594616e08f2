#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "codeprov/normalize.hpp"
#include "codeprov/provenance.hpp"
#include "codeprov/textutil.hpp"
#include "test_util.hpp"

using namespace codeprov;

namespace {

Timestamp ts(const std::string& text) { return *parse_timestamp(text); }

CodeSnippet app_snippet(const std::string& path, const std::string& text) {
  CodeSnippet snippet;
  snippet.snippet_id = "app-test-" + path;
  snippet.origin = AppFileOrigin{"appT", path, 1, 1, std::nullopt};
  snippet.raw_text = text;
  return snippet;
}

std::string numbered_lines(const std::string& prefix, int from, int to) {
  std::string out;
  for (int i = from; i <= to; ++i) out += prefix + std::to_string(i) + "();\n";
  return out;
}

std::vector<std::string> norm1(const std::string& text) {
  return normalize(text, NormLevel::kType1);
}

AddedLineIndex make_index(
    const std::string& path,
    std::vector<std::tuple<std::string, std::string, std::vector<std::string>>> commits) {
  AddedLineIndex index;
  index.repo_head = "fixture";
  PathHistory history;
  for (auto& [id, date, lines] : commits) {
    history.commits.push_back({id, ts(date), "fixture", lines});
  }
  index.paths[path] = std::move(history);
  return index;
}

}  // namespace

// -------------------------------------------------------------- date_snippet

TEST_CASE("snippet fully added by one commit is dated to that commit") {
  std::string text = numbered_lines("go", 1, 10);
  AddedLineIndex index = make_index("F.java", {{"c1", "2015-01-15T00:00:00", norm1(text)}});
  auto record = date_snippet(app_snippet("F.java", text), index, 0.9);
  CHECK(record.resolution == Resolution::kAuto);
  CHECK(record.matched_commit == "c1");
  CHECK(record.created_at == ts("2015-01-15T00:00:00"));
  CHECK(record.matched_fraction == 1.0);
}

TEST_CASE("60/40 split across two commits dates to the later commit at fraction 0.9") {
  // 10 distinct lines: c1 adds 6 (60%), later c2 adds the other 4 (40%).
  // Cumulative coverage crosses 0.9 only at c2.
  std::string text = numbered_lines("go", 1, 10);
  std::vector<std::string> all = norm1(text);
  std::vector<std::string> first(all.begin(), all.begin() + 6);
  std::vector<std::string> second(all.begin() + 6, all.end());
  AddedLineIndex index = make_index("F.java", {{"c1", "2015-01-15T00:00:00", first},
                                               {"c2", "2015-03-20T00:00:00", second}});
  auto record = date_snippet(app_snippet("F.java", text), index, 0.9);
  CHECK(record.resolution == Resolution::kAuto);
  CHECK(record.matched_commit == "c2");
  CHECK(record.created_at == ts("2015-03-20T00:00:00"));
  REQUIRE(record.candidates.size() == 2);
  CHECK(record.candidates[0].cumulative_fraction == doctest::Approx(0.6));
  CHECK(record.candidates[1].cumulative_fraction == doctest::Approx(1.0));

  // at a looser fraction the earlier commit suffices
  auto loose = date_snippet(app_snippet("F.java", text), index, 0.5);
  CHECK(loose.matched_commit == "c1");
}

TEST_CASE("snippet whose lines never appear as added lines stays unresolved") {
  std::string text = numbered_lines("go", 1, 10);
  AddedLineIndex index =
      make_index("F.java", {{"c1", "2015-01-15T00:00:00", norm1(numbered_lines("other", 1, 10))}});
  auto record = date_snippet(app_snippet("F.java", text), index, 0.9);
  CHECK(record.resolution == Resolution::kUnresolved);
  CHECK_FALSE(record.matched_commit.has_value());
  CHECK_FALSE(record.created_at.has_value());
  CHECK(!record.diagnostic.empty());
}

TEST_CASE("path absent from the index is unresolved with a diagnostic") {
  AddedLineIndex index = make_index("Other.java", {});
  auto record = date_snippet(app_snippet("F.java", numbered_lines("go", 1, 10)), index, 0.9);
  CHECK(record.resolution == Resolution::kUnresolved);
  CHECK(record.diagnostic.find("F.java") != std::string::npos);
}

TEST_CASE("extending history with later commits never changes an AUTO record") {
  std::string text = numbered_lines("go", 1, 10);
  AddedLineIndex index = make_index("F.java", {{"c1", "2015-01-15T00:00:00", norm1(text)}});
  auto before = date_snippet(app_snippet("F.java", text), index, 0.9);
  REQUIRE(before.resolution == Resolution::kAuto);

  index.paths["F.java"].commits.push_back({"c9", ts("2016-06-01T00:00:00"), "fixture", norm1(text)});
  auto after = date_snippet(app_snippet("F.java", text), index, 0.9);
  CHECK(after.matched_commit == before.matched_commit);
  CHECK(after.created_at == before.created_at);
}

TEST_CASE("date_snippet rejects QA-origin snippets") {
  CodeSnippet qa;
  qa.snippet_id = "qa-1-0";
  qa.origin = QaPostOrigin{1, 0, std::nullopt};
  qa.raw_text = "x;\n";
  AddedLineIndex index;
  CHECK_THROWS_AS(date_snippet(qa, index, 0.9), std::invalid_argument);
}

// -------------------------------------------------------- classify_direction

TEST_CASE("post well before app code means reuse from the Q&A site") {
  CHECK(classify_direction(ts("2015-01-20T00:00:00"), ts("2014-04-10T00:00:00"), 2) ==
        Direction::kReuseFromQa);
}

TEST_CASE("one-day gap is ambiguous at the default window") {
  CHECK(classify_direction(ts("2014-02-11T00:00:00"), ts("2014-02-10T00:00:00"), 2) ==
        Direction::kAmbiguous);
}

TEST_CASE("app code well before the post means reuse to the Q&A site") {
  CHECK(classify_direction(ts("2013-05-01T00:00:00"), ts("2014-03-01T00:00:00"), 2) ==
        Direction::kReuseToQa);
}

TEST_CASE("direction classification is antisymmetric") {
  testutil::Rng rng(555);
  for (int trial = 0; trial < 200; ++trial) {
    Timestamp a{static_cast<int64_t>(1'300'000'000'000LL + rng.below(200'000'000'000ULL))};
    Timestamp b{static_cast<int64_t>(1'300'000'000'000LL + rng.below(200'000'000'000ULL))};
    int window = static_cast<int>(rng.below(5));
    Direction forward = classify_direction(a, b, window);
    Direction backward = classify_direction(b, a, window);
    if (forward == Direction::kAmbiguous) {
      CHECK(backward == Direction::kAmbiguous);
    } else if (forward == Direction::kReuseFromQa) {
      CHECK(backward == Direction::kReuseToQa);
    } else {
      CHECK(backward == Direction::kReuseFromQa);
    }
  }
}

// ------------------------------------------------------------ compute_overlap

TEST_CASE("overlap arithmetic: partial, disjoint, containment") {
  auto partial = compute_overlap({10, 29}, {{25, 40}});
  REQUIRE(partial.has_value());
  CHECK(*partial == doctest::Approx(31.25));  // 5 of 16 lines

  auto disjoint = compute_overlap({10, 29}, {{40, 50}});
  REQUIRE(disjoint.has_value());
  CHECK(*disjoint == 0.0);

  auto contained = compute_overlap({10, 29}, {{12, 15}});
  REQUIRE(contained.has_value());
  CHECK(*contained == 100.0);
}

TEST_CASE("empty inconsistency union is absent, invalid ranges are errors") {
  CHECK_FALSE(compute_overlap({10, 29}, {}).has_value());
  CHECK_THROWS_AS(compute_overlap({29, 10}, {{1, 5}}), std::invalid_argument);
  CHECK_THROWS_AS(compute_overlap({0, 5}, {{1, 5}}), std::invalid_argument);
  CHECK_THROWS_AS(compute_overlap({1, 5}, {{5, 1}}), std::invalid_argument);
}

TEST_CASE("multiple ranges union before the rate is taken") {
  // union [1,10] + [21,30] = 20 lines; clone [6,25] covers 5 + 5
  auto rate = compute_overlap({6, 25}, {{1, 10}, {21, 30}});
  REQUIRE(rate.has_value());
  CHECK(*rate == doctest::Approx(50.0));
  // overlapping input ranges collapse
  auto merged = compute_overlap({1, 10}, {{1, 6}, {4, 10}});
  REQUIRE(merged.has_value());
  CHECK(*merged == 100.0);
}

TEST_CASE("overlap stays in bounds and grows with the clone range") {
  testutil::Rng rng(808);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<LineRange> ranges;
    int count = 1 + static_cast<int>(rng.below(4));
    for (int i = 0; i < count; ++i) {
      int start = 1 + static_cast<int>(rng.below(80));
      ranges.push_back({start, start + static_cast<int>(rng.below(20))});
    }
    int clone_start = 1 + static_cast<int>(rng.below(80));
    int clone_end = clone_start + static_cast<int>(rng.below(30));
    auto rate = compute_overlap({clone_start, clone_end}, ranges);
    REQUIRE(rate.has_value());
    CHECK(*rate >= 0.0);
    CHECK(*rate <= 100.0);
    auto grown = compute_overlap({std::max(1, clone_start - 5), clone_end + 5}, ranges);
    CHECK(*grown >= *rate);  // monotone in the clone range
  }
}

// --------------------------------------------------------- detect_migrations

namespace {

struct MigrationFixture {
  std::vector<CloneClass> classes;
  std::map<std::string, SnippetWhen> when;
  std::map<std::string, std::string> licenses;
};

MigrationFixture chain_fixture(const std::string& d0, int post_offset_days,
                               int dest_offset_days) {
  MigrationFixture fx;
  CloneClass cls;
  cls.class_id = "cls-000001";
  cls.members = {"app-a-1", "app-b-1", "qa-1-0"};
  cls.representative = "app-a-1";
  fx.classes.push_back(cls);
  Timestamp t0 = ts(d0);
  fx.when["app-a-1"] = {t0, false, "appA"};
  fx.when["qa-1-0"] = {Timestamp{t0.millis + post_offset_days * 86400000LL}, true, ""};
  fx.when["app-b-1"] = {Timestamp{t0.millis + dest_offset_days * 86400000LL}, false, "appB"};
  fx.licenses["app-a-1"] = "GPL-3.0";
  fx.licenses["app-b-1"] = "Apache-2.0";
  return fx;
}

}  // namespace

TEST_CASE("app -> post -> other app yields one chain with the full duration") {
  MigrationFixture fx = chain_fixture("2013-01-01T00:00:00", 200, 490);
  auto chains = detect_migrations(fx.classes, fx.when, fx.licenses);
  REQUIRE(chains.size() == 1);
  const MigrationChain& chain = chains[0];
  CHECK(chain.source_app == "appA");
  CHECK(chain.destination_app == "appB");
  CHECK(chain.duration_days == 490);
  CHECK(chain.source_license == "GPL-3.0");
  CHECK(chain.destination_license == "Apache-2.0");
  CHECK_FALSE(chain.consistent);
  CHECK(chain.source_date < chain.via_date);
  CHECK(chain.via_date < chain.destination_date);
}

TEST_CASE("a chain within a single app is not a migration") {
  MigrationFixture fx = chain_fixture("2013-01-01T00:00:00", 10, 30);
  fx.when["app-b-1"].app_id = "appA";  // same app on both legs
  CHECK(detect_migrations(fx.classes, fx.when, fx.licenses).empty());
}

TEST_CASE("strict ordering: equal or reversed dates yield no chain") {
  // post at the same instant as the source
  MigrationFixture same = chain_fixture("2013-01-01T00:00:00", 0, 490);
  CHECK(detect_migrations(same.classes, same.when, same.licenses).empty());
  // destination before the post
  MigrationFixture reversed = chain_fixture("2013-01-01T00:00:00", 200, 100);
  CHECK(detect_migrations(reversed.classes, reversed.when, reversed.licenses).empty());
}

TEST_CASE("matching licenses mark the chain consistent") {
  MigrationFixture fx = chain_fixture("2013-01-01T00:00:00", 200, 490);
  fx.licenses["app-b-1"] = "GPL-3.0";
  auto chains = detect_migrations(fx.classes, fx.when, fx.licenses);
  REQUIRE(chains.size() == 1);
  CHECK(chains[0].consistent);
}

TEST_CASE("unknown licenses are never consistent") {
  MigrationFixture fx = chain_fixture("2013-01-01T00:00:00", 200, 490);
  fx.licenses.clear();
  auto chains = detect_migrations(fx.classes, fx.when, fx.licenses);
  REQUIRE(chains.size() == 1);
  CHECK(chains[0].source_license == "UNKNOWN");
  CHECK_FALSE(chains[0].consistent);
}

TEST_CASE("each leg picks the earliest qualifying snippet") {
  MigrationFixture fx = chain_fixture("2013-01-01T00:00:00", 200, 490);
  // add a later source-app snippet and an earlier-but-too-early post
  fx.classes[0].members.push_back("app-a-2");
  fx.when["app-a-2"] = {ts("2013-06-01T00:00:00"), false, "appA"};
  fx.classes[0].members.push_back("qa-2-0");
  fx.when["qa-2-0"] = {ts("2012-06-01T00:00:00"), true, ""};
  auto chains = detect_migrations(fx.classes, fx.when, fx.licenses);
  REQUIRE(chains.size() == 1);
  CHECK(chains[0].source_snippet == "app-a-1");  // earliest source
  CHECK(chains[0].via_snippet == "qa-1-0");      // earliest post after it
}

// ------------------------------------------------------------ track_lifespan

namespace {

ReleaseFiles release_of(const std::string& id, const std::string& date,
                        std::vector<std::string> file_texts) {
  ReleaseFiles release;
  release.release_id = id;
  release.release_date = ts(date);
  for (const auto& text : file_texts) {
    release.files.push_back(normalize(text, NormLevel::kType1));
  }
  return release;
}

}  // namespace

TEST_CASE("presence across releases three to eight, with a file move in the middle") {
  std::string snippet_text = numbered_lines("core", 1, 12);
  std::string other = numbered_lines("noise", 1, 30);
  // the snippet text sits inside a larger file in later releases
  std::string embedded = numbered_lines("pre", 1, 8) + snippet_text + numbered_lines("post", 1, 9);

  CloneConfig config;
  config.normalization_level = NormLevel::kType1;
  std::vector<ReleaseFiles> releases;
  for (int r = 1; r <= 10; ++r) {
    std::string id = "r" + std::to_string(r);
    std::string date = "201" + std::to_string(r <= 5 ? 3 : 4) + "-0" +
                       std::to_string(((r - 1) % 5) * 2 + 1) + "-01T00:00:00";
    if (r < 3 || r > 8) {
      releases.push_back(release_of(id, date, {other}));
    } else if (r < 6) {
      releases.push_back(release_of(id, date, {snippet_text, other}));  // original file
    } else {
      releases.push_back(release_of(id, date, {other, embedded}));  // moved elsewhere
    }
  }
  auto record = track_lifespan("cls-000001", "appT", normalize(snippet_text, NormLevel::kType1),
                               releases, config);
  CHECK(record.first_release == "r3");
  CHECK(record.last_release == "r8");
  CHECK(record.release_count == 6);
  CHECK_FALSE(record.still_present);
  CHECK_FALSE(record.needs_review);
  CHECK(record.days == days_between(releases[2].release_date, releases[7].release_date));
}

TEST_CASE("a snippet present in a single release counts one release, zero days") {
  std::string snippet_text = numbered_lines("one", 1, 10);
  CloneConfig config;
  config.normalization_level = NormLevel::kType1;
  std::vector<ReleaseFiles> releases{
      release_of("r1", "2014-01-01T00:00:00", {numbered_lines("x", 1, 10)}),
      release_of("r2", "2014-02-01T00:00:00", {snippet_text}),
      release_of("r3", "2014-03-01T00:00:00", {numbered_lines("y", 1, 10)}),
  };
  auto record = track_lifespan("cls-000001", "appT", normalize(snippet_text, NormLevel::kType1),
                               releases, config);
  CHECK(record.release_count == 1);
  CHECK(record.first_release == "r2");
  CHECK(record.last_release == "r2");
  CHECK(record.days == 0);
  CHECK_FALSE(record.still_present);
}

TEST_CASE("still_present when the final studied release contains the snippet") {
  std::string snippet_text = numbered_lines("keep", 1, 10);
  CloneConfig config;
  config.normalization_level = NormLevel::kType1;
  std::vector<ReleaseFiles> releases{
      release_of("r1", "2014-01-01T00:00:00", {snippet_text}),
      release_of("r2", "2014-02-01T00:00:00", {snippet_text}),
  };
  auto record = track_lifespan("c", "appT", normalize(snippet_text, NormLevel::kType1), releases,
                               config);
  CHECK(record.still_present);
  CHECK(record.release_count == 2);
}

TEST_CASE("a snippet never detected is flagged for review with count zero") {
  std::string snippet_text = numbered_lines("gone", 1, 10);
  CloneConfig config;
  config.normalization_level = NormLevel::kType1;
  std::vector<ReleaseFiles> releases{
      release_of("r1", "2014-01-01T00:00:00", {numbered_lines("x", 1, 10)}),
  };
  auto record = track_lifespan("c", "appT", normalize(snippet_text, NormLevel::kType1), releases,
                               config);
  CHECK(record.needs_review);
  CHECK(record.release_count == 0);
  CHECK_FALSE(record.first_release.has_value());
}

// --------------------------------------------------------- attribution links

TEST_CASE("attribution link detection looks only inside comments") {
  std::string with_link =
      "// solution from https://stackoverflow.com/q/123\nint x = 1;\n";
  std::string code_only =
      "String url = \"https://stackoverflow.com/q/123\";\nint x = 1;\n";
  CHECK(has_attribution_link(with_link, "stackoverflow.com"));
  CHECK_FALSE(has_attribution_link(code_only, "stackoverflow.com"));
  std::string block = "/* see StackOverflow.com for details */\n";
  CHECK(has_attribution_link(block, "stackoverflow.com"));
}
