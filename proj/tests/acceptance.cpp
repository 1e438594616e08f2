// Acceptance suite: one check per shipped guarantee, one PASS/FAIL line
// each. Run via ctest or directly; exits non-zero if any check fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "codeprov/clone_engine.hpp"
#include "codeprov/corpus.hpp"
#include "codeprov/pipeline.hpp"
#include "codeprov/provenance.hpp"
#include "codeprov/qa_ingest.hpp"
#include "codeprov/repo_ingest.hpp"
#include "codeprov/textutil.hpp"
#include "golden_fixture.hpp"
#include "test_util.hpp"

using namespace codeprov;
using testutil::Rng;
using testutil::TempDir;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::vector<std::string> g_notes;

void note(const std::string& text) { g_notes.push_back(text); }

void report(int index, const std::string& name, bool ok, double seconds) {
  std::printf("[%s] criterion %d: %s (%.1fs)\n", ok ? "PASS" : "FAIL", index, name.c_str(),
              seconds);
  for (const auto& n : g_notes) std::printf("       %s\n", n.c_str());
  g_notes.clear();
  if (!ok) ++g_failures;
}

template <typename F>
void criterion(int index, const std::string& name, F&& body) {
  auto start = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    ok = body();
  } catch (const std::exception& e) {
    note(std::string("exception: ") + e.what());
    ok = false;
  }
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(index, name, ok, seconds);
}

// ---- shared corpus generation -------------------------------------------

// 50 statement shapes that stay distinct under both normalization levels.
const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> vocab = [] {
    const char* ops[] = {"+", "-", "*", "/", "%", "<", ">", "<=", ">=", "==", "!=", "&&", "||"};
    std::vector<std::string> out;
    for (const char* op : ops) out.push_back(std::string("x = a ") + op + " b;");
    for (const char* op : ops) out.push_back(std::string("if (a ") + op + " b) x = y;");
    for (const char* op : ops) out.push_back(std::string("while (a ") + op + " b) y = x;");
    for (const char* op : ops) out.push_back(std::string("return a ") + op + " b;");
    out.resize(50);
    return out;
  }();
  return vocab;
}

std::string vocab_text(Rng& rng, int lines) {
  std::string out;
  for (int i = 0; i < lines; ++i) {
    out += vocabulary()[rng.below(vocabulary().size())];
    out += "\n";
  }
  return out;
}

CodeSnippet qa_snippet(int64_t post_id, std::string text) {
  CodeSnippet s;
  s.snippet_id = make_qa_snippet_id(post_id, 0);
  s.origin = QaPostOrigin{post_id, 0, std::nullopt};
  s.raw_text = std::move(text);
  s.created_at = Timestamp{1'000'000'000'000LL + post_id};
  return s;
}

CodeSnippet app_snippet(int index, std::string text) {
  CodeSnippet s;
  std::string path = "f" + std::to_string(index) + ".java";
  s.snippet_id = make_app_snippet_id("perf", path, 0);
  s.origin = AppFileOrigin{"perf", path, 1, 1, std::nullopt};
  s.raw_text = std::move(text);
  return s;
}

struct CorpusPair {
  std::vector<CodeSnippet> qa;
  std::vector<CodeSnippet> app;
};

CorpusPair random_corpus_pair(Rng& rng, int count_a, int count_b) {
  CorpusPair pair;
  for (int i = 0; i < count_a; ++i) {
    pair.qa.push_back(qa_snippet(1000 + i, vocab_text(rng, 10 + static_cast<int>(rng.below(21)))));
  }
  for (int i = 0; i < count_b; ++i) {
    if (i < count_a && rng.below(100) < 60) {
      // mutate a Q&A snippet so near-threshold pairs exist
      auto lines = split_lines(pair.qa[i].raw_text);
      std::string text;
      for (auto line : lines) {
        if (rng.below(100) < 25) {
          text += vocabulary()[rng.below(vocabulary().size())];
        } else {
          text += std::string(line);
        }
        text += "\n";
      }
      pair.app.push_back(app_snippet(i, text));
    } else {
      pair.app.push_back(app_snippet(i, vocab_text(rng, 10 + static_cast<int>(rng.below(21)))));
    }
  }
  return pair;
}

CloneConfig base_config() {
  CloneConfig config;
  config.normalization_level = NormLevel::kType1;
  return config;
}

// The independent oracle: quadratic string LCS, rational threshold.
std::vector<ClonePair> oracle_detect(const CorpusPair& corpus, const CloneConfig& config,
                                     int64_t num, int64_t den) {
  std::vector<std::pair<std::string, std::vector<std::string>>> qa, app;
  for (const auto& s : corpus.qa) {
    auto lines = normalize(s.raw_text, config.normalization_level);
    if (static_cast<int>(lines.size()) >= config.min_lines) qa.emplace_back(s.snippet_id, lines);
  }
  for (const auto& s : corpus.app) {
    auto lines = normalize(s.raw_text, config.normalization_level);
    if (static_cast<int>(lines.size()) >= config.min_lines) app.emplace_back(s.snippet_id, lines);
  }
  std::vector<ClonePair> pairs;
  for (const auto& [qa_id, qa_lines] : qa) {
    for (const auto& [app_id, app_lines] : app) {
      int lcs = testutil::lcs_oracle(qa_lines, app_lines);
      int64_t max_len = static_cast<int64_t>(std::max(qa_lines.size(), app_lines.size()));
      if (static_cast<int64_t>(lcs) * den >= num * max_len) {
        ClonePair pair;
        pair.left = std::min(qa_id, app_id);
        pair.right = std::max(qa_id, app_id);
        pair.lcs_length = lcs;
        pair.max_length = static_cast<int>(max_len);
        pairs.push_back(std::move(pair));
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(CODEPROV_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<CorpusPair> g_corpora;  // shared between criteria 1 and 2

bool criterion_oracle_equivalence() {
  auto start = std::chrono::steady_clock::now();
  Rng rng(160331);
  CloneConfig config = base_config();
  size_t total_pairs = 0;
  for (int trial = 0; trial < 20; ++trial) {
    int count_a = 100 + (trial % 5) * 25;  // up to 200 snippets
    int count_b = 100 + ((trial + 2) % 5) * 25;
    g_corpora.push_back(random_corpus_pair(rng, count_a, count_b));
    const CorpusPair& corpus = g_corpora.back();

    auto expected = oracle_detect(corpus, config, 70, 100);
    auto prepared = prepare_corpora(corpus.qa, corpus.app, config);
    auto actual = detect_cross(prepared, config);
    if (actual != expected) {
      note("trial " + std::to_string(trial) + ": " + std::to_string(actual.size()) +
           " vs oracle " + std::to_string(expected.size()));
      return false;
    }
    total_pairs += expected.size();
  }
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  note("20 corpus pairs, " + std::to_string(total_pairs) +
       " clone pairs, all equal to the oracle");
  if (seconds >= 60.0) {
    note("over the 60s budget");
    return false;
  }
  return total_pairs > 0;
}

bool criterion_shard_equivalence() {
  auto start = std::chrono::steady_clock::now();
  CloneConfig config = base_config();
  for (size_t i = 0; i < g_corpora.size(); ++i) {
    auto prepared = prepare_corpora(g_corpora[i].qa, g_corpora[i].app, config);
    auto expected = detect_cross(prepared, config);
    for (int shard : {1, 7, 50, 2000}) {
      CloneConfig sharded = config;
      sharded.shard_size_a = shard;
      sharded.shard_size_b = shard;
      auto plan = plan_shards(prepared, sharded);
      ShardRunOptions options;
      options.workers = 4;
      auto result = run_sharded(prepared, plan, sharded, options);
      if (!result.complete() || result.pairs != expected) {
        note("corpus " + std::to_string(i) + " shard " + std::to_string(shard) + " diverged");
        return false;
      }
    }
  }
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  note("all 20 corpora identical across shard sizes {1, 7, 50, 2000}");
  if (seconds >= 120.0) {
    note("over the 120s budget");
    return false;
  }
  return true;
}

bool criterion_defaults() {
  CloneConfig defaults;
  if (defaults.min_lines != 10) return false;
  if (defaults.similarity_threshold != 0.70) return false;
  if (defaults.threshold_ppm() != 700000) return false;
  if (defaults.shard_size_a != 2000) return false;

  // the CLI with no config flags must snapshot the same effective config
  TempDir tmp;
  std::string text;
  for (int i = 0; i < 12; ++i) text += vocabulary()[i] + "\n";
  write_corpus(tmp.path / "qa", {qa_snippet(1, text)});
  write_posts(tmp.path / "qa", {});
  write_corpus(tmp.path / "app", {app_snippet(0, text)});
  int exit_code = run_cli("detect --qa '" + (tmp.path / "qa").string() + "' --app '" +
                          (tmp.path / "app").string() + "' --out '" + (tmp.path / "det").string() +
                          "'");
  if (exit_code != 0) {
    note("cli detect exited " + std::to_string(exit_code));
    return false;
  }
  json manifest = json::parse(read_file(tmp.path / "det" / "manifest.json"));
  const json& config = manifest.at("config");
  bool ok = config.at("similarity_threshold").get<std::string>() == "0.700000" &&
            config.at("min_lines").get<int>() == 10 &&
            config.at("shard_size_qa").get<int>() == 2000 &&
            config.at("normalization").get<std::string>() == "TYPE2";
  note("effective config: threshold " + config.at("similarity_threshold").get<std::string>() +
       ", min_lines " + std::to_string(config.at("min_lines").get<int>()));
  return ok;
}

bool criterion_extraction() {
  TempDir tmp;
  Rng rng(4004);
  std::map<std::string, std::string> planted;  // snippet id -> exact text
  std::string dump = "<?xml version=\"1.0\"?>\n<posts>\n";
  auto block = [&](const std::string& stem, int lines) {
    std::string code;
    for (int i = 0; i < lines; ++i) code += stem + std::to_string(i) + "();\n";
    return code;
  };
  for (int id = 1; id <= 1000; ++id) {
    Post post;
    post.id = id;
    post.creation_date = Timestamp{1'300'000'000'000LL + id * 60'000LL};
    post.tags = {"java"};
    uint64_t kind = rng.below(100);
    std::string stem = "p" + std::to_string(id) + "x";
    if (kind < 55) {
      std::string code = block(stem, 10 + static_cast<int>(rng.below(21)));
      post.body_html = "<p>q</p><pre><code>" + code + "</code></pre>";
      planted[make_qa_snippet_id(id, 0)] = code;
    } else if (kind < 70) {
      post.body_html = "<p>q</p><pre><code>" + block(stem, 9) + "</code></pre>";  // decoy
    } else if (kind < 80) {
      std::string code = block(stem, 12);
      post.body_html = "<pre><code>" + block(stem + "d", 9) + "</code></pre><pre><code>" + code +
                       "</code></pre>";
      planted[make_qa_snippet_id(id, 1)] = code;  // decoy first, keeper second
    } else if (kind < 90) {
      post.body_html = "<p>inline <code>call()</code> only</p>";
    } else {
      post.body_html = "<p>no code at all</p>";
    }
    dump += serialize_post_row(post);
    dump += "\n";
  }
  dump += "</posts>\n";
  write_file(tmp.path / "dump.xml", dump);

  std::ifstream in(tmp.path / "dump.xml", std::ios::binary);
  PostReader reader(in);
  std::map<std::string, std::string> recovered;
  while (auto post = reader.next()) {
    for (const auto& snippet : extract_snippets(*post, 10)) {
      recovered[snippet.snippet_id] = snippet.raw_text;
    }
  }
  if (reader.stats().rows_seen != 1000) {
    note("row count off: " + std::to_string(reader.stats().rows_seen));
    return false;
  }
  if (recovered != planted) {
    note("recovered " + std::to_string(recovered.size()) + " planted " +
         std::to_string(planted.size()));
    return false;
  }
  note(std::to_string(planted.size()) + " planted blocks recovered exactly, no false extractions");
  return true;
}

bool criterion_provenance_fixtures() {
  TempDir tmp;
  auto content = [](const std::string& stem, int from, int to) {
    std::string out;
    for (int i = from; i <= to; ++i) out += stem + std::to_string(i) + "();\n";
    return out;
  };
  auto snippet_for = [](const std::string& path, const std::string& text) {
    CodeSnippet s;
    s.snippet_id = "app-fx-" + path;
    s.origin = AppFileOrigin{"fx", path, 1, 1, std::nullopt};
    s.raw_text = text;
    return s;
  };
  bool ok = true;
  auto expect = [&](const char* name, const ProvenanceRecord& record, Resolution resolution,
                    const std::string& date) {
    bool good = record.resolution == resolution;
    if (good && resolution == Resolution::kAuto) {
      good = record.created_at && format_timestamp(*record.created_at) == date;
    }
    if (!good) {
      note(std::string(name) + ": got " + to_string(record.resolution) +
           (record.created_at ? " at " + format_timestamp(*record.created_at) : ""));
      ok = false;
    }
  };

  {  // 1: single-commit add
    auto repo = tmp.path / "single";
    testutil::git_init(repo);
    write_file(repo / "S.java", content("a", 1, 12));
    testutil::git_commit_all(repo, "add", "2015-01-15T10:00:00Z");
    auto record =
        date_snippet(snippet_for("S.java", content("a", 1, 12)), index_history(repo), 0.9);
    expect("single-commit", record, Resolution::kAuto, "2015-01-15T10:00:00.000Z");
  }
  {  // 2: split add, 60% then 40%
    auto repo = tmp.path / "split";
    testutil::git_init(repo);
    write_file(repo / "S.java", content("b", 1, 6));
    testutil::git_commit_all(repo, "part", "2015-01-15T10:00:00Z");
    write_file(repo / "S.java", content("b", 1, 10));
    testutil::git_commit_all(repo, "rest", "2015-03-20T10:00:00Z");
    auto record =
        date_snippet(snippet_for("S.java", content("b", 1, 10)), index_history(repo), 0.9);
    expect("split-add", record, Resolution::kAuto, "2015-03-20T10:00:00.000Z");
  }
  {  // 3: delete then re-add dates to the original introduction
    auto repo = tmp.path / "readd";
    testutil::git_init(repo);
    write_file(repo / "S.java", content("c", 1, 12));
    testutil::git_commit_all(repo, "add", "2014-01-01T10:00:00Z");
    testutil::git_rm(repo, "S.java");
    testutil::git_commit_all(repo, "drop", "2014-06-01T10:00:00Z");
    write_file(repo / "S.java", content("c", 1, 12));
    testutil::git_commit_all(repo, "readd", "2015-01-01T10:00:00Z");
    auto record =
        date_snippet(snippet_for("S.java", content("c", 1, 12)), index_history(repo), 0.9);
    expect("delete-readd", record, Resolution::kAuto, "2014-01-01T10:00:00.000Z");
  }
  {  // 4: rename is followed to the original add
    auto repo = tmp.path / "rename";
    testutil::git_init(repo);
    write_file(repo / "Old.java", content("d", 1, 12));
    testutil::git_commit_all(repo, "add", "2014-03-01T10:00:00Z");
    testutil::git_mv(repo, "Old.java", "New.java");
    testutil::git_commit_all(repo, "rename", "2014-09-01T10:00:00Z");
    auto record =
        date_snippet(snippet_for("New.java", content("d", 1, 12)), index_history(repo), 0.9);
    expect("rename", record, Resolution::kAuto, "2014-03-01T10:00:00.000Z");
    if (!record.rename_followed) {
      note("rename: history not flagged as rename-followed");
      ok = false;
    }
  }
  {  // 5: rewritten history never added the shipped lines
    auto repo = tmp.path / "rewritten";
    testutil::git_init(repo);
    write_file(repo / "S.java", content("unrelated", 1, 12));
    testutil::git_commit_all(repo, "other", "2014-01-01T10:00:00Z");
    auto record =
        date_snippet(snippet_for("S.java", content("e", 1, 12)), index_history(repo), 0.9);
    expect("rewritten", record, Resolution::kUnresolved, "");
  }
  if (ok) note("all five history fixtures dated as enumerated");
  return ok;
}

bool criterion_direction_overlap() {
  bool ok = true;
  auto ts = [](const char* s) { return *parse_timestamp(s); };
  // April-2014 post, January-2015 app code
  if (classify_direction(ts("2015-01-20T09:00:00"), ts("2014-04-10T12:00:00"), 2) !=
      Direction::kReuseFromQa) {
    note("narrative case should classify as reuse from the Q&A site");
    ok = false;
  }
  // one-day gap refuses to classify
  if (classify_direction(ts("2014-02-11T08:00:00"), ts("2014-02-10T08:00:00"), 2) !=
      Direction::kAmbiguous) {
    note("one-day gap should be ambiguous");
    ok = false;
  }
  auto partial = compute_overlap({10, 29}, {{25, 40}});
  if (!partial || *partial != 31.25) {
    note("expected 31.25 percent overlap");
    ok = false;
  }
  auto disjoint = compute_overlap({10, 29}, {{40, 50}});
  if (!disjoint || *disjoint != 0.0) {
    note("expected 0 percent overlap");
    ok = false;
  }
  auto contained = compute_overlap({10, 29}, {{12, 15}});
  if (!contained || *contained != 100.0) {
    note("expected 100 percent overlap");
    ok = false;
  }
  if (ok) note("direction narrative cases and overlap arithmetic check out");
  return ok;
}

bool criterion_migration() {
  auto build = [](int post_offset, int dest_offset) {
    CloneClass cls;
    cls.class_id = "cls-000001";
    cls.members = {"app-a", "app-b", "qa-p"};
    cls.representative = "app-a";
    Timestamp d0 = *parse_timestamp("2013-01-01T00:00:00");
    std::map<std::string, SnippetWhen> when;
    when["app-a"] = {d0, false, "appA"};
    when["qa-p"] = {Timestamp{d0.millis + post_offset * 86400000LL}, true, ""};
    when["app-b"] = {Timestamp{d0.millis + dest_offset * 86400000LL}, false, "appB"};
    std::map<std::string, std::string> licenses{{"app-a", "GPL-3.0"}, {"app-b", "Apache-2.0"}};
    return detect_migrations({cls}, when, licenses);
  };

  auto chains = build(200, 490);
  bool ok = chains.size() == 1 && chains[0].duration_days == 490 && !chains[0].consistent &&
            chains[0].source_app == "appA" && chains[0].destination_app == "appB";
  if (!ok) {
    note("expected exactly one appA->appB chain of 490 days, consistent=false");
    return false;
  }
  // violating the strict ordering in any way yields nothing
  for (auto [post_offset, dest_offset] :
       {std::pair<int, int>{0, 490}, {-10, 490}, {200, 200}, {200, 100}, {490, 200}}) {
    if (!build(post_offset, dest_offset).empty()) {
      note("offsets " + std::to_string(post_offset) + "/" + std::to_string(dest_offset) +
           " should yield no chain");
      return false;
    }
  }
  note("one chain at 490 days, consistent=false; all broken orderings yield none");
  return true;
}

bool criterion_lifespan() {
  TempDir tmp;
  std::string snippet_text;
  for (int i = 1; i <= 12; ++i) snippet_text += "core" + std::to_string(i) + "();\n";
  std::string noise;
  for (int i = 1; i <= 25; ++i) noise += "noise" + std::to_string(i) + "();\n";
  std::string embedded;
  for (int i = 1; i <= 6; ++i) embedded += "pre" + std::to_string(i) + "();\n";
  embedded += snippet_text;
  for (int i = 1; i <= 7; ++i) embedded += "post" + std::to_string(i) + "();\n";

  CloneConfig config = base_config();
  std::vector<ReleaseFiles> releases;
  for (int r = 1; r <= 10; ++r) {
    fs::path tree = tmp.path / ("r" + std::to_string(r));
    write_file(tree / "Other.java", noise);
    if (r >= 3 && r <= 5) write_file(tree / "S.java", snippet_text);
    if (r >= 6 && r <= 8) write_file(tree / "moved" / "S2.java", embedded);  // file move
    char date[32];
    std::snprintf(date, sizeof(date), "2014-%02d-01T00:00:00Z", r);
    AppRelease release = scan_release(tree, "fxapp", "r" + std::to_string(r),
                                      *parse_timestamp(date), {".java"});
    ReleaseFiles rf;
    rf.release_id = release.release_id;
    rf.release_date = release.release_date;
    for (const auto& file : release.files) {
      rf.files.push_back(normalize(file.text, config.normalization_level));
    }
    releases.push_back(std::move(rf));
  }

  auto record = track_lifespan("cls-000001", "fxapp",
                               normalize(snippet_text, config.normalization_level), releases,
                               config);
  bool ok = record.first_release == "r3" && record.last_release == "r8" &&
            record.release_count == 6 && !record.still_present && !record.needs_review;
  if (!ok) {
    note("got first=" + record.first_release.value_or("-") +
         " last=" + record.last_release.value_or("-") +
         " count=" + std::to_string(record.release_count));
    return false;
  }
  note("releases r3..r8 detected, count 6, presence unbroken across the file move");
  return true;
}

bool criterion_golden_run() {
  TempDir tmp;
  auto fixture = testutil::build_golden_fixture(tmp.path / "fixture", 200);

  auto run = [&](const std::string& out, int workers) {
    return run_cli("pipeline --manifest '" + fixture.pipeline_manifest.string() + "' --out '" +
                   (tmp.path / out).string() + "' --workers " + std::to_string(workers));
  };
  for (auto [out, workers] : {std::pair<const char*, int>{"runA", 1}, {"runB", 8}, {"runC", 1}}) {
    int exit_code = run(out, workers);
    if (exit_code != 0) {
      note(std::string(out) + " exited " + std::to_string(exit_code));
      return false;
    }
  }
  std::string a = read_file(tmp.path / "runA" / "report" / "report.json");
  std::string b = read_file(tmp.path / "runB" / "report" / "report.json");
  std::string c = read_file(tmp.path / "runC" / "report" / "report.json");
  if (a != b || a != c) {
    note("report bytes differ across runs/widths");
    return false;
  }
  for (const char* csv : {"pairs.csv", "violations.csv", "migrations.csv", "lifespans.csv"}) {
    if (read_file(tmp.path / "runA" / "report" / "csv" / csv) !=
        read_file(tmp.path / "runB" / "report" / "csv" / csv)) {
      note(std::string("csv differs: ") + csv);
      return false;
    }
  }

  // the report must actually contain the planted facts
  json doc = json::parse(a);
  bool ok = true;
  auto expect = [&](bool cond, const std::string& what) {
    if (!cond) {
      note("missing planted fact: " + what);
      ok = false;
    }
  };
  expect(doc.at("migration_summary").at("count").get<int>() == 1, "exactly one migration");
  expect(doc.at("migrations")[0].at("duration_days").get<int>() == 490, "490-day migration");
  expect(doc.at("migrations")[0].at("consistent").get<bool>() == false,
         "inconsistent migration licenses");
  expect(doc.at("directions").at("from_qa").get<int>() >= 2, "reuse-from-Q&A pairs");
  expect(doc.at("directions").at("to_qa").get<int>() >= 2, "reuse-to-Q&A pairs");
  expect(doc.at("directions").at("ambiguous").get<int>() >= 1, "ambiguous pair");
  expect(doc.at("directions").at("unresolved").get<int>() >= 1, "unresolved pair");
  expect(doc.at("violation_summary").at("app_side").get<int>() >= 1, "app-side violation");
  expect(doc.at("violation_summary").at("post_side").get<int>() >= 1, "post-side violation");
  expect(!doc.at("passes").empty(), "explicit pass records");
  expect(doc.at("violation_summary").at("total").get<int>() ==
             doc.at("violation_summary").at("app_side").get<int>() +
                 doc.at("violation_summary").at("post_side").get<int>(),
         "summed violation count");

  // rule completeness: every resolved pair has exactly one outcome
  int resolved =
      doc.at("directions").at("from_qa").get<int>() + doc.at("directions").at("to_qa").get<int>();
  int outcomes = static_cast<int>(doc.at("violations").size() + doc.at("passes").size());
  expect(outcomes == resolved, "one outcome per resolved pair");
  expect(static_cast<int>(doc.at("violations").size()) <= resolved, "conservation bound");

  if (ok) {
    note("byte-identical reports across two runs and widths {1, 8}; planted facts all present");
  }
  return ok;
}

bool criterion_performance() {
  Rng rng(909090);
  CorpusPair corpus;
  for (int i = 0; i < 10000; ++i) {
    corpus.qa.push_back(
        qa_snippet(50000 + i, vocab_text(rng, 15 + static_cast<int>(rng.below(11)))));
  }
  for (int i = 0; i < 2000; ++i) {
    if (rng.below(100) < 30) {
      auto lines = split_lines(corpus.qa[rng.below(corpus.qa.size())].raw_text);
      std::string text;
      for (auto line : lines) {
        if (rng.below(100) < 20) {
          text += vocabulary()[rng.below(vocabulary().size())];
        } else {
          text += std::string(line);
        }
        text += "\n";
      }
      corpus.app.push_back(app_snippet(i, text));
    } else {
      corpus.app.push_back(app_snippet(i, vocab_text(rng, 15 + static_cast<int>(rng.below(11)))));
    }
  }

  CloneConfig config = base_config();
  auto start = std::chrono::steady_clock::now();
  auto prepared = prepare_corpora(corpus.qa, corpus.app, config);
  auto plan = plan_shards(prepared, config);
  ShardRunOptions options;
  options.workers = 4;
  auto result = run_sharded(prepared, plan, config, options);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  note("10000x2000 detection: " + std::to_string(result.pairs.size()) + " pairs in " +
       format_decimal(seconds, 1) + "s over " + std::to_string(plan.size()) + " units");
  if (!result.complete() || seconds >= 600.0) return false;

  // pruning is lossless: subsampled corpora against the oracle
  CorpusPair sample;
  sample.qa.assign(corpus.qa.begin(), corpus.qa.begin() + 150);
  sample.app.assign(corpus.app.begin(), corpus.app.begin() + 150);
  auto sample_prepared = prepare_corpora(sample.qa, sample.app, config);
  auto expected = oracle_detect(sample, config, 70, 100);
  auto pruned = detect_cross(sample_prepared, config);
  CloneConfig no_pruning = config;
  no_pruning.enable_pruning = false;
  auto unpruned = detect_cross(sample_prepared, no_pruning);
  if (pruned != expected || unpruned != expected) {
    note("pruned/unpruned results diverge from the oracle on the subsample");
    return false;
  }
  note("pruning changed nothing on the 150x150 subsample vs the oracle");
  return true;
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion(1, "oracle equivalence on 20 random corpus pairs", criterion_oracle_equivalence);
  criterion(2, "shard/monolith equivalence for shard sizes {1,7,50,2000}",
            criterion_shard_equivalence);
  criterion(3, "defaults fidelity: similarity >= 0.70, min lines 10", criterion_defaults);
  criterion(4, "extraction fidelity on a 1000-row synthetic dump", criterion_extraction);
  criterion(5, "provenance dating on five scripted history fixtures",
            criterion_provenance_fixtures);
  criterion(6, "direction narrative cases and overlap arithmetic", criterion_direction_overlap);
  criterion(7, "migration fixture: 490-day chain, strict ordering", criterion_migration);
  criterion(8, "lifespan fixture: releases 3-8 with a mid-history file move", criterion_lifespan);
  criterion(9, "end-to-end golden run, byte-identical across runs and widths",
            criterion_golden_run);
  criterion(10, "performance smoke: 10000x2000 with lossless pruning", criterion_performance);

  g_corpora.clear();
  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criteria failed\n", g_failures);
  return 1;
}
