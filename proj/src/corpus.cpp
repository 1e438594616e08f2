#include "codeprov/corpus.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "codeprov/textutil.hpp"

namespace codeprov {

namespace fs = std::filesystem;
using nlohmann::json;

std::string make_app_snippet_id(const std::string& app_id, const std::string& path,
                                int block_index) {
  std::string safe;
  for (char c : app_id) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '.' || c == '_';
    safe.push_back(ok ? c : '_');
  }
  return "app-" + safe + "-" + hex64(fnv1a64(path), 8) + "-b" + std::to_string(block_index);
}

void write_corpus(const fs::path& dir, const std::vector<CodeSnippet>& snippets) {
  fs::create_directories(dir / "snippets");
  std::vector<const CodeSnippet*> ordered;
  ordered.reserve(snippets.size());
  for (const auto& s : snippets) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(),
            [](const CodeSnippet* a, const CodeSnippet* b) { return a->snippet_id < b->snippet_id; });

  std::string index;
  for (const CodeSnippet* s : ordered) {
    write_file(dir / "snippets" / (s->snippet_id + ".txt"), s->raw_text);
    std::string row = "{\"snippet_id\":\"" + json_escape(s->snippet_id) + "\"";
    if (s->is_qa()) {
      const QaPostOrigin& origin = s->qa();
      row += ",\"post_id\":" + std::to_string(origin.post_id);
      row += ",\"block_index\":" + std::to_string(origin.block_index);
      row += ",\"creation_date\":\"" + format_timestamp(*s->created_at) + "\"";
      row += ",\"line_count\":" + std::to_string(s->line_count);
      if (origin.post_type) row += ",\"post_type\":" + std::to_string(*origin.post_type);
    } else {
      const AppFileOrigin& origin = s->app();
      row += ",\"app_id\":\"" + json_escape(origin.app_id) + "\"";
      row += ",\"path\":\"" + json_escape(origin.path) + "\"";
      if (origin.release_id) row += ",\"release_id\":\"" + json_escape(*origin.release_id) + "\"";
      row += ",\"start_line\":" + std::to_string(origin.start_line);
      row += ",\"end_line\":" + std::to_string(origin.end_line);
      row += ",\"line_count\":" + std::to_string(s->line_count);
      if (s->created_at) row += ",\"creation_date\":\"" + format_timestamp(*s->created_at) + "\"";
    }
    row += "}\n";
    index += row;
  }
  write_file(dir / "index.jsonl", index);
}

std::vector<CodeSnippet> load_corpus(const fs::path& dir) {
  std::string index = read_file(dir / "index.jsonl");
  std::vector<CodeSnippet> snippets;
  for (std::string_view line : split_lines(index)) {
    if (trim(line).empty()) continue;
    json row = json::parse(line);
    CodeSnippet snippet;
    snippet.snippet_id = row.at("snippet_id").get<std::string>();
    snippet.line_count = row.value("line_count", 0);
    if (row.contains("post_id")) {
      QaPostOrigin origin;
      origin.post_id = row.at("post_id").get<int64_t>();
      origin.block_index = row.at("block_index").get<int>();
      if (row.contains("post_type")) origin.post_type = row.at("post_type").get<int>();
      snippet.origin = origin;
    } else {
      AppFileOrigin origin;
      origin.app_id = row.at("app_id").get<std::string>();
      origin.path = row.at("path").get<std::string>();
      if (row.contains("release_id")) origin.release_id = row.at("release_id").get<std::string>();
      origin.start_line = row.at("start_line").get<int>();
      origin.end_line = row.at("end_line").get<int>();
      snippet.origin = origin;
    }
    if (row.contains("creation_date")) {
      auto ts = parse_timestamp(row.at("creation_date").get<std::string>());
      if (!ts) throw FatalError("corpus index: bad creation_date for " + snippet.snippet_id);
      snippet.created_at = *ts;
    }
    snippet.raw_text = read_file(dir / "snippets" / (snippet.snippet_id + ".txt"));
    snippets.push_back(std::move(snippet));
  }
  return snippets;
}

void write_posts(const fs::path& dir, const std::vector<Post>& posts) {
  std::vector<const Post*> ordered;
  for (const auto& p : posts) ordered.push_back(&p);
  std::sort(ordered.begin(), ordered.end(), [](const Post* a, const Post* b) { return a->id < b->id; });
  std::string out;
  for (const Post* p : ordered) {
    std::string row = "{\"id\":" + std::to_string(p->id);
    row += ",\"creation_date\":\"" + format_timestamp(p->creation_date) + "\"";
    row += ",\"tags\":[";
    for (size_t i = 0; i < p->tags.size(); ++i) {
      if (i) row += ",";
      row += "\"" + json_escape(p->tags[i]) + "\"";
    }
    row += "]";
    if (p->post_type) row += ",\"post_type\":" + std::to_string(*p->post_type);
    if (p->parent_id) row += ",\"parent_id\":" + std::to_string(*p->parent_id);
    if (p->owner) row += ",\"owner\":\"" + json_escape(*p->owner) + "\"";
    row += ",\"body_html\":\"" + json_escape(p->body_html) + "\"}\n";
    out += row;
  }
  write_file(dir / "posts.jsonl", out);
}

std::vector<Post> load_posts(const fs::path& dir) {
  std::vector<Post> posts;
  fs::path path = dir / "posts.jsonl";
  if (!fs::exists(path)) return posts;
  std::string content = read_file(path);
  for (std::string_view line : split_lines(content)) {
    if (trim(line).empty()) continue;
    json row = json::parse(line);
    Post post;
    post.id = row.at("id").get<int64_t>();
    post.creation_date = *parse_timestamp(row.at("creation_date").get<std::string>());
    for (const auto& t : row.at("tags")) post.tags.push_back(t.get<std::string>());
    if (row.contains("post_type")) post.post_type = row.at("post_type").get<int>();
    if (row.contains("parent_id")) post.parent_id = row.at("parent_id").get<int64_t>();
    if (row.contains("owner")) post.owner = row.at("owner").get<std::string>();
    post.body_html = row.at("body_html").get<std::string>();
    posts.push_back(std::move(post));
  }
  return posts;
}

}  // namespace codeprov
