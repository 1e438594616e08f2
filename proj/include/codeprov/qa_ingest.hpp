#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "codeprov/snippet.hpp"
#include "codeprov/timeutil.hpp"

namespace codeprov {

/// One Q&A post as read from the dump.
struct Post {
  int64_t id = 0;
  Timestamp creation_date;
  std::vector<std::string> tags;  // lowercase, sorted, unique
  std::string body_html;
  std::optional<int> post_type;      // PostTypeId when present (1 question, 2 answer)
  std::optional<int64_t> parent_id;  // ParentId for answers
  std::optional<std::string> owner;  // display name, kept so reviewers can compare
                                     // poster names against commit authors

  bool operator==(const Post&) const = default;
};

struct DumpStats {
  int64_t rows_seen = 0;
  int64_t posts_emitted = 0;
  int64_t skipped_missing_field = 0;
  int64_t skipped_bad_date = 0;
};

/// Streams posts out of a Stack Exchange Posts.xml dump in one forward
/// pass. Only the current row element is buffered, so memory stays flat
/// regardless of dump size. Malformed XML raises FatalError with the
/// byte offset; rows lacking Id/CreationDate/Body are counted and skipped.
class PostReader {
 public:
  explicit PostReader(std::istream& in) : in_(in) {}

  std::optional<Post> next();

  const DumpStats& stats() const { return stats_; }
  size_t buffer_high_water() const { return high_water_; }

 private:
  bool ensure(size_t need);
  void note_high_water();

  std::istream& in_;
  std::string buf_;
  size_t pos_ = 0;          // scan cursor within buf_
  size_t consumed_ = 0;     // absolute offset of buf_[0]
  size_t high_water_ = 0;
  bool eof_ = false;
  DumpStats stats_;
};

std::vector<Post> parse_dump(std::istream& in, DumpStats* stats = nullptr);

/// Keeps posts whose tags intersect required_tags and whose creation date
/// is at or before date_ceiling. With inherit_question_tags set, an answer
/// with no tags of its own takes the tags of an already-seen matching
/// question; otherwise every post is matched on its own tag set.
std::vector<Post> filter_posts(const std::vector<Post>& posts,
                               const std::vector<std::string>& required_tags,
                               std::optional<Timestamp> date_ceiling,
                               bool inherit_question_tags = false);

/// Incremental form of the inheritance rule for streaming use.
class TagInheritance {
 public:
  void remember_question(const Post& post);
  std::optional<std::vector<std::string>> tags_for_answer(const Post& post) const;

 private:
  std::unordered_map<int64_t, std::vector<std::string>> question_tags_;
};

bool tags_intersect(const std::vector<std::string>& tags,
                    const std::vector<std::string>& required);

/// A pre/code block of a post body, already decoded to source text.
struct ExtractedBlock {
  int block_index = 0;
  std::string text;
};

/// All pre/code blocks in document order. Inline code spans are ignored.
std::vector<ExtractedBlock> extract_code_blocks(std::string_view body_html);

/// Blocks that clear min_lines (non-empty lines after trailing-whitespace
/// trim) become snippets; block_index still counts every block.
std::vector<CodeSnippet> extract_snippets(const Post& post, int min_lines);

std::string decode_html_entities(std::string_view text);
std::string xml_escape_attr(std::string_view text);
int count_content_lines(std::string_view text);

/// Renders the post as a dump row element (the inverse of parsing).
std::string serialize_post_row(const Post& post);

/// Strips tags and decodes entities; used to search post prose.
std::string html_to_text(std::string_view html);

}  // namespace codeprov
