#include "codeprov/qa_ingest.hpp"

#include <algorithm>
#include <cstdio>

#include "codeprov/textutil.hpp"

namespace codeprov {

namespace {

constexpr size_t kChunk = 64 * 1024;
constexpr size_t kMaxElement = 256 * 1024 * 1024;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '-' || c == ':' || c == '.';
}

std::optional<int64_t> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  int64_t v = 0;
  bool neg = false;
  size_t i = 0;
  if (s[0] == '-') {
    neg = true;
    i = 1;
    if (s.size() == 1) return std::nullopt;
  }
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    v = v * 10 + (s[i] - '0');
  }
  return neg ? -v : v;
}

// Splits "<java><android>" or "|java|android|" into lowercase tags.
std::vector<std::string> parse_tags(std::string_view value) {
  std::vector<std::string> tags;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tags.push_back(to_lower_ascii(current));
      current.clear();
    }
  };
  for (char c : value) {
    if (c == '<' || c == '>' || c == '|') {
      flush();
    } else {
      current.push_back(c);
    }
  }
  flush();
  std::sort(tags.begin(), tags.end());
  tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
  return tags;
}

}  // namespace

std::string decode_html_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    if (text[i] != '&') {
      out.push_back(text[i++]);
      continue;
    }
    size_t semi = text.find(';', i + 1);
    if (semi == std::string_view::npos || semi > i + 12) {
      out.push_back(text[i++]);
      continue;
    }
    std::string_view name = text.substr(i + 1, semi - i - 1);
    if (name == "lt") {
      out.push_back('<');
    } else if (name == "gt") {
      out.push_back('>');
    } else if (name == "amp") {
      out.push_back('&');
    } else if (name == "quot") {
      out.push_back('"');
    } else if (name == "apos") {
      out.push_back('\'');
    } else if (name == "nbsp") {
      out.push_back(' ');
    } else if (!name.empty() && name[0] == '#') {
      int64_t code = -1;
      if (name.size() > 2 && (name[1] == 'x' || name[1] == 'X')) {
        code = 0;
        for (size_t k = 2; k < name.size(); ++k) {
          char c = name[k];
          int d;
          if (c >= '0' && c <= '9') d = c - '0';
          else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
          else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
          else { code = -1; break; }
          code = code * 16 + d;
        }
      } else if (name.size() > 1) {
        auto v = parse_int(name.substr(1));
        if (v) code = *v;
      }
      if (code < 0 || code > 0x10FFFF) {
        out.push_back(text[i++]);
        continue;
      }
      // UTF-8 encode
      uint32_t cp = static_cast<uint32_t>(code);
      if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
      } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
      } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
      } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
      }
    } else {
      // unknown entity passes through untouched
      out.push_back(text[i]);
      i += 1;
      continue;
    }
    i = semi + 1;
  }
  return out;
}

std::string xml_escape_attr(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      case '\n': out += "&#xA;"; break;
      case '\r': out += "&#xD;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

bool PostReader::ensure(size_t need) {
  while (!eof_ && buf_.size() < pos_ + need) {
    size_t old = buf_.size();
    buf_.resize(old + kChunk);
    in_.read(buf_.data() + old, kChunk);
    size_t got = static_cast<size_t>(in_.gcount());
    buf_.resize(old + got);
    if (got == 0) eof_ = true;
    note_high_water();
    if (buf_.size() > kMaxElement) {
      throw FatalError("malformed XML: element exceeds size limit at byte offset " +
                       std::to_string(consumed_ + pos_));
    }
  }
  return buf_.size() >= pos_ + need;
}

void PostReader::note_high_water() { high_water_ = std::max(high_water_, buf_.size()); }

std::optional<Post> PostReader::next() {
  for (;;) {
    // Drop consumed bytes so the buffer only holds the current element.
    if (pos_ > kChunk) {
      buf_.erase(0, pos_);
      consumed_ += pos_;
      pos_ = 0;
    }
    // find next tag
    while (ensure(1) && buf_[pos_] != '<') {
      ++pos_;
      if (pos_ > kChunk) {
        buf_.erase(0, pos_);
        consumed_ += pos_;
        pos_ = 0;
      }
    }
    if (!ensure(1)) return std::nullopt;  // clean end of stream
    size_t tag_offset = consumed_ + pos_;
    if (!ensure(2)) throw FatalError("malformed XML: truncated tag at byte offset " +
                                     std::to_string(tag_offset));
    char after = buf_[pos_ + 1];
    if (after == '?' || after == '!' || after == '/') {
      // prolog, comment/doctype, or closing tag: skip to '>'
      size_t p = pos_ + 2;
      for (;;) {
        if (!ensure(p - pos_ + 1)) {
          throw FatalError("malformed XML: unterminated tag at byte offset " +
                           std::to_string(tag_offset));
        }
        if (buf_[p] == '>') break;
        ++p;
      }
      pos_ = p + 1;
      continue;
    }
    // element name
    size_t p = pos_ + 1;
    while (ensure(p - pos_ + 1) && is_name_char(buf_[p])) ++p;
    if (p == pos_ + 1) {
      throw FatalError("malformed XML: bad element name at byte offset " +
                       std::to_string(tag_offset));
    }
    std::string name = buf_.substr(pos_ + 1, p - pos_ - 1);

    // attributes
    std::vector<std::pair<std::string, std::string>> attrs;
    bool self_closed = false;
    for (;;) {
      while (ensure(p - pos_ + 1) && is_space(buf_[p])) ++p;
      if (!ensure(p - pos_ + 1)) {
        throw FatalError("malformed XML: unterminated element at byte offset " +
                         std::to_string(tag_offset));
      }
      char c = buf_[p];
      if (c == '>') {
        ++p;
        break;
      }
      if (c == '/') {
        if (!ensure(p - pos_ + 2) || buf_[p + 1] != '>') {
          throw FatalError("malformed XML: expected '/>' at byte offset " +
                           std::to_string(consumed_ + p));
        }
        self_closed = true;
        p += 2;
        break;
      }
      size_t name_begin = p;
      while (ensure(p - pos_ + 1) && is_name_char(buf_[p])) ++p;
      if (p == name_begin || !ensure(p - pos_ + 1)) {
        throw FatalError("malformed XML: bad attribute at byte offset " +
                         std::to_string(consumed_ + name_begin));
      }
      std::string attr_name = buf_.substr(name_begin, p - name_begin);
      while (ensure(p - pos_ + 1) && is_space(buf_[p])) ++p;
      if (!ensure(p - pos_ + 1) || buf_[p] != '=') {
        throw FatalError("malformed XML: expected '=' at byte offset " +
                         std::to_string(consumed_ + p));
      }
      ++p;
      while (ensure(p - pos_ + 1) && is_space(buf_[p])) ++p;
      if (!ensure(p - pos_ + 1) || (buf_[p] != '"' && buf_[p] != '\'')) {
        throw FatalError("malformed XML: expected quoted value at byte offset " +
                         std::to_string(consumed_ + p));
      }
      char quote = buf_[p];
      ++p;
      size_t value_begin = p;
      for (;;) {
        if (!ensure(p - pos_ + 1)) {
          throw FatalError("malformed XML: unterminated attribute value at byte offset " +
                           std::to_string(consumed_ + value_begin - 1));
        }
        if (buf_[p] == quote) break;
        ++p;
      }
      attrs.emplace_back(std::move(attr_name),
                         decode_html_entities(std::string_view(buf_).substr(
                             value_begin, p - value_begin)));
      ++p;
    }
    pos_ = p;
    (void)self_closed;

    if (name != "row") continue;
    ++stats_.rows_seen;

    auto find_attr = [&](std::string_view key) -> const std::string* {
      for (const auto& [k, v] : attrs) {
        if (k == key) return &v;
      }
      return nullptr;
    };
    const std::string* id = find_attr("Id");
    const std::string* date = find_attr("CreationDate");
    const std::string* body = find_attr("Body");
    if (!id || !date || !body) {
      ++stats_.skipped_missing_field;
      continue;
    }
    auto id_value = parse_int(*id);
    if (!id_value || *id_value <= 0) {
      ++stats_.skipped_missing_field;
      continue;
    }
    auto ts = parse_timestamp(*date);
    if (!ts) {
      ++stats_.skipped_bad_date;
      continue;
    }
    Post post;
    post.id = *id_value;
    post.creation_date = *ts;
    post.body_html = *body;
    if (const std::string* tags = find_attr("Tags")) post.tags = parse_tags(*tags);
    if (const std::string* pt = find_attr("PostTypeId")) {
      if (auto v = parse_int(*pt)) post.post_type = static_cast<int>(*v);
    }
    if (const std::string* parent = find_attr("ParentId")) {
      if (auto v = parse_int(*parent)) post.parent_id = *v;
    }
    if (const std::string* owner = find_attr("OwnerDisplayName")) {
      post.owner = *owner;
    } else if (const std::string* owner_id = find_attr("OwnerUserId")) {
      post.owner = "user:" + *owner_id;
    }
    ++stats_.posts_emitted;
    return post;
  }
}

std::vector<Post> parse_dump(std::istream& in, DumpStats* stats) {
  PostReader reader(in);
  std::vector<Post> posts;
  while (auto post = reader.next()) posts.push_back(std::move(*post));
  if (stats) *stats = reader.stats();
  return posts;
}

bool tags_intersect(const std::vector<std::string>& tags,
                    const std::vector<std::string>& required) {
  for (const auto& t : tags) {
    for (const auto& r : required) {
      if (t == r) return true;
    }
  }
  return false;
}

void TagInheritance::remember_question(const Post& post) {
  if (post.post_type.value_or(1) == 1) question_tags_[post.id] = post.tags;
}

std::optional<std::vector<std::string>> TagInheritance::tags_for_answer(const Post& post) const {
  if (!post.tags.empty() || !post.parent_id) return std::nullopt;
  auto it = question_tags_.find(*post.parent_id);
  if (it == question_tags_.end()) return std::nullopt;
  return it->second;
}

std::vector<Post> filter_posts(const std::vector<Post>& posts,
                               const std::vector<std::string>& required_tags,
                               std::optional<Timestamp> date_ceiling,
                               bool inherit_question_tags) {
  if (required_tags.empty()) throw std::invalid_argument("filter_posts: required_tags empty");
  std::vector<std::string> required;
  for (const auto& t : required_tags) required.push_back(to_lower_ascii(t));

  std::vector<Post> kept;
  TagInheritance inheritance;
  for (const Post& post : posts) {
    if (date_ceiling && post.creation_date > *date_ceiling) continue;
    std::vector<std::string> effective = post.tags;
    if (inherit_question_tags) {
      if (auto inherited = inheritance.tags_for_answer(post)) effective = std::move(*inherited);
    }
    if (tags_intersect(effective, required)) {
      if (inherit_question_tags) inheritance.remember_question(post);
      Post copy = post;
      copy.tags = std::move(effective);
      kept.push_back(std::move(copy));
    }
  }
  return kept;
}

namespace {

// Case-insensitive match of `token` at text[pos].
bool tag_at(std::string_view text, size_t pos, std::string_view token) {
  if (pos + token.size() > text.size()) return false;
  for (size_t i = 0; i < token.size(); ++i) {
    char a = text[pos + i];
    if (a >= 'A' && a <= 'Z') a = static_cast<char>(a - 'A' + 'a');
    if (a != token[i]) return false;
  }
  return true;
}

// Consumes "<name ...>" starting at pos; returns one past '>' or npos.
size_t skip_open_tag(std::string_view text, size_t pos, std::string_view name) {
  if (!tag_at(text, pos, "<")) return std::string_view::npos;
  if (!tag_at(text, pos + 1, name)) return std::string_view::npos;
  size_t p = pos + 1 + name.size();
  if (p < text.size() && (is_name_char(text[p]))) return std::string_view::npos;  // longer name
  size_t close = text.find('>', p);
  if (close == std::string_view::npos) return std::string_view::npos;
  return close + 1;
}

size_t skip_whitespace(std::string_view text, size_t pos) {
  while (pos < text.size() && is_space(text[pos])) ++pos;
  return pos;
}

}  // namespace

std::vector<ExtractedBlock> extract_code_blocks(std::string_view body_html) {
  std::vector<ExtractedBlock> blocks;
  int block_index = 0;
  size_t i = 0;
  const size_t n = body_html.size();
  while (i < n) {
    size_t lt = body_html.find('<', i);
    if (lt == std::string_view::npos) break;
    size_t after_pre = skip_open_tag(body_html, lt, "pre");
    if (after_pre == std::string_view::npos) {
      i = lt + 1;
      continue;
    }
    size_t code_start = skip_whitespace(body_html, after_pre);
    size_t after_code = skip_open_tag(body_html, code_start, "code");
    if (after_code == std::string_view::npos) {
      i = lt + 1;
      continue;
    }
    // earliest "</code>" followed (modulo whitespace) by "</pre>"
    size_t scan = after_code;
    size_t content_end = std::string_view::npos;
    size_t resume = std::string_view::npos;
    while (scan < n) {
      size_t close = body_html.find('<', scan);
      if (close == std::string_view::npos) break;
      if (tag_at(body_html, close, "</code>")) {
        size_t after = skip_whitespace(body_html, close + 7);
        if (tag_at(body_html, after, "</pre>")) {
          content_end = close;
          resume = after + 6;
          break;
        }
      }
      scan = close + 1;
    }
    if (content_end == std::string_view::npos) {
      i = lt + 1;
      continue;
    }
    ExtractedBlock block;
    block.block_index = block_index++;
    block.text = decode_html_entities(body_html.substr(after_code, content_end - after_code));
    blocks.push_back(std::move(block));
    i = resume;
  }
  return blocks;
}

int count_content_lines(std::string_view text) {
  int count = 0;
  for (std::string_view line : split_lines(text)) {
    if (!trim_right(line).empty()) ++count;
  }
  return count;
}

std::string make_qa_snippet_id(int64_t post_id, int block_index) {
  return "qa-" + std::to_string(post_id) + "-" + std::to_string(block_index);
}

std::vector<CodeSnippet> extract_snippets(const Post& post, int min_lines) {
  if (min_lines < 1) throw std::invalid_argument("extract_snippets: min_lines must be >= 1");
  std::vector<CodeSnippet> snippets;
  for (ExtractedBlock& block : extract_code_blocks(post.body_html)) {
    int lines = count_content_lines(block.text);
    if (lines < min_lines) continue;
    CodeSnippet snippet;
    snippet.snippet_id = make_qa_snippet_id(post.id, block.block_index);
    snippet.origin = QaPostOrigin{post.id, block.block_index, post.post_type};
    snippet.raw_text = std::move(block.text);
    snippet.created_at = post.creation_date;
    snippet.line_count = lines;
    snippets.push_back(std::move(snippet));
  }
  return snippets;
}

std::string serialize_post_row(const Post& post) {
  std::string row = "  <row Id=\"" + std::to_string(post.id) + "\"";
  if (post.post_type) row += " PostTypeId=\"" + std::to_string(*post.post_type) + "\"";
  if (post.parent_id) row += " ParentId=\"" + std::to_string(*post.parent_id) + "\"";
  if (post.owner) row += " OwnerDisplayName=\"" + xml_escape_attr(*post.owner) + "\"";
  row += " CreationDate=\"" + format_timestamp(post.creation_date) + "\"";
  row += " Body=\"" + xml_escape_attr(post.body_html) + "\"";
  if (!post.tags.empty()) {
    std::string tags;
    for (const auto& t : post.tags) tags += "<" + t + ">";
    row += " Tags=\"" + xml_escape_attr(tags) + "\"";
  }
  row += " />";
  return row;
}

std::string html_to_text(std::string_view html) {
  std::string no_tags;
  no_tags.reserve(html.size());
  bool in_tag = false;
  for (char c : html) {
    if (c == '<') {
      in_tag = true;
      no_tags.push_back(' ');
    } else if (c == '>') {
      in_tag = false;
    } else if (!in_tag) {
      no_tags.push_back(c);
    }
  }
  return decode_html_entities(no_tags);
}

}  // namespace codeprov
