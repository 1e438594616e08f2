#include "codeprov/normalize.hpp"

#include <algorithm>
#include <unordered_set>

#include "codeprov/textutil.hpp"

namespace codeprov {

namespace {

constexpr size_t kNpos = std::string::npos;

struct Literal {
  size_t begin = 0;
  size_t end = 0;  // one past the closing quote
  char kind = '"';
};

struct ScannedLine {
  std::string code;                 // line text with comments removed
  std::vector<Literal> literals;    // terminated string/char literals in `code`
  std::vector<size_t> breaks;       // positions in `code` after a `;`/`{`/`}`
  size_t degraded_from = kNpos;     // unterminated literal starts here
};

struct BraceEvent {
  char brace;
  int line;  // 1-based
};

struct ScanResult {
  std::vector<ScannedLine> lines;
  std::vector<CommentSpan> comments;
  std::vector<BraceEvent> braces;
};

ScanResult scan_source(std::string_view raw) {
  ScanResult result;
  auto raw_lines = split_lines(raw);
  result.lines.resize(raw_lines.size());

  bool in_block_comment = false;
  int comment_first_line = 0;
  std::string comment_text;

  for (size_t li = 0; li < raw_lines.size(); ++li) {
    std::string_view line = raw_lines[li];
    ScannedLine& out = result.lines[li];
    const int line_no = static_cast<int>(li) + 1;
    size_t i = 0;
    const size_t n = line.size();

    if (in_block_comment) {
      size_t close = line.find("*/");
      if (close == std::string_view::npos) {
        comment_text.append(line);
        comment_text.push_back('\n');
        continue;
      }
      comment_text.append(line.substr(0, close));
      result.comments.push_back({comment_first_line, line_no, comment_text});
      comment_text.clear();
      in_block_comment = false;
      i = close + 2;
      out.code.push_back(' ');
    }

    while (i < n) {
      char c = line[i];
      if (c == '/' && i + 1 < n && line[i + 1] == '/') {
        result.comments.push_back({line_no, line_no, std::string(line.substr(i + 2))});
        out.code.push_back(' ');
        break;
      }
      if (c == '/' && i + 1 < n && line[i + 1] == '*') {
        size_t close = line.find("*/", i + 2);
        if (close == std::string_view::npos) {
          in_block_comment = true;
          comment_first_line = line_no;
          comment_text.assign(line.substr(i + 2));
          comment_text.push_back('\n');
          break;
        }
        result.comments.push_back(
            {line_no, line_no, std::string(line.substr(i + 2, close - i - 2))});
        i = close + 2;
        // a removed comment still separates tokens
        out.code.push_back(' ');
        continue;
      }
      if (c == '"' || c == '\'') {
        size_t begin = out.code.size();
        out.code.push_back(c);
        size_t j = i + 1;
        bool terminated = false;
        while (j < n) {
          if (line[j] == '\\' && j + 1 < n) {
            out.code.push_back(line[j]);
            out.code.push_back(line[j + 1]);
            j += 2;
            continue;
          }
          out.code.push_back(line[j]);
          if (line[j] == c) {
            ++j;
            terminated = true;
            break;
          }
          ++j;
        }
        if (terminated) {
          out.literals.push_back({begin, out.code.size(), c});
          i = j;
          continue;
        }
        out.degraded_from = begin;
        break;
      }
      out.code.push_back(c);
      if (c == ';' || c == '{' || c == '}') {
        out.breaks.push_back(out.code.size());
        if (c != ';') result.braces.push_back({c, line_no});
      }
      ++i;
    }
  }
  if (in_block_comment) {
    // comment runs to end of input
    result.comments.push_back(
        {comment_first_line, static_cast<int>(raw_lines.size()), comment_text});
  }
  return result;
}

const std::unordered_set<std::string_view>& keyword_set() {
  static const std::unordered_set<std::string_view> kKeywords = {
      // Java
      "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
      "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally",
      "float", "for", "goto", "if", "implements", "import", "instanceof", "int", "interface",
      "long", "native", "new", "package", "private", "protected", "public", "return", "short",
      "static", "strictfp", "super", "switch", "synchronized", "this", "throw", "throws",
      "transient", "try", "void", "volatile", "while", "var", "record", "yield", "true", "false",
      "null",
      // C / C++ additions
      "auto", "bool", "constexpr", "delete", "extern", "friend", "inline", "namespace", "nullptr",
      "operator", "register", "signed", "sizeof", "struct", "template", "typedef", "typename",
      "union", "unsigned", "using", "virtual"};
  return kKeywords;
}

bool is_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' || c >= 0x80;
}

bool is_ident_char(unsigned char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9');
}

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

// Rewrites one statement segment at Type-2 level: identifiers become `id`,
// numbers `0`, string literals `"s"`, char literals `'c'`. Keywords and
// punctuation pass through; the degraded tail, if any, is copied verbatim.
std::string abstract_segment(std::string_view seg, const std::vector<Literal>& literals,
                             size_t seg_begin, size_t degraded_from) {
  std::string out;
  out.reserve(seg.size());
  size_t p = 0;
  size_t lit_idx = 0;
  while (lit_idx < literals.size() && literals[lit_idx].end <= seg_begin) ++lit_idx;
  const size_t n = seg.size();
  while (p < n) {
    size_t abs = seg_begin + p;
    if (degraded_from != kNpos && abs >= degraded_from) {
      out.append(seg.substr(p));
      break;
    }
    if (lit_idx < literals.size() && abs == literals[lit_idx].begin) {
      out += literals[lit_idx].kind == '"' ? "\"s\"" : "'c'";
      p = literals[lit_idx].end - seg_begin;
      ++lit_idx;
      continue;
    }
    unsigned char c = static_cast<unsigned char>(seg[p]);
    // keep replaced tokens lexically separate from what precedes them
    auto pad = [&](bool digit_start) {
      if (out.empty()) return;
      unsigned char last = static_cast<unsigned char>(out.back());
      if (is_ident_char(last) || (digit_start && last == '.')) out.push_back(' ');
    };
    if (is_ident_start(c)) {
      size_t start = p;
      while (p < n && is_ident_char(static_cast<unsigned char>(seg[p]))) ++p;
      std::string_view word = seg.substr(start, p - start);
      if (keyword_set().count(word)) {
        out.append(word);
      } else {
        pad(false);
        out += "id";
      }
      continue;
    }
    if (is_digit(c) || (c == '.' && p + 1 < n && is_digit(static_cast<unsigned char>(seg[p + 1])))) {
      while (p < n) {
        unsigned char d = static_cast<unsigned char>(seg[p]);
        if (is_ident_char(d) || d == '.') {
          char prev = seg[p];
          ++p;
          // exponent sign, as in 1e+5
          if ((prev == 'e' || prev == 'E' || prev == 'p' || prev == 'P') && p < n &&
              (seg[p] == '+' || seg[p] == '-')) {
            ++p;
          }
          continue;
        }
        break;
      }
      pad(true);
      out += "0";
      continue;
    }
    out.push_back(static_cast<char>(c));
    ++p;
  }
  return out;
}

}  // namespace

std::vector<std::string> normalize(std::string_view raw_text, NormLevel level) {
  ScanResult scanned = scan_source(raw_text);
  std::vector<std::string> result;
  for (const ScannedLine& line : scanned.lines) {
    size_t start = 0;
    std::vector<size_t> cuts = line.breaks;
    cuts.push_back(line.code.size());
    for (size_t cut : cuts) {
      if (cut < start) continue;
      std::string_view seg(line.code.data() + start, cut - start);
      size_t seg_begin = start;
      start = cut;
      if (seg.empty()) continue;
      std::string piece;
      if (level == NormLevel::kType2) {
        piece = collapse_whitespace(
            abstract_segment(seg, line.literals, seg_begin, line.degraded_from));
      } else {
        piece = collapse_whitespace(seg);
      }
      if (!piece.empty()) result.push_back(std::move(piece));
    }
  }
  return result;
}

std::vector<CommentSpan> collect_comments(std::string_view raw_text) {
  return scan_source(raw_text).comments;
}

std::vector<BlockSpan> find_brace_blocks(std::string_view raw_text) {
  ScanResult scanned = scan_source(raw_text);
  std::vector<BlockSpan> blocks;
  std::vector<std::pair<int, int>> stack;  // (line, depth)
  for (const BraceEvent& ev : scanned.braces) {
    if (ev.brace == '{') {
      stack.emplace_back(ev.line, static_cast<int>(stack.size()) + 1);
    } else if (!stack.empty()) {
      auto [open_line, depth] = stack.back();
      stack.pop_back();
      blocks.push_back({open_line, ev.line, depth});
    }
  }
  std::sort(blocks.begin(), blocks.end(), [](const BlockSpan& a, const BlockSpan& b) {
    if (a.first_line != b.first_line) return a.first_line < b.first_line;
    if (a.last_line != b.last_line) return a.last_line > b.last_line;
    return a.depth < b.depth;
  });
  return blocks;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out.push_back('\n');
  }
  return out;
}

}  // namespace codeprov
