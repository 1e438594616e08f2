#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace codeprov {

/// Normalization depth for clone comparison. kType1 strips comments,
/// collapses whitespace and splits statements; kType2 additionally
/// abstracts identifiers and literals so renamed code compares equal.
enum class NormLevel { kType1, kType2 };

/// Turns raw source text into the line sequence used for comparison.
/// Comments are removed, whitespace runs collapse to one space, empty
/// lines are dropped, and each `;`/`{`/`}`-terminated statement becomes
/// its own line. A string literal left open at the end of a line makes
/// the rest of that line pass through with whitespace collapsing only.
std::vector<std::string> normalize(std::string_view raw_text, NormLevel level);

/// A comment in the source, with 1-based inclusive line bounds.
struct CommentSpan {
  int first_line = 0;
  int last_line = 0;
  std::string text;
};

/// All line and block comments, in document order.
std::vector<CommentSpan> collect_comments(std::string_view raw_text);

/// A brace-balanced region, 1-based inclusive lines. depth 1 is a
/// top-level block (a C function or Java class body), depth 2 a block
/// nested once (a Java method body).
struct BlockSpan {
  int first_line = 0;
  int last_line = 0;
  int depth = 0;
};

/// Balanced brace regions outside comments and string literals,
/// sorted by (first_line, -last_line). Unbalanced braces are ignored.
std::vector<BlockSpan> find_brace_blocks(std::string_view raw_text);

std::string join_lines(const std::vector<std::string>& lines);

}  // namespace codeprov
