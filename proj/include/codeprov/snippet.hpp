#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "codeprov/timeutil.hpp"

namespace codeprov {

/// Snippet extracted from a Q&A post body.
struct QaPostOrigin {
  int64_t post_id = 0;
  int block_index = 0;  // 0-based order of the code block within the post
  std::optional<int> post_type;
};

/// Snippet cut from an application source file.
struct AppFileOrigin {
  std::string app_id;
  std::string path;  // relative to the release tree
  int start_line = 1;
  int end_line = 0;  // 1-based inclusive
  std::optional<std::string> release_id;
};

/// A normalized unit of code from either corpus.
struct CodeSnippet {
  std::string snippet_id;
  std::variant<QaPostOrigin, AppFileOrigin> origin;
  std::string raw_text;
  std::optional<Timestamp> created_at;  // always present for QA origins
  int line_count = 0;

  bool is_qa() const { return std::holds_alternative<QaPostOrigin>(origin); }
  const QaPostOrigin& qa() const { return std::get<QaPostOrigin>(origin); }
  const AppFileOrigin& app() const { return std::get<AppFileOrigin>(origin); }
};

std::string make_qa_snippet_id(int64_t post_id, int block_index);
std::string make_app_snippet_id(const std::string& app_id, const std::string& path,
                                int block_index);

}  // namespace codeprov
