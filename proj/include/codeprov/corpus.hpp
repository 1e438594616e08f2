#pragma once

#include <filesystem>
#include <vector>

#include "codeprov/qa_ingest.hpp"
#include "codeprov/snippet.hpp"

namespace codeprov {

/// On-disk snippet corpus: one text file per snippet under snippets/,
/// plus a sidecar index.jsonl carrying the per-snippet metadata. Q&A
/// corpora also keep posts.jsonl with the bodies of contributing posts.
void write_corpus(const std::filesystem::path& dir, const std::vector<CodeSnippet>& snippets);
std::vector<CodeSnippet> load_corpus(const std::filesystem::path& dir);

void write_posts(const std::filesystem::path& dir, const std::vector<Post>& posts);
std::vector<Post> load_posts(const std::filesystem::path& dir);

}  // namespace codeprov
