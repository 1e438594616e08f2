#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codeprov/repo_ingest.hpp"

namespace codeprov {

inline constexpr const char* kUnknownLicense = "UNKNOWN";

enum class LicenseScope { kFileHeader, kProjectRoot, kPostBody };

std::string to_string(LicenseScope scope);

struct LicenseFinding {
  std::string license_id;
  double confidence = 0.0;  // matched phrases / catalog phrases
  std::vector<std::pair<LineRange, std::string>> evidence;
  LicenseScope scope = LicenseScope::kFileHeader;

  bool unknown() const { return license_id == kUnknownLicense; }
};

struct LicenseSpec {
  std::string id;
  std::string family;
  std::string kind;  // restrictive | permissive | share-alike
  std::string version;
  std::vector<std::string> phrases;  // normalized token sequences
  std::string canonical_notice;
  std::string canonical_url;
};

/// Phrase-fingerprint catalog, loaded from a JSON data file so new
/// licenses need no code change.
class LicenseCatalog {
 public:
  static LicenseCatalog load(const std::filesystem::path& path);
  static LicenseCatalog from_json(std::string_view json_text);

  const std::vector<LicenseSpec>& licenses() const { return licenses_; }
  const LicenseSpec* find(std::string_view license_id) const;

  /// Phrase matching over a token stream; one finding per license whose
  /// confidence reaches 0.5, sorted by confidence descending. No match
  /// yields a single UNKNOWN finding.
  std::vector<LicenseFinding> identify(std::string_view text, LicenseScope scope) const;

  /// True iff any finding is a CC-BY-SA license of version >= 3.0.
  bool satisfies_sharealike(const std::vector<LicenseFinding>& findings) const;

 private:
  std::vector<LicenseSpec> licenses_;
};

/// Equality on catalog identifiers; UNKNOWN never attests consistency,
/// not even with itself.
bool same_license(std::string_view a, std::string_view b);

/// Numeric component-wise version comparison ("2.5" < "3.0" < "4.0").
int compare_versions(std::string_view a, std::string_view b);

/// Lowercased alphanumeric tokens (dots kept inside tokens) with the
/// 1-based line each came from.
struct TextToken {
  std::string text;
  int line = 0;
};
std::vector<TextToken> tokenize_for_matching(std::string_view text);

}  // namespace codeprov
