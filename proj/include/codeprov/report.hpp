#pragma once

#include <optional>
#include <string>
#include <vector>

#include "codeprov/license_id.hpp"
#include "codeprov/provenance.hpp"

namespace codeprov {

enum class ViolationRule {
  kAppMissingShareAlikeFile,
  kAppMissingShareAlikeProject,
  kAppMissingAttribution,
  kPostMissingSourceLicense,
};

std::string to_string(ViolationRule rule);

/// All findings are labeled potential: the toolkit flags risks, it does
/// not judge them.
struct ViolationReport {
  std::string subject;  // "app_id:path" or "post:<id>" depending on direction
  std::vector<ViolationRule> rules;  // non-empty, sorted
  Direction direction = Direction::kAmbiguous;
  std::string pair_left;
  std::string pair_right;
  std::vector<std::string> license_evidence;  // findings backing the decision
  std::string provenance_ref;                 // dated snippet the direction came from
};

/// Explicit pass record so every resolved pair has exactly one outcome.
struct PassRecord {
  std::string subject;
  Direction direction = Direction::kAmbiguous;
  std::string pair_left;
  std::string pair_right;
  std::string note;  // "" or "INDETERMINATE" when the source license is unknown
};

/// The share-alike/attribution conditions for code that came from the
/// Q&A site: file license, project license, and a link back. Returns a
/// report listing every failed condition, or nothing when all pass.
std::optional<ViolationReport> check_app_side(const LicenseCatalog& catalog,
                                              const std::string& subject,
                                              const std::vector<LicenseFinding>& project_findings,
                                              const std::vector<LicenseFinding>& file_findings,
                                              bool attribution_link_present);

struct PostSideOutcome {
  std::optional<ViolationReport> violation;
  bool indeterminate = false;  // source license unknown: no claim either way
};

/// A post that took code from an app must name that app's license.
PostSideOutcome check_post_side(const std::string& subject, const std::string& source_license,
                                const std::vector<LicenseFinding>& post_findings);

}  // namespace codeprov
