#include "codeprov/report.hpp"

#include <algorithm>

namespace codeprov {

std::string to_string(ViolationRule rule) {
  switch (rule) {
    case ViolationRule::kAppMissingShareAlikeFile: return "APP_MISSING_SHAREALIKE_FILE";
    case ViolationRule::kAppMissingShareAlikeProject: return "APP_MISSING_SHAREALIKE_PROJECT";
    case ViolationRule::kAppMissingAttribution: return "APP_MISSING_ATTRIBUTION";
    case ViolationRule::kPostMissingSourceLicense: return "POST_MISSING_SOURCE_LICENSE";
  }
  return "?";
}

std::optional<ViolationReport> check_app_side(const LicenseCatalog& catalog,
                                              const std::string& subject,
                                              const std::vector<LicenseFinding>& project_findings,
                                              const std::vector<LicenseFinding>& file_findings,
                                              bool attribution_link_present) {
  std::vector<ViolationRule> rules;
  if (!catalog.satisfies_sharealike(file_findings)) {
    rules.push_back(ViolationRule::kAppMissingShareAlikeFile);
  }
  if (!catalog.satisfies_sharealike(project_findings)) {
    rules.push_back(ViolationRule::kAppMissingShareAlikeProject);
  }
  if (!attribution_link_present) {
    rules.push_back(ViolationRule::kAppMissingAttribution);
  }
  if (rules.empty()) return std::nullopt;

  ViolationReport report;
  report.subject = subject;
  report.rules = std::move(rules);
  report.direction = Direction::kReuseFromQa;
  for (const auto& finding : file_findings) report.license_evidence.push_back(finding.license_id);
  for (const auto& finding : project_findings) {
    report.license_evidence.push_back(finding.license_id);
  }
  return report;
}

PostSideOutcome check_post_side(const std::string& subject, const std::string& source_license,
                                const std::vector<LicenseFinding>& post_findings) {
  PostSideOutcome outcome;
  if (source_license == kUnknownLicense) {
    outcome.indeterminate = true;
    return outcome;
  }
  for (const LicenseFinding& finding : post_findings) {
    if (finding.scope == LicenseScope::kPostBody && same_license(finding.license_id, source_license)) {
      return outcome;  // the post names the source license
    }
  }
  ViolationReport report;
  report.subject = subject;
  report.rules = {ViolationRule::kPostMissingSourceLicense};
  report.direction = Direction::kReuseToQa;
  for (const auto& finding : post_findings) report.license_evidence.push_back(finding.license_id);
  outcome.violation = std::move(report);
  return outcome;
}

}  // namespace codeprov
