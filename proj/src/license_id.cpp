#include "codeprov/license_id.hpp"

#include <algorithm>

#include <json.hpp>

#include "codeprov/textutil.hpp"

namespace codeprov {

using nlohmann::json;

std::string to_string(LicenseScope scope) {
  switch (scope) {
    case LicenseScope::kFileHeader: return "FILE_HEADER";
    case LicenseScope::kProjectRoot: return "PROJECT_ROOT";
    case LicenseScope::kPostBody: return "POST_BODY";
  }
  return "FILE_HEADER";
}

std::vector<TextToken> tokenize_for_matching(std::string_view text) {
  std::vector<TextToken> tokens;
  std::string current;
  int line = 1;
  int token_line = 1;
  auto flush = [&] {
    while (!current.empty() && current.front() == '.') current.erase(current.begin());
    while (!current.empty() && current.back() == '.') current.pop_back();
    if (!current.empty()) tokens.push_back({current, token_line});
    current.clear();
  };
  for (char c : text) {
    if (c == '\n') {
      flush();
      ++line;
      continue;
    }
    bool keep = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.';
    if (c >= 'A' && c <= 'Z') {
      c = static_cast<char>(c - 'A' + 'a');
      keep = true;
    }
    if (keep) {
      if (current.empty()) token_line = line;
      current.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

LicenseCatalog LicenseCatalog::load(const std::filesystem::path& path) {
  return from_json(read_file(path));
}

LicenseCatalog LicenseCatalog::from_json(std::string_view json_text) {
  LicenseCatalog catalog;
  json doc = json::parse(json_text);
  for (const auto& entry : doc.at("licenses")) {
    LicenseSpec spec;
    spec.id = entry.at("id").get<std::string>();
    spec.family = entry.at("family").get<std::string>();
    spec.kind = entry.at("kind").get<std::string>();
    spec.version = entry.value("version", "");
    for (const auto& p : entry.at("phrases")) spec.phrases.push_back(p.get<std::string>());
    spec.canonical_notice = entry.value("canonical_notice", "");
    spec.canonical_url = entry.value("canonical_url", "");
    if (spec.phrases.empty()) throw FatalError("catalog: license without phrases: " + spec.id);
    catalog.licenses_.push_back(std::move(spec));
  }
  return catalog;
}

const LicenseSpec* LicenseCatalog::find(std::string_view license_id) const {
  for (const auto& spec : licenses_) {
    if (spec.id == license_id) return &spec;
  }
  return nullptr;
}

namespace {

// First occurrence of `phrase` as a contiguous token run; nullopt if absent.
std::optional<LineRange> find_phrase(const std::vector<TextToken>& tokens,
                                     const std::vector<std::string>& phrase) {
  if (phrase.empty() || tokens.size() < phrase.size()) return std::nullopt;
  for (size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
    bool match = true;
    for (size_t j = 0; j < phrase.size(); ++j) {
      if (tokens[i + j].text != phrase[j]) {
        match = false;
        break;
      }
    }
    if (match) {
      return LineRange{tokens[i].line, tokens[i + phrase.size() - 1].line};
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<LicenseFinding> LicenseCatalog::identify(std::string_view text,
                                                     LicenseScope scope) const {
  std::vector<TextToken> tokens = tokenize_for_matching(text);
  std::vector<LicenseFinding> findings;
  for (const LicenseSpec& spec : licenses_) {
    LicenseFinding finding;
    finding.license_id = spec.id;
    finding.scope = scope;
    for (const std::string& phrase : spec.phrases) {
      std::vector<std::string> phrase_tokens;
      for (const auto& token : tokenize_for_matching(phrase)) phrase_tokens.push_back(token.text);
      if (auto range = find_phrase(tokens, phrase_tokens)) {
        finding.evidence.emplace_back(*range, phrase);
      }
    }
    finding.confidence =
        static_cast<double>(finding.evidence.size()) / static_cast<double>(spec.phrases.size());
    if (finding.confidence >= 0.5) findings.push_back(std::move(finding));
  }
  std::sort(findings.begin(), findings.end(), [](const LicenseFinding& a, const LicenseFinding& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.license_id < b.license_id;
  });
  if (findings.empty()) {
    LicenseFinding unknown;
    unknown.license_id = kUnknownLicense;
    unknown.confidence = 1.0;
    unknown.scope = scope;
    findings.push_back(std::move(unknown));
  }
  return findings;
}

int compare_versions(std::string_view a, std::string_view b) {
  auto parts = [](std::string_view v) {
    std::vector<int> out;
    int current = 0;
    bool any = false;
    for (char c : v) {
      if (c >= '0' && c <= '9') {
        current = current * 10 + (c - '0');
        any = true;
      } else if (any) {
        out.push_back(current);
        current = 0;
        any = false;
      }
    }
    if (any) out.push_back(current);
    return out;
  };
  std::vector<int> pa = parts(a), pb = parts(b);
  for (size_t i = 0; i < std::max(pa.size(), pb.size()); ++i) {
    int va = i < pa.size() ? pa[i] : 0;
    int vb = i < pb.size() ? pb[i] : 0;
    if (va != vb) return va < vb ? -1 : 1;
  }
  return 0;
}

bool LicenseCatalog::satisfies_sharealike(const std::vector<LicenseFinding>& findings) const {
  for (const LicenseFinding& finding : findings) {
    const LicenseSpec* spec = find(finding.license_id);
    if (!spec) continue;
    if (spec->family == "CC-BY-SA" && compare_versions(spec->version, "3.0") >= 0) return true;
  }
  return false;
}

bool same_license(std::string_view a, std::string_view b) {
  if (a == kUnknownLicense || b == kUnknownLicense) return false;
  return a == b;
}

}  // namespace codeprov
