#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "apidomain/codeparse/snapshot.hpp"
#include "apidomain/ingestion/types.hpp"
#include "apidomain/taxonomy/domain_map.hpp"

namespace apidomain {

struct LabelCoverage {
  std::size_t classified = 0;  // namespace occurrences mapped to a domain
  std::set<std::string> unresolved;

  void merge(const LabelCoverage& o) {
    classified += o.classified;
    unresolved.insert(o.unresolved.begin(), o.unresolved.end());
  }
};

struct IssueLabels {
  std::set<ApiDomain> domains;
  LabelCoverage coverage;
};

/// Domains of the APIs imported by the changed files that exist in
/// `file_apis`. Files absent from the index contribute nothing.
inline IssueLabels label_change(const std::vector<std::string>& change_files,
                                const FileApiIndex& file_apis, const DomainMap& map,
                                const std::set<std::string>& blocklist) {
  IssueLabels out;
  for (const auto& f : change_files) {
    auto it = file_apis.find(f);
    if (it == file_apis.end()) continue;
    for (const auto& api : it->second) {
      if (auto d = classify_namespace(api.ns, map, blocklist)) {
        out.domains.insert(*d);
        ++out.coverage.classified;
      } else {
        out.coverage.unresolved.insert(api.ns);
      }
    }
  }
  return out;
}

/// Label sets per issue number: the union over every linked change.
inline std::map<std::int64_t, IssueLabels> label_issues(const std::vector<IssueChangeLink>& links,
                                                        const std::vector<ChangeSet>& changes,
                                                        const FileApiIndex& file_apis,
                                                        const DomainMap& map,
                                                        const std::set<std::string>& blocklist) {
  std::map<std::int64_t, const ChangeSet*> by_number;
  for (const auto& c : changes) by_number[c.number] = &c;
  std::map<std::int64_t, IssueLabels> out;
  for (const auto& l : links) {
    auto it = by_number.find(l.change);
    if (it == by_number.end()) continue;
    auto labels = label_change(it->second->changed_file_paths, file_apis, map, blocklist);
    auto& acc = out[l.issue];
    acc.domains.insert(labels.domains.begin(), labels.domains.end());
    acc.coverage.merge(labels.coverage);
  }
  return out;
}

}  // namespace apidomain
