#pragma once

#include <string>
#include <vector>

namespace gstruct {

// One verified predicate: what was checked, how far off it was and the bound it was held to.
struct CheckEntry {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  double threshold = 0.0;
  std::string location;
};

struct Report {
  std::string title;
  std::vector<CheckEntry> entries;
  std::vector<std::string> notes;

  // Adds an entry that passes iff residual <= threshold.
  CheckEntry& check(std::string name, double residual, double threshold, std::string location = {});
  // Adds an entry with an externally decided verdict.
  CheckEntry& flag(std::string name, bool pass, double residual = 0.0, double threshold = 0.0,
                   std::string location = {});
  void note(std::string text) { notes.push_back(std::move(text)); }
  void merge(const Report& other, const std::string& prefix = {});

  bool passed() const;
  double max_residual() const;
  const CheckEntry* find(const std::string& name) const;
  const CheckEntry* worst() const;
};

}  // namespace gstruct
