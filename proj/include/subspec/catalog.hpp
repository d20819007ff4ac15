#pragma once

#include <string>
#include <vector>

#include "subspec/substitution.hpp"

namespace subspec {

struct CatalogEntry {
  std::string name;
  std::string rules;  // DSL text
  std::string note;
};

/// The seven built-ins, family-01k shown at its default k = 4.
const std::vector<CatalogEntry>& catalog_entries();
std::vector<std::string> catalog_names();

/// NAME or NAME?k=N (family-01k only). Unknown names raise InputError.
Substitution catalog_lookup(const std::string& name);
/// 0 -> 0 1^k, 1 -> 0.
Substitution family_01k(int k);

/// "catalog:NAME" or a path to a rule file.
Substitution load_substitution(const std::string& source);

}  // namespace subspec
