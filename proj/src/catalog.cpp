#include "subspec/catalog.hpp"

#include <fstream>
#include <sstream>

#include "subspec/errors.hpp"

namespace subspec {

const std::vector<CatalogEntry>& catalog_entries() {
  static const std::vector<CatalogEntry> entries = {
      {"thue-morse", "0 -> 0 1\n1 -> 1 0\n", "constant length 2, bijective"},
      {"fibonacci", "0 -> 0 1\n1 -> 0\n", "Pisot, golden mean"},
      {"rudin-shapiro", "0 -> 0 1\n1 -> 0 3\n2 -> 2 3\n3 -> 2 1\n", "constant length 2 on four letters"},
      {"period-doubling", "0 -> 0 1\n1 -> 0 0\n", "coincidence at k = 1"},
      {"bijective-3", "0 -> 0 1 0\n1 -> 1 2 2\n2 -> 2 0 1\n", "bijective, non-Abelian columns"},
      {"non-pisot-0111", "0 -> 0 1 1 1\n1 -> 0\n", "theta = (1+sqrt 13)/2, not Pisot"},
      {"family-01k", "0 -> 0 1 1 1 1\n1 -> 0\n", "0 -> 0 1^k, 1 -> 0; parameter ?k=N, default 4"},
  };
  return entries;
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> out;
  for (const auto& e : catalog_entries()) out.push_back(e.name);
  return out;
}

Substitution family_01k(int k) {
  if (k < 1 || k > 1000) throw InputError("family-01k: k must lie in 1..1000");
  std::string text = "0 -> 0";
  for (int i = 0; i < k; ++i) text += " 1";
  text += "\n1 -> 0\n";
  return parse_substitution(text);
}

Substitution catalog_lookup(const std::string& name) {
  const auto q = name.find('?');
  const std::string base = name.substr(0, q);
  if (q != std::string::npos) {
    const std::string param = name.substr(q + 1);
    if (base != "family-01k" || param.rfind("k=", 0) != 0)
      throw InputError("unknown catalog parameter in '" + name + "'");
    int k = 0;
    std::size_t used = 0;
    try {
      k = std::stoi(param.substr(2), &used);
    } catch (const std::exception&) {
      throw InputError("family-01k: k is not an integer in '" + name + "'");
    }
    if (used != param.size() - 2) throw InputError("family-01k: k is not an integer in '" + name + "'");
    return family_01k(k);
  }
  for (const auto& e : catalog_entries())
    if (e.name == base) return parse_substitution(e.rules);
  throw InputError("unknown catalog entry '" + name + "'");
}

Substitution load_substitution(const std::string& source) {
  if (source.rfind("catalog:", 0) == 0) return catalog_lookup(source.substr(8));
  std::ifstream in(source);
  if (!in) throw InputError("cannot read rule file '" + source + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_substitution(text.str());
}

}  // namespace subspec
