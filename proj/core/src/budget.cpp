#include "coarsetk/budget.hpp"

#include <cstdlib>

namespace coarsetk {

Budget Budget::from_env() { return from_env(Budget{}); }

Budget Budget::from_env(Budget base) {
  const char* env = std::getenv("COARSETK_BUDGET");
  if (!env || !*env) return base;
  return parse(env, base);
}

Budget Budget::parse(const std::string& text, Budget base) {
  Budget b = base;
  size_t pos = 0;
  bool keyed = text.find('=') != std::string::npos;
  if (!keyed) {
    i64 v = std::stoll(text);
    if (v <= 0) throw validation_error("budget must be positive");
    b.clique_expansions = v;
    b.coloring_nodes = v;
    return b;
  }
  while (pos < text.size()) {
    size_t comma = text.find(',', pos);
    std::string part = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    size_t eq = part.find('=');
    if (eq == std::string::npos) throw validation_error("bad budget syntax: " + part);
    std::string key = part.substr(0, eq);
    i64 v = std::stoll(part.substr(eq + 1));
    if (v <= 0) throw validation_error("budget must be positive");
    if (key == "cliques")
      b.clique_expansions = v;
    else if (key == "coloring")
      b.coloring_nodes = v;
    else
      throw validation_error("unknown budget key: " + key);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return b;
}

}  // namespace coarsetk
