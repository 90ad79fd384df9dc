#pragma once

// Renderings of a ProfileResult: a Graphviz call tree and a plain-text table.

#include <string>

#include "perfscope/runtime.hpp"

namespace perfscope {

/// "digraph calltree { ... }", one node per calling context, ordered by id.
std::string to_dot(const ProfileResult& result);

/// Header with the input configuration and totals, one row per function, then
/// the warnings.
std::string to_text(const ProfileResult& result);

/// "1 call, 8 B" / "2*n calls, 16*n B".
std::string format_comm(const Term& calls, const Term& bytes, const VarOrder& order);

}  // namespace perfscope
