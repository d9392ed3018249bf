#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flexmimo {

// Entry point behind the flexmimo executable. args excludes the program name.
// Returns 0 on success, 2 on usage errors (usage text on err), 1 on runtime
// failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flexmimo
