#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gstruct::cli {

// Exit status: 0 all checks pass, 1 a check failed or a computation was rejected, 2 bad command line or document.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gstruct::cli
