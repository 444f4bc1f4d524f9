#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace csimrec::cli {

// Exit codes: 0 success, 1 runtime failure, 2 usage error.
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace csimrec::cli
