#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mplss::cli {

// Exit codes: 0 success, 1 computational failure (error JSON on stderr),
// 2 usage or input error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mplss::cli
