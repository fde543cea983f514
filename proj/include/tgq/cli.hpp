#pragma once

#include <string>
#include <vector>

namespace tgq::cli {

// Exit codes: 0 success, 2 usage error, 3 convergence error, 4 accuracy
// warning escalated by --strict (also: verification failures).
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args without argv[0]

std::string format_g17(double v);

}  // namespace tgq::cli
