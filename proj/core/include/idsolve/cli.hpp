#pragma once

#include <string>
#include <vector>

namespace idsolve::cli {

// Exit codes: 0 success, 2 model/usage error, 3 engine disagreement in
// `compare`.
int run(const std::vector<std::string>& args);

}  // namespace idsolve::cli
