#pragma once

#include <iosfwd>

namespace gclus {

// Exit codes: 0 success, 1 audit or consistency failure, 2 usage error,
// 3 runtime error.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace gclus
