#pragma once
#include <string>
#include <vector>

namespace newsgame {

// Entry point used by tools/main.cpp and by the tests (no process spawn
// needed). Exit codes: 0 success, 2 bad config/arguments, 3 runtime failure.
int cli_main(const std::vector<std::string>& args);

}  // namespace newsgame
