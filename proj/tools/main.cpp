#include <vector>
#include <string>
#include "newsgame/cli.hpp"

int main(int argc, char** argv) {
  return newsgame::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
