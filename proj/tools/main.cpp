#include <string>
#include <vector>

#include "ratiotv/experiments.hpp"

int main(int argc, char** argv) {
  return ratiotv::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
