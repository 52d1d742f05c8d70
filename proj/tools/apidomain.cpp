#include "apidomain/app/cli.hpp"

int main(int argc, char** argv) {
  return apidomain::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
