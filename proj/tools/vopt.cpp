#include "vopt/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
  return vopt::cli::run(argc, argv, std::cout, std::cerr);
}
