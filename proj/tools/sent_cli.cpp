#include <iostream>

#include "sent/sent.hpp"

int main(int argc, char** argv) {
  (void)argc;
  (void)argv;
  std::cerr << "not yet implemented\n";
  return 2;
}
