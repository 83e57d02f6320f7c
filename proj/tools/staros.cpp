// Command line front end; subcommands are wired up in cli_impl.hpp.
#include <cstdio>

int main() {
  std::puts("staros: not yet wired");
  return 1;
}
