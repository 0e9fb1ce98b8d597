#include <cstdio>

// placeholder entry point; the real command line front end lands with the
// pipeline module
int main() {
  std::fprintf(stderr, "mkdvut: not wired up yet\n");
  return 2;
}
