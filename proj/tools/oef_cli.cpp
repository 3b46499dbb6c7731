#include <cstdio>

int main() {
  std::puts("oef: command-line surface lands with the runner module");
  return 64;
}
