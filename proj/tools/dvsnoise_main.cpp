#include "dvsnoise/cli.hpp"

int main(int argc, char** argv) {
  return dvsnoise::cli_main(argc, argv);
}
