#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "cemsc/util.hpp"

int main(int argc, char** argv) {
  cemsc::force_single_threaded_blas();
  return doctest::Context(argc, argv).run();
}
