// tests/cli_tests_main.cc

// Copyright 2026  The mtml Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <string>

std::string g_cli_binary;

int main(int argc, char **argv) {
  int doctest_argc = argc;
  if (argc > 1 && argv[argc - 1][0] != '-') {
    g_cli_binary = argv[argc - 1];
    doctest_argc = argc - 1;
  }
  doctest::Context context;
  context.applyCommandLine(doctest_argc, argv);
  return context.run();
}
