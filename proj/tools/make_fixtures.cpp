// Copyright 2026 The remixd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Writes the offline repository corpus used by the fixture backend.

#include <cstdio>
#include <exception>

#include "remixd/fixture_corpus.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: remixd-fixtures <output-dir>\n");
    return 2;
  }
  try {
    remixd::write_fixture_corpus(argv[1]);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "remixd-fixtures: %s\n", e.what());
    return 1;
  }
  return 0;
}
