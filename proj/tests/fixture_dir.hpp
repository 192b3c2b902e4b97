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


#pragma once

#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <string>

#include <unistd.h>

#include "remixd/fixture_corpus.hpp"

namespace remixd::testing {

/// The offline corpus: REMIXD_FIXTURE_DIR when ctest has generated it
/// there, otherwise a private temporary copy made on first use.
inline const std::filesystem::path& fixture_corpus() {
  static const std::filesystem::path dir = [] {
    if (const char* env = std::getenv("REMIXD_FIXTURE_DIR"); env && std::filesystem::exists(std::filesystem::path(env) / "index.json")) {
      return std::filesystem::path(env);
    }
    const auto d = std::filesystem::temp_directory_path() / ("remixd-fixtures-" + std::to_string(::getpid()));
    std::filesystem::remove_all(d);
    write_fixture_corpus(d);
    return d;
  }();
  return dir;
}

/// Removes the generated corpus at exit.
struct CorpusCleanup {
  ~CorpusCleanup() {
    std::error_code ec;
    std::filesystem::remove_all(std::filesystem::temp_directory_path() / ("remixd-fixtures-" + std::to_string(::getpid())), ec);
  }
};
inline CorpusCleanup corpus_cleanup;

}  // namespace remixd::testing
