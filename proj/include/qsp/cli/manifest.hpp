// Copyright 2026 The QSP Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace qsp::cli {

using Json = nlohmann::ordered_json;

std::string sha256_hex(std::string_view bytes);
/// Digest of a file's bytes, or for a directory of the sorted list of
/// `relative-path file-digest` lines of every regular file below it.
std::string path_digest(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// Provenance embedded in every report. Everything except the stage timings
/// is a function of the invocation, so reports are reproducible once the
/// top-level "timing" key is removed.
class RunManifest {
 public:
  RunManifest(std::string command, std::uint64_t seed);

  void parameter(const std::string& key, Json value);
  void input(const std::string& role, const std::filesystem::path& path);
  void stage(const std::string& name, double seconds);

  Json to_json() const;
  Json timing_json() const;
  const std::vector<std::pair<std::string, double>>& stages() const { return stages_; }

 private:
  std::string command_;
  std::uint64_t seed_;
  Json parameters_ = Json::object();
  Json inputs_ = Json::object();
  std::vector<std::pair<std::string, double>> stages_;
};

/// Times a stage and records it on the manifest when stopped or destroyed.
class StageTimer {
 public:
  StageTimer(RunManifest& manifest, std::string name);
  ~StageTimer();
  StageTimer(const StageTimer&) = delete;
  StageTimer& operator=(const StageTimer&) = delete;
  double stop();

 private:
  RunManifest& manifest_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
  bool stopped_ = false;
};

/// {"manifest": ..., <body keys>..., "timing": ...}.
Json make_report(const RunManifest& manifest, const Json& body);

/// Removes every "timing" key, recursively.
Json strip_timing(Json report);

}  // namespace qsp::cli
