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

#include "qsp/cli/manifest.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "qsp/common/error.hpp"

#ifndef QSP_VERSION
#define QSP_VERSION "unknown"
#endif

namespace qsp::cli {
namespace fs = std::filesystem;

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  require(EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) == 1,
          ErrorKind::kIoError, "SHA-256 failed");
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(md[i]);
  return out.str();
}

namespace {

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string path_digest(const fs::path& path) {
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(path)) {
      if (entry.is_regular_file()) files.push_back(fs::relative(entry.path(), path));
    }
    std::sort(files.begin(), files.end());
    std::string listing;
    for (const auto& f : files) {
      listing += f.generic_string() + " " + sha256_hex(read_bytes(path / f)) + "\n";
    }
    return sha256_hex(listing);
  }
  require(fs::is_regular_file(path, ec), ErrorKind::kIoError, "no such input: " + path.string());
  return sha256_hex(read_bytes(path));
}

void write_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::kIoError, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    require(!out.fail(), ErrorKind::kIoError, "write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  require(!ec, ErrorKind::kIoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

RunManifest::RunManifest(std::string command, std::uint64_t seed)
    : command_(std::move(command)), seed_(seed) {}

void RunManifest::parameter(const std::string& key, Json value) {
  parameters_[key] = std::move(value);
}

void RunManifest::input(const std::string& role, const fs::path& path) {
  inputs_[role] = Json{{"path", path.generic_string()}, {"sha256", path_digest(path)}};
}

void RunManifest::stage(const std::string& name, double seconds) {
  stages_.emplace_back(name, seconds);
}

Json RunManifest::to_json() const {
  Json j;
  j["command"] = command_;
  j["version"] = QSP_VERSION;
  j["seed"] = seed_;
  j["parameters"] = parameters_;
  j["inputs"] = inputs_;
  return j;
}

Json RunManifest::timing_json() const {
  Json j = Json::object();
  for (const auto& [name, s] : stages_) j[name] = s;
  return j;
}

StageTimer::StageTimer(RunManifest& manifest, std::string name)
    : manifest_(manifest), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}

StageTimer::~StageTimer() {
  if (!stopped_) stop();
}

double StageTimer::stop() {
  const double s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  if (!stopped_) manifest_.stage(name_, s);
  stopped_ = true;
  return s;
}

Json make_report(const RunManifest& manifest, const Json& body) {
  Json j;
  j["manifest"] = manifest.to_json();
  for (const auto& el : body.items()) j[el.key()] = el.value();
  j["timing"] = manifest.timing_json();
  return j;
}

Json strip_timing(Json report) {
  if (report.is_object()) {
    report.erase("timing");
    for (auto& el : report.items()) el.value() = strip_timing(std::move(el.value()));
  } else if (report.is_array()) {
    for (auto& v : report) v = strip_timing(std::move(v));
  }
  return report;
}

}  // namespace qsp::cli
