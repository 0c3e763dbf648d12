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

#include "fixtures.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <unistd.h>

#include "qsp/io/image.hpp"

namespace qsp::testing {
namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  const fs::path dir =
      fs::temp_directory_path() / ("qsp_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

nn::Tensor texture(std::size_t height, std::size_t width, std::uint64_t seed,
                   std::size_t rectangles) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  nn::Tensor img({1, height, width}, 0.5);
  for (std::size_t r = 0; r < rectangles; ++r) {
    const auto x0 = static_cast<std::size_t>(u(rng) * static_cast<double>(width));
    const auto y0 = static_cast<std::size_t>(u(rng) * static_cast<double>(height));
    const auto rw = 3 + static_cast<std::size_t>(u(rng) * static_cast<double>(width) / 4);
    const auto rh = 3 + static_cast<std::size_t>(u(rng) * static_cast<double>(height) / 4);
    const double v = u(rng);
    for (std::size_t y = y0; y < std::min(height, y0 + rh); ++y)
      for (std::size_t x = x0; x < std::min(width, x0 + rw); ++x) img(0, y, x) = v;
  }
  for (double& v : img.values()) v = std::round(v * 255.0) / 255.0;
  return img;
}

nn::Tensor warp(const nn::Tensor& image, const Eigen::Matrix3d& h) {
  const Eigen::Matrix3d inv = h.inverse();
  nn::Tensor out(image.shape());
  const auto w = static_cast<double>(image.width());
  const auto ht = static_cast<double>(image.height());
  for (std::size_t y = 0; y < image.height(); ++y) {
    for (std::size_t x = 0; x < image.width(); ++x) {
      const Eigen::Vector3d s = inv * Eigen::Vector3d(static_cast<double>(x), static_cast<double>(y), 1);
      const double sx = s.x() / s.z(), sy = s.y() / s.z();
      if (!(sx >= 0 && sy >= 0 && sx <= w - 1 && sy <= ht - 1)) continue;
      const auto x0 = static_cast<std::size_t>(std::floor(sx));
      const auto y0 = static_cast<std::size_t>(std::floor(sy));
      const std::size_t x1 = std::min(x0 + 1, image.width() - 1);
      const std::size_t y1 = std::min(y0 + 1, image.height() - 1);
      const double fx = sx - static_cast<double>(x0), fy = sy - static_cast<double>(y0);
      for (std::size_t c = 0; c < image.channels(); ++c) {
        out(c, y, x) = (1 - fy) * ((1 - fx) * image(c, y0, x0) + fx * image(c, y0, x1)) +
                       fy * ((1 - fx) * image(c, y1, x0) + fx * image(c, y1, x1));
      }
    }
  }
  return out;
}

Eigen::Matrix3d random_homography(std::uint64_t seed, double width, double height) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double angle = u(rng) * 0.17;  // about 10 degrees
  const double scale = 1.0 + 0.1 * u(rng);
  Eigen::Matrix3d c, ci, a;
  c << 1, 0, -width / 2, 0, 1, -height / 2, 0, 0, 1;
  ci << 1, 0, width / 2, 0, 1, height / 2, 0, 0, 1;
  a << scale * std::cos(angle), -scale * std::sin(angle), 4 * u(rng),
      scale * std::sin(angle), scale * std::cos(angle), 4 * u(rng),
      1e-4 * u(rng), 1e-4 * u(rng), 1;
  Eigen::Matrix3d h = ci * a * c;
  return h / h(2, 2);
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

void write_ppm_gray(const fs::path& path, const nn::Tensor& gray) {
  io::RawImage g = io::gray8_from_tensor(gray);
  io::RawImage rgb{g.width, g.height, io::PixelFormat::kRgb8, {}};
  for (auto s : g.samples) rgb.samples.insert(rgb.samples.end(), {s, s, s});
  io::write_raw_image(path, rgb);
}

}  // namespace

void write_hpatches(const fs::path& root, std::size_t sequences, std::size_t height,
                    std::size_t width, std::uint64_t seed) {
  for (std::size_t s = 0; s < sequences; ++s) {
    const fs::path dir = root / ("v_synthetic" + std::to_string(s));
    fs::create_directories(dir);
    const nn::Tensor ref = texture(height, width, seed * 101 + s);
    write_ppm_gray(dir / "1.ppm", ref);
    for (int k = 2; k <= 6; ++k) {
      const Eigen::Matrix3d h = random_homography(seed * 1009 + s * 7 + static_cast<std::uint64_t>(k),
                                                  static_cast<double>(width), static_cast<double>(height));
      write_ppm_gray(dir / (std::to_string(k) + ".ppm"), warp(ref, h));
      std::ostringstream txt;
      txt << std::setprecision(17);
      for (int r = 0; r < 3; ++r) txt << h(r, 0) << " " << h(r, 1) << " " << h(r, 2) << "\n";
      write_file(dir / ("H_1_" + std::to_string(k)), txt.str());
    }
  }
}

double tum_camera_x(const TumFixture& f, std::size_t i) {
  return static_cast<double>(i * f.shift_px) * f.depth_m / f.fx;
}

void write_tum(const fs::path& root, const TumFixture& f) {
  fs::create_directories(root / "rgb");
  fs::create_directories(root / "depth");
  const std::size_t big_w = f.width + f.shift_px * f.frames;
  const nn::Tensor big = texture(f.height, big_w, f.seed, 12 * f.frames + 40);
  std::ostringstream rgb, depth, gt;
  rgb << "# color images\n";
  depth << "# depth maps\n";
  gt << "# timestamp tx ty tz qx qy qz qw\n";
  rgb << std::fixed << std::setprecision(6);
  depth << std::fixed << std::setprecision(6);
  gt << std::fixed << std::setprecision(6);
  const nn::Tensor d({1, f.height, f.width}, std::round(f.depth_m * 5000.0));
  for (std::size_t i = 0; i < f.frames; ++i) {
    const std::size_t off = i * f.shift_px;
    nn::Tensor img({1, f.height, f.width});
    for (std::size_t y = 0; y < f.height; ++y)
      for (std::size_t x = 0; x < f.width; ++x) img(0, y, x) = big(0, y, x + off);
    const double t = f.t0 + f.dt * static_cast<double>(i);
    std::ostringstream name;
    name << std::fixed << std::setprecision(6) << t << ".png";
    io::write_raw_image(root / "rgb" / name.str(), io::gray8_from_tensor(img));
    io::write_raw_image(root / "depth" / name.str(), io::gray16_from_tensor(d));
    rgb << t << " rgb/" << name.str() << "\n";
    depth << t << " depth/" << name.str() << "\n";
    gt << t << " " << std::setprecision(9) << tum_camera_x(f, i) << " 0 0 0 0 0 1\n"
       << std::setprecision(6);
  }
  write_file(root / "rgb.txt", rgb.str());
  write_file(root / "depth.txt", depth.str());
  if (f.ground_truth) write_file(root / "groundtruth.txt", gt.str());
  std::ostringstream cfg;
  cfg << std::setprecision(17) << "fx = " << f.fx << "\nfy = " << f.fx
      << "\ncx = " << (static_cast<double>(f.width) - 1) / 2
      << "\ncy = " << (static_cast<double>(f.height) - 1) / 2 << "\n";
  write_file(root / "camera.cfg", cfg.str());
}

}  // namespace qsp::testing
