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

#include "qsp/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "qsp/cli/manifest.hpp"
#include "qsp/common/parallel.hpp"
#include "qsp/eval/detector_metrics.hpp"
#include "qsp/eval/homography.hpp"
#include "qsp/eval/trajectory_metrics.hpp"
#include "qsp/graph/lowering.hpp"
#include "qsp/graph/passes.hpp"
#include "qsp/graph/serialize.hpp"
#include "qsp/io/hpatches.hpp"
#include "qsp/io/image.hpp"
#include "qsp/io/tum.hpp"
#include "qsp/superpoint/detection_io.hpp"
#include "qsp/superpoint/model.hpp"
#include "qsp/superpoint/weights.hpp"
#include "qsp/vo/odometry.hpp"
#include "qsp/vo/trajectory_io.hpp"

namespace qsp::cli {
namespace fs = std::filesystem;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidConfig:
      return kExitUsage;
    case ErrorKind::kIoError:
    case ErrorKind::kParseError:
    case ErrorKind::kArchiveError:
    case ErrorKind::kUndefinedMetric:
      return kExitIo;
    default:
      return kExitCompute;
  }
}

namespace {

struct CommonOptions {
  std::string weights;
  std::string bits = "int8";
  std::uint64_t seed = 0;
  std::string out;
};

struct DetectorOptions {
  double conf = 0.015;
  int nms_radius = 4;
  int border = 4;
  std::size_t max_keypoints = 1000;
  std::string softmax = "e";
  std::vector<std::string> calib;

  superpoint::DetectorConfig config() const {
    superpoint::DetectorConfig cfg;
    cfg.conf_threshold = conf;
    cfg.nms_radius = nms_radius;
    cfg.border_margin = border;
    cfg.max_keypoints = max_keypoints;
    cfg.softmax = softmax == "base2" ? nn::SoftmaxMode::fixed_base2() : nn::SoftmaxMode::float_e();
    cfg.validate();
    return cfg;
  }

  void record(RunManifest& m) const {
    m.parameter("conf", conf);
    m.parameter("nms_radius", nms_radius);
    m.parameter("border", border);
    m.parameter("max_keypoints", max_keypoints);
    m.parameter("softmax", softmax);
  }
};

void add_detector_flags(CLI::App& cmd, DetectorOptions& d, const std::string& top_k_flag) {
  cmd.add_option("--conf", d.conf, "Detection confidence threshold")->capture_default_str();
  cmd.add_option("--nms-radius", d.nms_radius, "NMS radius in pixels")->capture_default_str();
  cmd.add_option("--border", d.border, "Border margin in pixels")->capture_default_str();
  cmd.add_option(top_k_flag, d.max_keypoints, "Keypoints kept per image (0 keeps all)")
      ->capture_default_str();
  cmd.add_option("--softmax", d.softmax, "Softmax variant")
      ->check(CLI::IsMember({"e", "base2"}))
      ->capture_default_str();
  cmd.add_option("--calib", d.calib, "Calibration images for activation scales");
}

void add_model_flags(CLI::App& cmd, CommonOptions& c) {
  cmd.add_option("--weights", c.weights, "Weight archive directory")->required();
  cmd.add_option("--bits", c.bits, "fp, int8, int4, int3, mixed424 or a config file")
      ->capture_default_str();
}

// A whole-image crop to multiples of 8 keeps pixel coordinates unchanged.
nn::Tensor crop_to_multiple_of_8(const nn::Tensor& image) {
  const std::size_t h = image.height() / 8 * 8;
  const std::size_t w = image.width() / 8 * 8;
  require(h > 0 && w > 0, ErrorKind::kInvalidArgument, "image smaller than 8x8");
  if (h == image.height() && w == image.width()) return image;
  nn::Tensor out({image.channels(), h, w});
  for (std::size_t c = 0; c < image.channels(); ++c)
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) out(c, y, x) = image(c, y, x);
  return out;
}

struct ResizeTarget {
  std::size_t width = 0;
  std::size_t height = 0;
};

ResizeTarget parse_resize(const std::string& text) {
  ResizeTarget r;
  if (text.empty()) return r;
  const auto x = text.find('x');
  try {
    require(x != std::string::npos, ErrorKind::kInvalidConfig, "");
    r.width = std::stoul(text.substr(0, x));
    r.height = std::stoul(text.substr(x + 1));
  } catch (const std::exception&) {
    fail(ErrorKind::kInvalidConfig, "--resize expects <width>x<height>, got '" + text + "'");
  }
  require(r.width > 0 && r.height > 0 && r.width % 8 == 0 && r.height % 8 == 0,
          ErrorKind::kInvalidConfig, "--resize dimensions must be positive multiples of 8");
  return r;
}

// Pixel-centre map from an image of size (w, h) to the resize target.
Eigen::Matrix3d resize_matrix(std::size_t w, std::size_t h, const ResizeTarget& r) {
  const double sx = static_cast<double>(r.width) / static_cast<double>(w);
  const double sy = static_cast<double>(r.height) / static_cast<double>(h);
  Eigen::Matrix3d s;
  s << sx, 0, 0.5 * sx - 0.5, 0, sy, 0.5 * sy - 0.5, 0, 0, 1;
  return s;
}

nn::Tensor resize_bilinear(const nn::Tensor& image, const ResizeTarget& r) {
  nn::Tensor out({image.channels(), r.height, r.width});
  const double sx = static_cast<double>(image.width()) / static_cast<double>(r.width);
  const double sy = static_cast<double>(image.height()) / static_cast<double>(r.height);
  const auto clampi = [](double v, std::size_t n) {
    return static_cast<std::size_t>(std::clamp(v, 0.0, static_cast<double>(n - 1)));
  };
  for (std::size_t y = 0; y < r.height; ++y) {
    const double fy = std::clamp((static_cast<double>(y) + 0.5) * sy - 0.5, 0.0,
                                 static_cast<double>(image.height() - 1));
    const std::size_t y0 = clampi(std::floor(fy), image.height());
    const std::size_t y1 = std::min(y0 + 1, image.height() - 1);
    const double wy = fy - static_cast<double>(y0);
    for (std::size_t x = 0; x < r.width; ++x) {
      const double fx = std::clamp((static_cast<double>(x) + 0.5) * sx - 0.5, 0.0,
                                   static_cast<double>(image.width() - 1));
      const std::size_t x0 = clampi(std::floor(fx), image.width());
      const std::size_t x1 = std::min(x0 + 1, image.width() - 1);
      const double wx = fx - static_cast<double>(x0);
      for (std::size_t c = 0; c < image.channels(); ++c) {
        out(c, y, x) = (1 - wy) * ((1 - wx) * image(c, y0, x0) + wx * image(c, y0, x1)) +
                       wy * ((1 - wx) * image(c, y1, x0) + wx * image(c, y1, x1));
      }
    }
  }
  return out;
}

nn::Tensor load_depth(const fs::path& path) {
  const io::RawImage raw = io::read_raw_image(path);
  require(raw.channels() == 1, ErrorKind::kIoError, path.string() + ": depth must be single-channel");
  std::vector<double> v(raw.samples.begin(), raw.samples.end());
  return nn::Tensor({1, raw.height, raw.width}, std::move(v));
}

struct Model {
  quant::BitWidthConfig bits;
  graph::Graph graph;  // float, or streamlined and lowered to integers
};

Model build_model(const CommonOptions& c, const DetectorOptions& d, RunManifest& m) {
  Model model{quant::BitWidthConfig::from_option(c.bits), {}};
  superpoint::SuperPointWeights weights;
  {
    StageTimer t(m, "load_weights");
    weights = superpoint::load_weights(c.weights);
  }
  m.input("weights", c.weights);
  m.parameter("bits", model.bits.name());
  m.parameter("bit_config", model.bits.serialize());
  std::vector<nn::Tensor> calib;
  for (const auto& p : d.calib) {
    m.input("calib:" + p, p);
    calib.push_back(crop_to_multiple_of_8(io::decode_image(p)));
  }
  if (calib.empty() && !model.bits.is_float()) {
    calib = superpoint::synthetic_images(2, 48, 64, c.seed);
  }
  m.parameter("calibration", d.calib.empty() ? Json("synthetic") : Json(d.calib));
  StageTimer t(m, "compile");
  graph::Graph g = superpoint::build_graph(weights, model.bits, calib);
  if (model.bits.is_float()) {
    model.graph = std::move(g);
  } else {
    auto s = graph::streamline(std::move(g));
    model.graph = graph::lower_integer(s.graph, model.bits).graph;
  }
  return model;
}

void write_report(const fs::path& dir, const RunManifest& m, const Json& body) {
  write_atomic(dir / "report.json", make_report(m, body).dump(2) + "\n");
}

void print_timing(std::ostream& out, const RunManifest& m) {
  for (const auto& [name, s] : m.stages()) {
    out << "time " << name << ": " << std::fixed << std::setprecision(3) << s << " s\n";
    out.unsetf(std::ios::floatfield);
  }
}

Json keypoint_summary(const superpoint::DetectionResult& r) {
  Json kps = Json::array();
  for (const auto& k : r.keypoints) kps.push_back(Json::array({k.x, k.y, k.score}));
  return kps;
}

// Undefined metrics are excluded from means and written as null.
Json maybe(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string csv_field(const std::optional<double>& v) {
  return v ? vo::format_number(*v) : std::string();
}

// ---------------------------------------------------------------- extract

int cmd_extract(const std::string& image, const CommonOptions& c, const DetectorOptions& d,
                std::ostream& out) {
  RunManifest m("extract", c.seed);
  m.input("image", image);
  d.record(m);
  const auto cfg = d.config();
  const Model model = build_model(c, d, m);
  nn::Tensor img;
  {
    StageTimer t(m, "decode");
    img = crop_to_multiple_of_8(io::decode_image(image));
  }
  superpoint::DetectionResult result;
  {
    StageTimer t(m, "detect");
    result = superpoint::detect(img, model.graph, cfg);
  }
  const fs::path dir = c.out;
  fs::create_directories(dir);
  superpoint::write_detections(dir / "detections.bin", result);
  Json body;
  body["image"] = {{"width", result.width}, {"height", result.height}};
  body["keypoint_count"] = result.size();
  body["keypoints"] = keypoint_summary(result);
  body["detections"] = "detections.bin";
  write_report(dir, m, body);
  out << "keypoints: " << result.size() << "\n";
  print_timing(out, m);
  return kExitOk;
}

// ---------------------------------------------------------------- compile

int cmd_compile(const CommonOptions& c, std::size_t trials, const std::string& dump,
                bool corrupt, std::ostream& out, std::ostream& err) {
  RunManifest m("compile", c.seed);
  const auto bits = quant::BitWidthConfig::from_option(c.bits);
  if (bits.is_float()) {
    err << "error: the floating-point configuration has nothing to lower\n";
    return kExitUsage;
  }
  m.parameter("bits", bits.name());
  m.parameter("bit_config", bits.serialize());
  m.parameter("trials", trials);
  m.parameter("corrupt_threshold", corrupt);
  const auto weights = superpoint::load_weights(c.weights);
  m.input("weights", c.weights);

  graph::Graph reference;
  {
    StageTimer t(m, "build");
    reference = superpoint::build_graph(weights, bits, superpoint::synthetic_images(2, 48, 64, c.seed));
  }
  std::size_t dumped = 0;
  auto dump_graph = [&](const std::string& label, const graph::Graph& g) {
    if (dump.empty()) return;
    std::ostringstream name;
    name << std::setw(3) << std::setfill('0') << dumped++ << "-" << label << ".json";
    write_atomic(fs::path(dump) / name.str(), graph::graph_to_json(g));
  };
  dump_graph("input", reference);
  graph::StreamlineResult streamlined;
  {
    StageTimer t(m, "streamline");
    streamlined = graph::streamline(reference, [&](const graph::PassReport& r, const graph::Graph& g) {
      dump_graph("r" + std::to_string(r.round) + "-" + r.pass, g);
    });
  }
  graph::LoweringResult lowered;
  {
    StageTimer t(m, "lower");
    lowered = graph::lower_integer(streamlined.graph, bits);
  }
  if (corrupt) lowered.graph = graph::corrupt_threshold(std::move(lowered.graph));
  dump_graph("lowered", lowered.graph);
  // Exactness holds against the streamlined fake-quantised graph; the
  // difference to the unstreamlined one is floating-point reassociation.
  double deviation = 0;
  double rounding = 0;
  {
    StageTimer t(m, "verify");
    deviation = graph::verify_equivalence(streamlined.graph, lowered.graph, trials, c.seed);
    rounding = graph::verify_equivalence(reference, lowered.graph, trials, c.seed);
  }
  const fs::path dir = c.out;
  fs::create_directories(dir);
  graph::save_graph(lowered.graph, dir / "lowered.json");

  Json body;
  body["census"] = {{"reference", reference.census()},
                    {"streamlined", streamlined.graph.census()},
                    {"lowered", lowered.graph.census()}};
  body["passes"] = Json::parse(graph::reports_to_json(streamlined.reports));
  body["affine_counts"] = streamlined.affine_counts;
  Json budget = Json::object();
  for (const auto& [name, b] : lowered.budget.bits) budget[name] = b;
  body["accumulator_bits"] = budget;
  body["max_accumulator_bits"] = lowered.budget.max_bits();
  body["asserted"] = {{"deviation", deviation}, {"equivalent", deviation == 0}};
  body["reported"] = {{"deviation_from_unstreamlined", rounding}};
  body["lowered_graph"] = "lowered.json";
  write_report(dir, m, body);
  out << "deviation: " << deviation << "\n";
  print_timing(out, m);
  if (deviation != 0) {
    err << "error: lowered graph deviates from the fake-quantised reference by " << deviation
        << "\n";
    return kExitCompute;
  }
  return kExitOk;
}

// ----------------------------------------------------------- eval-hpatches

struct PairScore {
  std::size_t target = 0;
  std::optional<double> repeatability;
  std::optional<double> localization;
  eval::HomographyScore homography;
};

int cmd_eval_hpatches(const std::string& root, const CommonOptions& c, const DetectorOptions& d,
                      std::size_t top_k, double eps, double e, const std::string& resize_text,
                      std::ostream& out) {
  RunManifest m("eval-hpatches", c.seed);
  const ResizeTarget resize = parse_resize(resize_text);
  m.parameter("resize", resize_text.empty() ? Json("crop-to-multiple-of-8") : Json(resize_text));
  d.record(m);
  m.parameter("top_k", top_k);
  m.parameter("eps", eps);
  m.parameter("e", e);
  m.parameter("matcher", "mutual-nn");
  m.parameter("ransac", {{"threshold", 3.0}, {"iterations", 1000}});
  const auto cfg = d.config();
  std::vector<io::HpatchesSequence> seqs;
  {
    StageTimer t(m, "load_dataset");
    seqs = io::load_hpatches(root);
  }
  require(!seqs.empty(), ErrorKind::kIoError, "no HPatches sequences under " + root);
  m.input("dataset", root);
  const Model model = build_model(c, d, m);

  std::vector<std::vector<PairScore>> scores(seqs.size());
  StageTimer timer(m, "evaluate");
  parallel_for(seqs.size(), [&](std::size_t s) {
    const auto& seq = seqs[s];
    std::array<superpoint::DetectionResult, 6> det;
    std::array<Eigen::Matrix3d, 6> to_eval;  // original pixels -> evaluated pixels
    for (std::size_t i = 0; i < 6; ++i) {
      const nn::Tensor img = io::decode_image(seq.images[i]);
      to_eval[i] = Eigen::Matrix3d::Identity();
      if (resize.width > 0) {
        to_eval[i] = resize_matrix(img.width(), img.height(), resize);
        det[i] = superpoint::detect(resize_bilinear(img, resize), model.graph, cfg);
      } else {
        det[i] = superpoint::detect(crop_to_multiple_of_8(img), model.graph, cfg);
      }
    }
    const eval::ImageSize size_a{det[0].width, det[0].height};
    for (std::size_t k = 0; k < 5; ++k) {
      PairScore p;
      p.target = k + 2;
      const Eigen::Matrix3d h = to_eval[k + 1] * seq.homographies[k] * to_eval[0].inverse();
      const eval::ImageSize size_b{det[k + 1].width, det[k + 1].height};
      try {
        p.repeatability = eval::repeatability(det[0].keypoints, det[k + 1].keypoints, h, size_a,
                                              size_b, eps, top_k);
      } catch (const Error& ex) {
        if (ex.kind() != ErrorKind::kUndefinedMetric) throw;
      }
      try {
        p.localization = eval::localization_error(det[0].keypoints, det[k + 1].keypoints, h,
                                                  size_a, size_b, eps, top_k);
      } catch (const Error& ex) {
        if (ex.kind() != ErrorKind::kUndefinedMetric) throw;
      }
      eval::RansacOptions ro;
      ro.seed = c.seed + 16 * s + k;
      p.homography = eval::homography_score(det[0], det[k + 1], h, det[0].width, det[0].height, e, ro);
      scores[s].push_back(p);
    }
  });
  timer.stop();

  struct Mean {
    double sum = 0;
    std::size_t n = 0;
    void add(const std::optional<double>& v) {
      if (v) {
        sum += *v;
        ++n;
      }
    }
    std::optional<double> value() const {
      return n ? std::optional<double>(sum / static_cast<double>(n)) : std::nullopt;
    }
  };
  Mean all_rep, all_loc, all_hom;
  std::size_t undefined = 0;
  Json per_seq = Json::array();
  std::string csv = "sequence,target,repeatability,localization_error,corner_error,correct,matches,inliers\n";
  for (std::size_t s = 0; s < seqs.size(); ++s) {
    Mean rep, loc, hom;
    Json pairs = Json::array();
    for (const auto& p : scores[s]) {
      rep.add(p.repeatability);
      loc.add(p.localization);
      hom.add(p.homography.correct ? 1.0 : 0.0);
      all_rep.add(p.repeatability);
      all_loc.add(p.localization);
      all_hom.add(p.homography.correct ? 1.0 : 0.0);
      if (!p.repeatability || !p.localization) ++undefined;
      const Json ce = p.homography.estimated ? Json(p.homography.corner_error) : Json(nullptr);
      pairs.push_back({{"target", p.target},
                       {"repeatability", maybe(p.repeatability)},
                       {"localization_error", maybe(p.localization)},
                       {"corner_error", ce},
                       {"correct", p.homography.correct},
                       {"matches", p.homography.matches},
                       {"inliers", p.homography.inliers}});
      csv += seqs[s].name + "," + std::to_string(p.target) + "," + csv_field(p.repeatability) +
             "," + csv_field(p.localization) + "," +
             (p.homography.estimated ? vo::format_number(p.homography.corner_error) : "") + "," +
             (p.homography.correct ? "1" : "0") + "," + std::to_string(p.homography.matches) +
             "," + std::to_string(p.homography.inliers) + "\n";
    }
    per_seq.push_back({{"name", seqs[s].name},
                       {"repeatability", maybe(rep.value())},
                       {"localization_error", maybe(loc.value())},
                       {"homography_accuracy", maybe(hom.value())},
                       {"pairs", pairs}});
  }
  Json body;
  body["sequences"] = per_seq;
  body["reported"] = {{"repeatability", maybe(all_rep.value())},
                      {"localization_error", maybe(all_loc.value())},
                      {"homography_accuracy", maybe(all_hom.value())},
                      {"pairs", all_hom.n},
                      {"pairs_with_undefined_metric", undefined},
                      {"matcher", "mutual-nn"}};
  const fs::path dir = c.out;
  write_atomic(dir / "scores.csv", csv);
  write_report(dir, m, body);
  out << "sequences: " << seqs.size() << "\n";
  out << "repeatability: " << body["reported"]["repeatability"].dump() << "\n";
  out << "localization_error: " << body["reported"]["localization_error"].dump() << "\n";
  out << "homography_accuracy: " << body["reported"]["homography_accuracy"].dump() << "\n";
  print_timing(out, m);
  return kExitOk;
}

// ------------------------------------------------------------------ run-vo

struct VoOptions {
  double min_sim = vo::kDefaultMinSimilarity;
  std::string camera;
  std::size_t max_frames = 0;
  bool huber = false;
};

int cmd_run_vo(const std::string& root, const CommonOptions& c, const DetectorOptions& d,
               const VoOptions& v, std::ostream& out) {
  RunManifest m("run-vo", c.seed);
  d.record(m);
  m.parameter("min_sim", v.min_sim);
  m.parameter("max_frames", v.max_frames);
  m.parameter("huber", v.huber);
  const auto cfg = d.config();
  std::optional<fs::path> camera;
  if (!v.camera.empty()) {
    camera = v.camera;
    m.input("camera", v.camera);
  }
  io::TumSequence seq;
  {
    StageTimer t(m, "load_dataset");
    seq = io::load_tum(root, io::kTumMaxDt, camera);
  }
  require(!seq.frames.empty(), ErrorKind::kIoError, "no associated frames under " + root);
  for (const char* list : {"rgb.txt", "depth.txt", "groundtruth.txt", "camera.cfg"}) {
    if (fs::exists(fs::path(root) / list)) m.input(list, fs::path(root) / list);
  }
  const Model model = build_model(c, d, m);
  const std::size_t count =
      v.max_frames == 0 ? seq.frames.size() : std::min(v.max_frames, seq.frames.size());

  vo::VoConfig vcfg;
  vcfg.min_similarity = v.min_sim;
  vcfg.depth_factor = seq.config.depth_factor;
  vcfg.pnp.huber = v.huber;
  vo::PoseSE3 seed_pose = vo::PoseSE3::identity();
  bool seeded = false;
  if (const auto& gt = seq.frames.front().ground_truth) {
    seed_pose = vo::PoseSE3::from_quaternion(
        gt->quaternion, Eigen::Vector3d(gt->translation[0], gt->translation[1], gt->translation[2]));
    seeded = true;
  }
  vo::VoResult result;
  {
    StageTimer t(m, "odometry");
    result = vo::run_sequence(
        count,
        [&](std::size_t i) {
          const auto& f = seq.frames[i];
          return vo::Frame{f.timestamp, i, crop_to_multiple_of_8(io::decode_image(seq.root / f.rgb)),
                           crop_to_multiple_of_8(load_depth(seq.root / f.depth))};
        },
        seq.config.intrinsics,
        [&](const nn::Tensor& gray) { return superpoint::detect(gray, model.graph, cfg); }, vcfg,
        seed_pose);
  }
  const fs::path dir = c.out;
  write_atomic(dir / "trajectory.txt", vo::format_tum_trajectory(result.trajectory));
  std::string csv = "frame,timestamp,keypoints,matches,correspondences,fallback,pnp_converged,rms\n";
  Json frames = Json::array();
  std::size_t fallbacks = 0;
  for (std::size_t i = 0; i < result.frames.size(); ++i) {
    const auto& r = result.frames[i];
    fallbacks += r.fallback ? 1 : 0;
    frames.push_back({{"frame", r.frame_id},
                      {"keypoints", r.keypoints},
                      {"matches", r.matches},
                      {"correspondences", r.correspondences},
                      {"fallback", r.fallback},
                      {"pnp_converged", r.pnp_converged},
                      {"rms", r.rms}});
    csv += std::to_string(r.frame_id) + "," +
           vo::format_number(result.trajectory[i].timestamp) + "," + std::to_string(r.keypoints) +
           "," + std::to_string(r.matches) + "," + std::to_string(r.correspondences) + "," +
           (r.fallback ? "1" : "0") + "," + (r.pnp_converged ? "1" : "0") + "," +
           vo::format_number(r.rms) + "\n";
  }
  write_atomic(dir / "frames.csv", csv);
  Json body;
  body["frames_processed"] = count;
  body["frames_dropped_by_association"] = seq.dropped;
  body["fallback_frames"] = fallbacks;
  body["seed_pose"] = seeded ? "ground-truth" : "identity";
  body["trajectory"] = "trajectory.txt";
  body["frames"] = frames;
  write_report(dir, m, body);
  out << "frames: " << count << " fallback: " << fallbacks << "\n";
  print_timing(out, m);
  return kExitOk;
}

// --------------------------------------------------------- eval-trajectory

int cmd_eval_trajectory(const std::string& est_path, const std::string& gt_path, double delta,
                        double max_dt, std::uint64_t seed, const std::string& out_dir,
                        std::ostream& out) {
  RunManifest m("eval-trajectory", seed);
  m.parameter("delta", delta);
  m.parameter("max_dt", max_dt);
  m.parameter("alignment", "none");
  const auto est = vo::read_tum_trajectory(est_path);
  const auto gt = vo::read_tum_trajectory(gt_path);
  m.input("estimate", est_path);
  m.input("ground_truth", gt_path);
  StageTimer t(m, "evaluate");
  const auto a = eval::ape(est, gt, max_dt);
  const auto r = eval::rpe(est, gt, delta, max_dt);
  const auto traces = eval::angle_traces(est, gt, max_dt);
  t.stop();
  std::string csv = "timestamp,est_roll,est_pitch,est_yaw,gt_roll,gt_pitch,gt_yaw\n";
  for (const auto& s : traces) {
    csv += vo::format_number(s.timestamp);
    for (double x : {s.est_roll, s.est_pitch, s.est_yaw, s.gt_roll, s.gt_pitch, s.gt_yaw}) {
      csv += "," + vo::format_number(x);
    }
    csv += "\n";
  }
  Json body;
  body["metrics"] = {{"rpe_rot_deg", r.rot_deg},
                     {"rpe_trans_m_per_s", r.trans},
                     {"ape_rot_deg", a.rot_deg},
                     {"ape_trans_m", a.trans}};
  body["associated_pairs"] = a.count;
  body["rpe_pairs"] = r.count;
  body["angle_traces"] = "angles.csv";
  const fs::path dir = out_dir;
  write_atomic(dir / "angles.csv", csv);
  write_report(dir, m, body);
  out << "R_RPE " << r.rot_deg << " deg, t_RPE " << r.trans << " m/s, R_APE " << a.rot_deg
      << " deg, t_APE " << a.trans << " m\n";
  return kExitOk;
}

// ------------------------------------------------------------ make-weights

int cmd_make_weights(std::uint64_t seed, const std::string& out_dir, std::ostream& out) {
  superpoint::store_weights(out_dir, superpoint::random_weights(seed),
                            {{"source", "random"}, {"seed", std::to_string(seed)}});
  out << "wrote random weights (seed " << seed << ") to " << out_dir << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantised SuperPoint features and RGB-D visual odometry", "qsp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", QSP_VERSION);

  CommonOptions c;
  DetectorOptions d;
  std::string positional_a, positional_b;

  auto* extract = app.add_subcommand("extract", "Detect keypoints and descriptors in one image");
  extract->add_option("image", positional_a, "Input image")->required();
  add_model_flags(*extract, c);
  add_detector_flags(*extract, d, "--top-k");
  extract->add_option("--seed", c.seed)->capture_default_str();
  extract->add_option("--out", c.out, "Output directory")->required();

  std::size_t trials = 10;
  std::string dump;
  bool corrupt = false;
  auto* compile = app.add_subcommand("compile", "Streamline, lower and verify the network");
  add_model_flags(*compile, c);
  compile->add_option("--seed", c.seed)->capture_default_str();
  compile->add_option("--trials", trials, "Equivalence trials")->capture_default_str();
  compile->add_option("--dump-passes", dump, "Directory for per-pass graph dumps");
  compile->add_flag("--debug-corrupt-threshold", corrupt, "Inject a threshold error (testing)");
  compile->add_option("--out", c.out, "Output directory")->required();

  std::size_t top_k = eval::kDefaultTopK;
  double eps = eval::kDefaultEps;
  double e = 3.0;
  auto* hp = app.add_subcommand("eval-hpatches", "Detector metrics on an HPatches-layout dataset");
  hp->add_option("root", positional_a, "Dataset root")->required();
  add_model_flags(*hp, c);
  add_detector_flags(*hp, d, "--max-keypoints");
  hp->add_option("--top-k", top_k, "Points per image for repeatability")->capture_default_str();
  hp->add_option("--eps", eps, "Correctness distance in pixels")->capture_default_str();
  hp->add_option("--e", e, "Homography corner threshold in pixels")->capture_default_str();
  std::string resize;
  hp->add_option("--resize", resize, "Evaluate at <width>x<height> (default: crop to /8)");
  hp->add_option("--seed", c.seed)->capture_default_str();
  hp->add_option("--out", c.out, "Output directory")->required();

  VoOptions v;
  auto* rvo = app.add_subcommand("run-vo", "Frame-to-frame odometry on a TUM RGB-D sequence");
  rvo->add_option("root", positional_a, "Sequence root")->required();
  add_model_flags(*rvo, c);
  add_detector_flags(*rvo, d, "--top-k");
  rvo->add_option("--min-sim", v.min_sim, "Minimum descriptor similarity")->capture_default_str();
  rvo->add_option("--camera", v.camera, "Camera config (default <root>/camera.cfg)");
  rvo->add_option("--max-frames", v.max_frames, "Process at most this many frames (0 = all)")
      ->capture_default_str();
  rvo->add_flag("--huber", v.huber, "Huber-robust PnP");
  rvo->add_option("--seed", c.seed)->capture_default_str();
  rvo->add_option("--out", c.out, "Output directory")->required();

  double delta = eval::kDefaultRpeDelta;
  double max_dt = eval::kDefaultMaxDt;
  auto* et = app.add_subcommand("eval-trajectory", "APE and RPE against ground truth");
  et->add_option("estimate", positional_a, "Estimated trajectory (TUM format)")->required();
  et->add_option("ground_truth", positional_b, "Ground-truth trajectory (TUM format)")->required();
  et->add_option("--delta", delta, "RPE interval in seconds")->capture_default_str();
  et->add_option("--max-dt", max_dt, "Association tolerance in seconds")->capture_default_str();
  et->add_option("--seed", c.seed)->capture_default_str();
  et->add_option("--out", c.out, "Output directory")->required();

  auto* mw = app.add_subcommand("make-weights", "Write a seeded random weight archive");
  mw->add_option("--seed", c.seed)->capture_default_str();
  mw->add_option("--out", c.out, "Output directory")->required();

  std::vector<const char*> argv{"qsp"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (extract->parsed()) return cmd_extract(positional_a, c, d, out);
    if (compile->parsed()) return cmd_compile(c, trials, dump, corrupt, out, err);
    if (hp->parsed()) return cmd_eval_hpatches(positional_a, c, d, top_k, eps, e, resize, out);
    if (rvo->parsed()) return cmd_run_vo(positional_a, c, d, v, out);
    if (et->parsed()) {
      return cmd_eval_trajectory(positional_a, positional_b, delta, max_dt, c.seed, c.out, out);
    }
    if (mw->parsed()) return cmd_make_weights(c.seed, c.out, out);
  } catch (const Error& ex) {
    err << "error: " << ex.what() << "\n";
    return exit_code(ex.kind());
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitCompute;
  }
  return kExitUsage;
}

}  // namespace qsp::cli
