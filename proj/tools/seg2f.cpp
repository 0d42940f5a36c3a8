// Copyright 2026 The seg2f Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "seg2f/cells.hpp"
#include "seg2f/dedup.hpp"
#include "seg2f/errors.hpp"
#include "seg2f/geometry.hpp"
#include "seg2f/gradcheck.hpp"
#include "seg2f/io.hpp"
#include "seg2f/kernels.hpp"
#include "seg2f/label_prep.hpp"
#include "seg2f/metrics.hpp"
#include "seg2f/parallel.hpp"
#include "seg2f/postprocess.hpp"
#include "seg2f/synth.hpp"

namespace {

using namespace seg2f;

// ---------------------------------------------------------------------------
// Logging (stderr only; stdout is reserved for key=value summaries)

enum LogLevel { kSilent = 0, kError, kWarn, kInfo, kDebug };
int g_log_level = kInfo;

int level_from_name(const std::string& name) {
  if (name == "silent") return kSilent;
  if (name == "error") return kError;
  if (name == "warn") return kWarn;
  if (name == "info") return kInfo;
  if (name == "debug") return kDebug;
  throw ValidationError("unknown log level '" + name + "'");
}

void log_info(const std::string& msg) {
  if (g_log_level >= kInfo) std::cerr << "[seg2f] " << msg << "\n";
}

void emit(const std::string& key, const std::string& value) {
  std::cout << key << "=" << value << "\n";
}
void emit(const std::string& key, double value) {
  emit(key, format_double(value));
}
void emit(const std::string& key, std::int64_t value) {
  emit(key, std::to_string(value));
}

// ---------------------------------------------------------------------------
// Flag parsing helpers

GeoTransform parse_geo(const std::string& text) {
  GeoTransform geo;
  const std::size_t c1 = text.find(',');
  const std::size_t c2 = c1 == std::string::npos ? std::string::npos
                                                 : text.find(',', c1 + 1);
  const auto number = [&text](std::size_t from, std::size_t to) {
    double v = 0.0;
    const char* first = text.data() + from;
    const char* last = text.data() + (to == std::string::npos ? text.size() : to);
    const auto [next, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || next != last)
      throw ValidationError("--geo expects lat,lon,meters_per_pixel");
    return v;
  };
  if (c2 == std::string::npos)
    throw ValidationError("--geo expects lat,lon,meters_per_pixel");
  geo.origin_lat = number(0, c1);
  geo.origin_lon = number(c1 + 1, c2);
  geo.meters_per_pixel = number(c2 + 1, std::string::npos);
  if (!(geo.origin_lat >= -90.0 && geo.origin_lat <= 90.0))
    throw ValidationError("--geo latitude must be in [-90, 90]");
  if (!(geo.origin_lon >= -180.0 && geo.origin_lon <= 180.0))
    throw ValidationError("--geo longitude must be in [-180, 180]");
  if (!(geo.meters_per_pixel > 0.0))
    throw ValidationError("--geo meters_per_pixel must be positive");
  return geo;
}

struct Scale {
  std::int64_t num = 1;
  std::int64_t den = 1;
};

// "1" or "512/448": exact rationals, so common tile-size ratios do not
// pick up decimal drift.
Scale parse_scale(const std::string& token) {
  Scale s;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [next, ec] = std::from_chars(first, last, s.num);
  if (ec != std::errc() || s.num <= 0)
    throw ValidationError("bad scale token '" + token + "'");
  if (next != last) {
    if (*next != '/')
      throw ValidationError("bad scale token '" + token + "'");
    const auto [next2, ec2] = std::from_chars(next + 1, last, s.den);
    if (ec2 != std::errc() || next2 != last || s.den <= 0)
      throw ValidationError("bad scale token '" + token + "'");
  }
  return s;
}

std::vector<Scale> parse_scales(const std::string& text) {
  std::vector<Scale> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string::npos ? text.size() : comma;
    out.push_back(parse_scale(text.substr(start, end - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string sanitize_filename(const std::string& key) {
  std::string out = key;
  for (char& c : out)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_')
      c = '_';
  return out;
}

// Group key per image id, built from the ground-truth records.
std::map<std::string, std::string> image_groups(
    const std::vector<GroundTruth>& gts) {
  std::map<std::string, std::string> groups;
  for (const GroundTruth& gt : gts) {
    const std::string key = gt.group.empty() ? "ungrouped" : gt.group;
    const auto [it, inserted] = groups.emplace(gt.image_id, key);
    if (!inserted && it->second != key)
      throw ValidationError("image '" + gt.image_id +
                            "' appears in groups '" + it->second + "' and '" +
                            key + "'");
  }
  return groups;
}

// Per-image matching for calibration: partition by image id, match, pool.
// `weight_of` assigns the calibration weight of each detection.
template <typename WeightFn>
MatchResult pooled_matches(const std::vector<Detection>& dets,
                           const std::vector<GroundTruth>& gts,
                           double iou_thr, double resolution,
                           WeightFn weight_of) {
  std::set<std::string> images;
  std::map<std::string, std::vector<std::size_t>> det_idx;
  std::map<std::string, std::vector<GroundTruth>> gts_by_image;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    images.insert(dets[i].image_id);
    det_idx[dets[i].image_id].push_back(i);
  }
  for (const GroundTruth& gt : gts) {
    images.insert(gt.image_id);
    gts_by_image[gt.image_id].push_back(gt);
  }

  std::vector<MatchResult> parts;
  for (const std::string& image : images) {
    std::vector<Detection> image_dets;
    for (const std::size_t i : det_idx[image]) image_dets.push_back(dets[i]);
    MatchResult m =
        match_detections(image_dets, gts_by_image[image], iou_thr, resolution);
    for (std::size_t k = 0; k < m.entries.size(); ++k)
      m.entries[k].weight = weight_of(det_idx[image][k]);
    parts.push_back(std::move(m));
  }
  return pool_matches(parts);
}

void apply_geo(std::vector<Detection>* dets, const GeoTransform& geo) {
  for (Detection& det : *dets)
    for (Vec2& v : det.poly.ring) {
      double lon = 0.0, lat = 0.0;
      pixel_to_lonlat(geo, v.x, v.y, &lon, &lat);
      v.x = lon;
      v.y = lat;
    }
}

// ---------------------------------------------------------------------------

int run(int argc, char** argv) {
  CLI::App app{"building-footprint pipeline: label prep, losses, "
               "postprocessing, evaluation, calibration, dedup"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int threads = 1;
  const char* env_log = std::getenv("SEG2F_LOG");
  std::string log_level = env_log ? env_log : "info";
  app.add_option("--seed", seed, "random seed for seeded subcommands");
  app.add_option("--threads", threads, "worker threads (outputs never change)")
      ->check(CLI::PositiveNumber);
  app.add_option("--log-level", log_level,
                 "silent|error|warn|info|debug (default from SEG2F_LOG)");

  const auto apply_globals = [&]() {
    g_log_level = level_from_name(log_level);
    set_thread_count(threads);
  };

  // --- synth ---------------------------------------------------------------
  auto* synth = app.add_subcommand(
      "synth", "generate a synthetic scene: rasters, ground truth, manifest");
  std::string synth_dir;
  SceneParams scene_params;
  std::string synth_group = "synthetic";
  std::string synth_geo_text;
  synth->add_option("--out-dir", synth_dir, "output directory")->required();
  synth->add_option("--size", scene_params.size, "scene side in pixels");
  synth->add_option("--min-buildings", scene_params.min_buildings, "");
  synth->add_option("--max-buildings", scene_params.max_buildings, "");
  synth->add_option("--min-side", scene_params.min_side, "");
  synth->add_option("--max-side", scene_params.max_side, "");
  synth->add_option("--dense-prob", scene_params.dense_prob,
                    "chance of a dense (abutting) pair");
  synth->add_option("--noise", scene_params.noise,
                    "confidence noise amplitude, [0, 0.5)");
  synth->add_option("--group", synth_group, "evaluation group key");
  synth->add_option("--geo", synth_geo_text, "origin lat,lon,meters_per_pixel");
  synth->callback([&]() {
    apply_globals();
    scene_params.seed = seed;
    GeoTransform geo;
    if (!synth_geo_text.empty()) geo = parse_geo(synth_geo_text);

    std::error_code ec;
    std::filesystem::create_directories(synth_dir, ec);
    if (ec)
      throw IoError("cannot create directory '" + synth_dir + "': " +
                    ec.message());

    Scene scene = generate_scene(scene_params);
    for (GroundTruth& gt : scene.truths) gt.group = synth_group;

    const auto in_dir = [&](const std::string& name) {
      return (std::filesystem::path(synth_dir) / name).string();
    };
    ManifestRecord record;
    for (std::size_t ch = 0; ch < scene.image.size(); ++ch) {
      const std::string name = "image_" + std::to_string(ch) + ".npy";
      write_raster_npy(scene.image[ch], in_dir(name));
      record.image.push_back(name);
    }
    write_raster_npy(scene.labels, in_dir("labels.npy"));
    write_raster_npy(scene.confidence, in_dir("confidence.npy"));
    write_ground_truth_geojson(scene.truths, in_dir("gt.geojson"));
    record.labels = "labels.npy";
    record.ground_truth = "gt.geojson";
    record.group = synth_group;
    record.geo = geo;
    DatasetManifest manifest;
    manifest.records.push_back(std::move(record));
    write_manifest(manifest, in_dir("manifest.json"));
    log_info("wrote scene to " + synth_dir);

    std::int64_t dense = 0;
    for (const GroundTruth& gt : scene.truths) dense += gt.dense ? 1 : 0;
    emit("instances", static_cast<std::int64_t>(scene.truths.size()));
    emit("dense_instances", dense);
    emit("confidence", in_dir("confidence.npy"));
    emit("ground_truth", in_dir("gt.geojson"));
    emit("manifest", in_dir("manifest.json"));
  });

  // --- weights ---------------------------------------------------------------
  auto* weights = app.add_subcommand(
      "weights", "per-pixel loss weights from a label raster");
  std::string w_labels, w_instances, w_scheme, w_out;
  std::string w_dense = "building";
  double w_sigma = -1.0, w_scale = 200.0, w_floor = 1.0;
  bool w_erode = false;
  weights->add_option("--labels", w_labels, "label raster (NPY)")->required();
  weights->add_option("--instances", w_instances,
                      "instance-id raster (NPY); derived from labels if absent");
  weights->add_option("--scheme", w_scheme, "gaussian | distance")->required();
  weights->add_option("--sigma", w_sigma,
                      "kernel width (default 3 gaussian, 5 distance)");
  weights->add_option("--scale", w_scale, "gaussian: edge weight scale");
  weights->add_option("--floor", w_floor, "gaussian: weight floor");
  weights->add_flag("--erode", w_erode, "erode instances before weighting");
  weights->add_option("--dense", w_dense,
                      "dense-class handling: building | ignore");
  weights->add_option("--out", w_out, "output weight raster (NPY)")->required();
  weights->callback([&]() {
    apply_globals();
    if (w_scheme != "gaussian" && w_scheme != "distance")
      throw ValidationError("--scheme must be 'gaussian' or 'distance'");
    if (w_dense != "building" && w_dense != "ignore")
      throw ValidationError("--dense must be 'building' or 'ignore'");
    const double sigma =
        w_sigma > 0.0 ? w_sigma : (w_scheme == "gaussian" ? 3.0 : 5.0);

    Raster labels = read_raster_npy(w_labels, RasterKind::kLabel);
    std::optional<Raster> instances;
    if (!w_instances.empty())
      instances = read_raster_npy(w_instances, RasterKind::kInstanceId);

    if (w_erode) {
      labels = instances ? erode_instances(labels, *instances)
                         : erode_instances(labels);
      if (instances)
        for (std::size_t i = 0; i < labels.size(); ++i)
          if (labels.data()[i] == 0.0) instances->data()[i] = 0.0;
    }

    const RemappedLabels remapped =
        remap_dense(labels, w_dense == "ignore" ? DenseRemap::kToIgnore
                                                : DenseRemap::kToBuilding);

    Raster out(RasterKind::kWeight, labels.height(), labels.width());
    if (w_scheme == "gaussian") {
      GaussianWeightParams params;
      params.sigma = sigma;
      params.scale = w_scale;
      params.floor = w_floor;
      const Raster edges =
          instances ? edge_image(labels, *instances) : edge_image(labels);
      out = gaussian_edge_weights(edges, params);
    } else {
      out = instances ? unet_distance_weights(labels, *instances, sigma)
                      : unet_distance_weights(labels, sigma);
    }
    if (w_dense == "ignore")
      for (std::size_t i = 0; i < out.size(); ++i)
        if (remapped.ignore.data()[i] != 0.0) out.data()[i] = 0.0;

    write_raster_npy(out, w_out);
    log_info("wrote weights to " + w_out);
    double lo = out.data()[0], hi = out.data()[0];
    for (const double v : out.values()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    emit("scheme", w_scheme);
    emit("min", lo);
    emit("max", hi);
    emit("out", w_out);
  });

  // --- losscheck -------------------------------------------------------------
  auto* losscheck = app.add_subcommand(
      "losscheck", "finite-difference audit of every loss gradient");
  int lc_trials = 20;
  int lc_size = 64;
  double lc_tolerance = 1e-4;
  losscheck->add_option("--trials", lc_trials, "random trials per loss")
      ->check(CLI::PositiveNumber);
  losscheck->add_option("--size", lc_size, "pixels per trial")
      ->check(CLI::PositiveNumber);
  losscheck->add_option("--tolerance", lc_tolerance,
                        "max relative error before failure");
  losscheck->callback([&]() {
    apply_globals();
    const std::vector<GradCheckReport> reports =
        run_gradient_suite(seed, lc_trials, lc_size);
    double worst = 0.0;
    for (const GradCheckReport& r : reports) {
      emit(r.loss_name + "_max_rel_err", r.max_rel_err);
      worst = std::max(worst, r.max_rel_err);
    }
    emit("max_rel_err", worst);
    emit("tolerance", lc_tolerance);
    if (worst > lc_tolerance)
      throw ValidationError("gradient check failed: " +
                            format_double(worst) + " > " +
                            format_double(lc_tolerance));
  });

  // --- postprocess -----------------------------------------------------------
  auto* post = app.add_subcommand(
      "postprocess", "confidence raster -> detection polygons");
  std::string pp_conf, pp_out, pp_image_id, pp_asset_id, pp_acquired,
      pp_geo_text;
  double pp_threshold = 0.5, pp_min_area = 4.0, pp_simplify = 0.5,
         pp_quality = 1.0;
  bool pp_no_dilate = false;
  post->add_option("--conf", pp_conf, "confidence raster (NPY)")->required();
  post->add_option("--threshold", pp_threshold, "confidence threshold");
  post->add_option("--min-area", pp_min_area, "minimum polygon area, px^2");
  post->add_option("--simplify", pp_simplify,
                   "polygon simplification tolerance, px");
  post->add_flag("--no-dilate", pp_no_dilate,
                 "skip the 3x3 instance dilation");
  post->add_option("--image-id", pp_image_id, "stamp detections' image_id");
  post->add_option("--asset-id", pp_asset_id, "stamp detections' asset_id");
  post->add_option("--acquired", pp_acquired, "stamp RFC 3339 acquisition time");
  post->add_option("--quality", pp_quality, "stamp asset quality, [0, 1]");
  post->add_option("--geo", pp_geo_text,
                   "origin lat,lon,meters_per_pixel: write lon/lat polygons");
  post->add_option("--out", pp_out, "output detections (GeoJSON)")->required();
  post->callback([&]() {
    apply_globals();
    const Raster conf = read_raster_npy(pp_conf, RasterKind::kConfidence);
    const Raster mask = threshold(conf, pp_threshold);
    InstanceMap instances = connected_components(mask);
    instances = score_instances(std::move(instances), conf);
    if (!pp_no_dilate) instances = dilate_instances(instances);
    VectorizeParams vp;
    vp.simplify_tolerance = pp_simplify;
    std::vector<Detection> dets = vectorize(instances, vp);
    dets = min_area_filter(std::move(dets), pp_min_area);
    for (Detection& det : dets) {
      det.image_id = pp_image_id;
      det.asset_id = pp_asset_id;
      det.acquired = pp_acquired;
      det.quality = pp_quality;
    }
    if (!pp_geo_text.empty()) apply_geo(&dets, parse_geo(pp_geo_text));
    write_detections_geojson(dets, pp_out);
    log_info("wrote detections to " + pp_out);
    emit("instances", static_cast<std::int64_t>(instances.scores.size()));
    emit("detections", static_cast<std::int64_t>(dets.size()));
    emit("out", pp_out);
  });

  // --- ensemble ----------------------------------------------------------------
  auto* ensemble = app.add_subcommand(
      "ensemble", "average confidence rasters from multiple scales");
  std::vector<std::string> en_inputs;
  std::string en_scales_text, en_out;
  ensemble->add_option("--inputs", en_inputs, "confidence rasters (NPY)")
      ->required()
      ->expected(-1);
  ensemble->add_option("--scales", en_scales_text,
                       "comma-separated rationals, e.g. 1,512/448,576/448");
  ensemble->add_option("--out", en_out, "output raster (NPY)")->required();
  ensemble->callback([&]() {
    apply_globals();
    std::vector<Scale> scales;
    if (en_scales_text.empty())
      scales.assign(en_inputs.size(), Scale{});
    else
      scales = parse_scales(en_scales_text);
    if (scales.size() != en_inputs.size())
      throw ValidationError("--scales must list one scale per input (" +
                            std::to_string(en_inputs.size()) + " inputs, " +
                            std::to_string(scales.size()) + " scales)");

    std::vector<Raster> masks;
    masks.reserve(en_inputs.size());
    for (const std::string& path : en_inputs)
      masks.push_back(read_raster_npy(path, RasterKind::kConfidence));

    const auto descale = [](int extent, const Scale& s) {
      return static_cast<int>(std::llround(
          static_cast<double>(extent) * static_cast<double>(s.den) /
          static_cast<double>(s.num)));
    };
    const int target_h = descale(masks[0].height(), scales[0]);
    const int target_w = descale(masks[0].width(), scales[0]);
    for (std::size_t i = 0; i < masks.size(); ++i) {
      const auto expect = [&](int target) {
        return static_cast<double>(target) * static_cast<double>(scales[i].num) /
               static_cast<double>(scales[i].den);
      };
      if (std::fabs(masks[i].height() - expect(target_h)) > 1.0 ||
          std::fabs(masks[i].width() - expect(target_w)) > 1.0)
        throw ValidationError(
            "input '" + en_inputs[i] + "' is " +
            std::to_string(masks[i].height()) + "x" +
            std::to_string(masks[i].width()) + ", which does not match scale " +
            std::to_string(scales[i].num) + "/" +
            std::to_string(scales[i].den) + " of " +
            std::to_string(target_h) + "x" + std::to_string(target_w));
    }

    const Raster avg = average_masks(masks, target_h, target_w);
    write_raster_npy(avg, en_out);
    log_info("wrote ensemble average to " + en_out);
    emit("inputs", static_cast<std::int64_t>(masks.size()));
    emit("height", static_cast<std::int64_t>(target_h));
    emit("width", static_cast<std::int64_t>(target_w));
    emit("out", en_out);
  });

  // --- evaluate ----------------------------------------------------------------
  auto* evaluate = app.add_subcommand(
      "evaluate", "match detections to ground truth; PR curves and AP");
  std::string ev_det, ev_gt, ev_out, ev_group_dir;
  double ev_iou = 0.5, ev_resolution = 4.0;
  evaluate->add_option("--det", ev_det, "detections (GeoJSON)")->required();
  evaluate->add_option("--gt", ev_gt, "ground truth (GeoJSON)")->required();
  evaluate->add_option("--iou", ev_iou, "IoU threshold");
  evaluate->add_option("--resolution", ev_resolution,
                       "IoU rasterization, cells per unit");
  evaluate->add_option("--out", ev_out, "overall PR curve (CSV)")->required();
  evaluate->add_option("--group-csv-dir", ev_group_dir,
                       "also write one PR CSV per group");
  evaluate->callback([&]() {
    apply_globals();
    const std::vector<Detection> dets = read_detections_geojson(ev_det);
    const std::vector<GroundTruth> gts = read_ground_truth_geojson(ev_gt);
    const auto groups = image_groups(gts);
    const auto evals =
        evaluate_groups(dets, gts, groups, ev_iou, ev_resolution);

    const GroupEval& overall = evals.at("overall");
    PrCsv csv{overall.curve, overall.ap_exact, overall.ap_101};
    write_pr_csv(csv, ev_out);
    log_info("wrote PR curve to " + ev_out);

    if (!ev_group_dir.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(ev_group_dir, ec);
      if (ec)
        throw IoError("cannot create directory '" + ev_group_dir + "': " +
                      ec.message());
      for (const auto& [key, eval] : evals) {
        if (key == "overall") continue;
        const std::string path =
            (std::filesystem::path(ev_group_dir) /
             (sanitize_filename(key) + ".csv"))
                .string();
        write_pr_csv(PrCsv{eval.curve, eval.ap_exact, eval.ap_101}, path);
        log_info("wrote PR curve for '" + key + "' to " + path);
      }
    }

    emit("detections", static_cast<std::int64_t>(dets.size()));
    emit("ground_truth", static_cast<std::int64_t>(gts.size()));
    emit("n_gt", static_cast<std::int64_t>(overall.n_gt));
    emit("ap_exact", overall.ap_exact);
    emit("ap_101", overall.ap_101);
    emit("out", ev_out);
    for (const auto& [key, eval] : evals) {
      if (key == "overall") continue;
      emit("group." + key + ".ap_exact", eval.ap_exact);
      emit("group." + key + ".ap_101", eval.ap_101);
      emit("group." + key + ".n_gt", static_cast<std::int64_t>(eval.n_gt));
    }
  });

  // --- calibrate ----------------------------------------------------------------
  auto* calibrate = app.add_subcommand(
      "calibrate", "smallest score threshold reaching a target precision");
  std::string ca_det, ca_gt, ca_cells_text, ca_cell_weights, ca_per_cell;
  double ca_iou = 0.5, ca_resolution = 4.0, ca_precision = 0.9;
  calibrate->add_option("--matches,--det", ca_det, "detections (GeoJSON)")
      ->required();
  calibrate->add_option("--gt", ca_gt, "ground truth (GeoJSON)")->required();
  calibrate->add_option("--iou", ca_iou, "IoU threshold");
  calibrate->add_option("--resolution", ca_resolution,
                        "IoU rasterization, cells per unit");
  calibrate->add_option("--precision", ca_precision, "target precision, (0, 1]")
      ->required();
  calibrate->add_option(
      "--cells", ca_cells_text,
      "level=N: weight detections by spatial cell (lon/lat coordinates)");
  calibrate->add_option("--cell-weights", ca_cell_weights,
                        "JSON object: cell token -> weight");
  calibrate->add_option("--per-cell", ca_per_cell,
                        "also write per-cell thresholds (CSV)");
  calibrate->callback([&]() {
    apply_globals();
    const std::vector<Detection> dets = read_detections_geojson(ca_det);
    const std::vector<GroundTruth> gts = read_ground_truth_geojson(ca_gt);

    int cell_level = -1;
    if (!ca_cells_text.empty()) {
      if (ca_cells_text.rfind("level=", 0) != 0)
        throw ValidationError("--cells expects level=N");
      const std::string num = ca_cells_text.substr(6);
      const auto [next, ec] = std::from_chars(
          num.data(), num.data() + num.size(), cell_level);
      if (ec != std::errc() || next != num.data() + num.size())
        throw ValidationError("--cells expects level=N");
    }
    if (cell_level < 0 && (!ca_cell_weights.empty() || !ca_per_cell.empty()))
      throw ValidationError("--cell-weights/--per-cell need --cells level=N");

    std::vector<std::string> det_cell(dets.size());
    std::map<std::string, double> cell_weight;
    if (cell_level >= 0) {
      for (std::size_t i = 0; i < dets.size(); ++i) {
        const Vec2 c = polygon_centroid(dets[i].poly);
        det_cell[i] = cell_token(cell_of(c.y, c.x, cell_level));
      }
      if (!ca_cell_weights.empty()) {
        nlohmann::json doc;
        try {
          doc = nlohmann::json::parse(read_file(ca_cell_weights));
        } catch (const nlohmann::json::exception& e) {
          throw ValidationError("'" + ca_cell_weights +
                                "': invalid JSON: " + e.what());
        }
        if (!doc.is_object())
          throw ValidationError("'" + ca_cell_weights +
                                "': expected an object of token -> weight");
        for (const auto& [token, value] : doc.items()) {
          parse_cell_token(token);
          if (!value.is_number() || value.get<double>() < 0.0)
            throw ValidationError("'" + ca_cell_weights + "': weight for '" +
                                  token + "' must be a nonnegative number");
          cell_weight[token] = value.get<double>();
        }
      }
    }

    const auto weight_of = [&](std::size_t det_index) {
      if (cell_level < 0) return 1.0;
      const auto it = cell_weight.find(det_cell[det_index]);
      return it == cell_weight.end() ? 1.0 : it->second;
    };
    const MatchResult pooled =
        pooled_matches(dets, gts, ca_iou, ca_resolution, weight_of);

    const std::optional<double> threshold =
        calibrate_threshold(pooled, ca_precision);
    emit("entries", static_cast<std::int64_t>(pooled.entries.size()));
    emit("precision_target", ca_precision);
    if (threshold)
      emit("threshold", *threshold);
    else
      emit("threshold", "unreachable");

    if (!ca_per_cell.empty()) {
      // Unweighted per-cell thresholds. Entries pool in detection order per
      // image, so recover each entry's cell through the same partition.
      std::map<std::string, MatchResult> per_cell;
      const MatchResult flat = pooled_matches(
          dets, gts, ca_iou, ca_resolution,
          [](std::size_t) { return 1.0; });
      // Rebuild the detection order used by pooled_matches.
      std::map<std::string, std::vector<std::size_t>> det_idx;
      for (std::size_t i = 0; i < dets.size(); ++i)
        det_idx[dets[i].image_id].push_back(i);
      std::set<std::string> images;
      for (const Detection& d : dets) images.insert(d.image_id);
      for (const GroundTruth& gt : gts) images.insert(gt.image_id);
      std::vector<std::size_t> order;
      for (const std::string& image : images)
        for (const std::size_t i : det_idx[image]) order.push_back(i);

      for (std::size_t k = 0; k < flat.entries.size(); ++k)
        per_cell[det_cell[order[k]]].entries.push_back(flat.entries[k]);

      std::string csv = "cell,threshold\n";
      for (const auto& [token, result] : per_cell) {
        const std::optional<double> t =
            calibrate_threshold(result, ca_precision);
        csv += token + "," + (t ? format_double(*t) : "unreachable") + "\n";
      }
      write_file_atomic(ca_per_cell, csv);
      log_info("wrote per-cell thresholds to " + ca_per_cell);
      emit("cells", static_cast<std::int64_t>(per_cell.size()));
      emit("per_cell", ca_per_cell);
    }
  });

  // --- dedup ----------------------------------------------------------------
  auto* dedup = app.add_subcommand(
      "dedup", "collapse duplicate detections across overlapping assets");
  std::string dd_in, dd_coverage, dd_out;
  DedupParams dd_params;
  dedup->add_option("--in", dd_in, "detections (GeoJSON)")->required();
  dedup->add_option("--coverage", dd_coverage,
                    "asset footprints + quality (GeoJSON)")
      ->required();
  dedup->add_option("--iou", dd_params.iou_thr, "grouping IoU threshold");
  dedup->add_option("--agree-conf", dd_params.agree_conf,
                    "score needed where assets overlap");
  dedup->add_option("--resolution", dd_params.resolution,
                    "IoU rasterization, cells per unit");
  dedup->add_option("--out", dd_out, "deduplicated detections (GeoJSON)")
      ->required();
  dedup->callback([&]() {
    apply_globals();
    const std::vector<Detection> dets = read_detections_geojson(dd_in);
    const AssetCoverage coverage = read_coverage_geojson(dd_coverage);
    const auto groups =
        group_detections(dets, dd_params.iou_thr, dd_params.resolution);
    const std::vector<Detection> kept = deduplicate(dets, coverage, dd_params);
    write_detections_geojson(kept, dd_out);
    log_info("wrote deduplicated detections to " + dd_out);
    emit("input", static_cast<std::int64_t>(dets.size()));
    emit("groups", static_cast<std::int64_t>(groups.size()));
    emit("kept", static_cast<std::int64_t>(kept.size()));
    emit("dropped_agreement",
         static_cast<std::int64_t>(groups.size() - kept.size()));
    emit("out", dd_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const seg2f::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const seg2f::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
