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

#ifndef SEG2F_IO_HPP_
#define SEG2F_IO_HPP_

#include <string>
#include <vector>

#include "seg2f/dedup.hpp"
#include "seg2f/detection.hpp"
#include "seg2f/errors.hpp"
#include "seg2f/metrics.hpp"
#include "seg2f/raster.hpp"

namespace seg2f {

enum class NpyErrorKind {
  kBadMagic,
  kUnsupportedDtype,
  kTruncated,
  kMalformedHeader,
};

class NpyError : public IoError {
 public:
  NpyError(NpyErrorKind kind, const std::string& what)
      : IoError(what), kind_(kind) {}
  NpyErrorKind kind() const { return kind_; }

 private:
  NpyErrorKind kind_;
};

// Rasters travel as NPY version 1.0 arrays (2-D, C order). Element types:
// float kinds use '<f8'; labels use '|u1'; instance ids use '|u1', or
// '<f8' once ids exceed 255 (doubles hold them exactly). Written headers
// are space-padded so the payload starts at a 64-byte boundary. Values are
// range-checked against the kind on read.
Raster read_raster_npy(const std::string& path, RasterKind kind);
void write_raster_npy(const Raster& raster, const std::string& path);

// Detections and ground truth travel as GeoJSON FeatureCollections of
// polygons (closed exterior ring, no holes). Detection features require
// "score" in [0, 1]; validation errors name the offending feature index.
// Optional properties: class ("building"), image_id, asset_id, acquired
// (RFC 3339), quality in [0, 1].
std::vector<Detection> read_detections_geojson(const std::string& path);
void write_detections_geojson(const std::vector<Detection>& detections,
                              const std::string& path);

// Ground-truth features carry "class" ("building" or "dense") plus
// optional image_id and group.
std::vector<GroundTruth> read_ground_truth_geojson(const std::string& path);
void write_ground_truth_geojson(const std::vector<GroundTruth>& ground_truth,
                                const std::string& path);

// Asset coverage: one polygon feature per asset with asset_id and quality.
AssetCoverage read_coverage_geojson(const std::string& path);
void write_coverage_geojson(const AssetCoverage& coverage,
                            const std::string& path);

// Precision-recall CSV: "score,precision,recall" rows in curve order,
// then a trailing "# ap_exact=...,ap_101=..." comment line.
struct PrCsv {
  std::vector<PRPoint> curve;
  double ap_exact = 0.0;
  double ap_101 = 0.0;
};
void write_pr_csv(const PrCsv& pr, const std::string& path);
PrCsv read_pr_csv(const std::string& path);

// Local equirectangular georeferencing of a tile: pixel (x, y) maps to
//   lon = origin_lon + x * mpp / (111320 * cos(origin_lat))
//   lat = origin_lat - y * mpp / 111320.
struct GeoTransform {
  double origin_lat = 0.0;
  double origin_lon = 0.0;
  double meters_per_pixel = 0.5;
};
void pixel_to_lonlat(const GeoTransform& geo, double px, double py,
                     double* lon, double* lat);

struct ManifestRecord {
  std::vector<std::string> image;  // one NPY per channel
  std::string labels;              // label raster NPY
  std::string ground_truth;        // GeoJSON
  std::string group;               // evaluation category key
  GeoTransform geo;
};

struct DatasetManifest {
  std::vector<ManifestRecord> records;
};

DatasetManifest read_manifest(const std::string& path);
void write_manifest(const DatasetManifest& manifest, const std::string& path);

// All writers go through this: write to a sibling temp file, then rename,
// so readers never observe partial files.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Locale-independent shortest round-trip decimal formatting; integral
// values keep a trailing ".0" so the text stays unambiguously a double.
std::string format_double(double value);

}  // namespace seg2f

#endif  // SEG2F_IO_HPP_
