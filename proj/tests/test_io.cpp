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

#include <unistd.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "seg2f/io.hpp"
#include "seg2f/rng.hpp"

namespace {

using seg2f::NpyError;
using seg2f::NpyErrorKind;
using seg2f::Raster;
using seg2f::RasterKind;
using seg2f::Rng;

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("seg2f_io_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

// Assembles an NPY v1.0 file with an arbitrary header dict.
std::string make_npy(const std::string& dict, const std::string& payload) {
  std::string header = dict;
  const std::size_t base = 10 + header.size() + 1;
  const std::size_t padded = (base + 63) / 64 * 64;
  header.append(padded - base, ' ');
  header.push_back('\n');
  std::string out("\x93NUMPY\x01\x00", 8);
  out.push_back(static_cast<char>(header.size() & 0xff));
  out.push_back(static_cast<char>(header.size() >> 8));
  out += header;
  out += payload;
  return out;
}

std::string f8_payload(const std::vector<double>& values) {
  std::string out(values.size() * 8, '\0');
  std::memcpy(out.data(), values.data(), out.size());
  return out;
}

NpyErrorKind read_error_kind(const std::string& path, RasterKind kind) {
  try {
    seg2f::read_raster_npy(path, kind);
  } catch (const NpyError& e) {
    return e.kind();
  }
  FAIL("expected NpyError");
  return NpyErrorKind::kBadMagic;
}

}  // namespace

TEST_CASE("npy round trips every raster kind") {
  TempDir dir;
  Rng rng(91);
  const RasterKind kinds[] = {RasterKind::kConfidence, RasterKind::kLabel,
                              RasterKind::kWeight, RasterKind::kInstanceId,
                              RasterKind::kImageChannel};
  for (RasterKind kind : kinds) {
    Raster r(kind, 5, 7);
    for (auto& v : r.values()) {
      switch (kind) {
        case RasterKind::kLabel: v = double(rng.bounded(3)); break;
        case RasterKind::kInstanceId: v = double(rng.bounded(9)); break;
        case RasterKind::kWeight: v = rng.uniform(0.0, 300.0); break;
        default: v = rng.next_double(); break;
      }
    }
    const std::string path = dir.file("round.npy");
    seg2f::write_raster_npy(r, path);
    const Raster back = seg2f::read_raster_npy(path, kind);
    CHECK(back.height() == 5);
    CHECK(back.width() == 7);
    CHECK(back.kind() == kind);
    CHECK(back.values() == r.values());
  }
}

TEST_CASE("npy header layout is frozen") {
  TempDir dir;
  Raster r(RasterKind::kConfidence, 2, 3);
  for (std::size_t i = 0; i < 6; ++i) r.values()[i] = 0.125 * double(i);
  const std::string path = dir.file("layout.npy");
  seg2f::write_raster_npy(r, path);
  const std::string bytes = seg2f::read_file(path);
  // The header dict plus magic and padding lands the payload on the next
  // 64-byte boundary, here 128. Six doubles follow.
  CHECK(bytes.size() == 128 + 48);
  CHECK(bytes.substr(0, 8) == std::string("\x93NUMPY\x01\x00", 8));
  CHECK(static_cast<unsigned char>(bytes[8]) == 118);  // header length LE
  CHECK(static_cast<unsigned char>(bytes[9]) == 0);
  const std::string dict =
      "{'descr': '<f8', 'fortran_order': False, 'shape': (2, 3), }";
  CHECK(bytes.substr(10, dict.size()) == dict);
  for (std::size_t i = 10 + dict.size(); i + 1 < 128; ++i)
    CHECK(bytes[i] == ' ');
  CHECK(bytes[127] == '\n');
  double first = 0.0;
  std::memcpy(&first, bytes.data() + 128, 8);
  CHECK(first == 0.0);
  std::memcpy(&first, bytes.data() + 128 + 40, 8);
  CHECK(first == 0.625);
}

TEST_CASE("npy labels use one byte per pixel") {
  TempDir dir;
  Raster labels(RasterKind::kLabel, 4, 4);
  labels.at(0, 0) = 1.0;
  labels.at(3, 3) = 2.0;
  const std::string path = dir.file("labels.npy");
  seg2f::write_raster_npy(labels, path);
  const std::string bytes = seg2f::read_file(path);
  CHECK(bytes.size() == 128 + 16);
  CHECK(bytes.find("'|u1'") != std::string::npos);
  const Raster back = seg2f::read_raster_npy(path, RasterKind::kLabel);
  CHECK(back.values() == labels.values());
}

TEST_CASE("npy instance ids widen to doubles past 255") {
  TempDir dir;
  Raster small(RasterKind::kInstanceId, 1, 3);
  small.at(0, 2) = 255.0;
  seg2f::write_raster_npy(small, dir.file("small.npy"));
  CHECK(seg2f::read_file(dir.file("small.npy")).find("'|u1'") !=
        std::string::npos);

  Raster big(RasterKind::kInstanceId, 1, 3);
  big.at(0, 2) = 256.0;
  seg2f::write_raster_npy(big, dir.file("big.npy"));
  CHECK(seg2f::read_file(dir.file("big.npy")).find("'<f8'") !=
        std::string::npos);
  const Raster back =
      seg2f::read_raster_npy(dir.file("big.npy"), RasterKind::kInstanceId);
  CHECK(back.values() == big.values());
}

TEST_CASE("npy reader distinguishes its failure modes") {
  TempDir dir;
  const auto drop = [&](const std::string& name, const std::string& bytes) {
    seg2f::write_file_atomic(dir.file(name), bytes);
    return dir.file(name);
  };
  const std::string good_dict =
      "{'descr': '<f8', 'fortran_order': False, 'shape': (1, 2), }";
  const std::string two = f8_payload({0.25, 0.5});

  // Magic problems, including the empty file.
  CHECK(read_error_kind(drop("empty.npy", ""), RasterKind::kConfidence) ==
        NpyErrorKind::kBadMagic);
  CHECK(read_error_kind(drop("junk.npy", "NOTANARRAY AT ALL............"),
                        RasterKind::kConfidence) == NpyErrorKind::kBadMagic);

  // Unsupported element types and orders.
  const auto swap_descr = [&](const std::string& descr) {
    std::string dict = good_dict;
    const auto at = dict.find("<f8");
    dict.replace(at, 3, descr);
    return drop("descr.npy", make_npy(dict, two));
  };
  CHECK(read_error_kind(swap_descr("<i4"), RasterKind::kConfidence) ==
        NpyErrorKind::kUnsupportedDtype);
  CHECK(read_error_kind(swap_descr(">f8"), RasterKind::kConfidence) ==
        NpyErrorKind::kUnsupportedDtype);
  {
    std::string dict = good_dict;
    const auto at = dict.find("False");
    dict.replace(at, 5, "True");
    CHECK(read_error_kind(drop("fortran.npy", make_npy(dict, two)),
                          RasterKind::kConfidence) ==
          NpyErrorKind::kUnsupportedDtype);
  }

  // Truncations of header and payload.
  const std::string whole = make_npy(good_dict, two);
  CHECK(read_error_kind(drop("short_header.npy", whole.substr(0, 9)),
                        RasterKind::kConfidence) == NpyErrorKind::kTruncated);
  CHECK(read_error_kind(drop("cut_header.npy", whole.substr(0, 31)),
                        RasterKind::kConfidence) == NpyErrorKind::kTruncated);
  CHECK(read_error_kind(drop("cut_payload.npy", whole.substr(0, 71)),
                        RasterKind::kConfidence) == NpyErrorKind::kTruncated);

  // Structural nonsense.
  {
    std::string v2 = whole;
    v2[6] = '\x02';
    CHECK(read_error_kind(drop("v2.npy", v2), RasterKind::kConfidence) ==
          NpyErrorKind::kMalformedHeader);
  }
  CHECK(read_error_kind(
            drop("flat.npy",
                 make_npy("{'descr': '<f8', 'fortran_order': False, "
                          "'shape': (2,), }",
                          two)),
            RasterKind::kConfidence) == NpyErrorKind::kMalformedHeader);
  CHECK(read_error_kind(
            drop("nodict.npy", make_npy("'descr' but no braces", two)),
            RasterKind::kConfidence) == NpyErrorKind::kMalformedHeader);
  CHECK(read_error_kind(drop("extra.npy", whole + "tail"),
                        RasterKind::kConfidence) ==
        NpyErrorKind::kMalformedHeader);

  // Value range problems are validation, not format, errors.
  CHECK_THROWS_AS(seg2f::read_raster_npy(
                      drop("range.npy", make_npy(good_dict,
                                                 f8_payload({0.5, 1.5}))),
                      RasterKind::kConfidence),
                  seg2f::ValidationError);
  CHECK_THROWS_AS(
      seg2f::read_raster_npy(
          drop("nan.npy",
               make_npy(good_dict, f8_payload({0.5, std::nan("")}))),
          RasterKind::kConfidence),
      seg2f::ValidationError);
  CHECK_THROWS_AS(seg2f::read_raster_npy(
                      drop("label3.npy", make_npy(good_dict,
                                                  f8_payload({0.0, 3.0}))),
                      RasterKind::kLabel),
                  seg2f::ValidationError);
  // A fractional instance id is not an id.
  CHECK_THROWS_AS(seg2f::read_raster_npy(
                      drop("frac.npy", make_npy(good_dict,
                                                f8_payload({0.0, 2.5}))),
                      RasterKind::kInstanceId),
                  seg2f::ValidationError);
}

TEST_CASE("detections geojson round trip") {
  TempDir dir;
  std::vector<seg2f::Detection> dets(2);
  dets[0].poly = seg2f::Polygon{{{0, 0}, {4, 0}, {4, 3}, {0, 3}}};
  dets[0].score = 0.875;
  dets[0].image_id = "tile_7";
  dets[0].asset_id = "sat_a";
  dets[0].acquired = "2026-03-01T12:30:00Z";
  dets[0].quality = 0.75;
  dets[1].poly = seg2f::Polygon{{{10, 10}, {15, 10}, {12, 14}}};
  dets[1].score = 0.5;

  const std::string path = dir.file("dets.geojson");
  seg2f::write_detections_geojson(dets, path);
  const auto back = seg2f::read_detections_geojson(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].score == 0.875);
  CHECK(back[0].image_id == "tile_7");
  CHECK(back[0].asset_id == "sat_a");
  CHECK(back[0].acquired == "2026-03-01T12:30:00Z");
  CHECK(back[0].quality == 0.75);
  REQUIRE(back[0].poly.ring.size() == 4);
  CHECK(back[0].poly.ring[2].x == 4.0);
  CHECK(back[0].poly.ring[2].y == 3.0);
  CHECK(back[1].image_id.empty());
  CHECK(back[1].quality == 1.0);
  CHECK(back[1].poly.ring.size() == 3);
}

TEST_CASE("detections geojson validation") {
  TempDir dir;
  const std::string path = dir.file("bad.geojson");
  const auto expect_throw = [&](const std::string& body) {
    seg2f::write_file_atomic(path, body);
    CHECK_THROWS_AS(seg2f::read_detections_geojson(path),
                    seg2f::ValidationError);
  };
  const std::string ring = R"([[0,0],[4,0],[4,3],[0,3],[0,0]])";

  // Score out of range / missing / wrong type.
  expect_throw(R"({"type":"FeatureCollection","features":[{"type":"Feature",
      "geometry":{"type":"Polygon","coordinates":[)" + ring +
               R"(]},"properties":{"score":1.5}}]})");
  expect_throw(R"({"type":"FeatureCollection","features":[{"type":"Feature",
      "geometry":{"type":"Polygon","coordinates":[)" + ring +
               R"(]},"properties":{}}]})");
  expect_throw(R"({"type":"FeatureCollection","features":[{"type":"Feature",
      "geometry":{"type":"Polygon","coordinates":[)" + ring +
               R"(]},"properties":{"score":"high"}}]})");
  // Unclosed ring.
  expect_throw(R"({"type":"FeatureCollection","features":[{"type":"Feature",
      "geometry":{"type":"Polygon","coordinates":[[[0,0],[4,0],[4,3],[0,3]]]},
      "properties":{"score":0.5}}]})");
  // Interior ring (hole).
  expect_throw(R"({"type":"FeatureCollection","features":[{"type":"Feature",
      "geometry":{"type":"Polygon","coordinates":[)" + ring + "," + ring +
               R"(]},"properties":{"score":0.5}}]})");
  // Wrong geometry type.
  expect_throw(R"({"type":"FeatureCollection","features":[{"type":"Feature",
      "geometry":{"type":"Point","coordinates":[1,2]},
      "properties":{"score":0.5}}]})");
  // Detection class, when present, must be building.
  expect_throw(R"({"type":"FeatureCollection","features":[{"type":"Feature",
      "geometry":{"type":"Polygon","coordinates":[)" + ring +
               R"(]},"properties":{"score":0.5,"class":"dense"}}]})");
  // Malformed timestamp.
  expect_throw(R"({"type":"FeatureCollection","features":[{"type":"Feature",
      "geometry":{"type":"Polygon","coordinates":[)" + ring +
               R"(]},"properties":{"score":0.5,"acquired":"yesterday"}}]})");
  // Not JSON at all.
  expect_throw("][");

  // The error message names the offending feature.
  seg2f::write_file_atomic(
      path, R"({"type":"FeatureCollection","features":[
        {"type":"Feature","geometry":{"type":"Polygon","coordinates":[)" +
                ring + R"(]},"properties":{"score":0.5}},
        {"type":"Feature","geometry":{"type":"Polygon","coordinates":[)" +
                ring + R"(]},"properties":{}}]})");
  try {
    seg2f::read_detections_geojson(path);
    FAIL("expected ValidationError");
  } catch (const seg2f::ValidationError& e) {
    CHECK(std::string(e.what()).find("feature 1") != std::string::npos);
  }
}

TEST_CASE("acquired timestamps accept offsets and fractions") {
  TempDir dir;
  const std::string path = dir.file("times.geojson");
  for (const char* good :
       {"2026-03-01T12:30:00Z", "2026-03-01T12:30:00.25Z",
        "2026-03-01T12:30:00+05:30", "2026-12-31T23:59:59-08:00"}) {
    std::vector<seg2f::Detection> dets(1);
    dets[0].poly = seg2f::Polygon{{{0, 0}, {4, 0}, {4, 3}, {0, 3}}};
    dets[0].score = 0.5;
    dets[0].acquired = good;
    seg2f::write_detections_geojson(dets, path);
    CHECK(seg2f::read_detections_geojson(path)[0].acquired == good);
  }
  std::vector<seg2f::Detection> dets(1);
  dets[0].poly = seg2f::Polygon{{{0, 0}, {4, 0}, {4, 3}, {0, 3}}};
  dets[0].score = 0.5;
  dets[0].acquired = "2026-03-01 12:30:00Z";  // missing the T
  CHECK_THROWS_AS(seg2f::write_detections_geojson(dets, path),
                  seg2f::ValidationError);
}

TEST_CASE("ground truth geojson round trip") {
  TempDir dir;
  std::vector<seg2f::GroundTruth> gts(2);
  gts[0].poly = seg2f::Polygon{{{0, 0}, {4, 0}, {4, 3}, {0, 3}}};
  gts[0].dense = false;
  gts[0].image_id = "tile_1";
  gts[0].group = "urban";
  gts[1].poly = seg2f::Polygon{{{8, 8}, {12, 8}, {12, 12}, {8, 12}}};
  gts[1].dense = true;

  const std::string path = dir.file("gt.geojson");
  seg2f::write_ground_truth_geojson(gts, path);
  const auto back = seg2f::read_ground_truth_geojson(path);
  REQUIRE(back.size() == 2);
  CHECK(!back[0].dense);
  CHECK(back[0].image_id == "tile_1");
  CHECK(back[0].group == "urban");
  CHECK(back[1].dense);
  CHECK(back[1].group.empty());

  // Unknown class names are rejected.
  seg2f::write_file_atomic(
      path, R"({"type":"FeatureCollection","features":[{"type":"Feature",
      "geometry":{"type":"Polygon","coordinates":[[[0,0],[4,0],[4,3],[0,3],[0,0]]]},
      "properties":{"class":"lake"}}]})");
  CHECK_THROWS_AS(seg2f::read_ground_truth_geojson(path),
                  seg2f::ValidationError);
}

TEST_CASE("coverage geojson round trip") {
  TempDir dir;
  seg2f::AssetCoverage cov;
  cov.footprints["a"] = seg2f::Polygon{{{0, 0}, {50, 0}, {50, 50}, {0, 50}}};
  cov.footprints["b"] = seg2f::Polygon{{{25, 0}, {80, 0}, {80, 50}, {25, 50}}};
  cov.quality["a"] = 1.0;
  cov.quality["b"] = 0.625;
  const std::string path = dir.file("cov.geojson");
  seg2f::write_coverage_geojson(cov, path);
  const auto back = seg2f::read_coverage_geojson(path);
  REQUIRE(back.footprints.size() == 2);
  CHECK(back.quality.at("a") == 1.0);
  CHECK(back.quality.at("b") == 0.625);
  CHECK(back.footprints.at("b").ring[0].x == 25.0);

  // Quality defaults to 1, duplicate ids are rejected.
  const std::string feature =
      R"({"type":"Feature","geometry":{"type":"Polygon",
      "coordinates":[[[0,0],[4,0],[4,3],[0,3],[0,0]]]},
      "properties":{"asset_id":"dup"}})";
  seg2f::write_file_atomic(
      path, R"({"type":"FeatureCollection","features":[)" + feature + "]}");
  CHECK(seg2f::read_coverage_geojson(path).quality.at("dup") == 1.0);
  seg2f::write_file_atomic(path,
                           R"({"type":"FeatureCollection","features":[)" +
                               feature + "," + feature + "]}");
  CHECK_THROWS_AS(seg2f::read_coverage_geojson(path), seg2f::ValidationError);
}

TEST_CASE("pr csv round trip") {
  TempDir dir;
  seg2f::PrCsv pr;
  pr.curve = {{0.9, 1.0, 0.5}, {0.7, 2.0 / 3.0, 1.0}};
  pr.ap_exact = 5.0 / 6.0;
  pr.ap_101 = 0.834983498349835;
  const std::string path = dir.file("pr.csv");
  seg2f::write_pr_csv(pr, path);

  const std::string text = seg2f::read_file(path);
  CHECK(text.find("score,precision,recall\n") == 0);
  CHECK(text.find("0.9,1.0,0.5\n") != std::string::npos);

  const seg2f::PrCsv back = seg2f::read_pr_csv(path);
  REQUIRE(back.curve.size() == 2);
  // Shortest round-trip formatting restores the exact doubles.
  CHECK(back.curve[1].precision == pr.curve[1].precision);
  CHECK(back.curve[1].score == 0.7);
  CHECK(back.ap_exact == pr.ap_exact);
  CHECK(back.ap_101 == pr.ap_101);

  // An empty curve still carries the ap comment.
  seg2f::write_pr_csv(seg2f::PrCsv{{}, 0.0, 0.0}, path);
  CHECK(seg2f::read_pr_csv(path).curve.empty());

  seg2f::write_file_atomic(path, "wrong,header\n# ap_exact=0.0,ap_101=0.0\n");
  CHECK_THROWS_AS(seg2f::read_pr_csv(path), seg2f::ValidationError);
  seg2f::write_file_atomic(path, "score,precision,recall\n0.9,1.0,0.5\n");
  CHECK_THROWS_AS(seg2f::read_pr_csv(path), seg2f::ValidationError);
}

TEST_CASE("pixel_to_lonlat fixture") {
  seg2f::GeoTransform geo;
  geo.origin_lat = 10.0;
  geo.origin_lon = 20.0;
  geo.meters_per_pixel = 0.5;
  double lon = 0.0, lat = 0.0;
  seg2f::pixel_to_lonlat(geo, 0.0, 0.0, &lon, &lat);
  CHECK(lon == 20.0);
  CHECK(lat == 10.0);
  seg2f::pixel_to_lonlat(geo, 200.0, 100.0, &lon, &lat);
  const double lat_rad = 10.0 * 3.14159265358979323846 / 180.0;
  CHECK(lon == doctest::Approx(20.0 + 200.0 * 0.5 /
                                          (111320.0 * std::cos(lat_rad)))
                   .epsilon(1e-15));
  CHECK(lat == doctest::Approx(10.0 - 100.0 * 0.5 / 111320.0).epsilon(1e-15));
  CHECK(lat < 10.0);  // y grows downward, latitude shrinks
}

TEST_CASE("manifest round trip and validation") {
  TempDir dir;
  // Materialize the referenced files.
  Raster labels(RasterKind::kLabel, 2, 2);
  seg2f::write_raster_npy(labels, dir.file("labels.npy"));
  Raster chan(RasterKind::kImageChannel, 2, 2);
  seg2f::write_raster_npy(chan, dir.file("c0.npy"));
  seg2f::write_ground_truth_geojson({}, dir.file("gt.geojson"));

  seg2f::DatasetManifest manifest;
  seg2f::ManifestRecord rec;
  rec.image = {"c0.npy"};
  rec.labels = "labels.npy";
  rec.ground_truth = "gt.geojson";
  rec.group = "synthetic";
  rec.geo.origin_lat = 1.0;
  rec.geo.origin_lon = 2.0;
  rec.geo.meters_per_pixel = 0.3;
  manifest.records.push_back(rec);

  const std::string path = dir.file("manifest.json");
  seg2f::write_manifest(manifest, path);
  const auto back = seg2f::read_manifest(path);
  REQUIRE(back.records.size() == 1);
  CHECK(back.records[0].image == std::vector<std::string>{"c0.npy"});
  CHECK(back.records[0].labels == "labels.npy");
  CHECK(back.records[0].ground_truth == "gt.geojson");
  CHECK(back.records[0].group == "synthetic");
  CHECK(back.records[0].geo.origin_lat == 1.0);
  CHECK(back.records[0].geo.meters_per_pixel == 0.3);

  // A record pointing at a file that is not there is rejected.
  seg2f::DatasetManifest ghost = manifest;
  ghost.records[0].labels = "nowhere.npy";
  seg2f::write_manifest(ghost, path);
  CHECK_THROWS_AS(seg2f::read_manifest(path), seg2f::ValidationError);

  // Group is required.
  seg2f::DatasetManifest nogroup = manifest;
  nogroup.records[0].group = "";
  seg2f::write_manifest(nogroup, path);
  CHECK_THROWS_AS(seg2f::read_manifest(path), seg2f::ValidationError);
}

TEST_CASE("write_file_atomic leaves no temporary behind") {
  TempDir dir;
  const std::string path = dir.file("out.txt");
  seg2f::write_file_atomic(path, "payload");
  CHECK(seg2f::read_file(path) == "payload");
  int files = 0;
  for ([[maybe_unused]] const auto& entry :
       std::filesystem::directory_iterator(dir.path))
    ++files;
  CHECK(files == 1);
  // Overwrite is atomic too.
  seg2f::write_file_atomic(path, "second");
  CHECK(seg2f::read_file(path) == "second");
  CHECK_THROWS_AS(seg2f::read_file(dir.file("missing.txt")), seg2f::IoError);
}

TEST_CASE("format_double") {
  CHECK(seg2f::format_double(1.0) == "1.0");
  CHECK(seg2f::format_double(42.0) == "42.0");
  CHECK(seg2f::format_double(-3.0) == "-3.0");
  CHECK(seg2f::format_double(0.5) == "0.5");
  CHECK(seg2f::format_double(0.1) == "0.1");
  CHECK(seg2f::format_double(2.0 / 3.0) == "0.6666666666666666");
  // Shortest form must parse back to the identical double.
  Rng rng(92);
  for (int i = 0; i < 200; ++i) {
    const double v = rng.uniform(-1e6, 1e6);
    CHECK(std::stod(seg2f::format_double(v)) == v);
  }
}
