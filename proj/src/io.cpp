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

#include "seg2f/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "detail.hpp"

namespace seg2f {

using nlohmann::json;

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out.good()) throw IoError("write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw IoError("cannot move '" + tmp + "' to '" + path + "': " +
                  ec.message());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof())
    throw IoError("read from '" + path + "' failed");
  return std::move(buf).str();
}

std::string format_double(double value) { return detail::format_double(value); }

// ---------------------------------------------------------------------------
// NPY rasters

namespace {

constexpr char kNpyMagic[6] = {'\x93', 'N', 'U', 'M', 'P', 'Y'};

void append_u16_le(std::string* out, std::uint16_t v) {
  out->push_back(static_cast<char>(v & 0xff));
  out->push_back(static_cast<char>(v >> 8));
}

std::string npy_header_dict(const char* descr, int h, int w) {
  std::string dict = "{'descr': '";
  dict += descr;
  dict += "', 'fortran_order': False, 'shape': (";
  dict += std::to_string(h);
  dict += ", ";
  dict += std::to_string(w);
  dict += "), }";
  return dict;
}

struct NpyHeader {
  std::string descr;
  bool fortran = false;
  std::vector<std::uint64_t> shape;
  std::size_t payload_offset = 0;
};

void skip_spaces(const std::string& s, std::size_t* i) {
  while (*i < s.size() && s[*i] == ' ') ++(*i);
}

[[noreturn]] void malformed(const std::string& why) {
  throw NpyError(NpyErrorKind::kMalformedHeader, "malformed header: " + why);
}

std::string parse_quoted(const std::string& s, std::size_t* i) {
  if (*i >= s.size() || s[*i] != '\'') malformed("expected quoted string");
  const std::size_t close = s.find('\'', *i + 1);
  if (close == std::string::npos) malformed("unterminated string");
  std::string value = s.substr(*i + 1, close - *i - 1);
  *i = close + 1;
  return value;
}

// The header is the repr of a three-key python dict; parse just that shape.
NpyHeader parse_npy_header(const std::string& text) {
  NpyHeader h;
  std::size_t i = 0;
  skip_spaces(text, &i);
  if (i >= text.size() || text[i] != '{') malformed("missing '{'");
  ++i;
  bool saw_descr = false, saw_order = false, saw_shape = false;
  for (;;) {
    skip_spaces(text, &i);
    if (i < text.size() && text[i] == ',') {
      ++i;
      continue;
    }
    if (i < text.size() && text[i] == '}') break;
    const std::string key = parse_quoted(text, &i);
    skip_spaces(text, &i);
    if (i >= text.size() || text[i] != ':') malformed("missing ':'");
    ++i;
    skip_spaces(text, &i);
    if (key == "descr") {
      h.descr = parse_quoted(text, &i);
      saw_descr = true;
    } else if (key == "fortran_order") {
      if (text.compare(i, 5, "False") == 0) {
        h.fortran = false;
        i += 5;
      } else if (text.compare(i, 4, "True") == 0) {
        h.fortran = true;
        i += 4;
      } else {
        malformed("fortran_order must be True or False");
      }
      saw_order = true;
    } else if (key == "shape") {
      if (i >= text.size() || text[i] != '(') malformed("shape not a tuple");
      ++i;
      for (;;) {
        skip_spaces(text, &i);
        if (i < text.size() && text[i] == ')') {
          ++i;
          break;
        }
        std::uint64_t dim = 0;
        const auto [next, ec] =
            std::from_chars(text.data() + i, text.data() + text.size(), dim);
        if (ec != std::errc() || next == text.data() + i)
          malformed("bad shape dimension");
        h.shape.push_back(dim);
        i = static_cast<std::size_t>(next - text.data());
        skip_spaces(text, &i);
        if (i < text.size() && text[i] == ',') ++i;
      }
      saw_shape = true;
    } else {
      malformed("unknown key '" + key + "'");
    }
  }
  if (!saw_descr || !saw_order || !saw_shape)
    malformed("missing descr, fortran_order or shape");
  return h;
}

void check_kind_values(const Raster& r, const std::string& path) {
  const char* complaint = nullptr;
  for (const double v : r.values()) {
    if (!std::isfinite(v)) {
      complaint = "non-finite value";
      break;
    }
    switch (r.kind()) {
      case RasterKind::kConfidence:
      case RasterKind::kImageChannel:
        if (v < 0.0 || v > 1.0) complaint = "value outside [0, 1]";
        break;
      case RasterKind::kLabel:
        if (v != 0.0 && v != 1.0 && v != 2.0) complaint = "label not in {0, 1, 2}";
        break;
      case RasterKind::kInstanceId:
        if (v < 0.0 || v != std::floor(v)) complaint = "id not a nonnegative integer";
        break;
      case RasterKind::kWeight:
        if (v < 0.0) complaint = "negative weight";
        break;
    }
    if (complaint) break;
  }
  if (complaint)
    throw ValidationError("'" + path + "': " + complaint + " in a " +
                          kind_name(r.kind()) + " raster");
}

}  // namespace

void write_raster_npy(const Raster& raster, const std::string& path) {
  if (raster.size() == 0)
    throw ValidationError("refusing to write an empty raster");
  check_kind_values(raster, path);

  bool as_u1 = false;
  if (raster.kind() == RasterKind::kLabel) {
    as_u1 = true;
  } else if (raster.kind() == RasterKind::kInstanceId) {
    as_u1 = true;
    for (const double v : raster.values())
      if (v > 255.0) {
        as_u1 = false;
        break;
      }
  }

  std::string dict =
      npy_header_dict(as_u1 ? "|u1" : "<f8", raster.height(), raster.width());
  // Pad with spaces so the payload lands on a 64-byte boundary; the
  // newline terminator is the last header byte.
  std::size_t header_total = 10 + dict.size() + 1;
  const std::size_t padded = (header_total + 63) / 64 * 64;
  dict.append(padded - header_total, ' ');
  dict.push_back('\n');

  std::string blob(kNpyMagic, sizeof(kNpyMagic));
  blob.push_back('\x01');
  blob.push_back('\x00');
  append_u16_le(&blob, static_cast<std::uint16_t>(dict.size()));
  blob += dict;

  if (as_u1) {
    for (const double v : raster.values())
      blob.push_back(static_cast<char>(static_cast<unsigned char>(v)));
  } else {
    const std::size_t start = blob.size();
    blob.resize(start + raster.size() * sizeof(double));
    std::memcpy(blob.data() + start, raster.data(),
                raster.size() * sizeof(double));
  }
  write_file_atomic(path, blob);
}

Raster read_raster_npy(const std::string& path, RasterKind kind) {
  const std::string blob = read_file(path);
  if (blob.size() < sizeof(kNpyMagic) ||
      std::memcmp(blob.data(), kNpyMagic, sizeof(kNpyMagic)) != 0)
    throw NpyError(NpyErrorKind::kBadMagic,
                   "'" + path + "': bad magic, not an NPY file");
  if (blob.size() < 10)
    throw NpyError(NpyErrorKind::kTruncated,
                   "'" + path + "': truncated before header length");
  if (blob[6] != '\x01' || blob[7] != '\x00')
    throw NpyError(NpyErrorKind::kMalformedHeader,
                   "'" + path + "': unsupported NPY version");
  const std::size_t header_len =
      static_cast<unsigned char>(blob[8]) |
      (static_cast<std::size_t>(static_cast<unsigned char>(blob[9])) << 8);
  if (blob.size() < 10 + header_len)
    throw NpyError(NpyErrorKind::kTruncated,
                   "'" + path + "': truncated header");

  NpyHeader header;
  try {
    header = parse_npy_header(blob.substr(10, header_len));
  } catch (const NpyError& e) {
    throw NpyError(NpyErrorKind::kMalformedHeader,
                   "'" + path + "': " + e.what());
  }
  header.payload_offset = 10 + header_len;

  std::size_t elem = 0;
  if (header.descr == "<f8")
    elem = 8;
  else if (header.descr == "|u1")
    elem = 1;
  else
    throw NpyError(NpyErrorKind::kUnsupportedDtype,
                   "'" + path + "': unsupported element type '" +
                       header.descr + "'");
  if (header.fortran)
    throw NpyError(NpyErrorKind::kUnsupportedDtype,
                   "'" + path + "': fortran order is not supported");
  if (header.shape.size() != 2 || header.shape[0] == 0 ||
      header.shape[1] == 0 ||
      header.shape[0] > static_cast<std::uint64_t>(
                            std::numeric_limits<int>::max()) ||
      header.shape[1] > static_cast<std::uint64_t>(
                            std::numeric_limits<int>::max()))
    throw NpyError(NpyErrorKind::kMalformedHeader,
                   "'" + path + "': need a nonempty 2-D shape");

  const std::uint64_t count = header.shape[0] * header.shape[1];
  const std::size_t have = blob.size() - header.payload_offset;
  if (have < count * elem)
    throw NpyError(NpyErrorKind::kTruncated,
                   "'" + path + "': payload is " + std::to_string(have) +
                       " bytes, need " + std::to_string(count * elem));
  if (have > count * elem)
    throw NpyError(NpyErrorKind::kMalformedHeader,
                   "'" + path + "': trailing bytes after payload");

  Raster out(kind, static_cast<int>(header.shape[0]),
             static_cast<int>(header.shape[1]));
  const char* payload = blob.data() + header.payload_offset;
  if (elem == 8) {
    std::memcpy(out.data(), payload, count * sizeof(double));
  } else {
    for (std::uint64_t i = 0; i < count; ++i)
      out.data()[i] =
          static_cast<double>(static_cast<unsigned char>(payload[i]));
  }
  check_kind_values(out, path);
  return out;
}

// ---------------------------------------------------------------------------
// GeoJSON

namespace {

bool valid_rfc3339(const std::string& s) {
  const auto digit = [&s](std::size_t i) {
    return i < s.size() && s[i] >= '0' && s[i] <= '9';
  };
  if (s.size() < 20) return false;
  for (const std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u, 11u, 12u, 14u,
                              15u, 17u, 18u})
    if (!digit(i)) return false;
  if (s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != 't') ||
      s[13] != ':' || s[16] != ':')
    return false;
  std::size_t i = 19;
  if (i < s.size() && s[i] == '.') {
    ++i;
    if (!digit(i)) return false;
    while (digit(i)) ++i;
  }
  if (i >= s.size()) return false;
  if (s[i] == 'Z' || s[i] == 'z') return i + 1 == s.size();
  if (s[i] != '+' && s[i] != '-') return false;
  return s.size() == i + 6 && digit(i + 1) && digit(i + 2) &&
         s[i + 3] == ':' && digit(i + 4) && digit(i + 5);
}

json parse_json_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError("'" + path + "': invalid JSON: " + e.what());
  }
}

[[noreturn]] void feature_error(const std::string& path, std::size_t index,
                                const std::string& why) {
  throw ValidationError("'" + path + "': feature " + std::to_string(index) +
                        ": " + why);
}

Polygon parse_polygon_feature(const json& feature, const std::string& path,
                              std::size_t index) {
  if (!feature.contains("geometry") || !feature["geometry"].is_object())
    feature_error(path, index, "missing geometry");
  const json& geom = feature["geometry"];
  if (geom.value("type", "") != "Polygon")
    feature_error(path, index, "geometry must be a Polygon");
  if (!geom.contains("coordinates") || !geom["coordinates"].is_array() ||
      geom["coordinates"].empty())
    feature_error(path, index, "missing coordinates");
  if (geom["coordinates"].size() > 1)
    feature_error(path, index, "interior rings are not supported");

  const json& ring = geom["coordinates"][0];
  if (!ring.is_array() || ring.size() < 4)
    feature_error(path, index, "ring needs at least 4 positions");
  Polygon poly;
  poly.ring.reserve(ring.size() - 1);
  for (const json& pos : ring) {
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() ||
        !pos[1].is_number())
      feature_error(path, index, "positions must be [x, y] numbers");
    Vec2 v{pos[0].get<double>(), pos[1].get<double>()};
    if (!std::isfinite(v.x) || !std::isfinite(v.y))
      feature_error(path, index, "non-finite coordinate");
    poly.ring.push_back(v);
  }
  const Vec2 first = poly.ring.front();
  const Vec2 last = poly.ring.back();
  if (first.x != last.x || first.y != last.y)
    feature_error(path, index, "ring is not closed");
  poly.ring.pop_back();
  try {
    validate_polygon(poly, "feature " + std::to_string(index));
  } catch (const ValidationError& e) {
    throw ValidationError("'" + path + "': " + e.what());
  }
  return poly;
}

json polygon_to_geojson(const Polygon& poly) {
  json ring = json::array();
  for (const Vec2& v : poly.ring) ring.push_back(json::array({v.x, v.y}));
  ring.push_back(json::array({poly.ring.front().x, poly.ring.front().y}));
  return json{{"type", "Polygon"}, {"coordinates", json::array({ring})}};
}

const json& feature_array(const json& doc, const std::string& path) {
  if (doc.value("type", "") != "FeatureCollection")
    throw ValidationError("'" + path + "': not a FeatureCollection");
  if (!doc.contains("features") || !doc["features"].is_array())
    throw ValidationError("'" + path + "': missing features array");
  return doc["features"];
}

std::string dump_geojson(json&& features) {
  json doc{{"type", "FeatureCollection"}, {"features", std::move(features)}};
  return doc.dump(2) + "\n";
}

}  // namespace

std::vector<Detection> read_detections_geojson(const std::string& path) {
  const json doc = parse_json_file(path);
  const json& features = feature_array(doc, path);

  std::vector<Detection> out;
  out.reserve(features.size());
  for (std::size_t k = 0; k < features.size(); ++k) {
    const json& f = features[k];
    Detection det;
    det.poly = parse_polygon_feature(f, path, k);
    const json props = f.value("properties", json::object());
    if (!props.contains("score") || !props["score"].is_number())
      feature_error(path, k, "missing required numeric 'score'");
    det.score = props["score"].get<double>();
    if (!(det.score >= 0.0 && det.score <= 1.0))
      feature_error(path, k, "score out of range [0, 1]");
    if (props.contains("class") && props["class"] != "building")
      feature_error(path, k, "detection class must be 'building'");
    det.image_id = props.value("image_id", "");
    det.asset_id = props.value("asset_id", "");
    det.acquired = props.value("acquired", "");
    if (!det.acquired.empty() && !valid_rfc3339(det.acquired))
      feature_error(path, k, "'acquired' is not an RFC 3339 timestamp");
    if (props.contains("quality")) {
      if (!props["quality"].is_number())
        feature_error(path, k, "'quality' must be a number");
      det.quality = props["quality"].get<double>();
      if (!(det.quality >= 0.0 && det.quality <= 1.0))
        feature_error(path, k, "quality out of range [0, 1]");
    }
    out.push_back(std::move(det));
  }
  return out;
}

void write_detections_geojson(const std::vector<Detection>& detections,
                              const std::string& path) {
  json features = json::array();
  for (std::size_t k = 0; k < detections.size(); ++k) {
    const Detection& det = detections[k];
    try {
      validate_polygon(det.poly, "detection " + std::to_string(k));
    } catch (const ValidationError& e) {
      throw ValidationError("'" + path + "': " + e.what());
    }
    json props{{"score", det.score}, {"class", "building"},
               {"quality", det.quality}};
    if (!det.image_id.empty()) props["image_id"] = det.image_id;
    if (!det.asset_id.empty()) props["asset_id"] = det.asset_id;
    if (!det.acquired.empty()) {
      if (!valid_rfc3339(det.acquired))
        throw ValidationError("'" + path + "': detection " +
                              std::to_string(k) +
                              ": 'acquired' is not an RFC 3339 timestamp");
      props["acquired"] = det.acquired;
    }
    features.push_back(json{{"type", "Feature"},
                            {"geometry", polygon_to_geojson(det.poly)},
                            {"properties", std::move(props)}});
  }
  write_file_atomic(path, dump_geojson(std::move(features)));
}

std::vector<GroundTruth> read_ground_truth_geojson(const std::string& path) {
  const json doc = parse_json_file(path);
  const json& features = feature_array(doc, path);

  std::vector<GroundTruth> out;
  out.reserve(features.size());
  for (std::size_t k = 0; k < features.size(); ++k) {
    const json& f = features[k];
    GroundTruth gt;
    gt.poly = parse_polygon_feature(f, path, k);
    const json props = f.value("properties", json::object());
    const std::string cls = props.value("class", "building");
    if (cls == "dense")
      gt.dense = true;
    else if (cls != "building")
      feature_error(path, k, "class must be 'building' or 'dense'");
    gt.image_id = props.value("image_id", "");
    gt.group = props.value("group", "");
    out.push_back(std::move(gt));
  }
  return out;
}

void write_ground_truth_geojson(const std::vector<GroundTruth>& ground_truth,
                                const std::string& path) {
  json features = json::array();
  for (std::size_t k = 0; k < ground_truth.size(); ++k) {
    const GroundTruth& gt = ground_truth[k];
    try {
      validate_polygon(gt.poly, "ground truth " + std::to_string(k));
    } catch (const ValidationError& e) {
      throw ValidationError("'" + path + "': " + e.what());
    }
    json props{{"class", gt.dense ? "dense" : "building"}};
    if (!gt.image_id.empty()) props["image_id"] = gt.image_id;
    if (!gt.group.empty()) props["group"] = gt.group;
    features.push_back(json{{"type", "Feature"},
                            {"geometry", polygon_to_geojson(gt.poly)},
                            {"properties", std::move(props)}});
  }
  write_file_atomic(path, dump_geojson(std::move(features)));
}

AssetCoverage read_coverage_geojson(const std::string& path) {
  const json doc = parse_json_file(path);
  const json& features = feature_array(doc, path);

  AssetCoverage coverage;
  for (std::size_t k = 0; k < features.size(); ++k) {
    const json& f = features[k];
    Polygon poly = parse_polygon_feature(f, path, k);
    const json props = f.value("properties", json::object());
    if (!props.contains("asset_id") || !props["asset_id"].is_string())
      feature_error(path, k, "missing 'asset_id'");
    const std::string asset = props["asset_id"].get<std::string>();
    if (asset.empty()) feature_error(path, k, "empty 'asset_id'");
    if (coverage.footprints.count(asset))
      feature_error(path, k, "duplicate asset '" + asset + "'");
    double quality = 1.0;
    if (props.contains("quality")) {
      if (!props["quality"].is_number())
        feature_error(path, k, "'quality' must be a number");
      quality = props["quality"].get<double>();
      if (!(quality >= 0.0 && quality <= 1.0))
        feature_error(path, k, "quality out of range [0, 1]");
    }
    coverage.footprints[asset] = std::move(poly);
    coverage.quality[asset] = quality;
  }
  return coverage;
}

void write_coverage_geojson(const AssetCoverage& coverage,
                            const std::string& path) {
  json features = json::array();
  for (const auto& [asset, poly] : coverage.footprints) {
    try {
      validate_polygon(poly, "asset '" + asset + "'");
    } catch (const ValidationError& e) {
      throw ValidationError("'" + path + "': " + e.what());
    }
    const auto q = coverage.quality.find(asset);
    json props{{"asset_id", asset},
               {"quality", q == coverage.quality.end() ? 1.0 : q->second}};
    features.push_back(json{{"type", "Feature"},
                            {"geometry", polygon_to_geojson(poly)},
                            {"properties", std::move(props)}});
  }
  write_file_atomic(path, dump_geojson(std::move(features)));
}

// ---------------------------------------------------------------------------
// PR CSV

void write_pr_csv(const PrCsv& pr, const std::string& path) {
  std::string out = "score,precision,recall\n";
  for (const PRPoint& p : pr.curve) {
    out += detail::format_double(p.score);
    out += ',';
    out += detail::format_double(p.precision);
    out += ',';
    out += detail::format_double(p.recall);
    out += '\n';
  }
  out += "# ap_exact=" + detail::format_double(pr.ap_exact) +
         ",ap_101=" + detail::format_double(pr.ap_101) + "\n";
  write_file_atomic(path, out);
}

namespace {

double parse_csv_double(const std::string& path, const std::string& token) {
  double value = 0.0;
  const auto [next, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || next != token.data() + token.size())
    throw ValidationError("'" + path + "': bad number '" + token + "'");
  return value;
}

}  // namespace

PrCsv read_pr_csv(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "score,precision,recall")
    throw ValidationError("'" + path + "': missing csv header");

  PrCsv pr;
  bool saw_ap = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ap_exact=", 0) == 0) {
      const std::string rest = line.substr(std::string("# ap_exact=").size());
      const std::size_t comma = rest.find(",ap_101=");
      if (comma == std::string::npos)
        throw ValidationError("'" + path + "': malformed ap comment line");
      pr.ap_exact = parse_csv_double(path, rest.substr(0, comma));
      pr.ap_101 = parse_csv_double(
          path, rest.substr(comma + std::string(",ap_101=").size()));
      saw_ap = true;
      continue;
    }
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = c1 == std::string::npos
                               ? std::string::npos
                               : line.find(',', c1 + 1);
    if (c2 == std::string::npos)
      throw ValidationError("'" + path + "': malformed row '" + line + "'");
    PRPoint p;
    p.score = parse_csv_double(path, line.substr(0, c1));
    p.precision = parse_csv_double(path, line.substr(c1 + 1, c2 - c1 - 1));
    p.recall = parse_csv_double(path, line.substr(c2 + 1));
    pr.curve.push_back(p);
  }
  if (!saw_ap)
    throw ValidationError("'" + path + "': missing ap comment line");
  return pr;
}

// ---------------------------------------------------------------------------
// Georeferencing and manifests

void pixel_to_lonlat(const GeoTransform& geo, double px, double py,
                     double* lon, double* lat) {
  constexpr double kMetersPerDegree = 111320.0;
  constexpr double kPi = 3.14159265358979323846;
  const double lat_rad = geo.origin_lat * (kPi / 180.0);
  *lon = geo.origin_lon +
         px * geo.meters_per_pixel / (kMetersPerDegree * std::cos(lat_rad));
  *lat = geo.origin_lat - py * geo.meters_per_pixel / kMetersPerDegree;
}

DatasetManifest read_manifest(const std::string& path) {
  const json doc = parse_json_file(path);
  if (!doc.contains("records") || !doc["records"].is_array())
    throw ValidationError("'" + path + "': missing records array");

  const std::filesystem::path base =
      std::filesystem::path(path).parent_path();
  const auto check_exists = [&](const std::string& rel, std::size_t k) {
    if (!std::filesystem::exists(base / rel))
      throw ValidationError("'" + path + "': record " + std::to_string(k) +
                            " references missing file '" + rel + "'");
  };

  DatasetManifest manifest;
  const json& records = doc["records"];
  for (std::size_t k = 0; k < records.size(); ++k) {
    const json& r = records[k];
    ManifestRecord rec;
    if (!r.contains("image") || !r["image"].is_array() || r["image"].empty())
      throw ValidationError("'" + path + "': record " + std::to_string(k) +
                            " needs a nonempty image list");
    for (const json& img : r["image"]) {
      rec.image.push_back(img.get<std::string>());
      check_exists(rec.image.back(), k);
    }
    rec.labels = r.value("labels", "");
    rec.ground_truth = r.value("ground_truth", "");
    if (rec.labels.empty() && rec.ground_truth.empty())
      throw ValidationError("'" + path + "': record " + std::to_string(k) +
                            " needs labels or ground_truth");
    if (!rec.labels.empty()) check_exists(rec.labels, k);
    if (!rec.ground_truth.empty()) check_exists(rec.ground_truth, k);
    rec.group = r.value("group", "");
    if (rec.group.empty())
      throw ValidationError("'" + path + "': record " + std::to_string(k) +
                            " needs a nonempty group key");
    if (r.contains("geo")) {
      const json& g = r["geo"];
      rec.geo.origin_lat = g.value("origin_lat", 0.0);
      rec.geo.origin_lon = g.value("origin_lon", 0.0);
      rec.geo.meters_per_pixel = g.value("meters_per_pixel", 0.5);
      if (!(rec.geo.meters_per_pixel > 0.0))
        throw ValidationError("'" + path + "': record " + std::to_string(k) +
                              ": meters_per_pixel must be positive");
    }
    manifest.records.push_back(std::move(rec));
  }
  return manifest;
}

void write_manifest(const DatasetManifest& manifest, const std::string& path) {
  json records = json::array();
  for (const ManifestRecord& rec : manifest.records) {
    json r{{"image", rec.image},
           {"labels", rec.labels},
           {"ground_truth", rec.ground_truth},
           {"group", rec.group},
           {"geo",
            {{"origin_lat", rec.geo.origin_lat},
             {"origin_lon", rec.geo.origin_lon},
             {"meters_per_pixel", rec.geo.meters_per_pixel}}}};
    records.push_back(std::move(r));
  }
  write_file_atomic(path, json{{"records", std::move(records)}}.dump(2) + "\n");
}

}  // namespace seg2f
