#pragma once

#include <qshape/dce.hpp>
#include <qshape/error.hpp>
#include <qshape/geometry.hpp>
#include <qshape/outline.hpp>
#include <qshape/qualshape.hpp>
#include <qshape/similarity.hpp>
#include <qshape/svg.hpp>

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace qshape {

struct CorpusConfig {
  int m = 4;
  std::size_t k_vertices = 12;
  int threshold = 128;
  bool invert = false;
  double collinear_eps = 1e-6;
};

struct CorpusEntry {
  int id;
  std::string source_path;
  SimplePolygon polygon;
  QualShape shape;
};

struct FileFailure {
  std::string file;
  std::string error;
};

struct CorpusBuild {
  std::vector<CorpusEntry> entries;
  std::vector<FileFailure> failures;
};

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline bool is_mask_file(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  return ext == ".pbm" || ext == ".pgm";
}

inline bool is_corpus_file(const std::filesystem::path& p) { return is_mask_file(p) || p.extension() == ".poly"; }

// Mask -> outline -> collinear cleanup -> validated polygon (not yet simplified).
inline SimplePolygon outline_polygon(const BinaryMask& mask, double collinear_eps) {
  return validate_polygon(merge_collinear(trace_largest_boundary(mask), collinear_eps));
}

inline SimplePolygon load_polygon(const std::filesystem::path& path, const CorpusConfig& config) {
  if (is_mask_file(path)) {
    const auto bytes = read_file_bytes(path);
    return outline_polygon(load_mask(bytes, config.threshold, config.invert), config.collinear_eps);
  }
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  return validate_polygon(read_poly(in));
}

/// Loads every mask and .poly file of a directory, in lexicographic filename order.
///
/// Files that fail any stage are recorded and skipped. Surviving entries get dense ids. Shapes that end up
/// with fewer than k_vertices vertices are rejected so the corpus stays uniform.
inline CorpusBuild build_corpus(const std::filesystem::path& input_dir, const CorpusConfig& config) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(input_dir)) throw Error(ErrorCode::IoFailure, input_dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& item : fs::directory_iterator(input_dir)) {
    if (item.is_regular_file() && is_corpus_file(item.path())) files.push_back(item.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  if (files.size() < 2) {
    throw Error(ErrorCode::EmptyCorpus, "need at least 2 shape files, found " + std::to_string(files.size()));
  }

  CorpusBuild build;
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    try {
      SimplePolygon poly = simplify(load_polygon(path, config), config.k_vertices);
      if (poly.size() != config.k_vertices) {
        throw Error(ErrorCode::TooFewVertices, "outline has only " + std::to_string(poly.size()) + " vertices, need " +
                                                   std::to_string(config.k_vertices));
      }
      QualShape shape = describe(poly, config.m);
      const int id = static_cast<int>(build.entries.size());
      build.entries.push_back(CorpusEntry{id, name, std::move(poly), std::move(shape)});
    } catch (const std::exception& e) {
      build.failures.push_back(FileFailure{name, e.what()});
    }
  }
  if (build.entries.empty()) throw Error(ErrorCode::AllEntriesFailed, "no file could be processed");
  if (build.entries.size() < 2) throw Error(ErrorCode::EmptyCorpus, "only one file could be processed");
  return build;
}

struct CompareResult {
  ErrorMatrix matrix;
  Weights weights;
  double mean_dir = 0.0;
  double mean_dist = 0.0;
  std::uint64_t shift_evaluations = 0;
  bool degenerate = false;
  std::vector<std::string> warnings;
};

inline unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Best alignment for every unordered pair, then corpus-wide weights.
///
/// Pairs may be evaluated on up to `jobs` threads; results land in (a, b) order regardless.
inline CompareResult compare_all(std::span<const QualShape> shapes, unsigned jobs = default_jobs()) {
  const int count = static_cast<int>(shapes.size());
  if (count < 2) throw Error(ErrorCode::EmptyCorpus, "need at least 2 shapes to compare");
  for (const auto& s : shapes) {
    if (s.n() != shapes[0].n() || s.m() != shapes[0].m()) {
      throw Error(ErrorCode::HeterogeneousCorpus, "all shapes must share vertex count and granularity");
    }
  }

  CompareResult out;
  out.matrix.n_shapes = count;
  auto& entries = out.matrix.entries;
  entries.resize(unique_pairs(static_cast<std::uint64_t>(count)));
  for (int a = 0, idx = 0; a < count; ++a) {
    for (int b = a + 1; b < count; ++b, ++idx) {
      entries[idx].a = a;
      entries[idx].b = b;
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<std::uint64_t> evaluations{0};
  auto worker = [&] {
    std::uint64_t local = 0;
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      auto& e = entries[i];
      const auto cmp = best_alignment(shapes[e.a], shapes[e.b], &local);
      e.shift = cmp.shift;
      e.dir_err = cmp.dir_err;
      e.dist_err = cmp.dist_err;
    }
    evaluations += local;
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(entries.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  out.shift_evaluations = evaluations;

  double sum_dir = 0.0;
  double sum_dist = 0.0;
  for (const auto& e : entries) {
    sum_dir += e.dir_err;
    sum_dist += e.dist_err;
  }
  out.mean_dir = sum_dir / static_cast<double>(entries.size());
  out.mean_dist = sum_dist / static_cast<double>(entries.size());
  try {
    out.weights = compute_weights(out.mean_dir, out.mean_dist);
    if (out.mean_dist == 0.0) {
      out.warnings.emplace_back("mean distance error is zero; direction weight is 0");
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroDirectionError) throw;
    out.degenerate = true;
    out.weights = Weights{1.0, 0.5, 0.5};
    out.warnings.emplace_back("degenerate corpus: mean direction error is zero; using fallback weights 0.5/0.5");
  }
  return out;
}

inline CompareResult compare_all(std::span<const CorpusEntry> entries, unsigned jobs = default_jobs()) {
  std::vector<QualShape> shapes;
  shapes.reserve(entries.size());
  for (const auto& e : entries) shapes.push_back(e.shape);
  return compare_all(shapes, jobs);
}

struct Match {
  int id;
  double error;
};

struct QueryResults {
  int k = 0;  // effective list length
  std::vector<Match> best_match;
  std::vector<std::vector<Match>> top_k;
  std::vector<int> tally;
  std::vector<std::string> warnings;
};

/// Nearest match, k nearest matches, and how often each entry shows up in other entries' lists.
///
/// Lists are sorted by combined error, ties by partner id. k above N-1 is clamped with a warning.
inline QueryResults report_queries(const ErrorMatrix& matrix, const Weights& weights, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidParams, "k must be at least 1");
  const int count = matrix.n_shapes;
  QueryResults q;
  q.k = k;
  if (k > count - 1) {
    q.k = count - 1;
    q.warnings.push_back(std::string(to_string(ErrorCode::KTooLarge)) + ": k=" + std::to_string(k) +
                         " clamped to " + std::to_string(q.k));
  }
  std::vector<std::vector<Match>> partners(count);
  for (const auto& p : matrix.entries) {
    const double e = combined_error(p, weights);
    partners[p.a].push_back(Match{p.b, e});
    partners[p.b].push_back(Match{p.a, e});
  }
  q.tally.assign(count, 0);
  for (int id = 0; id < count; ++id) {
    auto& list = partners[id];
    std::sort(list.begin(), list.end(),
              [](const Match& x, const Match& y) { return x.error != y.error ? x.error < y.error : x.id < y.id; });
    q.best_match.push_back(list.front());
    list.resize(q.k);
    for (const auto& mt : list) ++q.tally[mt.id];
    q.top_k.push_back(std::move(list));
  }
  return q;
}

// Round to the 6 fractional digits used in pairs.csv so both reports agree.
inline double report_number(double v) { return std::stod(fixed6(v)); }

inline nlohmann::json report_json(const CorpusBuild& build, const CorpusConfig& config, const CompareResult& cmp,
                                  const QueryResults& q) {
  using nlohmann::json;
  json r;
  r["n_entries"] = build.entries.size();
  r["m"] = config.m;
  r["k_vertices"] = config.k_vertices;
  r["top"] = q.k;
  r["pairs"] = cmp.matrix.entries.size();
  r["shift_evaluations"] = cmp.shift_evaluations;
  json entries = json::array();
  for (const auto& e : build.entries) entries.push_back({{"id", e.id}, {"file", e.source_path}});
  r["entries"] = entries;
  r["mean_dir_err"] = cmp.mean_dir;
  r["mean_dist_err"] = cmp.mean_dist;
  r["weights"] = {{"dst2dir", cmp.weights.dst2dir}, {"w_dir", cmp.weights.w_dir}, {"w_dist", cmp.weights.w_dist}};
  r["weighted_mean_dir_err"] = cmp.weights.w_dir * cmp.mean_dir;
  r["weighted_mean_dist_err"] = cmp.weights.w_dist * cmp.mean_dist;
  r["degenerate"] = cmp.degenerate;
  json best = json::array();
  json top = json::array();
  for (std::size_t id = 0; id < q.best_match.size(); ++id) {
    best.push_back({{"id", id}, {"match", q.best_match[id].id}, {"error", report_number(q.best_match[id].error)}});
    json list = json::array();
    for (const auto& mt : q.top_k[id]) list.push_back({{"id", mt.id}, {"error", report_number(mt.error)}});
    top.push_back({{"id", id}, {"matches", list}});
  }
  r["best_match"] = best;
  r["top_k"] = top;
  r["tally"] = q.tally;
  json failures = json::array();
  for (const auto& f : build.failures) failures.push_back({{"file", f.file}, {"error", f.error}});
  r["failures"] = failures;
  json warnings = json::array();
  for (const auto& w : cmp.warnings) warnings.push_back(w);
  for (const auto& w : q.warnings) warnings.push_back(w);
  r["warnings"] = warnings;
  return r;
}

/// Polygons laid out left to right, one 256 x 256 cell each, label underneath.
inline std::string render_svg_string(const std::vector<std::vector<Point>>& polygons,
                                     const std::vector<std::string>& labels) {
  if (polygons.empty()) throw Error(ErrorCode::InvalidParams, "nothing to render");
  constexpr int kCell = 256;
  constexpr int kLabelBand = 32;
  const std::size_t count = polygons.size();
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << count * kCell << ' ' << kCell + kLabelBand
    << "\" width=\"" << count * kCell << "\" height=\"" << kCell + kLabelBand << "\">\n";
  for (std::size_t i = 0; i < count; ++i) {
    const double ox = static_cast<double>(i) * kCell;
    s << "  <path d=\"" << svg_path(polygons[i], ox, 0, kCell, 0.08)
      << "\" fill=\"#cfd8e3\" stroke=\"#1f2d3d\" stroke-width=\"2\"/>\n";
    const std::string label = i < labels.size() ? labels[i] : std::string();
    s << "  <text x=\"" << ox + kCell / 2 << "\" y=\"" << kCell + kLabelBand / 2 + 6
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << detail::xml_escape(label)
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

inline void render_svg(const std::vector<std::vector<Point>>& polygons, const std::vector<std::string>& labels,
                       const std::string& out_path) {
  write_text_file(out_path, render_svg_string(polygons, labels));
}

}  // namespace qshape
