// Command-line front end: extract, simplify, describe, compare, reconstruct, corpus, render, synth.

#include <qshape/corpus.hpp>
#include <qshape/dce.hpp>
#include <qshape/geometry.hpp>
#include <qshape/outline.hpp>
#include <qshape/qualshape.hpp>
#include <qshape/reconstruct.hpp>
#include <qshape/similarity.hpp>
#include <qshape/svg.hpp>
#include <qshape/synthetic.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace qshape;

namespace {

constexpr int kExitFatal = 1;
constexpr int kExitDegenerate = 2;

std::vector<Point> read_poly_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path);
  return read_poly(in);
}

void write_poly_file(const std::string& path, std::span<const Point> pts) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path + " for writing");
  write_poly(out, pts);
}

QualShape read_descriptor(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidDescriptor, path + ": " + e.what());
  }
  return qualshape_from_json(j);
}

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * fraction);
  return buf;
}

struct CorpusOptions {
  std::string input;
  std::string out = "corpus_out";
  CorpusConfig config;
  int top = 5;
  unsigned jobs = default_jobs();
  bool galleries = false;
};

int run_corpus(const CorpusOptions& opt) {
  const CorpusBuild build = build_corpus(opt.input, opt.config);
  for (const auto& f : build.failures) std::cerr << "warning: skipped " << f.file << ": " << f.error << '\n';
  const CompareResult cmp = compare_all(std::span<const CorpusEntry>(build.entries), opt.jobs);
  const QueryResults q = report_queries(cmp.matrix, cmp.weights, opt.top);
  for (const auto& w : cmp.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& w : q.warnings) std::cerr << "warning: " << w << '\n';

  fs::create_directories(opt.out);
  {
    std::ostringstream csv;
    write_pairs_csv(csv, cmp.matrix, cmp.weights);
    write_text_file((fs::path(opt.out) / "pairs.csv").string(), csv.str());
  }
  write_text_file((fs::path(opt.out) / "report.json").string(),
                  report_json(build, opt.config, cmp, q).dump(2) + "\n");

  if (opt.galleries) {
    const fs::path dir = fs::path(opt.out) / "matches";
    fs::create_directories(dir);
    for (const auto& e : build.entries) {
      std::vector<std::vector<Point>> polys{e.polygon.vertices()};
      std::vector<std::string> labels{"#" + std::to_string(e.id) + " " + e.source_path};
      for (const auto& mt : q.top_k[e.id]) {
        polys.push_back(build.entries[mt.id].polygon.vertices());
        labels.push_back("#" + std::to_string(mt.id) + " (" + percent(mt.error) + ")");
      }
      render_svg(polys, labels, (dir / (std::to_string(e.id) + ".svg")).string());
    }
  }

  std::cout << "entries: " << build.entries.size() << " (" << build.failures.size() << " skipped)\n"
            << "pairs: " << cmp.matrix.entries.size() << ", shift evaluations: " << cmp.shift_evaluations << '\n'
            << "mean dir error: " << percent(cmp.mean_dir) << ", mean dist error: " << percent(cmp.mean_dist) << '\n'
            << "dst2dir: " << cmp.weights.dst2dir << ", w_dir: " << cmp.weights.w_dir
            << ", w_dist: " << cmp.weights.w_dist << '\n';
  return cmp.degenerate ? kExitDegenerate : 0;
}

// Originals are 12-cornered alternating stars with collinear edge points; duplicates are jittered copies.
void run_synth(const std::string& out, int originals, int duplicates, int masks, std::uint64_t seed, double jitter) {
  fs::create_directories(out);
  synthetic::Rng rng(seed);
  char name[64];
  for (int i = 0; i < originals; ++i) {
    const auto base = synthetic::subdivide(synthetic::alternating_star(rng, 12), 2);
    const bool as_mask = i >= originals - masks;
    auto emit = [&](const std::vector<Point>& pts, const char* tag) {
      if (as_mask) {
        // 2 px margin around a shape 120 px across.
        const auto px = synthetic::transform(pts, 0.0, 60.0, Point{64.0, 64.0});
        std::snprintf(name, sizeof(name), "shape%02d_%s.pbm", i, tag);
        std::ofstream f(fs::path(out) / name, std::ios::binary);
        synthetic::write_pbm(f, synthetic::rasterize(px, 128, 128));
      } else {
        std::snprintf(name, sizeof(name), "shape%02d_%s.poly", i, tag);
        write_poly_file((fs::path(out) / name).string(), pts);
      }
    };
    emit(base, "a");
    if (i < duplicates) {
      std::vector<Point> dup;
      do {
        dup = synthetic::jitter(rng, base, jitter);
      } while (find_self_intersection(dup).has_value());
      emit(dup, "b");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qualitative shape descriptors: extraction, simplification, comparison and reconstruction"};
  app.require_subcommand(1);

  // extract
  std::string ex_in, ex_out;
  int ex_threshold = 128;
  bool ex_invert = false;
  double ex_eps = 1e-6;
  auto* extract = app.add_subcommand("extract", "Trace the largest mask component into a .poly outline");
  extract->add_option("input", ex_in, "PBM/PGM mask")->required();
  extract->add_option("output", ex_out, ".poly output")->required();
  extract->add_option("--threshold", ex_threshold, "PGM foreground threshold (value < threshold)")
      ->check(CLI::Range(0, 255));
  extract->add_flag("--invert", ex_invert, "Swap foreground and background");
  extract->add_option("--eps", ex_eps, "Collinear merge tolerance in radians");

  // simplify
  std::string si_in, si_out;
  std::size_t si_k = 12;
  auto* simplify_cmd = app.add_subcommand("simplify", "Discrete curve evolution down to k vertices");
  simplify_cmd->add_option("--k", si_k, "Target vertex count")->check(CLI::PositiveNumber);
  simplify_cmd->add_option("input", si_in)->required();
  simplify_cmd->add_option("output", si_out)->required();

  // describe
  std::string de_in, de_out;
  int de_m = 4;
  auto* describe_cmd = app.add_subcommand("describe", "Encode a polygon as an eOPRA_m descriptor (JSON)");
  describe_cmd->add_option("--m", de_m, "Granularity")->check(CLI::PositiveNumber);
  describe_cmd->add_option("input", de_in)->required();
  describe_cmd->add_option("output", de_out)->required();

  // compare
  std::string co_a, co_b;
  auto* compare_cmd = app.add_subcommand("compare", "Best cyclic alignment of two descriptors");
  compare_cmd->add_option("a", co_a, "Descriptor JSON")->required();
  compare_cmd->add_option("b", co_b, "Descriptor JSON")->required();

  // reconstruct
  std::string re_in, re_out, re_svg;
  SearchParams re_params;
  auto* reconstruct_cmd = app.add_subcommand("reconstruct", "Generate a prototype polygon from a descriptor");
  reconstruct_cmd->add_option("input", re_in, "Descriptor JSON")->required();
  reconstruct_cmd->add_option("output", re_out, ".poly output")->required();
  reconstruct_cmd->add_option("--budget", re_params.eval_budget, "Score evaluation budget");
  reconstruct_cmd->add_option("--initial-step", re_params.initial_step, "Initial step, fraction of mean edge");
  reconstruct_cmd->add_option("--min-step", re_params.min_step, "Smallest step, fraction of mean edge");
  reconstruct_cmd->add_option("--svg", re_svg, "Also draw the result");

  // corpus
  CorpusOptions cp;
  auto* corpus_cmd = app.add_subcommand("corpus", "All-pairs comparison and match report over a directory");
  corpus_cmd->add_option("input", cp.input, "Directory of .pbm/.pgm/.poly files")->required();
  corpus_cmd->add_option("--m", cp.config.m, "Granularity")->check(CLI::PositiveNumber);
  corpus_cmd->add_option("--k-vertices", cp.config.k_vertices, "DCE target vertex count");
  corpus_cmd->add_option("--top", cp.top, "Matches listed per entry")->check(CLI::PositiveNumber);
  corpus_cmd->add_option("--threshold", cp.config.threshold, "PGM foreground threshold")->check(CLI::Range(0, 255));
  corpus_cmd->add_flag("--invert", cp.config.invert, "Swap foreground and background");
  corpus_cmd->add_option("--jobs", cp.jobs, "Comparison threads")->check(CLI::PositiveNumber);
  corpus_cmd->add_option("--out", cp.out, "Output directory");
  corpus_cmd->add_flag("--galleries", cp.galleries, "Write matches/<id>.svg for every entry");

  // render
  std::string rn_out;
  std::vector<std::string> rn_in, rn_labels;
  auto* render_cmd = app.add_subcommand("render", "Draw polygons side by side into one SVG");
  render_cmd->add_option("output", rn_out, "SVG output")->required();
  render_cmd->add_option("inputs", rn_in, ".poly files")->required();
  render_cmd->add_option("--label", rn_labels, "Cell labels, in input order (default: file names)");

  // synth
  std::string sy_out;
  int sy_originals = 10, sy_duplicates = 10, sy_masks = 2;
  std::uint64_t sy_seed = 20151012;
  double sy_jitter = 0.02;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic corpus of star shapes and jittered duplicates");
  synth_cmd->add_option("--out", sy_out, "Output directory")->required();
  synth_cmd->add_option("--originals", sy_originals)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--duplicates", sy_duplicates)->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--masks", sy_masks, "How many originals (and their duplicates) are written as PBM masks");
  synth_cmd->add_option("--seed", sy_seed);
  synth_cmd->add_option("--jitter", sy_jitter, "Vertex jitter radius, fraction of mean edge length");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*extract) {
      const auto bytes = read_file_bytes(ex_in);
      const auto poly = outline_polygon(load_mask(bytes, ex_threshold, ex_invert), ex_eps);
      write_poly_file(ex_out, poly.vertices());
      std::cout << ex_out << ": " << poly.size() << " vertices\n";
    } else if (*simplify_cmd) {
      const auto poly = simplify(validate_polygon(read_poly_file(si_in)), si_k);
      write_poly_file(si_out, poly.vertices());
    } else if (*describe_cmd) {
      const auto shape = describe(validate_polygon(read_poly_file(de_in)), de_m);
      write_text_file(de_out, to_json(shape).dump() + "\n");
    } else if (*compare_cmd) {
      const auto a = read_descriptor(co_a);
      const auto b = read_descriptor(co_b);
      const auto cmp = best_alignment(a, b);
      nlohmann::json j{{"shift", cmp.shift}, {"dir_err", cmp.dir_err}, {"dist_err", cmp.dist_err}};
      std::cout << j.dump() << '\n';
    } else if (*reconstruct_cmd) {
      const auto target = read_descriptor(re_in);
      const auto result = greedy_refine(trace_prototype(target), target, re_params);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
      write_poly_file(re_out, result.vertices);
      if (!re_svg.empty()) write_text_file(re_svg, polygon_svg(result.vertices));
      std::cout << "initial score " << result.initial_score << ", final score " << result.final_score << " after "
                << result.evaluations << " evaluations" << (result.exact_match ? " (exact match)" : "") << '\n';
    } else if (*corpus_cmd) {
      return run_corpus(cp);
    } else if (*render_cmd) {
      std::vector<std::vector<Point>> polys;
      std::vector<std::string> labels;
      for (std::size_t i = 0; i < rn_in.size(); ++i) {
        polys.push_back(validate_polygon(read_poly_file(rn_in[i])).vertices());
        labels.push_back(i < rn_labels.size() ? rn_labels[i] : fs::path(rn_in[i]).filename().string());
      }
      render_svg(polys, labels, rn_out);
    } else if (*synth_cmd) {
      run_synth(sy_out, sy_originals, std::min(sy_duplicates, sy_originals), std::min(sy_masks, sy_originals), sy_seed,
                sy_jitter);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFatal;
  }
  return 0;
}
