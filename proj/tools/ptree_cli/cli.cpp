// Copyright 2026 The ptree-engine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "ptree/bitplane.hpp"
#include "ptree/errors.hpp"
#include "ptree/image_io.hpp"
#include "ptree/miner.hpp"
#include "ptree/predicate.hpp"
#include "ptree/ptree.hpp"
#include "ptree/superchip.hpp"

namespace fs = std::filesystem;

namespace ptree::cli {

namespace {

// Written by `build` next to the .pt files. Padded cells look like zero
// pixels, so `count` reads the real extent from here.
constexpr const char* kExtentFile = "extent.tsv";

std::string bsq_name(int band, int bit) {
  return "band" + std::to_string(band) + "_bit" + std::to_string(bit) + ".bsq";
}

std::string tree_name(int band, int bit) {
  return "band" + std::to_string(band) + "_bit" + std::to_string(bit) + ".pt";
}

std::uint8_t parse_band(const std::string& text) {
  if (text == "red") return kRedBand;
  if (text == "green") return kGreenBand;
  int v = -1;
  std::istringstream in(text);
  if (!(in >> v) || !in.eof() || v < 0 || v > 255) {
    throw CLI::ValidationError("--band",
                               "expected red, green, or an integer 0..255");
  }
  return static_cast<std::uint8_t>(v);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw InputError("cannot write " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---- encode ---------------------------------------------------------------

struct EncodeArgs {
  std::string image;
  std::string band = "1";
  std::string out;
};

void run_encode(const EncodeArgs& a, std::ostream& out) {
  const std::uint8_t band_id = parse_band(a.band);
  const BandGrid band = read_band(a.image, band_id);
  fs::create_directories(a.out);
  for (const BitPlane& plane : decompose_band(band)) {
    const fs::path path =
        fs::path(a.out) / bsq_name(band_id, plane.info.bit_index);
    write_bsq(plane, path);
    out << path.string() << '\n';
  }
}

// ---- build ----------------------------------------------------------------

struct BuildArgs {
  std::string bsq;
  std::string out;
};

void run_build(const BuildArgs& a, std::ostream& out) {
  std::vector<fs::path> inputs;
  for (const auto& entry : fs::directory_iterator(a.bsq)) {
    if (entry.is_regular_file() && entry.path().extension() == ".bsq") {
      inputs.push_back(entry.path());
    }
  }
  if (inputs.empty()) {
    throw InputError("no .bsq files in " + a.bsq);
  }
  std::sort(inputs.begin(), inputs.end());
  fs::create_directories(a.out);

  std::map<int, PlaneInfo> extents;
  for (const fs::path& in : inputs) {
    const BitPlane plane = read_bsq(in);
    auto [it, inserted] = extents.emplace(plane.info.band_id, plane.info);
    if (!inserted && (it->second.side != plane.info.side ||
                      it->second.orig_width != plane.info.orig_width ||
                      it->second.orig_height != plane.info.orig_height)) {
      throw IncompatibleError(in.string() +
                              ": extent differs from other planes of band " +
                              std::to_string(plane.info.band_id));
    }
    const fs::path dest =
        fs::path(a.out) / tree_name(plane.info.band_id, plane.info.bit_index);
    write_ptree(build_from_plane(plane), dest);
    out << dest.string() << '\n';
  }

  std::string extent = "band\twidth\theight\tside\n";
  for (const auto& [band, info] : extents) {
    extent += std::to_string(band) + '\t' + std::to_string(info.orig_width) +
              '\t' + std::to_string(info.orig_height) + '\t' +
              std::to_string(info.side) + '\n';
  }
  write_text(fs::path(a.out) / kExtentFile, extent);
}

// ---- count ----------------------------------------------------------------

struct CountArgs {
  std::string trees;
  int band = 1;
  std::optional<std::uint32_t> value;
  std::optional<std::uint32_t> ge;
  int precision = 8;
};

BandPTrees load_band(const fs::path& dir, int band) {
  const fs::path extent_path = dir / kExtentFile;
  std::istringstream extent(read_text(extent_path));
  std::string line;
  std::getline(extent, line);
  if (line != "band\twidth\theight\tside") {
    throw FormatError("missing extent header", 0, extent_path.string());
  }
  std::optional<std::pair<std::uint32_t, std::uint32_t>> dims;
  while (std::getline(extent, line)) {
    std::istringstream row(line);
    int b = 0;
    std::uint32_t w = 0, h = 0, side = 0;
    if (!(row >> b >> w >> h >> side)) {
      throw FormatError("malformed extent row '" + line + "'", std::nullopt,
                        extent_path.string());
    }
    if (b == band) dims = {w, h};
  }
  if (!dims) {
    throw InputError("band " + std::to_string(band) + " not listed in " +
                     extent_path.string());
  }
  std::array<PTree, kBitsPerBand> trees;
  for (int k = 1; k <= kBitsPerBand; ++k) {
    trees[k - 1] = read_ptree(dir / tree_name(band, k));
  }
  return BandPTrees(static_cast<std::uint8_t>(band), dims->first,
                    dims->second, std::move(trees));
}

void run_count(const CountArgs& a, std::ostream& out) {
  const BandPTrees bands = load_band(a.trees, a.band);
  const PTree result =
      a.value ? value_ptree(bands, ValueQuery{bands.band_id(), *a.value,
                                              a.precision})
              : range_ptree(bands, *a.ge, a.precision);
  out << result.root_count() << '\n';
}

// ---- call -----------------------------------------------------------------

struct CallArgs {
  std::string manifest;
  std::string spots;
  std::string out;
  CallParams params;
};

void run_call(const CallArgs& a, std::ostream&) {
  const SpotMap spots = read_spot_map(a.spots);
  GeneCatalog::from_spots(spots);
  std::vector<GeneCall> calls;
  for (const ExperimentSpec& spec : read_manifest(a.manifest)) {
    auto experiment = call_experiment(spec, spots, a.params);
    calls.insert(calls.end(), std::make_move_iterator(experiment.begin()),
                 std::make_move_iterator(experiment.end()));
  }
  write_text(a.out, format_calls(calls));
}

// ---- mine -----------------------------------------------------------------

struct MineArgs {
  std::vector<std::string> calls;
  std::string out;
  std::string mode = "any";
  std::string format;
  std::size_t top = 0;
  MiningParams params;
};

void run_mine(MineArgs a, std::ostream&) {
  a.params.mode =
      a.mode == "xy" ? MiningMode::kXImpliesY : MiningMode::kUnconstrained;
  std::vector<GeneCall> calls;
  for (const auto& path : a.calls) {
    auto part = parse_calls(read_text(path), path);
    calls.insert(calls.end(), std::make_move_iterator(part.begin()),
                 std::make_move_iterator(part.end()));
  }
  const TransactionMatrix matrix = build_superchip(calls);
  const std::vector<Rule> rules = mine(matrix, a.params);

  std::string format = a.format;
  if (format.empty()) {
    format = fs::path(a.out).extension() == ".json" ? "json" : "tsv";
  }
  write_text(a.out, format == "json"
                        ? format_rules_json(rules, matrix.items(), a.top)
                        : format_rules_tsv(rules, matrix.items(), a.top));
}

CLI::Validator unit_fraction() {
  return CLI::Validator(
      [](std::string& s) -> std::string {
        double v = 0;
        std::istringstream in(s);
        if (!(in >> v) || !(v > 0.0 && v <= 1.0)) {
          return "value must be in (0, 1]";
        }
        return {};
      },
      "(0,1]");
}

CLI::Validator positive() {
  return CLI::Validator(
      [](std::string& s) -> std::string {
        double v = 0;
        std::istringstream in(s);
        if (!(in >> v) || !(v > 0.0)) return "value must be > 0";
        return {};
      },
      "POSITIVE");
}

void report(const Error& e, std::ostream& err) {
  err << "ptree: error: " << e.what();
  if (const auto* fe = dynamic_cast<const FormatError*>(&e)) {
    if (!fe->source().empty()) err << " [" << fe->source();
    if (fe->offset()) {
      err << (fe->source().empty() ? " [" : ", ") << "byte offset "
          << *fe->offset();
    }
    if (!fe->source().empty() || fe->offset()) err << ']';
  }
  err << '\n';
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"P-tree engine: bSQ encoding, Peano count trees, gene calls "
               "and association rule mining",
               "ptree"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file supplying option defaults");

  EncodeArgs enc;
  auto* encode = app.add_subcommand("encode", "Split a band image into 8 bSQ files");
  encode->add_option("--image", enc.image, "PGM (P5) or CSV band image")->required();
  encode->add_option("--band", enc.band, "red, green or a band id 0..255");
  encode->add_option("--out", enc.out, "Output directory")->required();

  BuildArgs bld;
  auto* build = app.add_subcommand("build", "Build one .pt file per .bsq file");
  build->add_option("--bsq", bld.bsq, "Directory of .bsq files")->required();
  build->add_option("--out", bld.out, "Output directory")->required();

  CountArgs cnt;
  auto* count = app.add_subcommand("count", "Root count of a value or range query");
  count->add_option("--trees", cnt.trees, "Directory written by build")->required();
  count->add_option("--band", cnt.band, "Band id")->required()->check(
      CLI::Range(0, 255));
  auto* value_opt =
      count->add_option("--value", cnt.value, "Exact value of the top bits");
  auto* ge_opt =
      count->add_option("--ge", cnt.ge, "Lower bound on the top bits");
  value_opt->excludes(ge_opt);
  count->add_option("--precision", cnt.precision, "Compared high-order bits")
      ->required()
      ->check(CLI::Range(1, 8));

  CallArgs cal;
  auto* call = app.add_subcommand("call", "Per-experiment gene calls");
  call->add_option("--manifest", cal.manifest, "Experiment manifest (TSV/JSON)")->required();
  call->add_option("--spots", cal.spots, "Spot map TSV")->required();
  call->add_option("--rho", cal.params.rho, "EP pixel fraction for X calls")
      ->check(unit_fraction());
  call->add_option("--z", cal.params.z, "Significance multiplier")
      ->check(positive());
  call->add_option("--pseudocount", cal.params.pseudocount,
                   "Added to both channels before the ratio")
      ->check(positive());
  call->add_option("--out", cal.out, "Calls TSV")->required();

  MineArgs mn;
  auto* mine_cmd = app.add_subcommand("mine", "Mine association rules from calls");
  mine_cmd->add_option("--calls", mn.calls, "Calls TSV files")->required();
  mine_cmd->add_option("--minsup", mn.params.minsup, "Minimum support")
      ->required()
      ->check(unit_fraction());
  mine_cmd->add_option("--minconf", mn.params.minconf, "Minimum confidence")
      ->required()
      ->check(unit_fraction());
  mine_cmd->add_option("--mode", mn.mode, "any or xy (X antecedents => Y consequents)")
      ->check(CLI::IsMember({"any", "xy"}));
  mine_cmd->add_option("--out", mn.out, "Rules file")->required();
  mine_cmd->add_option("--format", mn.format, "tsv or json")
      ->check(CLI::IsMember({"tsv", "json"}));
  mine_cmd->add_option("--top", mn.top, "Keep only the first N rules");
  mine_cmd->add_option("--max-size", mn.params.max_itemset_size,
                       "Largest itemset mined (0 = unlimited)");
  mine_cmd->add_option("--threads", mn.params.threads,
                       "Support counting workers")
      ->check(CLI::Range(1u, 256u));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (*count && !cnt.value && !cnt.ge) {
      throw CLI::RequiredError("count needs --value or --ge");
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*encode) run_encode(enc, out);
    if (*build) run_build(bld, out);
    if (*count) run_count(cnt, out);
    if (*call) run_call(cal, out);
    if (*mine_cmd) run_mine(mn, out);
  } catch (const CLI::ValidationError& e) {
    err << "ptree: usage: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    report(e, err);
    return kInputError;
  } catch (const fs::filesystem_error& e) {
    err << "ptree: error: " << e.what() << '\n';
    return kInputError;
  }
  return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace ptree::cli
