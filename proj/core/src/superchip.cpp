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

#include "ptree/superchip.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ptree/errors.hpp"
#include "ptree/image_io.hpp"
#include "tsv.hpp"

namespace ptree {

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

std::uint32_t parse_u32(const std::string& s, const detail::TsvRow& row,
                        const std::string& source) {
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw FormatError("line " + std::to_string(row.line) + ": '" + s +
                          "' is not a non-negative integer",
                      row.offset, source);
  }
  return v;
}

double parse_double(const std::string& s, std::size_t line,
                    std::size_t offset, const std::string& source) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw FormatError("line " + std::to_string(line) + ": '" + s +
                        "' is not a finite number",
                    offset, source);
}

void expect_header(const std::vector<detail::TsvRow>& rows,
                   const std::vector<std::string>& header,
                   const std::string& source) {
  if (rows.empty() || rows[0].fields != header) {
    std::string want;
    for (const auto& h : header) want += (want.empty() ? "" : "\t") + h;
    throw FormatError("missing header '" + want + "'", 0, source);
  }
}

std::uint64_t region_count(const PTree& t, const Region& r) {
  return (t & build_rectangle_mask(t.side(), r.x0, r.y0, r.x1, r.y1))
      .root_count();
}

double region_mean(const RatioGrid& ratios, const Region& r) {
  double sum = 0;
  for (std::uint32_t y = r.y0; y <= r.y1; ++y) {
    for (std::uint32_t x = r.x0; x <= r.x1; ++x) sum += ratios.at(x, y);
  }
  return sum / static_cast<double>(r.area());
}

}  // namespace

std::string_view to_string(GeneGroup g) {
  return g == GeneGroup::kX ? "X" : "Y";
}

void SpotMap::validate(std::uint32_t width, std::uint32_t height) const {
  std::set<std::string_view> seen;
  for (const Spot& s : entries) {
    if (s.gene_id.empty()) throw SpotMapError("empty gene id");
    if (!seen.insert(s.gene_id).second) {
      throw SpotMapError("duplicate gene id '" + s.gene_id + "'");
    }
    const Region& r = s.region;
    if (r.x0 > r.x1 || r.y0 > r.y1) {
      throw SpotMapError("empty region for gene '" + s.gene_id + "'");
    }
    if (r.x1 >= width || r.y1 >= height) {
      throw SpotMapError("region of gene '" + s.gene_id +
                         "' lies outside the " + std::to_string(width) + "x" +
                         std::to_string(height) + " image");
    }
  }
}

std::size_t SpotMap::reference_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(),
                    [](const Spot& s) { return s.is_reference; }));
}

SpotMap parse_spot_map(std::string_view text, const std::string& source) {
  const auto rows = detail::parse_tsv(text);
  expect_header(rows, {"gene_id", "x0", "y0", "x1", "y1", "group", "reference"},
                source);
  SpotMap map;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.fields.size() != 7) {
      throw FormatError("line " + std::to_string(row.line) +
                            ": expected 7 fields",
                        row.offset, source);
    }
    Spot s;
    s.gene_id = row.fields[0];
    s.region = Region{parse_u32(row.fields[1], row, source),
                      parse_u32(row.fields[2], row, source),
                      parse_u32(row.fields[3], row, source),
                      parse_u32(row.fields[4], row, source)};
    if (row.fields[5] == "X") {
      s.group = GeneGroup::kX;
    } else if (row.fields[5] == "Y") {
      s.group = GeneGroup::kY;
    } else {
      throw FormatError("line " + std::to_string(row.line) +
                            ": group must be X or Y",
                        row.offset, source);
    }
    if (row.fields[6] != "0" && row.fields[6] != "1") {
      throw FormatError("line " + std::to_string(row.line) +
                            ": reference must be 0 or 1",
                        row.offset, source);
    }
    s.is_reference = row.fields[6] == "1";
    map.entries.push_back(std::move(s));
  }
  return map;
}

SpotMap read_spot_map(const std::filesystem::path& path) {
  return parse_spot_map(slurp(path), path.string());
}

GeneCatalog GeneCatalog::from_spots(const SpotMap& spots) {
  GeneCatalog c;
  for (const Spot& s : spots.entries) {
    if (!c.groups.emplace(s.gene_id, s.group).second) {
      throw SpotMapError("duplicate gene id '" + s.gene_id + "'");
    }
  }
  return c;
}

std::string format_state(const GeneState& state) {
  if (const bool* b = std::get_if<bool>(&state)) return *b ? "1" : "0";
  return std::string(to_string(std::get<Level>(state)));
}

ReferenceStats reference_stats(const RatioGrid& ratios, const SpotMap& spots,
                               double z, double pseudocount) {
  if (spots.reference_count() < 2) {
    throw SpotMapError(
        "at least two reference spots are needed to compute statistics");
  }
  spots.validate(ratios.width, ratios.height);
  double sum = 0, sum_sq = 0;
  std::uint64_t n = 0;
  for (const Spot& s : spots.entries) {
    if (!s.is_reference) continue;
    for (std::uint32_t y = s.region.y0; y <= s.region.y1; ++y) {
      for (std::uint32_t x = s.region.x0; x <= s.region.x1; ++x) {
        sum += ratios.at(x, y);
        ++n;
      }
    }
  }
  const double mu = sum / static_cast<double>(n);
  for (const Spot& s : spots.entries) {
    if (!s.is_reference) continue;
    for (std::uint32_t y = s.region.y0; y <= s.region.y1; ++y) {
      for (std::uint32_t x = s.region.x0; x <= s.region.x1; ++x) {
        const double d = ratios.at(x, y) - mu;
        sum_sq += d * d;
      }
    }
  }
  return ReferenceStats{mu, std::sqrt(sum_sq / static_cast<double>(n)), z,
                        pseudocount};
}

std::vector<GeneCall> call_genes(std::string_view experiment_id,
                                 const PTree& ep, const PTree& rp,
                                 const RatioGrid& ratios, const SpotMap& spots,
                                 double rho, const ReferenceStats& stats) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw InputError("rho must be in (0, 1]");
  }
  if (ep.side() != rp.side() ||
      ep.side() != pad_side(ratios.width, ratios.height)) {
    throw IncompatibleError("EP/RP trees and ratio grid disagree on extent");
  }
  spots.validate(ratios.width, ratios.height);

  std::vector<GeneCall> calls;
  calls.reserve(spots.entries.size());
  for (const Spot& s : spots.entries) {
    GeneCall call{std::string(experiment_id), s.gene_id, false};
    if (s.group == GeneGroup::kX) {
      const double fraction = static_cast<double>(region_count(ep, s.region)) /
                              static_cast<double>(s.region.area());
      call.state = fraction >= rho;
    } else {
      call.state = level_of(region_mean(ratios, s.region), stats);
    }
    calls.push_back(std::move(call));
  }
  return calls;
}

std::vector<ExperimentSpec> read_manifest(const std::filesystem::path& path) {
  const std::string text = slurp(path);
  const std::string source = path.string();
  const auto base = path.parent_path();
  auto resolve = [&base](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_relative() ? base / fp : fp;
  };

  std::vector<ExperimentSpec> out;
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (ext == ".json") {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(std::string("invalid JSON manifest: ") + e.what(),
                        e.byte, source);
    }
    const nlohmann::json& list =
        doc.is_object() && doc.contains("experiments") ? doc["experiments"]
                                                       : doc;
    if (!list.is_array()) {
      throw FormatError("manifest must be an array of experiments", 0, source);
    }
    try {
      for (const auto& e : list) {
        ExperimentSpec spec;
        spec.experiment_id = e.at("experiment_id").get<std::string>();
        spec.red = resolve(e.at("red").get<std::string>());
        spec.green = resolve(e.at("green").get<std::string>());
        if (e.contains("mu") && !e["mu"].is_null()) {
          spec.mu = e["mu"].get<double>();
        }
        if (e.contains("sigma") && !e["sigma"].is_null()) {
          spec.sigma = e["sigma"].get<double>();
        }
        out.push_back(std::move(spec));
      }
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("malformed manifest entry: ") + e.what(),
                        std::nullopt, source);
    }
  } else {
    const auto rows = detail::parse_tsv(text);
    if (rows.empty() || rows[0].fields.size() < 3 ||
        rows[0].fields[0] != "experiment_id" || rows[0].fields[1] != "red" ||
        rows[0].fields[2] != "green") {
      throw FormatError("missing header 'experiment_id\tred\tgreen'", 0,
                        source);
    }
    const auto& header = rows[0].fields;
    const bool has_stats =
        header.size() == 5 && header[3] == "mu" && header[4] == "sigma";
    if (header.size() != 3 && !has_stats) {
      throw FormatError("manifest header must end with 'green' or 'mu\tsigma'",
                        0, source);
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& row = rows[i];
      if (row.fields.size() != header.size()) {
        throw FormatError("line " + std::to_string(row.line) + ": expected " +
                              std::to_string(header.size()) + " fields",
                          row.offset, source);
      }
      ExperimentSpec spec{row.fields[0], resolve(row.fields[1]),
                          resolve(row.fields[2]), std::nullopt, std::nullopt};
      if (has_stats) {
        auto opt = [&](const std::string& f) -> std::optional<double> {
          if (f.empty() || f == "-") return std::nullopt;
          return parse_double(f, row.line, row.offset, source);
        };
        spec.mu = opt(row.fields[3]);
        spec.sigma = opt(row.fields[4]);
      }
      out.push_back(std::move(spec));
    }
  }

  std::set<std::string_view> ids;
  for (const auto& e : out) {
    if (e.experiment_id.empty() || !ids.insert(e.experiment_id).second) {
      throw InputError("manifest " + source +
                       " has an empty or duplicate experiment id '" +
                       e.experiment_id + "'");
    }
  }
  return out;
}

std::vector<GeneCall> call_experiment(const ExperimentSpec& spec,
                                      const SpotMap& spots,
                                      const CallParams& params) {
  const BandGrid red = read_band(spec.red, kRedBand);
  const BandGrid green = read_band(spec.green, kGreenBand);
  if (red.width != green.width || red.height != green.height) {
    throw IncompatibleError("experiment '" + spec.experiment_id +
                            "': red and green images differ in size");
  }
  spots.validate(red.width, red.height);

  ReferenceStats base{0.0, 1.0, params.z, params.pseudocount};
  const RatioGrid ratios = pixel_log_ratio(red, green, base);
  ReferenceStats stats = base;
  if (!spec.mu || !spec.sigma) {
    stats = reference_stats(ratios, spots, params.z, params.pseudocount);
  }
  if (spec.mu) stats.mu = *spec.mu;
  if (spec.sigma) stats.sigma = *spec.sigma;

  const PTree ep = ep_tree(ratios, stats);
  const PTree rp = rp_tree(ratios, stats);
  return call_genes(spec.experiment_id, ep, rp, ratios, spots, params.rho,
                    stats);
}

std::string format_calls(std::span<const GeneCall> calls) {
  std::string out = "experiment_id\tgene_id\tstate\n";
  for (const GeneCall& c : calls) {
    out += c.experiment_id + '\t' + c.gene_id + '\t' + format_state(c.state) +
           '\n';
  }
  return out;
}

std::vector<GeneCall> parse_calls(std::string_view text,
                                  const std::string& source) {
  const auto rows = detail::parse_tsv(text);
  expect_header(rows, {"experiment_id", "gene_id", "state"}, source);
  std::vector<GeneCall> calls;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.fields.size() != 3 || row.fields[0].empty() ||
        row.fields[1].empty()) {
      throw FormatError("line " + std::to_string(row.line) +
                            ": expected experiment_id, gene_id, state",
                        row.offset, source);
    }
    GeneCall c{row.fields[0], row.fields[1], false};
    const std::string& st = row.fields[2];
    if (st == "0" || st == "1") {
      c.state = st == "1";
    } else if (auto level = parse_level(st)) {
      c.state = *level;
    } else {
      throw FormatError("line " + std::to_string(row.line) +
                            ": unknown state '" + st + "'",
                        row.offset, source);
    }
    calls.push_back(std::move(c));
  }
  return calls;
}

std::string Item::label() const {
  return gene_id + ':' +
         (level ? std::string(to_string(*level)) : std::string("1"));
}

TransactionMatrix::TransactionMatrix(std::vector<std::string> experiments,
                                     std::vector<Item> items,
                                     std::vector<PTree> columns)
    : experiments_(std::move(experiments)), items_(std::move(items)),
      columns_(std::move(columns)),
      side_(transaction_side(experiments_.size())) {
  if (items_.size() != columns_.size()) {
    throw InputError("item and column counts differ");
  }
  for (const PTree& c : columns_) {
    if (c.side() != side_) {
      throw IncompatibleError("item column side does not fit the matrix");
    }
  }
}

std::optional<ItemId> TransactionMatrix::find(const Item& item) const {
  auto it = std::lower_bound(items_.begin(), items_.end(), item);
  if (it == items_.end() || *it != item) return std::nullopt;
  return static_cast<ItemId>(it - items_.begin());
}

std::optional<ItemId> TransactionMatrix::find_label(
    std::string_view label) const {
  for (ItemId i = 0; i < items_.size(); ++i) {
    if (items_[i].label() == label) return i;
  }
  return std::nullopt;
}

std::uint32_t transaction_side(std::size_t n) {
  std::uint32_t side = 1;
  while (static_cast<std::uint64_t>(side) * side < n) side *= 2;
  return side;
}

TransactionMatrix build_superchip(std::span<const GeneCall> calls) {
  std::vector<std::string> experiments;
  std::map<std::string, std::size_t> exp_index;
  std::map<std::string, GeneGroup> groups;
  std::set<std::pair<std::string_view, std::string_view>> seen;
  for (const GeneCall& c : calls) {
    if (!seen.emplace(c.experiment_id, c.gene_id).second) {
      throw InputError("duplicate call for gene '" + c.gene_id +
                       "' in experiment '" + c.experiment_id + "'");
    }
    if (exp_index.emplace(c.experiment_id, experiments.size()).second) {
      experiments.push_back(c.experiment_id);
    }
    auto [it, inserted] = groups.emplace(c.gene_id, c.group());
    if (!inserted && it->second != c.group()) {
      throw InputError("gene '" + c.gene_id +
                       "' is called as both X and Y across experiments");
    }
  }
  if (experiments.empty()) {
    throw InputError("no gene calls to build a super chip from");
  }

  const std::uint32_t side = transaction_side(experiments.size());
  const std::size_t cells = static_cast<std::size_t>(side) * side;
  std::map<Item, std::vector<std::uint8_t>> bits;
  for (const auto& [gene, group] : groups) {
    if (group == GeneGroup::kX) {
      bits.emplace(Item{gene, GeneGroup::kX, std::nullopt},
                   std::vector<std::uint8_t>(cells, 0));
    }
  }
  for (const GeneCall& c : calls) {
    const std::size_t t = exp_index.at(c.experiment_id);
    if (const bool* expressed = std::get_if<bool>(&c.state)) {
      if (*expressed) bits[Item{c.gene_id, GeneGroup::kX, std::nullopt}][t] = 1;
    } else {
      const Level level = std::get<Level>(c.state);
      if (level == Level::kNeutral) continue;
      auto& column = bits[Item{c.gene_id, GeneGroup::kY, level}];
      if (column.empty()) column.assign(cells, 0);
      column[t] = 1;
    }
  }

  std::vector<Item> items;
  std::vector<PTree> columns;
  items.reserve(bits.size());
  columns.reserve(bits.size());
  for (const auto& [item, column] : bits) {
    items.push_back(item);
    // Transaction t sits at Peano position t.
    columns.push_back(build_from_bits(column, side));
  }
  return TransactionMatrix(std::move(experiments), std::move(items),
                           std::move(columns));
}

double support(const TransactionMatrix& m, std::span<const ItemId> items) {
  for (ItemId id : items) {
    if (id >= m.n_items()) {
      throw LookupError("unknown item id " + std::to_string(id));
    }
  }
  if (items.empty()) return 1.0;
  PTree acc = m.column(items[0]);
  for (std::size_t i = 1; i < items.size(); ++i) acc = acc & m.column(items[i]);
  return static_cast<double>(acc.root_count()) /
         static_cast<double>(m.n_transactions());
}

double support(const TransactionMatrix& m, std::span<const Item> items) {
  std::vector<ItemId> ids;
  ids.reserve(items.size());
  for (const Item& it : items) {
    auto id = m.find(it);
    if (!id) throw LookupError("unknown item '" + it.label() + "'");
    ids.push_back(*id);
  }
  return support(m, ids);
}

}  // namespace ptree
