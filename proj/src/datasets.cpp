#include "bmf/datasets.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

namespace bmf {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t p = 0; p < line.size(); ++p) {
    const char c = line[p];
    if (c == '"') {
      if (quoted && p + 1 < line.size() && line[p + 1] == '"') {
        field += '"';
        ++p;
      } else {
        quoted = !quoted;
      }
    } else if (c == delimiter && !quoted) {
      out.push_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(trim(field));
  return out;
}

bool is_missing(const BinarizationRecipe& r, const std::string& v) {
  return std::find(r.missing_tokens.begin(), r.missing_tokens.end(), v) !=
         r.missing_tokens.end();
}

std::string rule_label(const ColumnRule& rule, std::size_t c) {
  return rule.name.empty() ? "column " + std::to_string(c + 1)
                           : "column '" + rule.name + "'";
}

RuleKind parse_rule_kind(const std::string& s) {
  if (s == "binary" || s == "passthrough_binary") return RuleKind::passthrough_binary;
  if (s == "one_hot") return RuleKind::one_hot;
  if (s == "median_split") return RuleKind::median_split;
  if (s == "drop") return RuleKind::drop;
  throw std::invalid_argument("unknown column rule '" + s + "'");
}

std::vector<std::string> string_list(const YAML::Node& node) {
  std::vector<std::string> out;
  if (!node) return out;
  if (node.IsSequence()) {
    for (const auto& v : node) out.push_back(v.as<std::string>());
  } else {
    out.push_back(node.as<std::string>());
  }
  return out;
}

}  // namespace

RawTable parse_table(std::istream& in, char delimiter) {
  RawTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_line(line, delimiter);
    if (!table.empty() && fields.size() != table.front().size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(table.front().size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    table.push_back(std::move(fields));
  }
  return table;
}

BinaryMatrix binarize(const RawTable& table, const BinarizationRecipe& recipe) {
  if (table.empty()) throw ParseError("empty table");
  const std::size_t width = table.front().size();
  if (recipe.rules.size() != width) {
    throw std::invalid_argument("recipe has " + std::to_string(recipe.rules.size()) +
                                " column rules for a table with " +
                                std::to_string(width) + " columns");
  }
  const std::size_t n = table.size();
  // Each output block: a list of per-row bit patterns.
  std::vector<std::vector<std::vector<std::uint8_t>>> blocks;
  for (std::size_t c = 0; c < width; ++c) {
    const ColumnRule& rule = recipe.rules[c];
    switch (rule.kind) {
      case RuleKind::drop:
        break;
      case RuleKind::passthrough_binary: {
        std::vector<std::vector<std::uint8_t>> block(1, std::vector<std::uint8_t>(n));
        for (std::size_t r = 0; r < n; ++r) {
          const auto& v = table[r][c];
          if (v == rule.true_value) {
            block[0][r] = 1;
          } else if (!is_missing(recipe, v) &&
                     std::find(rule.false_values.begin(), rule.false_values.end(),
                               v) == rule.false_values.end()) {
            throw std::invalid_argument(rule_label(rule, c) +
                                        ": unexpected value '" + v + "'");
          }
        }
        blocks.push_back(std::move(block));
        break;
      }
      case RuleKind::one_hot: {
        std::vector<std::string> cats = rule.categories;
        if (cats.empty()) {
          std::set<std::string> seen;
          for (std::size_t r = 0; r < n; ++r) {
            if (!is_missing(recipe, table[r][c])) seen.insert(table[r][c]);
          }
          cats.assign(seen.begin(), seen.end());
        }
        std::vector<std::vector<std::uint8_t>> block(cats.size(),
                                                     std::vector<std::uint8_t>(n));
        for (std::size_t r = 0; r < n; ++r) {
          const auto& v = table[r][c];
          if (is_missing(recipe, v)) continue;
          const auto it = std::find(cats.begin(), cats.end(), v);
          if (it == cats.end()) {
            throw std::invalid_argument(rule_label(rule, c) +
                                        ": unknown category '" + v + "'");
          }
          block[it - cats.begin()][r] = 1;
        }
        blocks.push_back(std::move(block));
        break;
      }
      case RuleKind::median_split: {
        std::vector<std::optional<double>> values(n);
        std::vector<double> present;
        for (std::size_t r = 0; r < n; ++r) {
          const auto& v = table[r][c];
          if (is_missing(recipe, v)) continue;
          try {
            std::size_t used = 0;
            const double d = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            values[r] = d;
            present.push_back(d);
          } catch (const std::exception&) {
            throw std::invalid_argument(rule_label(rule, c) +
                                        ": non-numeric value '" + v + "'");
          }
        }
        if (present.empty()) {
          throw std::invalid_argument(rule_label(rule, c) + ": no numeric values");
        }
        std::sort(present.begin(), present.end());
        const std::size_t h = present.size() / 2;
        const double median = present.size() % 2 == 1
                                  ? present[h]
                                  : 0.5 * (present[h - 1] + present[h]);
        std::vector<std::vector<std::uint8_t>> block(2, std::vector<std::uint8_t>(n));
        for (std::size_t r = 0; r < n; ++r) {
          if (!values[r]) continue;
          block[*values[r] <= median ? 0 : 1][r] = 1;
        }
        blocks.push_back(std::move(block));
        break;
      }
    }
  }

  std::vector<const std::vector<std::uint8_t>*> out_cols;
  for (const auto& b : blocks) {
    for (const auto& col : b) out_cols.push_back(&col);
  }
  if (out_cols.empty()) throw std::invalid_argument("recipe keeps no columns");

  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < n; ++r) {
    const bool any = std::any_of(out_cols.begin(), out_cols.end(),
                                 [r](const auto* col) { return (*col)[r] != 0; });
    if (any || !recipe.drop_zero_rows) keep.push_back(r);
  }
  BinaryMatrix x(keep.size(), out_cols.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    for (std::size_t j = 0; j < out_cols.size(); ++j) {
      if ((*out_cols[j])[keep[i]]) x.set(i, j);
    }
  }
  return x;
}

BinaryMatrix parse_gml_adjacency(std::istream& in) {
  std::vector<std::string> tokens;
  std::string tok;
  char ch;
  while (in.get(ch)) {
    if (ch == '"') {
      std::string s;
      while (in.get(ch) && ch != '"') s += ch;
      tokens.push_back('"' + s + '"');
    } else if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!tok.empty()) tokens.push_back(std::move(tok));
      tok.clear();
    } else if (ch == '[' || ch == ']') {
      if (!tok.empty()) tokens.push_back(std::move(tok));
      tok.clear();
      tokens.emplace_back(1, ch);
    } else {
      tok += ch;
    }
  }
  if (!tok.empty()) tokens.push_back(tok);

  std::vector<long> ids;
  std::vector<std::pair<long, long>> edges;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if ((tokens[t] != "node" && tokens[t] != "edge") || t + 1 >= tokens.size() ||
        tokens[t + 1] != "[") {
      continue;
    }
    const bool is_node = tokens[t] == "node";
    std::map<std::string, long> fields;
    std::size_t u = t + 2;
    int depth = 1;
    for (; u < tokens.size() && depth > 0; ++u) {
      if (tokens[u] == "[") {
        ++depth;
      } else if (tokens[u] == "]") {
        --depth;
      } else if (depth == 1 && u + 1 < tokens.size() &&
                 (tokens[u] == "id" || tokens[u] == "source" ||
                  tokens[u] == "target")) {
        fields[tokens[u]] = std::stol(tokens[u + 1]);
        ++u;
      }
    }
    if (depth != 0) throw ParseError("gml: unterminated block");
    if (is_node) {
      if (!fields.count("id")) throw ParseError("gml: node without id");
      ids.push_back(fields["id"]);
    } else {
      if (!fields.count("source") || !fields.count("target")) {
        throw ParseError("gml: edge without source/target");
      }
      edges.emplace_back(fields["source"], fields["target"]);
    }
    t = u - 1;
  }
  if (ids.empty()) throw ParseError("gml: no nodes");
  std::sort(ids.begin(), ids.end());
  auto pos = [&](long id) {
    const auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) {
      throw ParseError("gml: edge refers to unknown node " + std::to_string(id));
    }
    return static_cast<std::size_t>(it - ids.begin());
  };
  BinaryMatrix x(ids.size(), ids.size());
  for (const auto& [s, t] : edges) {
    x.set(pos(s), pos(t));
    x.set(pos(t), pos(s));
  }
  return x;
}

std::string default_recipe_dir() {
  if (const char* env = std::getenv("BMF_RECIPE_DIR")) return env;
  return BMF_DEFAULT_RECIPE_DIR;
}

std::string default_data_dir() {
  if (const char* env = std::getenv("BMF_DATA_DIR")) return env;
  return BMF_DEFAULT_DATA_DIR;
}

DatasetManifest parse_manifest(const std::string& yaml_text) {
  const YAML::Node doc = YAML::Load(yaml_text);
  DatasetManifest m;
  m.name = doc["name"].as<std::string>();
  m.aliases = string_list(doc["aliases"]);
  if (doc["url"]) m.url = doc["url"].as<std::string>();
  m.sources = string_list(doc["sources"]);
  m.sha256 = string_list(doc["sha256"]);
  if (doc["format"]) m.format = doc["format"].as<std::string>();
  if (const auto e = doc["expected"]) {
    m.expected_rows = e["rows"].as<std::size_t>();
    m.expected_cols = e["cols"].as<std::size_t>();
    m.expected_density = e["density"].as<double>();
  }
  auto& r = m.recipe;
  if (doc["delimiter"]) {
    const auto d = doc["delimiter"].as<std::string>();
    r.delimiter = d == "\\t" ? '\t' : d.at(0);
  }
  if (doc["missing"]) r.missing_tokens = string_list(doc["missing"]);
  if (doc["drop_zero_rows"]) r.drop_zero_rows = doc["drop_zero_rows"].as<bool>();
  for (const auto& node : doc["columns"]) {
    ColumnRule rule;
    rule.kind = parse_rule_kind(node["rule"].as<std::string>());
    if (node["name"]) rule.name = node["name"].as<std::string>();
    if (node["true"]) rule.true_value = node["true"].as<std::string>();
    if (node["false"]) rule.false_values = string_list(node["false"]);
    rule.categories = string_list(node["categories"]);
    const std::size_t repeat = node["repeat"] ? node["repeat"].as<std::size_t>() : 1;
    for (std::size_t t = 0; t < repeat; ++t) r.rules.push_back(rule);
  }
  if (m.format == "table" && r.rules.empty()) {
    throw std::invalid_argument("manifest '" + m.name + "' has no column rules");
  }
  return m;
}

std::vector<DatasetManifest> list_manifests(const std::string& recipe_dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(recipe_dir)) {
    if (entry.path().extension() == ".yaml") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<DatasetManifest> out;
  for (const auto& f : files) {
    std::ifstream in(f);
    std::stringstream ss;
    ss << in.rdbuf();
    out.push_back(parse_manifest(ss.str()));
  }
  return out;
}

DatasetManifest load_manifest(const std::string& name,
                              const std::string& recipe_dir) {
  for (auto& m : list_manifests(recipe_dir)) {
    if (m.name == name ||
        std::find(m.aliases.begin(), m.aliases.end(), name) != m.aliases.end()) {
      return m;
    }
  }
  throw std::invalid_argument("no recipe for dataset '" + name + "' in " +
                              recipe_dir);
}

bool sources_present(const DatasetManifest& manifest,
                     const std::string& source_dir) {
  return std::all_of(manifest.sources.begin(), manifest.sources.end(),
                     [&](const std::string& s) {
                       return fs::exists(fs::path(source_dir) / s);
                     });
}

double density_percent(const BinaryMatrix& x) {
  if (x.empty()) return 0.0;
  return 100.0 * static_cast<double>(x.count_ones()) /
         static_cast<double>(x.rows() * x.cols());
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 1 << 14> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest.data(), &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int b = 0; b < len; ++b) {
    hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[b]};
  }
  return hex.str();
}

PreparedDataset prepare(const DatasetManifest& manifest,
                        const std::string& source_dir) {
  PreparedDataset out;
  RawTable table;
  for (std::size_t s = 0; s < manifest.sources.size(); ++s) {
    const fs::path path = fs::path(source_dir) / manifest.sources[s];
    std::ifstream in(path);
    if (!in) {
      throw std::runtime_error("missing source file " + path.string() +
                               (manifest.url.empty() ? "" : " (from " + manifest.url + ")"));
    }
    if (s < manifest.sha256.size() && !manifest.sha256[s].empty()) {
      const std::string got = sha256_file(path.string());
      if (got != manifest.sha256[s]) {
        out.warnings.push_back("checksum mismatch for " + path.string() + ": " +
                               got);
      }
    }
    if (manifest.format == "gml_graph") {
      out.matrix = parse_gml_adjacency(in);
      continue;
    }
    RawTable part;
    try {
      part = parse_table(in, manifest.recipe.delimiter);
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
    if (!table.empty() && !part.empty() &&
        part.front().size() != table.front().size()) {
      throw ParseError(path.string() + ": column count differs from " +
                       manifest.sources.front());
    }
    table.insert(table.end(), part.begin(), part.end());
  }
  if (manifest.format == "table") {
    out.matrix = binarize(table, manifest.recipe);
  } else if (manifest.format != "gml_graph") {
    throw std::invalid_argument("unknown dataset format '" + manifest.format + "'");
  }
  out.density = density_percent(out.matrix);
  if (manifest.expected_rows != 0 &&
      (out.matrix.rows() != manifest.expected_rows ||
       out.matrix.cols() != manifest.expected_cols)) {
    throw std::runtime_error(
        manifest.name + ": prepared " + std::to_string(out.matrix.rows()) + "x" +
        std::to_string(out.matrix.cols()) + ", expected " +
        std::to_string(manifest.expected_rows) + "x" +
        std::to_string(manifest.expected_cols));
  }
  if (manifest.expected_density > 0 &&
      std::abs(out.density - manifest.expected_density) > 0.1 + 1e-9) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: density %.2f%% differs from %.1f%%",
                  manifest.name.c_str(), out.density, manifest.expected_density);
    throw std::runtime_error(buf);
  }
  return out;
}

}  // namespace bmf
