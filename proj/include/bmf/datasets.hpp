#ifndef BMF_DATASETS_HPP_
#define BMF_DATASETS_HPP_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bmf/binmat.hpp"

namespace bmf {

// Raised for malformed source tables; the message names the line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RuleKind { passthrough_binary, one_hot, median_split, drop };

struct ColumnRule {
  RuleKind kind = RuleKind::drop;
  std::string name;
  // passthrough_binary: the token meaning 1; anything else (besides a
  // missing token) is an error unless listed in false_values.
  std::string true_value = "1";
  std::vector<std::string> false_values = {"0"};
  // one_hot: fixed category list; empty means the sorted observed values.
  std::vector<std::string> categories;
};

struct BinarizationRecipe {
  char delimiter = ',';
  std::vector<std::string> missing_tokens = {"?"};
  std::vector<ColumnRule> rules;
  bool drop_zero_rows = false;
};

using RawTable = std::vector<std::vector<std::string>>;

// Splits delimited lines; double quotes group fields. Blank lines are
// skipped. Rows of unequal width raise ParseError naming the line.
RawTable parse_table(std::istream& in, char delimiter);

BinaryMatrix binarize(const RawTable& table, const BinarizationRecipe& recipe);

// Undirected GML graph -> symmetric adjacency matrix, nodes in id order.
BinaryMatrix parse_gml_adjacency(std::istream& in);

struct DatasetManifest {
  std::string name;
  std::vector<std::string> aliases;
  std::string url;
  std::vector<std::string> sources;
  std::vector<std::string> sha256;  // empty entries are not checked
  std::string format = "table";      // table | gml_graph
  BinarizationRecipe recipe;
  std::size_t expected_rows = 0;
  std::size_t expected_cols = 0;
  double expected_density = 0.0;  // percent of ones
};

std::string default_recipe_dir();
std::string default_data_dir();

// Looks up `name` (or an alias) among the recipe files in `recipe_dir`.
DatasetManifest load_manifest(const std::string& name,
                              const std::string& recipe_dir = default_recipe_dir());
DatasetManifest parse_manifest(const std::string& yaml_text);
std::vector<DatasetManifest> list_manifests(
    const std::string& recipe_dir = default_recipe_dir());

struct PreparedDataset {
  BinaryMatrix matrix;
  double density = 0.0;  // percent
  std::vector<std::string> warnings;
};

// Reads the manifest's sources from source_dir, binarizes, and validates
// against the expected shape (hard error) and density (0.1 pp, hard error).
// Checksum mismatches only add a warning.
PreparedDataset prepare(const DatasetManifest& manifest,
                        const std::string& source_dir = default_data_dir());

bool sources_present(const DatasetManifest& manifest,
                     const std::string& source_dir = default_data_dir());

double density_percent(const BinaryMatrix& x);

std::string sha256_file(const std::string& path);

}  // namespace bmf

#endif  // BMF_DATASETS_HPP_
