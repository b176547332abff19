#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tensprov/json_io.hpp"
#include "tensprov/pipeline.hpp"

namespace tensprov {

struct SourceSpec {
  DatasetId id;
  std::filesystem::path path;  // resolved against the spec file's directory
  bool header = true;
  std::map<std::string, CellType> types;
};

struct OpSpec {
  std::string id;
  std::string name;
  std::optional<OpCategory> category;  // checked against the operation when given
  std::vector<DatasetId> inputs;
  DatasetId output;
  json params = json::object();
};

struct SpecSettings {
  std::uint64_t seed = 0;
  bool set_semantics = false;
  std::size_t onehot_cap = 64;
};

struct PipelineSpec {
  std::vector<SourceSpec> sources;
  std::vector<OpSpec> ops;
  SpecSettings settings;
};

PipelineSpec parse_spec(const json& doc, const std::filesystem::path& base_dir = ".");
PipelineSpec load_spec(const std::filesystem::path& path);

// Operation names accepted in the `name` field.
std::vector<std::string> registered_operations();

// Resolves column references (names or positions) against the input schemas.
OpParams build_params(const OpSpec& op, const std::vector<const Schema*>& inputs, const SpecSettings& settings);

struct OpSummary {
  std::string id;
  std::string name;
  OpCategory category;
  std::size_t output_rows = 0;
  std::size_t nnz = 0;
  std::size_t tensor_bytes = 0;
  double capture_ms = 0.0;
};

struct RunSummary {
  std::vector<OpSummary> ops;
  double total_capture_ms = 0.0;
};

PipelineOptions pipeline_options(const PipelineSpec& spec);
// Loads sources and runs every operation into `p`.
RunSummary run_spec(const PipelineSpec& spec, Pipeline& p);

json summary_to_json(const RunSummary& s, const Pipeline& p);

}  // namespace tensprov
