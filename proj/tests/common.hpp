#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "tensprov/csv.hpp"
#include "tensprov/spec.hpp"

namespace testing_support {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(TENSPROV_TEST_DATA) / name;
}

// D^l and D^r of the join/append running example.
inline tensprov::Dataset example_left() { return tensprov::load_csv(data_path("dl.csv"), "dl"); }
inline tensprov::Dataset example_right() { return tensprov::load_csv(data_path("dr.csv"), "dr"); }

inline std::unique_ptr<tensprov::Pipeline> load_pipeline(const std::string& spec_name,
                                                         tensprov::PipelineOptions options = {}) {
  const auto spec = tensprov::load_spec(data_path(spec_name));
  options.set_semantics = options.set_semantics || spec.settings.set_semantics;
  auto p = std::make_unique<tensprov::Pipeline>(options);
  tensprov::run_spec(spec, *p);
  return p;
}

inline const char* const kFixtureSpecs[] = {"german.json",     "compas.json",       "census.json",
                                            "census_join.json", "example_join.json",   "example_append.json",
                                            "outer_join.json",  "fanout.json",       "dup_join.json"};

}  // namespace testing_support
