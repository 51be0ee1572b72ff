#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "viso/bench.hpp"

namespace viso {

using json = nlohmann::json;

// Instances: {"id","split","L","K","gains","p_max","sigma2","gamma_target"},
// gains as a row-major array of arrays.
json instance_to_json(const Instance& inst);
Instance instance_from_json(const json& j);

json gen_params_to_json(const GenParams& params);
GenParams gen_params_from_json(const json& j);

json benchmark_spec_to_json(const BenchmarkSpec& spec);
BenchmarkSpec benchmark_spec_from_json(const json& j);

/// Benchmark file: {"manifest": {seed, generator_version, counts, spec},
/// "instances": [...]}.
void save_benchmark(const std::filesystem::path& path, const BenchmarkSpec& spec,
                    const std::vector<Instance>& instances);

struct BenchmarkFile {
  BenchmarkSpec spec;
  std::vector<Instance> instances;
};
BenchmarkFile load_benchmark(const std::filesystem::path& path);

json verification_report_to_json(const VerificationReport& report);

/// {"solver","cost_units","wall_time_s","converged","candidate"} with the
/// candidate as a flat row-major array.
json solver_result_to_json(const SolverResult& result);

json memory_to_json(const std::vector<MemoryEntry>& memory);
std::vector<MemoryEntry> memory_from_json(const json& j);
void save_memory(const std::filesystem::path& path, const std::vector<MemoryEntry>& memory);
std::vector<MemoryEntry> load_memory(const std::filesystem::path& path);

/// Outcome lines for the JSONL stream; audit embeds the candidate matrices
/// (flat row-major) so verification can be replayed offline.
json outcome_to_json(const OrchestrationOutcome& outcome, bool audit);
OrchestrationOutcome outcome_from_json(const json& j);

void save_outcomes_jsonl(const std::filesystem::path& path,
                         const std::vector<OrchestrationOutcome>& outcomes, bool audit);
std::vector<OrchestrationOutcome> load_outcomes_jsonl(const std::filesystem::path& path);

json load_json_file(const std::filesystem::path& path);  // throws std::runtime_error on I/O

}  // namespace viso
