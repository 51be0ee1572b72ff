#include "viso/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace viso {

namespace {

json mat_to_rows(const Mat& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows; ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols; ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from_rows(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw std::invalid_argument("matrix: expected array of rows");
  const int r = static_cast<int>(rows.size());
  const int c = static_cast<int>(rows[0].size());
  Mat m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c) throw std::invalid_argument("matrix: ragged rows");
    for (int j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

json mat_to_flat(const Mat& m) {
  json flat = json::array();
  for (double v : m.data) flat.push_back(v);
  return flat;
}

Mat mat_from_flat(const json& flat, int rows, int cols) {
  if (static_cast<int>(flat.size()) != rows * cols)
    throw std::invalid_argument("matrix: flat size does not match dimensions");
  Mat m(rows, cols);
  for (std::size_t i = 0; i < flat.size(); ++i) m.data[i] = flat[i].get<double>();
  return m;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("bad JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

json instance_to_json(const Instance& inst) {
  return json{{"id", inst.id},
              {"split", split_name(inst.split)},
              {"L", inst.L},
              {"K", inst.K},
              {"gains", mat_to_rows(inst.gains.g)},
              {"p_max", inst.budget.p_max},
              {"sigma2", inst.noise.sigma2},
              {"gamma_target", inst.gamma_target}};
}

Instance instance_from_json(const json& j) {
  Instance inst;
  inst.id = j.at("id").get<std::string>();
  inst.split = parse_split(j.at("split").get<std::string>());
  inst.L = j.at("L").get<int>();
  inst.K = j.at("K").get<int>();
  inst.gains.g = mat_from_rows(j.at("gains"));
  inst.budget.p_max = j.at("p_max").get<std::vector<double>>();
  inst.noise.sigma2 = j.at("sigma2").get<double>();
  inst.gamma_target = j.at("gamma_target").get<double>();
  inst.validate();
  return inst;
}

json gen_params_to_json(const GenParams& p) {
  return json{{"L_lo", p.L_lo},           {"L_hi", p.L_hi},
              {"K_lo", p.K_lo},           {"K_hi", p.K_hi},
              {"area_m", p.area_m},       {"pl_exp", p.pl_exp},
              {"shadow_db", p.shadow_db}, {"p_max_w", p.p_max_w},
              {"sigma2_w", p.sigma2_w},   {"gamma_frac_lo", p.gamma_frac_lo},
              {"gamma_frac_hi", p.gamma_frac_hi}, {"shift_transform", p.shift_transform},
              {"shift_factor", p.shift_factor}};
}

GenParams gen_params_from_json(const json& j) {
  GenParams p;
  p.L_lo = j.at("L_lo").get<int>();
  p.L_hi = j.at("L_hi").get<int>();
  p.K_lo = j.at("K_lo").get<int>();
  p.K_hi = j.at("K_hi").get<int>();
  p.area_m = j.at("area_m").get<double>();
  p.pl_exp = j.at("pl_exp").get<double>();
  p.shadow_db = j.at("shadow_db").get<double>();
  p.p_max_w = j.at("p_max_w").get<double>();
  p.sigma2_w = j.at("sigma2_w").get<double>();
  p.gamma_frac_lo = j.at("gamma_frac_lo").get<double>();
  p.gamma_frac_hi = j.at("gamma_frac_hi").get<double>();
  p.shift_transform = j.at("shift_transform").get<bool>();
  p.shift_factor = j.at("shift_factor").get<double>();
  return p;
}

json benchmark_spec_to_json(const BenchmarkSpec& spec) {
  return json{{"seed", spec.seed},
              {"n_train", spec.n_train},
              {"n_test", spec.n_test},
              {"n_stress", spec.n_stress},
              {"n_shifted", spec.n_shifted},
              {"train", gen_params_to_json(spec.train)},
              {"test", gen_params_to_json(spec.test)},
              {"stress", gen_params_to_json(spec.stress)},
              {"shifted", gen_params_to_json(spec.shifted)}};
}

BenchmarkSpec benchmark_spec_from_json(const json& j) {
  BenchmarkSpec spec;
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.n_train = j.at("n_train").get<int>();
  spec.n_test = j.at("n_test").get<int>();
  spec.n_stress = j.at("n_stress").get<int>();
  spec.n_shifted = j.at("n_shifted").get<int>();
  spec.train = gen_params_from_json(j.at("train"));
  spec.test = gen_params_from_json(j.at("test"));
  spec.stress = gen_params_from_json(j.at("stress"));
  spec.shifted = gen_params_from_json(j.at("shifted"));
  return spec;
}

void save_benchmark(const std::filesystem::path& path, const BenchmarkSpec& spec,
                    const std::vector<Instance>& instances) {
  json manifest{{"seed", spec.seed},
                {"generator_version", kGeneratorVersion},
                {"counts",
                 {{"train", spec.n_train},
                  {"test", spec.n_test},
                  {"stress", spec.n_stress},
                  {"shifted", spec.n_shifted}}},
                {"spec", benchmark_spec_to_json(spec)}};
  json insts = json::array();
  for (const Instance& inst : instances) insts.push_back(instance_to_json(inst));
  const json file{{"manifest", std::move(manifest)}, {"instances", std::move(insts)}};
  write_text(path, file.dump(2) + "\n");
}

BenchmarkFile load_benchmark(const std::filesystem::path& path) {
  const json j = load_json_file(path);
  BenchmarkFile file;
  file.spec = benchmark_spec_from_json(j.at("manifest").at("spec"));
  for (const json& inst : j.at("instances")) file.instances.push_back(instance_from_json(inst));
  return file;
}

json verification_report_to_json(const VerificationReport& report) {
  json violations = json::array();
  for (const Violation& v : report.violations) {
    violations.push_back(json{{"ap", v.ap}, {"excess", v.excess}});
  }
  return json{{"feasible", report.feasible},
              {"r_ver", report.r_ver},
              {"accepted", report.accepted},
              {"margin", report.margin},
              {"violations", std::move(violations)}};
}

json solver_result_to_json(const SolverResult& result) {
  return json{{"solver", solver_name(result.solver)},
              {"cost_units", result.cost_units},
              {"wall_time_s", result.wall_time_s},
              {"converged", result.converged},
              {"candidate", mat_to_flat(result.candidate.eta)},
              {"rows", result.candidate.eta.rows},
              {"cols", result.candidate.eta.cols}};
}

namespace {

json descriptor_to_json(const Descriptor& d) {
  return json{{"L", d.L},
              {"K", d.K},
              {"load_ratio", d.load_ratio},
              {"gamma_target", d.gamma_target},
              {"budget_mean", d.budget_mean},
              {"budget_min", d.budget_min},
              {"gain_log_mean", d.gain_log_mean},
              {"gain_log_std", d.gain_log_std},
              {"gain_log_min", d.gain_log_min},
              {"gain_log_max", d.gain_log_max},
              {"imbalance", d.imbalance}};
}

Descriptor descriptor_from_json(const json& j) {
  Descriptor d;
  d.L = j.at("L").get<int>();
  d.K = j.at("K").get<int>();
  d.load_ratio = j.at("load_ratio").get<double>();
  d.gamma_target = j.at("gamma_target").get<double>();
  d.budget_mean = j.at("budget_mean").get<double>();
  d.budget_min = j.at("budget_min").get<double>();
  d.gain_log_mean = j.at("gain_log_mean").get<double>();
  d.gain_log_std = j.at("gain_log_std").get<double>();
  d.gain_log_min = j.at("gain_log_min").get<double>();
  d.gain_log_max = j.at("gain_log_max").get<double>();
  d.imbalance = j.at("imbalance").get<double>();
  return d;
}

}  // namespace

json memory_to_json(const std::vector<MemoryEntry>& memory) {
  json arr = json::array();
  for (const MemoryEntry& entry : memory) {
    arr.push_back(json{{"descriptor", descriptor_to_json(entry.descriptor)},
                       {"label", solver_name(entry.label)},
                       {"best_rate", entry.best_rate},
                       {"instance_id", entry.instance_id}});
  }
  return arr;
}

std::vector<MemoryEntry> memory_from_json(const json& j) {
  std::vector<MemoryEntry> memory;
  for (const json& e : j) {
    MemoryEntry entry;
    entry.descriptor = descriptor_from_json(e.at("descriptor"));
    entry.label = parse_solver(e.at("label").get<std::string>());
    entry.best_rate = e.at("best_rate").get<double>();
    entry.instance_id = e.at("instance_id").get<std::string>();
    memory.push_back(std::move(entry));
  }
  return memory;
}

void save_memory(const std::filesystem::path& path, const std::vector<MemoryEntry>& memory) {
  write_text(path, memory_to_json(memory).dump(2) + "\n");
}

std::vector<MemoryEntry> load_memory(const std::filesystem::path& path) {
  return memory_from_json(load_json_file(path));
}

json outcome_to_json(const OrchestrationOutcome& outcome, bool audit) {
  json attempts = json::array();
  for (const AttemptRecord& a : outcome.attempts) {
    json record{{"solver", solver_name(a.solver)}, {"accepted", a.accepted},
                {"r_ver", a.r_ver},                {"feasible", a.feasible},
                {"cost_units", a.cost_units},      {"wall_time_s", a.wall_time_s}};
    if (audit) {
      record["candidate"] = mat_to_flat(a.candidate.eta);
      record["rows"] = a.candidate.eta.rows;
      record["cols"] = a.candidate.eta.cols;
    }
    attempts.push_back(std::move(record));
  }
  json j{{"instance_id", outcome.instance_id},
         {"method", router_name(outcome.method)},
         {"attempts", std::move(attempts)},
         {"resolved", outcome.resolved},
         {"final_r_ver", outcome.final_r_ver},
         {"total_cost_units", outcome.total_cost_units},
         {"total_wall_time_s", outcome.total_wall_time_s}};
  j["final_solver"] = outcome.final_solver ? json(solver_name(*outcome.final_solver)) : json();
  return j;
}

OrchestrationOutcome outcome_from_json(const json& j) {
  OrchestrationOutcome outcome;
  outcome.instance_id = j.at("instance_id").get<std::string>();
  outcome.method = parse_router(j.at("method").get<std::string>());
  for (const json& a : j.at("attempts")) {
    AttemptRecord record;
    record.solver = parse_solver(a.at("solver").get<std::string>());
    record.accepted = a.at("accepted").get<bool>();
    record.r_ver = a.at("r_ver").get<double>();
    record.feasible = a.at("feasible").get<bool>();
    record.cost_units = a.at("cost_units").get<std::uint64_t>();
    record.wall_time_s = a.at("wall_time_s").get<double>();
    if (a.contains("candidate")) {
      record.candidate.eta =
          mat_from_flat(a.at("candidate"), a.at("rows").get<int>(), a.at("cols").get<int>());
    }
    outcome.attempts.push_back(std::move(record));
  }
  outcome.resolved = j.at("resolved").get<bool>();
  if (!j.at("final_solver").is_null())
    outcome.final_solver = parse_solver(j.at("final_solver").get<std::string>());
  outcome.final_r_ver = j.at("final_r_ver").get<double>();
  outcome.total_cost_units = j.at("total_cost_units").get<std::uint64_t>();
  outcome.total_wall_time_s = j.at("total_wall_time_s").get<double>();
  return outcome;
}

void save_outcomes_jsonl(const std::filesystem::path& path,
                         const std::vector<OrchestrationOutcome>& outcomes, bool audit) {
  std::string body;
  for (const OrchestrationOutcome& outcome : outcomes) {
    body += outcome_to_json(outcome, audit).dump();
    body += "\n";
  }
  write_text(path, body);
}

std::vector<OrchestrationOutcome> load_outcomes_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::vector<OrchestrationOutcome> outcomes;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    outcomes.push_back(outcome_from_json(json::parse(line)));
  }
  return outcomes;
}

}  // namespace viso
