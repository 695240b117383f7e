#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "toruslab/config.hpp"
#include "toruslab/convergence.hpp"
#include "toruslab/cover.hpp"
#include "toruslab/harmap.hpp"
#include "toruslab/verdict.hpp"

namespace toruslab {

/// Module blocks plus the flat verdict list.
struct RunReport {
  nlohmann::json blocks = nlohmann::json::object();
  std::vector<Verdict> verdicts;
  std::string sweep_csv;
  CellMask omega;  // empty unless an omega stage ran
  int n = 0;

  void add(const std::vector<Verdict>& vs, const std::string& suffix = "");
  nlohmann::json to_json() const;
  /// 0 when every verdict passes, 2 otherwise.
  int exit_code() const;
};

nlohmann::json verdict_json(const Verdict& v);
nlohmann::json config_json(const RunConfig& config);
nlohmann::json matrix_json(const Mat3& m);
nlohmann::json matrix_json(const IMat3& m);

/// Lazily built shared state for the stages of one run.
class RunContext {
 public:
  explicit RunContext(RunConfig config);

  const RunConfig& config() const { return config_; }
  const MetricField& field();
  const std::array<HarmonicOneForm, 3>& standard();
  const HarmonicTorusMap& map();
  const SternReport& stern();
  const FundamentalDomainCells& domain();
  int kappa();

 private:
  RunConfig config_;
  std::unique_ptr<MetricField> field_;
  std::optional<std::array<HarmonicOneForm, 3>> standard_;
  std::optional<HarmonicTorusMap> map_;
  std::optional<SternReport> stern_;
  std::optional<FundamentalDomainCells> domain_;
  std::optional<int> kappa_;
};

void hodge_stage(RunContext& ctx, RunReport& report);
void lattice_stage(RunContext& ctx, RunReport& report);
void map_stage(RunContext& ctx, RunReport& report);
void cover_stage(RunContext& ctx, RunReport& report);
void omega_stage(RunContext& ctx, RunReport& report);
void sweep_stage(RunContext& ctx, RunReport& report);

/// Every stage; the sweep only when the config lists eps values.
RunReport run_all(const RunConfig& config);

/// Minima, reduced basis and the Minkowski checks for a bare Gram matrix.
RunReport lattice_from_gram(const Mat3& q);

/// i, j, k, in_omega per cell.
std::string omega_csv(const CellMask& omega, int n);

/// Writes report.json and sweep.csv (and omega.csv when present) into dir.
void write_outputs(const RunReport& report, const std::string& dir);

}  // namespace toruslab
