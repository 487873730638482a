#pragma once

// Analysis and simulation reports: a flat, serializable snapshot of the
// verdict, rendered either as a text table or as a JSON document that
// re-parses into the same struct.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "telemat/criterion.hpp"
#include "telemat/telesim.hpp"

namespace telemat::report {

struct OutcomeEntry {
  Index outcome_id = 0;
  CMatrix<double> measurement;
  CMatrix<double> collapsed;
  Index measurement_rank = 0;
  Index collapsed_rank = 0;
  bool scaled_unitary = false;
  double k = 0;
  bool zero = false;

  friend bool operator==(const OutcomeEntry&, const OutcomeEntry&) = default;
};

struct SimulationSummary {
  std::string input_description;
  Index samples = 0;
  double average_fidelity = 0;
  double min_fidelity = 0;
  std::vector<double> mean_probability;  // per outcome
  std::vector<double> min_fidelity_per_outcome;
  std::vector<bool> reached;

  friend bool operator==(const SimulationSummary&, const SimulationSummary&) = default;
};

struct AnalysisReport {
  double tol_rank = 0;
  double tol_unitary = 0;
  double tol_cluster = 0;

  std::vector<std::string> bob_labels;
  std::vector<std::string> alice_labels;
  Index n = 0;
  Index m = 0;
  CMatrix<double> channel;
  Index channel_rank = 0;
  std::string rank_case;
  Index rank_bound = 0;
  bool channel_scaled_unitary = false;  // C C^H = k^2 I
  double channel_k = 0;

  bool basis_provided = false;
  Index basis_size = 0;
  bool basis_complete = false;
  std::vector<OutcomeEntry> outcomes;

  std::string category;
  bool input_dependent_probabilities = false;
  Index subspace_dim = 0;
  CMatrix<double> subspace_basis;
  double subspace_eigenvalue = 0;

  std::optional<SimulationSummary> simulation;

  friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

struct Labels {
  std::vector<std::string> bob;
  std::vector<std::string> alice;
};

Labels partition_labels(const QuditDims& dims, const Bipartition& partition);

AnalysisReport from_verdict(const ChannelVerdict<double>& v, const Labels& labels, const Tolerances<double>& tol);
AnalysisReport from_verdict(const TeleportVerdict<double>& v, const Labels& labels, const Tolerances<double>& tol,
                            bool basis_complete);
SimulationSummary summarize(const SimulationReport<double>& sim);

nlohmann::json matrix_to_json(const CMatrix<double>& m);
CMatrix<double> matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AnalysisReport& r);
AnalysisReport analysis_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimulationSummary& s);
SimulationSummary simulation_from_json(const nlohmann::json& j);

void render_text(std::ostream& out, const AnalysisReport& r);
void render_text(std::ostream& out, const SimulationReport<double>& sim);
void render_matrix(std::ostream& out, const CMatrix<double>& m, int indent = 2);

/// 0 = PERFECT, 1 = SUBSPACE_ONLY or FULL_RANK_IMPERFECT, 2 = IMPOSSIBLE.
int exit_code(Category c);

}  // namespace telemat::report
