#include "telemat/report.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

#include "telemat/errors.hpp"

namespace telemat::report {

using nlohmann::json;

Labels partition_labels(const QuditDims& dims, const Bipartition& partition) {
  Labels l;
  auto name = [&](Index s) { return dims.labelled() ? dims.labels()[s] : std::to_string(s + 1); };
  for (Index s : partition.bob_slots) l.bob.push_back(name(s));
  for (Index s : partition.alice_slots) l.alice.push_back(name(s));
  return l;
}

namespace {

void fill_channel(AnalysisReport& r, const ChannelMatrix<double>& c, Index rank, const RankBound& b,
                  const Labels& labels, const Tolerances<double>& tol) {
  r.tol_rank = tol.rank;
  r.tol_unitary = tol.unitary;
  r.tol_cluster = tol.cluster;
  r.bob_labels = labels.bob;
  r.alice_labels = labels.alice;
  r.n = c.n;
  r.m = c.m;
  r.channel = c.entries;
  r.channel_rank = rank;
  r.rank_case = std::string(to_string(b.rank_case));
  r.rank_bound = b.bound;
  const CMatrix<double> gram = c.entries * c.entries.adjoint();
  const auto n = gram.rows();
  r.channel_k = std::sqrt(std::max(0.0, gram.trace().real() / double(n)));
  r.channel_scaled_unitary =
      max_abs(gram - CMatrix<double>::Identity(n, n) * (r.channel_k * r.channel_k)) <= tol.unitary &&
      r.channel_k > tol.unitary;
}

}  // namespace

AnalysisReport from_verdict(const ChannelVerdict<double>& v, const Labels& labels, const Tolerances<double>& tol) {
  AnalysisReport r;
  fill_channel(r, v.channel, v.channel_rank, v.bound, labels, tol);
  r.category = std::string(to_string(v.category));
  r.subspace_dim = v.subspace.dimension;
  r.subspace_basis = v.subspace.basis;
  r.subspace_eigenvalue = v.subspace.eigenvalue;
  return r;
}

AnalysisReport from_verdict(const TeleportVerdict<double>& v, const Labels& labels, const Tolerances<double>& tol,
                            bool basis_complete) {
  AnalysisReport r;
  fill_channel(r, v.channel, v.channel_rank, v.bound, labels, tol);
  r.basis_provided = true;
  r.basis_size = v.outcomes.size();
  r.basis_complete = basis_complete;
  for (const auto& o : v.outcomes) {
    r.outcomes.push_back({o.outcome_id, o.measurement.entries, o.collapsed.entries, o.measurement_rank,
                          o.collapsed_rank, o.unitarity.scaled_unitary, o.unitarity.k, o.zero});
  }
  r.category = std::string(to_string(v.category));
  r.input_dependent_probabilities = v.input_dependent_probabilities;
  r.subspace_dim = v.subspace.dimension;
  r.subspace_basis = v.subspace.basis;
  r.subspace_eigenvalue = v.subspace.eigenvalue;
  return r;
}

SimulationSummary summarize(const SimulationReport<double>& sim) {
  SimulationSummary s;
  s.input_description = sim.input_description;
  s.samples = sim.runs.size();
  s.average_fidelity = sim.average_fidelity;
  s.min_fidelity = sim.min_fidelity;
  for (const auto& o : sim.outcomes) {
    s.mean_probability.push_back(o.mean_probability);
    s.min_fidelity_per_outcome.push_back(o.min_fidelity);
    s.reached.push_back(o.ever_reached);
  }
  return s;
}

json matrix_to_json(const CMatrix<double>& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

CMatrix<double> matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<Eigen::Index>(re.size()) != rows * cols || re.size() != im.size()) {
    throw ParseError("matrix: entry count does not match rows x cols");
  }
  CMatrix<double> m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) {
      const auto at = static_cast<std::size_t>(i * cols + k);
      m(i, k) = {re[at].get<double>(), im[at].get<double>()};
    }
  }
  return m;
}

json to_json(const SimulationSummary& s) {
  return {{"input_description", s.input_description},
          {"samples", s.samples},
          {"average_fidelity", s.average_fidelity},
          {"min_fidelity", s.min_fidelity},
          {"mean_probability", s.mean_probability},
          {"min_fidelity_per_outcome", s.min_fidelity_per_outcome},
          {"reached", s.reached}};
}

SimulationSummary simulation_from_json(const json& j) {
  SimulationSummary s;
  s.input_description = j.at("input_description").get<std::string>();
  s.samples = j.at("samples").get<Index>();
  s.average_fidelity = j.at("average_fidelity").get<double>();
  s.min_fidelity = j.at("min_fidelity").get<double>();
  s.mean_probability = j.at("mean_probability").get<std::vector<double>>();
  s.min_fidelity_per_outcome = j.at("min_fidelity_per_outcome").get<std::vector<double>>();
  s.reached = j.at("reached").get<std::vector<bool>>();
  return s;
}

json to_json(const AnalysisReport& r) {
  json outcomes = json::array();
  for (const auto& o : r.outcomes) {
    outcomes.push_back({{"outcome_id", o.outcome_id},
                        {"measurement_matrix", matrix_to_json(o.measurement)},
                        {"collapsed_matrix", matrix_to_json(o.collapsed)},
                        {"measurement_rank", o.measurement_rank},
                        {"collapsed_rank", o.collapsed_rank},
                        {"scaled_unitary", o.scaled_unitary},
                        {"k", o.k},
                        {"zero", o.zero}});
  }
  json doc{
      {"tolerances", {{"rank", r.tol_rank}, {"unitary", r.tol_unitary}, {"cluster", r.tol_cluster}}},
      {"partition", {{"bob", r.bob_labels}, {"alice", r.alice_labels}}},
      {"n", r.n},
      {"m", r.m},
      {"channel_matrix", matrix_to_json(r.channel)},
      {"channel_rank", r.channel_rank},
      {"rank_case", r.rank_case},
      {"rank_bound", r.rank_bound},
      {"channel_scaled_unitary", r.channel_scaled_unitary},
      {"channel_k", r.channel_k},
      {"basis", {{"provided", r.basis_provided}, {"size", r.basis_size}, {"complete", r.basis_complete}}},
      {"outcomes", std::move(outcomes)},
      {"verdict",
       {{"category", r.category},
        {"input_dependent_probabilities", r.input_dependent_probabilities}}},
      {"subspace",
       {{"dimension", r.subspace_dim},
        {"basis", matrix_to_json(r.subspace_basis)},
        {"eigenvalue", r.subspace_eigenvalue}}},
  };
  doc["simulation"] = r.simulation ? to_json(*r.simulation) : json(nullptr);
  return doc;
}

AnalysisReport analysis_from_json(const json& j) {
  AnalysisReport r;
  try {
    r.tol_rank = j.at("tolerances").at("rank").get<double>();
    r.tol_unitary = j.at("tolerances").at("unitary").get<double>();
    r.tol_cluster = j.at("tolerances").at("cluster").get<double>();
    r.bob_labels = j.at("partition").at("bob").get<std::vector<std::string>>();
    r.alice_labels = j.at("partition").at("alice").get<std::vector<std::string>>();
    r.n = j.at("n").get<Index>();
    r.m = j.at("m").get<Index>();
    r.channel = matrix_from_json(j.at("channel_matrix"));
    r.channel_rank = j.at("channel_rank").get<Index>();
    r.rank_case = j.at("rank_case").get<std::string>();
    r.rank_bound = j.at("rank_bound").get<Index>();
    r.channel_scaled_unitary = j.at("channel_scaled_unitary").get<bool>();
    r.channel_k = j.at("channel_k").get<double>();
    r.basis_provided = j.at("basis").at("provided").get<bool>();
    r.basis_size = j.at("basis").at("size").get<Index>();
    r.basis_complete = j.at("basis").at("complete").get<bool>();
    for (const auto& o : j.at("outcomes")) {
      r.outcomes.push_back({o.at("outcome_id").get<Index>(), matrix_from_json(o.at("measurement_matrix")),
                            matrix_from_json(o.at("collapsed_matrix")), o.at("measurement_rank").get<Index>(),
                            o.at("collapsed_rank").get<Index>(), o.at("scaled_unitary").get<bool>(),
                            o.at("k").get<double>(), o.at("zero").get<bool>()});
    }
    r.category = j.at("verdict").at("category").get<std::string>();
    r.input_dependent_probabilities = j.at("verdict").at("input_dependent_probabilities").get<bool>();
    r.subspace_dim = j.at("subspace").at("dimension").get<Index>();
    r.subspace_basis = matrix_from_json(j.at("subspace").at("basis"));
    r.subspace_eigenvalue = j.at("subspace").at("eigenvalue").get<double>();
    if (!j.at("simulation").is_null()) r.simulation = simulation_from_json(j.at("simulation"));
  } catch (const json::exception& e) {
    throw ParseError(std::string("analysis report: ") + e.what());
  }
  return r;
}

namespace {

std::string format_complex(std::complex<double> z) {
  auto clean = [](double x) { return std::abs(x) < 5e-13 ? 0.0 : x; };
  const double re = clean(z.real());
  const double im = clean(z.imag());
  std::ostringstream s;
  s << std::setprecision(6);
  if (im == 0.0) {
    s << re;
  } else if (re == 0.0) {
    s << im << "i";
  } else {
    s << re << (im < 0 ? "-" : "+") << std::abs(im) << "i";
  }
  return s.str();
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

}  // namespace

void render_matrix(std::ostream& out, const CMatrix<double>& m, int indent) {
  std::vector<std::string> cells;
  std::size_t width = 1;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      cells.push_back(format_complex(m(i, j)));
      width = std::max(width, cells.back().size());
    }
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << std::string(static_cast<std::size_t>(indent), ' ') << "[";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << (j ? " " : "") << std::setw(static_cast<int>(width)) << cells[static_cast<std::size_t>(i * m.cols() + j)];
    }
    out << "]\n";
  }
}

void render_text(std::ostream& out, const AnalysisReport& r) {
  out << "tolerances: rank " << r.tol_rank << " (relative), unitary " << r.tol_unitary << ", cluster "
      << r.tol_cluster << "\n";
  out << "partition: Bob {" << join(r.bob_labels) << "} n = " << r.n << ", Alice {" << join(r.alice_labels)
      << "} m = " << r.m << "\n";
  out << "channel matrix C (" << r.n << " x " << r.m << "):\n";
  render_matrix(out, r.channel);
  out << "channel rank r_c = " << r.channel_rank << " (case " << r.rank_case << ", collapsed rank bound "
      << r.rank_bound << ")\n";
  out << "C C^H = k^2 I: " << (r.channel_scaled_unitary ? "yes" : "no") << ", k = " << std::setprecision(12)
      << r.channel_k << std::setprecision(6) << "\n";
  if (r.basis_provided) {
    out << "basis: " << r.basis_size << " elements (" << (r.basis_complete ? "complete" : "incomplete") << ")\n";
    for (const auto& o : r.outcomes) {
      out << "outcome " << o.outcome_id << ": r_m = " << o.measurement_rank << ", r_collap = " << o.collapsed_rank;
      if (o.zero) {
        out << ", sigma = 0 (never fires)\n";
        continue;
      }
      out << ", scaled unitary " << (o.scaled_unitary ? "yes" : "no") << ", k = " << std::setprecision(12) << o.k
          << std::setprecision(6) << "\n";
      out << "  M:\n";
      render_matrix(out, o.measurement, 4);
      out << "  sigma:\n";
      render_matrix(out, o.collapsed, 4);
    }
  }
  out << "verdict: " << r.category;
  if (r.input_dependent_probabilities) out << " (perfect but input-dependent outcome probabilities)";
  out << "\n";
  out << "teleportable subspace: dimension " << r.subspace_dim << ", eigenvalue " << r.subspace_eigenvalue << "\n";
  if (r.subspace_dim > 0 && r.subspace_dim < r.n) render_matrix(out, r.subspace_basis);
  if (r.simulation) {
    const auto& s = *r.simulation;
    out << "simulation: " << s.input_description << ", average fidelity " << std::setprecision(12)
        << s.average_fidelity << ", worst " << s.min_fidelity << std::setprecision(6) << "\n";
  }
}

void render_text(std::ostream& out, const SimulationReport<double>& sim) {
  out << "inputs: " << sim.input_description << "\n";
  out << std::left << std::setw(9) << "outcome" << std::setw(16) << "mean p" << std::setw(16) << "min F"
      << std::setw(16) << "k" << "\n"
      << std::right;
  for (const auto& o : sim.outcomes) {
    std::ostringstream k;
    if (o.unitarity.scaled_unitary) k << std::setprecision(10) << o.unitarity.k;
    else k << "-";
    std::ostringstream f;
    if (o.ever_reached) f << std::setprecision(10) << o.min_fidelity;
    else f << "unreached";
    std::ostringstream p;
    p << std::setprecision(10) << o.mean_probability;
    out << std::left << std::setw(9) << o.outcome_id << std::setw(16) << p.str() << std::setw(16) << f.str()
        << std::setw(16) << k.str() << "\n"
        << std::right;
  }
  out << "average fidelity: " << std::setprecision(12) << sim.average_fidelity << "\n";
  out << "worst input fidelity: " << sim.min_fidelity << std::setprecision(6) << "\n";
}

int exit_code(Category c) {
  switch (c) {
    case Category::Perfect: return 0;
    case Category::FullRankImperfect:
    case Category::SubspaceOnly: return 1;
    case Category::Impossible: return 2;
  }
  return 1;
}

}  // namespace telemat::report
