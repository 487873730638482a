// telemat: channel / measurement / collapsed matrix analysis of teleportation.
//
//   telemat analyze <channel.json> --bob 1,2 --alice 3,4 [--basis basis.json]
//   telemat simulate <channel.json> --bob .. --alice .. --basis basis.json (--unknown chi.json | --random N)
//   telemat rank <channel.json> --bob .. --alice ..
//   telemat basis-check <basis.json>
//
// Exit codes: 0 PERFECT, 1 SUBSPACE_ONLY / FULL_RANK_IMPERFECT, 2 IMPOSSIBLE,
// 3 usage error, 4 input error (parse, validation, dimension mismatch).

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "telemat/coeffmat.hpp"
#include "telemat/criterion.hpp"
#include "telemat/errors.hpp"
#include "telemat/io.hpp"
#include "telemat/report.hpp"
#include "telemat/telesim.hpp"

namespace {

constexpr int kUsageError = 3;
constexpr int kInputError = 4;

struct Options {
  std::string channel_file;
  std::string bob;
  std::string alice;
  std::string basis_file;
  std::string unknown_file;
  std::size_t random = 0;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  std::string format = "text";
  telemat::Tolerances<double> tol;
};

void add_tolerances(CLI::App* cmd, Options& o) {
  cmd->add_option("--tol-rank", o.tol.rank, "relative singular-value cutoff for numerical rank")->capture_default_str();
  cmd->add_option("--tol-unitary", o.tol.unitary, "max entry deviation of sigma sigma^H from k^2 I")
      ->capture_default_str();
  cmd->add_option("--tol-cluster", o.tol.cluster, "relative eigenvalue clustering tolerance")->capture_default_str();
}

void add_format(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "text or structured")
      ->check(CLI::IsMember({"text", "structured"}))
      ->capture_default_str();
}

void add_partition(CLI::App* cmd, Options& o) {
  cmd->add_option("channel", o.channel_file, "channel state file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--bob", o.bob, "Bob's particle labels, comma-separated, in row order")->required();
  cmd->add_option("--alice", o.alice, "Alice's particle labels, comma-separated, in column order")->required();
}

telemat::MeasurementBasis<double> load_basis(const std::string& path, std::size_t m, std::size_t n) {
  return {telemat::io::parse_basis_file(path), m, n};
}

int run_analyze(const Options& o) {
  using namespace telemat;
  const auto channel = io::parse_state_file(o.channel_file);
  const auto partition = io::parse_partition(channel.dims(), o.bob, o.alice);
  const auto labels = report::partition_labels(channel.dims(), partition);

  report::AnalysisReport rep;
  Category category;
  if (o.basis_file.empty()) {
    const auto v = classify_channel(channel, partition, o.tol);
    rep = report::from_verdict(v, labels, o.tol);
    category = v.category;
  } else {
    const auto basis =
        load_basis(o.basis_file, partition.alice_dim(channel.dims()), partition.bob_dim(channel.dims()));
    const auto v = classify(channel, partition, basis, o.tol);
    rep = report::from_verdict(v, labels, o.tol, basis.complete());
    category = v.category;
    const QuditDims unknown_dims({basis.n}, {"a"});
    rep.simulation = report::summarize(run_teleportation(unknown_dims, o.samples, o.seed, channel, partition, basis, o.tol));
  }
  if (o.format == "structured") {
    std::cout << report::to_json(rep).dump(2) << "\n";
  } else {
    report::render_text(std::cout, rep);
  }
  return report::exit_code(category);
}

int run_simulate(const Options& o) {
  using namespace telemat;
  const auto channel = io::parse_state_file(o.channel_file);
  const auto partition = io::parse_partition(channel.dims(), o.bob, o.alice);
  const std::size_t n = partition.bob_dim(channel.dims());
  const std::size_t m = partition.alice_dim(channel.dims());
  const auto basis = load_basis(o.basis_file, m, n);

  SimulationReport<double> sim;
  if (!o.unknown_file.empty()) {
    const auto unknown = io::parse_state_file(o.unknown_file);
    if (unknown.size() != n) {
      throw DimensionError("unknown state (" + o.unknown_file + ") has dimension " + std::to_string(unknown.size()) +
                           " but Bob {" + o.bob + "} holds dimension " + std::to_string(n));
    }
    sim = run_teleportation(std::vector<PureState<double>>{unknown}, channel, partition, basis, o.tol,
                            "input from " + o.unknown_file);
  } else {
    const std::size_t samples = o.random ? o.random : o.samples;
    sim = run_teleportation(QuditDims({n}, {"a"}), samples, o.seed, channel, partition, basis, o.tol);
  }
  const auto verdict = classify(channel, partition, basis, o.tol);

  if (o.format == "structured") {
    nlohmann::json doc{{"simulation", report::to_json(report::summarize(sim))},
                       {"category", to_string(verdict.category)},
                       {"subspace_dim", verdict.subspace_dim}};
    nlohmann::json per_run = nlohmann::json::array();
    for (const auto& run : sim.runs) per_run.push_back(run.average_fidelity);
    doc["run_fidelities"] = std::move(per_run);
    std::cout << doc.dump(2) << "\n";
  } else {
    report::render_text(std::cout, sim);
    if (sim.min_fidelity < 1.0 - 1e-9) {
      std::cout << "hint: verdict " << to_string(verdict.category) << "; inputs inside the teleportable subspace "
                << "of dimension " << verdict.subspace_dim << " teleport with fidelity 1:\n";
      if (verdict.subspace_dim > 0) report::render_matrix(std::cout, verdict.subspace.basis);
    }
  }
  return 0;
}

int run_rank(const Options& o) {
  using namespace telemat;
  const auto channel = io::parse_state_file(o.channel_file);
  const auto partition = io::parse_partition(channel.dims(), o.bob, o.alice);
  const auto c = build_channel_matrix(channel, partition);
  const auto rank = numerical_rank(c.entries, o.tol.rank);
  if (o.format == "structured") {
    std::cout << nlohmann::json{{"n", c.n}, {"m", c.m}, {"rank", rank}, {"tol_rank", o.tol.rank},
                                {"channel_matrix", report::matrix_to_json(c.entries)}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "channel matrix C (" << c.n << " x " << c.m << "):\n";
    report::render_matrix(std::cout, c.entries);
    std::cout << "rank " << rank << " (relative tolerance " << o.tol.rank << ")\n";
  }
  return 0;
}

int run_basis_check(const std::string& path, const std::string& format) {
  using namespace telemat;
  auto states = io::parse_basis_file(path);
  const std::size_t dim = states.front().size();
  const MeasurementBasis<double> basis(std::move(states), dim, 1);
  const auto rep = check_basis(basis);
  if (format == "structured") {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : rep.offending) pairs.push_back({{"r", p.r}, {"s", p.s}, {"deviation", p.deviation}});
    std::cout << nlohmann::json{{"count", rep.count},           {"dimension", rep.space_dim},
                                {"complete", rep.complete},     {"orthonormal", rep.orthonormal},
                                {"max_deviation", rep.max_deviation}, {"offending", pairs}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << rep.count << " elements on dimension " << rep.space_dim << ": "
              << (rep.orthonormal ? "orthonormal" : "NOT orthonormal") << ", "
              << (rep.complete ? "complete" : "incomplete") << ", max |<r|s> - delta| = " << rep.max_deviation
              << "\n";
    for (const auto& p : rep.offending) {
      std::cout << "  pair (" << p.r << ", " << p.s << "): deviation " << p.deviation << "\n";
    }
  }
  return rep.orthonormal ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Channel, measurement and collapsed matrices for quantum teleportation", "telemat"};
  app.require_subcommand(1);
  Options o;

  auto* analyze = app.add_subcommand("analyze", "channel matrix, ranks and teleportation verdict");
  add_partition(analyze, o);
  analyze->add_option("--basis", o.basis_file, "measurement basis file")->check(CLI::ExistingFile);
  analyze->add_option("--samples", o.samples, "random inputs for the simulation summary")->capture_default_str();
  analyze->add_option("--seed", o.seed, "seed for random inputs")->capture_default_str();
  add_tolerances(analyze, o);
  add_format(analyze, o);

  auto* simulate = app.add_subcommand("simulate", "state-vector teleportation with fidelities");
  add_partition(simulate, o);
  simulate->add_option("--basis", o.basis_file, "measurement basis file")->required()->check(CLI::ExistingFile);
  auto* unknown = simulate->add_option("--unknown", o.unknown_file, "unknown input state file")->check(CLI::ExistingFile);
  simulate->add_option("--random", o.random, "number of Haar-random inputs")->excludes(unknown);
  simulate->add_option("--samples", o.samples, "random inputs when --random is not given")->capture_default_str();
  simulate->add_option("--seed", o.seed, "seed for random inputs")->capture_default_str();
  add_tolerances(simulate, o);
  add_format(simulate, o);

  auto* rank = app.add_subcommand("rank", "channel matrix and its numerical rank");
  add_partition(rank, o);
  add_tolerances(rank, o);
  add_format(rank, o);

  std::string basis_path;
  auto* check = app.add_subcommand("basis-check", "orthonormality and completeness of a basis file");
  check->add_option("basis", basis_path, "basis file")->required()->check(CLI::ExistingFile);
  add_format(check, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*analyze) return run_analyze(o);
    if (*simulate) return run_simulate(o);
    if (*rank) return run_rank(o);
    if (*check) return run_basis_check(basis_path, o.format);
  } catch (const telemat::InvalidPartition& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const telemat::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kUsageError;
}
