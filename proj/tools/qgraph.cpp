// qgraph: spectra, eigenfunctions and Berry phases of figure-eight quantum graphs.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qgraph/qgraph.hpp"

namespace {

struct Options {
  std::string graph;
  std::string theta = "0";
  std::optional<double> l1, l2, tol;
  double kmax = 10.0;
  int steps = 256;
  int n = 1;
  std::string sector = "even";
  std::string out;
};

qgraph::GraphDocument load(const Options& o) {
  if (!o.graph.empty()) {
    if (o.l1 || o.l2) throw qgraph::Error(qgraph::Errc::usage_error, "--graph and --l1/--l2 are exclusive");
    return qgraph::load_graph_document(o.graph);
  }
  return qgraph::figure_eight_document(o.l1.value_or(1.0), o.l2.value_or(1.0));
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
  } else {
    qgraph::write_atomic(o.out, text);
  }
}

void add_common(CLI::App* sub, Options& o, bool kmax, bool branch) {
  sub->add_option("--graph", o.graph, "graph document (JSON)");
  sub->add_option("--l1", o.l1, "first loop length of the builtin figure eight");
  sub->add_option("--l2", o.l2, "second loop length of the builtin figure eight");
  sub->add_option("--tol", o.tol, "singular-value tolerance (default 1e-8, or $QUANTGRAPH_TOL)");
  sub->add_option("--out", o.out, "write output here instead of stdout");
  if (kmax) {
    sub->add_option("--theta", o.theta, "family parameter; radians or pi/2, pi, 3pi/2, 2pi");
    sub->add_option("--kmax", o.kmax, "upper end of the k range");
  }
  if (branch) {
    sub->add_option("--n", o.n, "branch index at theta = 0 (0 is the ground state)");
    sub->add_option("--sector", o.sector, "even, odd or full");
    sub->add_option("--steps", o.steps, "grid points on [0, 2pi]");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra and Berry phases of quantum graphs with unitary vertex conditions"};
  app.require_subcommand(1);
  Options o;

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues k, lambda = k^2 and multiplicities");
  add_common(spectrum, o, true, false);
  auto* eigen = app.add_subcommand("eigenfunctions", "real orthonormal eigenfunction bases, per edge");
  add_common(eigen, o, true, false);
  auto* sweep = app.add_subcommand("sweep", "amplitudes (a1, a2) along one branch over theta in [0, 2pi]");
  add_common(sweep, o, false, true);
  auto* berry = app.add_subcommand("berry", "holonomy of one branch over the closed loop");
  add_common(berry, o, false, true);
  auto* topology = app.add_subcommand("topology", "vertex splitting and effective topology at theta");
  add_common(topology, o, false, false);
  topology->add_option("--theta", o.theta, "family parameter; radians or pi/2, pi, 3pi/2, 2pi");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  namespace cli = qgraph::cli;
  try {
    const auto doc = load(o);
    const double tol = cli::resolve_tolerance(o.tol);
    if (spectrum->parsed()) {
      emit(o, cli::cmd_spectrum(doc, qgraph::parse_angle(o.theta), o.kmax, tol).to_csv());
    } else if (eigen->parsed()) {
      emit(o, cli::cmd_eigenfunctions(doc, qgraph::parse_angle(o.theta), o.kmax, tol).to_csv());
    } else if (sweep->parsed()) {
      emit(o, cli::cmd_sweep(doc, o.n, cli::parse_sector(o.sector), o.steps, tol).to_csv());
    } else if (berry->parsed()) {
      emit(o, cli::cmd_berry(doc, o.n, cli::parse_sector(o.sector), o.steps, tol).summary);
    } else if (topology->parsed()) {
      emit(o, cli::cmd_topology(doc, qgraph::parse_angle(o.theta)));
    }
  } catch (const qgraph::Error& e) {
    std::cerr << "qgraph: " << e.what() << "\n";
    return e.is_input_error() ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "qgraph: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
