#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "uwc/cli.hpp"

int main(int argc, char** argv) {
  using namespace uwc::cli;
  CLI::App app{"Universal weak coresets for constrained k-median / k-means"};
  app.require_subcommand(1);

  GlobalOptions g;
  int z = 0;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--workers", g.workers, "Worker threads for enumeration and verification")->capture_default_str();
  app.add_option("--z", z, "Override the cost exponent (1 = k-median, 2 = k-means)")->check(CLI::IsMember({1, 2}));
  app.add_flag("--check-triangle", g.check_triangle, "Exhaustively check the triangle inequality of explicit metrics");

  GenerateOptions gen;
  auto* c_gen = app.add_subcommand("generate", "Write a synthetic instance");
  c_gen->fallthrough();
  c_gen->add_option("--kind", gen.kind, "planar-blobs | line | random-metric")->capture_default_str();
  c_gen->add_option("-n,--n", gen.n, "Number of points")->capture_default_str();
  c_gen->add_option("--facilities", gen.facilities, "Number of facilities")->capture_default_str();
  c_gen->add_option("-k,--k", gen.k, "Number of clusters")->capture_default_str();
  c_gen->add_option("-m,--labels", gen.m, "Number of labels (1 = unlabeled)")->capture_default_str();
  c_gen->add_option("-o,--out", gen.out, "Output instance file")->required();

  CoresetOptions co;
  auto* c_core = app.add_subcommand("coreset", "Build a universal weak coreset");
  c_core->fallthrough();
  c_core->add_option("instance", co.instance, "Instance file")->required();
  c_core->add_option("-o,--out", co.out, "Output coreset file")->required();
  c_core->add_option("--epsilon", co.epsilon)->capture_default_str();
  c_core->add_option("--delta", co.delta)->capture_default_str();
  c_core->add_option("--mode", co.mode, "metric | euclidean_kmeans")->capture_default_str();
  std::size_t eta = 0, spr = 0, subset = 0, base = 0;
  c_core->add_option("--eta", eta, "Candidate draws (default from k and epsilon)");
  c_core->add_option("--mix", co.mix, "Probability of weight-proportional draws")->capture_default_str();
  c_core->add_option("--c0", co.c0, "Summary sample-size constant")->capture_default_str();
  c_core->add_option("--samples-per-ring", spr, "Override the per-ring sample count");
  c_core->add_option("--ring-budget", co.ring_budget, "Maximum rings per cluster")->capture_default_str();
  c_core->add_option("--subset-size", subset, "Euclidean multiset size (default ceil(2/eps))");
  c_core->add_option("--base-size", base, "Euclidean base sample size (default ceil(4k/eps))");
  c_core->add_option("--max-candidates", co.max_candidates, "Euclidean candidate cap")->capture_default_str();

  SolveCmdOptions so;
  auto* c_solve = app.add_subcommand("solve", "Solve a constrained instance through a coreset");
  c_solve->fallthrough();
  c_solve->add_option("instance", so.instance)->required();
  c_solve->add_option("coreset", so.coreset)->required();
  c_solve->add_option("constraint", so.constraint)->required();
  c_solve->add_option("-o,--out", so.out, "Result JSON file");
  c_solve->add_option("--csv", so.csv, "Export the full assignment as CSV");
  bool ordered = false, unordered = false;
  c_solve->add_flag("--ordered", ordered, "Enumerate ordered tuples");
  c_solve->add_flag("--unordered", unordered, "Enumerate unordered tuples");
  c_solve->add_flag("--repeats", so.repeats, "Allow repeated centers");
  double target = 0.0;
  auto* opt_target = c_solve->add_option("--cost-target", target, "Stop at the first tuple at or below this cost");
  c_solve->add_flag("--ldiversity-at-most", so.at_most_diversity, "Read l-diversity as at most 1/l per label");
  c_solve->add_flag("--timing", so.timing, "Include wall time in the result file");

  OracleCmdOptions oo;
  auto* c_oracle = app.add_subcommand("oracle", "Exact optimum by brute force over F");
  c_oracle->fallthrough();
  c_oracle->add_option("instance", oo.instance)->required();
  c_oracle->add_option("constraint", oo.constraint);
  c_oracle->add_option("-o,--out", oo.out);
  c_oracle->add_option("--ceiling", oo.ceiling)->capture_default_str();
  c_oracle->add_flag("--ldiversity-at-most", oo.at_most_diversity);

  VerifyOptions vo;
  auto* c_verify = app.add_subcommand("verify", "Check coreset properties against the full instance");
  c_verify->fallthrough();
  c_verify->add_option("instance", vo.instance)->required();
  c_verify->add_option("coreset", vo.coreset)->required();
  c_verify->add_option("--which", vo.which, "A | B | both")->capture_default_str();
  c_verify->add_option("--constraint", vo.constraint, "Constraint for property A (default unconstrained)");
  c_verify->add_option("--trials", vo.trials)->capture_default_str();
  c_verify->add_option("--epsilon", vo.epsilon, "Ratio window half-width")->capture_default_str();
  c_verify->add_option("--threshold", vo.threshold, "Required pass fraction")->capture_default_str();
  c_verify->add_option("--ceiling", vo.ceiling)->capture_default_str();
  c_verify->add_option("-o,--out", vo.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }
  if (z != 0) g.z = z;

  return guarded(
      [&] {
        if (*c_gen) return cmd_generate(gen, g, std::cout);
        if (*c_core) {
          if (eta) co.eta = eta;
          if (spr) co.samples_per_ring = spr;
          if (subset) co.subset_size = subset;
          if (base) co.base_size = base;
          return cmd_coreset(co, g, std::cout, std::cerr);
        }
        if (*c_solve) {
          if (ordered && unordered) throw uwc::ValidationError("--ordered and --unordered are exclusive");
          if (ordered) so.ordered = true;
          if (unordered) so.ordered = false;
          if (opt_target->count()) so.cost_target = target;
          return cmd_solve(so, g, std::cout, std::cerr);
        }
        if (*c_oracle) return cmd_oracle(oo, g, std::cout, std::cerr);
        return cmd_verify(vo, g, std::cout, std::cerr);
      },
      std::cerr);
}
