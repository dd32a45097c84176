// Command line front end: embeddings, tail experiments, exact enumerations,
// the chaining dimension calculator, width estimation, and benchmarks.
//
// Exit codes: 0 success, 1 rejected input (validation), 2 unexpected failure.
// Every randomized subcommand takes an explicit --seed; equal invocations
// write byte-identical outputs. Outputs are written only after the full
// computation succeeds, so a failing run leaves no partial files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fjlt/fjlt.hpp"

namespace {

struct Options {
  std::string input;
  std::string output;
  std::string plan_path;
  std::string vector_kind = "ones";
  std::string t_grid;
  std::string model;
  std::string table_path;
  std::vector<std::uint64_t> d_list;
  std::uint64_t d = 0;
  std::uint64_t k = 0;
  std::uint64_t n = 0;
  std::uint64_t trials = 0;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  int dim = 0;
  int sparse_d = 0;
  int sparse_s = 0;
  int max_terms = 0;
  unsigned threads = 1;
  double eps = 0.0;
  double p = 0.0;
  double big_c = 1.0;
  double tol = 1e-9;
  bool exhaustive = false;
};

fjlt::VectorKind kind_of(const Options& opt, bool seed_given) {
  const fjlt::VectorKind kind = fjlt::parse_vector_kind(opt.vector_kind);
  if (kind == fjlt::VectorKind::RandomUnit && !seed_given) {
    throw fjlt::ArgumentError("--seed is required with --vector random-unit");
  }
  return kind;
}

void run_embed(const Options& opt) {
  const fjlt::RowMatrixXd x = fjlt::read_pointset(opt.input);
  const fjlt::FjltPlan p =
      fjlt::plan(static_cast<std::uint64_t>(x.cols()), opt.k, opt.seed);
  const fjlt::RowMatrixXd y = fjlt::embed_set(p, x, opt.threads);
  fjlt::write_pointset(opt.output, y);
  fjlt::save_plan(opt.plan_path, p);
  std::cout << "embedded n=" << x.rows() << " d=" << x.cols()
            << " k=" << opt.k << " -> " << opt.output << "\n";
}

void run_tail(const Options& opt, bool seed_given) {
  const fjlt::TailCurve curve = fjlt::tail_estimate(
      opt.d, opt.k, kind_of(opt, seed_given), fjlt::parse_t_grid(opt.t_grid),
      opt.trials, opt.seed, opt.threads);
  fjlt::write_tail_csv(opt.output, curve);
}

void run_flatten(const Options& opt, bool trials_given, bool seed_given) {
  if (opt.exhaustive == trials_given) {
    throw fjlt::ArgumentError(
        "flatten: pass exactly one of --exhaustive and --trials");
  }
  const fjlt::VectorKind kind = kind_of(opt, seed_given);
  const Eigen::VectorXd x = fjlt::adversarial_vector(kind, opt.d, opt.seed);
  const fjlt::FlattenDistribution dist =
      opt.exhaustive
          ? fjlt::flatten_tail(opt.d, x, fjlt::FlattenMode::Exhaustive)
          : fjlt::flatten_tail(opt.d, x, fjlt::FlattenMode::MonteCarlo,
                               opt.trials, opt.seed);
  fjlt::write_flatten_csv(opt.output, dist);
}

void run_coord_tail(const Options& opt, bool seed_given) {
  const fjlt::VectorKind kind = kind_of(opt, seed_given);
  const Eigen::VectorXd x = fjlt::adversarial_vector(kind, opt.d, opt.seed);
  const fjlt::TailCurve curve =
      fjlt::coordinate_tail_exact(x, fjlt::parse_t_grid(opt.t_grid));
  fjlt::write_tail_csv(opt.output, curve);
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Explicit covering tables are CSV with a header row: j,ln_N with j
// contiguous from 0.
std::vector<double> read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw fjlt::FormatError("chain-dim: cannot open table " + path);
  std::vector<double> values;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    const std::string body = strip(line);
    if (body.empty()) continue;
    if (!saw_header) {
      if (body != "j,ln_N") {
        throw fjlt::FormatError("chain-dim: table " + path +
                                " must start with the header 'j,ln_N'");
      }
      saw_header = true;
      continue;
    }
    const auto comma = body.find(',');
    if (comma == std::string::npos) {
      throw fjlt::FormatError("chain-dim: bad table row '" + body + "' in " +
                              path);
    }
    try {
      std::size_t used = 0;
      const std::string jfield = strip(body.substr(0, comma));
      const long long j = std::stoll(jfield, &used);
      if (used != jfield.size() ||
          j != static_cast<long long>(values.size())) {
        throw std::invalid_argument(jfield);
      }
      const std::string vfield = strip(body.substr(comma + 1));
      values.push_back(std::stod(vfield, &used));
      if (used != vfield.size()) throw std::invalid_argument(vfield);
    } catch (const std::exception&) {
      throw fjlt::FormatError("chain-dim: bad table row '" + body + "' in " +
                              path + " (need j,ln_N with j contiguous from 0)");
    }
  }
  if (!saw_header) {
    throw fjlt::FormatError("chain-dim: table " + path + " is empty");
  }
  return values;
}

void run_chain_dim(const Options& opt, bool max_terms_given) {
  fjlt::ChainingRequest request;
  if (opt.model == "finite") {
    request.model = fjlt::CoveringModel::finite(opt.n);
  } else if (opt.model == "subspace") {
    request.model = fjlt::CoveringModel::subspace(opt.dim);
  } else if (opt.model == "sparse") {
    request.model = fjlt::CoveringModel::sparse(opt.sparse_d, opt.sparse_s);
  } else if (opt.model == "explicit") {
    if (opt.table_path.empty()) {
      throw fjlt::ArgumentError("chain-dim: --model explicit needs --table");
    }
    request.model = fjlt::CoveringModel::explicit_table(read_table(opt.table_path));
  } else {
    throw fjlt::ArgumentError("chain-dim: unknown model '" + opt.model +
                              "' (expected finite, subspace, sparse, explicit)");
  }
  request.eps = opt.eps;
  request.p = opt.p;
  request.C = opt.big_c;
  request.tol = opt.tol;
  if (max_terms_given) request.max_terms = opt.max_terms;
  const fjlt::ChainingResult result = fjlt::chain_dimension(request);
  std::cout << "k = " << result.k << "\n"
            << "series = " << fjlt::format_double(result.series) << "\n"
            << "series_terms = " << result.series_terms << "\n"
            << "pre_ceil = " << fjlt::format_double(result.pre_ceil) << "\n";
}

void run_width(const Options& opt) {
  const fjlt::RowMatrixXd points = fjlt::read_pointset(opt.input);
  const fjlt::GaussianWidthEstimate est =
      fjlt::gaussian_width_mc(points, opt.trials, opt.seed, opt.threads);
  std::cout << "mean = " << fjlt::format_double(est.mean) << "\n"
            << "std_error = " << fjlt::format_double(est.std_error) << "\n"
            << "trials = " << est.trials << "\n"
            << "partitions = " << est.partitions << "\n";
}

void run_bench(const Options& opt) {
  const std::vector<fjlt::BenchRow> rows =
      fjlt::bench_apply(opt.d_list, opt.k, opt.reps, opt.seed);
  fjlt::write_bench_csv(opt.output, rows);
}

void check(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error("selftest failed: " + what);
}

void run_selftest() {
  Eigen::VectorXd v = fjlt::StreamRng(1).gaussian_vector(256);
  Eigen::VectorXd w = v;
  fjlt::fwht_inplace<double>(w);
  check(std::abs(w.norm() - v.norm()) <= 1e-10 * v.norm(),
        "transform norm preservation");
  fjlt::fwht_inplace<double>(w);
  check((w - v).norm() <= 1e-10 * v.norm(), "transform involution");

  const fjlt::FjltPlan p = fjlt::plan(32, 4, 7);
  check(fjlt::deserialize_plan(fjlt::serialize_plan(p)) == p,
        "plan serialization round trip");

  const fjlt::CodeMatrix b = fjlt::build_code_matrix(8, 128);
  const auto counts = fjlt::verify_balance(b, {0, 1, 2, 3});
  for (const auto c : counts) check(c == 8, "code matrix 4-wise balance");

  fjlt::ChainingRequest req;
  req.model = fjlt::CoveringModel::finite(1);
  req.eps = 0.5;
  req.p = 0.5;
  check(fjlt::chain_dimension(req).k == 10, "chaining dimension closed form");

  std::cout << "selftest passed\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fast Johnson-Lindenstrauss transform toolkit"};
  app.require_subcommand(1);
  Options opt;

  CLI::App* embed = app.add_subcommand("embed", "Embed a point-set file");
  embed->add_option("--input", opt.input, "input point-set file")->required();
  embed->add_option("--output", opt.output, "output point-set file")->required();
  embed->add_option("--plan", opt.plan_path, "where to save the plan")->required();
  embed->add_option("--k", opt.k, "output dimension")->required();
  auto* embed_seed = embed->add_option("--seed", opt.seed, "master seed");
  embed_seed->required();
  embed->add_option("--threads", opt.threads, "worker threads");

  CLI::App* tail = app.add_subcommand(
      "tail", "Monte Carlo norm-deviation tail curve");
  tail->add_option("--d", opt.d, "input dimension")->required();
  tail->add_option("--k", opt.k, "output dimension")->required();
  tail->add_option("--vector", opt.vector_kind,
                   "input vector: ones, flat-sqrt, e1, random-unit")
      ->required();
  tail->add_option("--t-grid", opt.t_grid, "grid start:stop:step")->required();
  tail->add_option("--trials", opt.trials, "number of trials")->required();
  auto* tail_seed = tail->add_option("--seed", opt.seed, "master seed");
  tail_seed->required();
  tail->add_option("--threads", opt.threads, "worker threads");
  tail->add_option("--output", opt.output, "output CSV path")->required();

  CLI::App* flatten = app.add_subcommand(
      "flatten", "Distribution of the flattening statistic");
  flatten->add_option("--d", opt.d, "dimension")->required();
  flatten->add_option("--vector", opt.vector_kind,
                      "input vector: ones, flat-sqrt, e1, random-unit")
      ->required();
  flatten->add_flag("--exhaustive", opt.exhaustive,
                    "enumerate all 2^d sign vectors");
  auto* flatten_trials =
      flatten->add_option("--trials", opt.trials, "Monte Carlo trials");
  auto* flatten_seed = flatten->add_option("--seed", opt.seed, "master seed");
  flatten_trials->needs(flatten_seed);
  flatten->add_option("--output", opt.output, "output CSV path")->required();

  CLI::App* coord = app.add_subcommand(
      "coord-tail", "Exact coordinate-sum tail by enumeration");
  coord->add_option("--d", opt.d, "dimension")->required();
  coord->add_option("--vector", opt.vector_kind,
                    "input vector: ones, flat-sqrt, e1, random-unit")
      ->required();
  auto* coord_seed = coord->add_option("--seed", opt.seed, "master seed");
  coord->add_option("--t-grid", opt.t_grid, "grid start:stop:step")->required();
  coord->add_option("--output", opt.output, "output CSV path")->required();

  CLI::App* chain = app.add_subcommand(
      "chain-dim", "Embedding dimension from a covering model");
  chain->add_option("--model", opt.model,
                    "finite, subspace, sparse or explicit")
      ->required();
  chain->add_option("--n", opt.n, "finite: number of points");
  chain->add_option("--dim", opt.dim, "subspace: dimension");
  chain->add_option("--d", opt.sparse_d, "sparse: ambient dimension");
  chain->add_option("--s", opt.sparse_s, "sparse: nonzero count");
  chain->add_option("--table", opt.table_path,
                    "explicit: file of ln N values, one per scale");
  chain->add_option("--eps", opt.eps, "distortion")->required();
  chain->add_option("--p", opt.p, "failure probability")->required();
  chain->add_option("--C", opt.big_c, "leading constant");
  chain->add_option("--tol", opt.tol, "series truncation tolerance");
  auto* chain_terms =
      chain->add_option("--max-terms", opt.max_terms, "hard series term limit");

  CLI::App* width = app.add_subcommand(
      "width", "Monte Carlo Gaussian mean width of a point set");
  width->add_option("--input", opt.input, "input point-set file")->required();
  width->add_option("--trials", opt.trials, "number of trials")->required();
  width->add_option("--seed", opt.seed, "master seed")->required();
  width->add_option("--threads", opt.threads, "worker threads");

  CLI::App* bench = app.add_subcommand("bench", "Time apply() per dimension");
  bench->add_option("--d-list", opt.d_list, "dimensions to time")
      ->required()
      ->delimiter(',');
  bench->add_option("--k", opt.k, "output dimension")->required();
  bench->add_option("--reps", opt.reps, "timed repetitions")->required();
  bench->add_option("--seed", opt.seed, "master seed")->required();
  bench->add_option("--output", opt.output, "output CSV path")->required();

  CLI::App* selftest =
      app.add_subcommand("selftest", "Quick invariant checks");

  try {
    app.parse(argc, argv);
    if (embed->parsed()) run_embed(opt);
    if (tail->parsed()) run_tail(opt, tail_seed->count() > 0);
    if (flatten->parsed())
      run_flatten(opt, flatten_trials->count() > 0, flatten_seed->count() > 0);
    if (coord->parsed()) run_coord_tail(opt, coord_seed->count() > 0);
    if (chain->parsed()) run_chain_dim(opt, chain_terms->count() > 0);
    if (width->parsed()) run_width(opt);
    if (bench->parsed()) run_bench(opt);
    if (selftest->parsed()) run_selftest();
    return 0;
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: argument: " << e.what() << "\n";
    return 1;
  } catch (const fjlt::Error& e) {
    std::cerr << "error: " << e.category() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 2;
  }
}
