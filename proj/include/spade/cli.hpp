#pragma once

// Command-line front end: flag and JSON-config parsing into a RunConfig, and
// the subcommands that drive the library end to end.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spade/oracle.hpp"
#include "spade/spade.hpp"

namespace spade::cli {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string command;
  std::string x;
  std::string y;
  std::string gx;
  std::string gy;
  bool header = false;
  std::size_t k = 10;
  std::string mode = "exact";
  std::size_t approx_ef = 64;
  std::string connect_policy = "error";
  std::size_t r = 1;
  double tol = 1e-6;
  std::size_t max_iter = 1000;
  double epsilon = 0.1;
  std::size_t m = 0;  // 0 skips the Riemannian distance
  std::size_t top_k = 10;
  std::size_t top = 0;
  std::size_t random = 0;
  std::string pairs;
  std::string metric = "resistance";
  std::uint64_t seed = 0;
  std::string out;
  bool oracle = false;
  std::size_t trials = 20;
  std::size_t n = 12;
  std::string config;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string meta_line(const RunConfig& cfg) {
  return "# meta seed=" + std::to_string(cfg.seed) + " version=" + kVersion + " command=" + cfg.command + "\n";
}

/// Graph pair plus the original row id of every retained node.
struct Inputs {
  Graph gx;
  Graph gy;
  std::vector<NodeId> ids;
};

inline KnnParams knn_params(const RunConfig& cfg) {
  KnnParams p;
  p.k = cfg.k;
  p.mode = cfg.mode == "approximate" ? KnnMode::approximate : KnnMode::exact;
  p.approx_ef = cfg.approx_ef;
  p.seed = cfg.seed;
  return p;
}

inline ConnectPolicy connect_policy(const RunConfig& cfg) {
  if (cfg.connect_policy == "grow_k") return ConnectPolicy::grow_k;
  if (cfg.connect_policy == "giant_component") return ConnectPolicy::giant_component;
  return ConnectPolicy::error;
}

inline DenseMatrix select_rows(const DenseMatrix& m, std::span<const NodeId> rows) {
  std::vector<double> data;
  data.reserve(rows.size() * m.cols());
  for (const NodeId i : rows) {
    const auto row = m.row(i);
    data.insert(data.end(), row.begin(), row.end());
  }
  return DenseMatrix(rows.size(), m.cols(), std::move(data), m.dtype());
}

inline std::vector<NodeId> largest_component(const Graph& g) {
  const auto labels = connected_components(g);
  const auto count = static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end()) + 1);
  std::vector<std::size_t> sizes(count, 0);
  for (const int l : labels) ++sizes[static_cast<std::size_t>(l)];
  const auto giant = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<NodeId> keep;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == giant) keep.push_back(static_cast<NodeId>(i));
  }
  return keep;
}

inline Inputs graphs_from_matrices(const RunConfig& cfg, DenseMatrix x, DenseMatrix y) {
  if (x.rows() != y.rows()) {
    throw Error(ErrorKind::InvalidArgument, "X has " + std::to_string(x.rows()) + " rows but Y has " +
                                                std::to_string(y.rows()));
  }
  const auto params = knn_params(cfg);
  const auto policy = connect_policy(cfg);
  Inputs in;
  in.ids.resize(x.rows());
  std::iota(in.ids.begin(), in.ids.end(), NodeId{0});

  if (policy != ConnectPolicy::giant_component) {
    in.gx = ensure_connected(build_knn(x, params), x, params, policy).first;
    in.gy = ensure_connected(build_knn(y, params), y, params, policy).first;
    return in;
  }
  // Restricting to one graph's giant component can split the other, so
  // alternate until both are connected.
  while (true) {
    in.gx = build_knn(x, params);
    in.gy = build_knn(y, params);
    const bool cx = is_connected(in.gx);
    if (cx && is_connected(in.gy)) return in;
    const auto keep = largest_component(cx ? in.gy : in.gx);
    if (keep.size() <= params.k) {
      throw Error(ErrorKind::Disconnected, "giant component shrank to " + std::to_string(keep.size()) + " nodes");
    }
    std::vector<NodeId> ids;
    for (const NodeId i : keep) ids.push_back(in.ids[i]);
    in.ids = std::move(ids);
    x = select_rows(x, keep);
    y = select_rows(y, keep);
  }
}

inline Inputs load_inputs(const RunConfig& cfg) {
  const bool matrices = !cfg.x.empty() || !cfg.y.empty();
  const bool graphs = !cfg.gx.empty() || !cfg.gy.empty();
  if (matrices && graphs) throw Error(ErrorKind::InvalidArgument, "give either --x/--y or --gx/--gy, not both");
  if (matrices) {
    if (cfg.x.empty() || cfg.y.empty()) throw Error(ErrorKind::InvalidArgument, "both --x and --y are required");
    return graphs_from_matrices(cfg, load_matrix(cfg.x, MatrixFormat::auto_detect, cfg.header),
                                load_matrix(cfg.y, MatrixFormat::auto_detect, cfg.header));
  }
  if (cfg.gx.empty() || cfg.gy.empty()) {
    throw Error(ErrorKind::InvalidArgument, "inputs missing: give --x and --y, or --gx and --gy");
  }
  Inputs in{load_graph(cfg.gx), load_graph(cfg.gy), {}};
  if (in.gx.num_nodes() != in.gy.num_nodes()) {
    throw Error(ErrorKind::InvalidArgument, "graph node counts differ");
  }
  in.ids.resize(in.gx.num_nodes());
  std::iota(in.ids.begin(), in.ids.end(), NodeId{0});
  return in;
}

inline EigenPairs eigenpairs(const RunConfig& cfg, const Inputs& in) {
  if (cfg.oracle) {
    const auto dense = oracle::dense_generalized_eigen(in.gx, in.gy);
    if (cfg.r > static_cast<std::size_t>(dense.lambdas.size())) {
      throw Error(ErrorKind::InvalidArgument, "r exceeds n-1");
    }
    EigenPairs pairs;
    for (std::size_t j = 0; j < cfg.r; ++j) {
      const auto col = dense.vectors.col(static_cast<Eigen::Index>(j));
      pairs.lambdas.push_back(dense.lambdas(static_cast<Eigen::Index>(j)));
      pairs.vectors.emplace_back(col.data(), col.data() + col.size());
      pairs.residuals.push_back(0.0);
      pairs.iterations.push_back(0);
      pairs.converged.push_back(true);
      pairs.degenerate.push_back(false);
    }
    return pairs;
  }
  EigenSolverParams params;
  params.r = cfg.r;
  params.tol = cfg.tol;
  params.max_iter = cfg.max_iter;
  params.seed = cfg.seed;
  auto pairs = top_generalized_eigenpairs(in.gx, in.gy, params);
  spade::detail::require_converged(pairs);
  return pairs;
}

inline void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty()) {
    out << text;
  } else {
    spade::detail::write_file(cfg.out, text);
  }
}

inline std::string cmd_graph(const RunConfig& cfg) {
  if (cfg.x.empty()) throw Error(ErrorKind::InvalidArgument, "graph needs --x");
  const auto x = load_matrix(cfg.x, MatrixFormat::auto_detect, cfg.header);
  const auto params = knn_params(cfg);
  const auto policy = connect_policy(cfg);
  return to_spgr(ensure_connected(build_knn(x, params), x, params, policy).first);
}

inline std::string cmd_score(const RunConfig& cfg) {
  const auto in = load_inputs(cfg);
  std::string text = meta_line(cfg) + "quantity,value\n";
  RunConfig one = cfg;
  one.r = std::max<std::size_t>(cfg.m, 1);
  const auto pairs = eigenpairs(one, in);
  text += "lambda_max," + format_double(pairs.lambdas.front()) + "\n";
  if (cfg.m > 0) {
    double acc = 0.0;
    for (const double lambda : pairs.lambdas) {
      if (!(lambda > 0.0)) throw Error(ErrorKind::NonPositiveEigenvalue, "pencil eigenvalue is not positive");
      acc += std::log(lambda) * std::log(lambda);
    }
    text += "riemannian_distance," + format_double(std::sqrt(acc)) + "\n";
  }
  return text;
}

inline std::string cmd_node_scores(const RunConfig& cfg) {
  const auto in = load_inputs(cfg);
  const auto scores = node_spade(embed(eigenpairs(cfg, in)), in.gx);
  std::string text = meta_line(cfg) + "node_id,score\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    text += std::to_string(in.ids[i]) + "," + format_double(scores[i]) + "\n";
  }
  return text;
}

inline std::string cmd_edge_scores(const RunConfig& cfg) {
  const auto in = load_inputs(cfg);
  const auto scores = edge_spade_all(embed(eigenpairs(cfg, in)), in.gx);
  std::string text = meta_line(cfg) + "u,v,score\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto e = in.gx.edges()[i];
    text += std::to_string(in.ids[e.u]) + "," + std::to_string(in.ids[e.v]) + "," + format_double(scores[i]) + "\n";
  }
  return text;
}

inline std::string cmd_embed(const RunConfig& cfg) {
  const auto in = load_inputs(cfg);
  const auto emb = embed(eigenpairs(cfg, in));
  std::string text = meta_line(cfg) + "node_id";
  for (std::size_t j = 0; j < emb.r; ++j) text += ",v" + std::to_string(j + 1);
  text += "\n";
  for (std::size_t i = 0; i < emb.n; ++i) {
    text += std::to_string(in.ids[i]);
    for (std::size_t j = 0; j < emb.r; ++j) text += "," + format_double(emb(i, j));
    text += "\n";
  }
  return text;
}

inline std::string cmd_rank(const RunConfig& cfg) {
  const auto in = load_inputs(cfg);
  const auto scores = node_spade(embed(eigenpairs(cfg, in)), in.gx);
  const auto top = rank_nodes(scores, std::min(cfg.top_k, scores.size()));
  std::string text = meta_line(cfg) + "rank,node_id,score\n";
  for (std::size_t i = 0; i < top.size(); ++i) {
    text += std::to_string(i + 1) + "," + std::to_string(in.ids[top[i]]) + "," + format_double(scores[top[i]]) + "\n";
  }
  return text;
}

inline std::string cmd_dmd(const RunConfig& cfg) {
  const auto in = load_inputs(cfg);
  if (cfg.pairs.empty() && cfg.top == 0 && cfg.random == 0) {
    throw Error(ErrorKind::InvalidArgument, "dmd needs --pairs, --top or --random");
  }
  struct Row {
    std::string selection;
    NodeId p, q;
  };
  std::vector<Row> rows;

  if (!cfg.pairs.empty()) {
    std::map<NodeId, NodeId> local;
    for (std::size_t i = 0; i < in.ids.size(); ++i) local.emplace(in.ids[i], static_cast<NodeId>(i));
    const auto m = load_matrix(cfg.pairs, MatrixFormat::auto_detect, cfg.header);
    if (m.cols() != 2) throw Error(ErrorKind::BadFormat, "pair list must have two columns");
    for (std::size_t i = 0; i < m.rows(); ++i) {
      NodeId ends[2];
      for (std::size_t c = 0; c < 2; ++c) {
        const double v = m(i, c);
        const auto it = v >= 0.0 && v == std::floor(v) ? local.find(static_cast<NodeId>(v)) : local.end();
        if (it == local.end()) {
          throw Error(ErrorKind::InvalidArgument, "pair list entry is not a node id of the graph",
                      SourcePos{i + 1, c + 1});
        }
        ends[c] = it->second;
      }
      rows.push_back({"pair", ends[0], ends[1]});
    }
  }

  std::vector<double> edge_scores;
  if (cfg.top > 0) {
    edge_scores = edge_spade_all(embed(eigenpairs(cfg, in)), in.gx);
    const auto top = rank_nodes(edge_scores, std::min(cfg.top, edge_scores.size()));
    for (const auto i : top) rows.push_back({"top", in.gx.edges()[i].u, in.gx.edges()[i].v});
  }
  if (cfg.random > 0) {
    std::vector<Edge> picked;
    std::mt19937_64 rng(cfg.seed);
    std::sample(in.gx.edges().begin(), in.gx.edges().end(), std::back_inserter(picked),
                std::min(cfg.random, in.gx.num_edges()), rng);
    for (const auto& e : picked) rows.push_back({"random", e.u, e.v});
  }

  std::function<double(const Graph&, NodeId, NodeId)> distance;
  std::optional<ResistanceSketch> sx, sy;
  std::optional<LaplacianSolver> lx, ly;
  if (cfg.metric == "geodesic") {
    distance = [](const Graph& g, NodeId p, NodeId q) { return static_cast<double>(geodesic_distance(g, p, q)); };
  } else if (cfg.metric == "sketch") {
    sx.emplace(in.gx, cfg.epsilon, cfg.seed);
    sy.emplace(in.gy, cfg.epsilon, cfg.seed + 1);
    distance = [&](const Graph& g, NodeId p, NodeId q) { return (&g == &in.gx ? *sx : *sy).query(p, q); };
  } else {
    lx.emplace(in.gx);
    ly.emplace(in.gy);
    distance = [&](const Graph& g, NodeId p, NodeId q) {
      return effective_resistance(&g == &in.gx ? *lx : *ly, p, q);
    };
  }

  std::string text = meta_line(cfg) + "selection,u,v,d_x,d_y,dmd\n";
  for (const auto& row : rows) {
    if (row.p == row.q) throw Error(ErrorKind::InvalidArgument, "DMD is undefined for p == q");
    const double dx = distance(in.gx, row.p, row.q);
    const double dy = distance(in.gy, row.p, row.q);
    text += row.selection + "," + std::to_string(in.ids[row.p]) + "," + std::to_string(in.ids[row.q]) + "," +
            format_double(dx) + "," + format_double(dy) + "," + format_double(dy / dx) + "\n";
  }
  return text;
}

/// Random small pencils: Gaussian inputs through a random tanh layer.
inline std::vector<Inputs> random_instances(const RunConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RunConfig knn = cfg;
  knn.k = std::min<std::size_t>(3, cfg.n - 1);
  knn.connect_policy = "grow_k";
  std::vector<Inputs> out;
  const std::size_t d = 4;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    std::vector<double> xs(cfg.n * d), ys(cfg.n * d), w(d * d);
    for (double& v : xs) v = normal(rng);
    for (double& v : w) v = 2.0 * normal(rng) / std::sqrt(static_cast<double>(d));
    for (std::size_t i = 0; i < cfg.n; ++i) {
      for (std::size_t a = 0; a < d; ++a) {
        double acc = 0.0;
        for (std::size_t b = 0; b < d; ++b) acc += w[a * d + b] * xs[i * d + b];
        ys[i * d + a] = std::tanh(acc);
      }
    }
    out.push_back(graphs_from_matrices(knn, DenseMatrix(cfg.n, d, std::move(xs)), DenseMatrix(cfg.n, d, std::move(ys))));
  }
  return out;
}

/// Returns the report and whether every check passed.
inline std::pair<std::string, bool> cmd_oracle_check(const RunConfig& cfg) {
  const bool supplied = !cfg.x.empty() || !cfg.y.empty() || !cfg.gx.empty() || !cfg.gy.empty();
  if (!supplied && cfg.n < 3) throw Error(ErrorKind::InvalidArgument, "--n must be at least 3");
  const auto instances = supplied ? std::vector<Inputs>{load_inputs(cfg)} : random_instances(cfg);

  std::string text = meta_line(cfg) + "instance,check,value,bound,pass\n";
  bool all = true;
  auto record = [&](std::size_t inst, const char* check, double value, double bound, bool pass) {
    all = all && pass;
    text += std::to_string(inst) + "," + check + "," + format_double(value) + "," + format_double(bound) + "," +
            (pass ? "1" : "0") + "\n";
  };

  for (std::size_t t = 0; t < instances.size(); ++t) {
    const auto& in = instances[t];
    const double dense = oracle::dense_generalized_eigen(in.gx, in.gy).lambdas(0);
    const double iterative = model_spade(in.gx, in.gy, cfg.tol, cfg.seed);
    const double rel = std::abs(iterative - dense) / dense;
    record(t, "eigensolver_relative_error", rel, 10.0 * cfg.tol, rel <= 10.0 * cfg.tol);

    const auto gamma = oracle::gamma_max_bruteforce(in.gx, in.gy, DistanceMetric::resistance);
    record(t, "lambda_max_ge_gamma_max", dense, gamma.gamma, dense >= gamma.gamma * (1.0 - 1e-9));

    if (in.gx.num_nodes() <= oracle::kCutEnumerationCap) {
      const double zeta = oracle::min_cmd_exhaustive(in.gx, in.gy).zeta;
      record(t, "zeta_min_ge_inverse_lambda_max", zeta, 1.0 / dense, zeta >= (1.0 / dense) * (1.0 - 1e-9));
    }

    const auto pinv = oracle::dense_pseudoinverse(in.gx);
    double worst = -std::numeric_limits<double>::infinity();
    for (NodeId p = 0; p < in.gx.num_nodes(); ++p) {
      const auto hops = bfs_distances(in.gx, p);
      for (NodeId q = p + 1; q < in.gx.num_nodes(); ++q) {
        worst = std::max(worst, oracle::resistance_from_pinv(pinv, p, q) - hops[q]);
      }
    }
    record(t, "resistance_minus_hops_max", worst, 0.0, worst <= 1e-9);
  }
  return {text, all};
}

inline void apply_json(RunConfig& cfg, const nlohmann::json& doc, const CLI::App& sub) {
  if (!doc.is_object()) throw Error(ErrorKind::BadFormat, "config file must hold a JSON object");
  using Setter = std::function<void(const nlohmann::json&)>;
  const std::map<std::string, Setter> setters{
      {"x", [&](const auto& v) { cfg.x = v.template get<std::string>(); }},
      {"y", [&](const auto& v) { cfg.y = v.template get<std::string>(); }},
      {"gx", [&](const auto& v) { cfg.gx = v.template get<std::string>(); }},
      {"gy", [&](const auto& v) { cfg.gy = v.template get<std::string>(); }},
      {"header", [&](const auto& v) { cfg.header = v.template get<bool>(); }},
      {"k", [&](const auto& v) { cfg.k = v.template get<std::size_t>(); }},
      {"mode", [&](const auto& v) { cfg.mode = v.template get<std::string>(); }},
      {"approx_ef", [&](const auto& v) { cfg.approx_ef = v.template get<std::size_t>(); }},
      {"connect_policy", [&](const auto& v) { cfg.connect_policy = v.template get<std::string>(); }},
      {"r", [&](const auto& v) { cfg.r = v.template get<std::size_t>(); }},
      {"tol", [&](const auto& v) { cfg.tol = v.template get<double>(); }},
      {"max_iter", [&](const auto& v) { cfg.max_iter = v.template get<std::size_t>(); }},
      {"epsilon", [&](const auto& v) { cfg.epsilon = v.template get<double>(); }},
      {"m", [&](const auto& v) { cfg.m = v.template get<std::size_t>(); }},
      {"top_k", [&](const auto& v) { cfg.top_k = v.template get<std::size_t>(); }},
      {"top", [&](const auto& v) { cfg.top = v.template get<std::size_t>(); }},
      {"random", [&](const auto& v) { cfg.random = v.template get<std::size_t>(); }},
      {"pairs", [&](const auto& v) { cfg.pairs = v.template get<std::string>(); }},
      {"metric", [&](const auto& v) { cfg.metric = v.template get<std::string>(); }},
      {"seed", [&](const auto& v) { cfg.seed = v.template get<std::uint64_t>(); }},
      {"out", [&](const auto& v) { cfg.out = v.template get<std::string>(); }},
      {"oracle", [&](const auto& v) { cfg.oracle = v.template get<bool>(); }},
      {"trials", [&](const auto& v) { cfg.trials = v.template get<std::size_t>(); }},
      {"n", [&](const auto& v) { cfg.n = v.template get<std::size_t>(); }},
  };
  for (const auto& [key, value] : doc.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw Error(ErrorKind::BadFormat, "unknown config key '" + key + "'");
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    const auto* opt = sub.get_option_no_throw(flag);
    if (opt != nullptr && opt->count() > 0) continue;  // command line wins
    try {
      it->second(value);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::BadFormat, "config key '" + key + "': " + e.what());
    }
  }
}

inline void validate(const RunConfig& cfg) {
  auto one_of = [](const std::string& v, std::initializer_list<const char*> allowed, const char* what) {
    for (const char* a : allowed) {
      if (v == a) return;
    }
    throw Error(ErrorKind::InvalidArgument, std::string("invalid ") + what + " '" + v + "'");
  };
  one_of(cfg.mode, {"exact", "approximate"}, "mode");
  one_of(cfg.connect_policy, {"error", "grow_k", "giant_component"}, "connect_policy");
  one_of(cfg.metric, {"resistance", "geodesic", "sketch"}, "metric");
}

}  // namespace detail

/// Executes one parsed command. Returns the process exit status.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    detail::validate(cfg);
    if (cfg.command == "graph") {
      detail::emit(cfg, detail::cmd_graph(cfg), out);
    } else if (cfg.command == "score") {
      detail::emit(cfg, detail::cmd_score(cfg), out);
    } else if (cfg.command == "node-scores") {
      detail::emit(cfg, detail::cmd_node_scores(cfg), out);
    } else if (cfg.command == "edge-scores") {
      detail::emit(cfg, detail::cmd_edge_scores(cfg), out);
    } else if (cfg.command == "embed") {
      detail::emit(cfg, detail::cmd_embed(cfg), out);
    } else if (cfg.command == "dmd") {
      detail::emit(cfg, detail::cmd_dmd(cfg), out);
    } else if (cfg.command == "rank") {
      detail::emit(cfg, detail::cmd_rank(cfg), out);
    } else if (cfg.command == "oracle-check") {
      const auto [text, pass] = detail::cmd_oracle_check(cfg);
      detail::emit(cfg, text, out);
      if (!pass) {
        err << "error kind=CheckFailed message=\"at least one oracle check failed\"\n";
        return 1;
      }
    } else {
      throw Error(ErrorKind::InvalidArgument, "unknown command '" + cfg.command + "'");
    }
  } catch (const Error& e) {
    err << "error kind=" << to_string(e.kind());
    if (e.position()) err << " line=" << e.position()->line << " column=" << e.position()->column;
    err << " message=" << nlohmann::json(e.what()).dump() << "\n";
    return 2;
  }
  return 0;
}

/// Parses argv (flags, then an optional --config JSON file that flags
/// override) and runs the selected command.
inline int main_entry(int argc, const char* const* argv, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
  CLI::App app{"Robustness scores for input/output data pairs via kNN graph manifolds", "spade"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_inputs = [&](CLI::App* sub) {
    sub->add_option("--x", cfg.x, "input-space matrix (CSV or SPMX)");
    sub->add_option("--y", cfg.y, "output-space matrix (CSV or SPMX)");
    sub->add_option("--gx", cfg.gx, "prebuilt input graph (SPGR)");
    sub->add_option("--gy", cfg.gy, "prebuilt output graph (SPGR)");
    sub->add_flag("--header", cfg.header, "skip the first line of CSV inputs");
    sub->add_option("--k", cfg.k, "nearest neighbours per point")->capture_default_str();
    sub->add_option("--mode", cfg.mode, "exact or approximate")->capture_default_str();
    sub->add_option("--approx-ef,--ef", cfg.approx_ef, "approximate search breadth")->capture_default_str();
    sub->add_option("--connect-policy", cfg.connect_policy, "error, grow_k or giant_component")
        ->capture_default_str();
    sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    sub->add_option("--out", cfg.out, "output path (stdout if omitted)");
    sub->add_option("--config", cfg.config, "JSON config file; flags override it");
  };
  auto add_eigen = [&](CLI::App* sub) {
    sub->add_option("--r", cfg.r, "number of eigenpairs")->capture_default_str();
    sub->add_option("--tol", cfg.tol, "eigensolver tolerance")->capture_default_str();
    sub->add_option("--max-iter", cfg.max_iter, "eigensolver iteration cap")->capture_default_str();
    sub->add_flag("--oracle", cfg.oracle, "use the dense reference eigensolver");
  };

  std::vector<CLI::App*> subs;
  auto* graph = app.add_subcommand("graph", "build a kNN graph and write it as SPGR");
  add_inputs(graph);
  subs.push_back(graph);
  auto* score = app.add_subcommand("score", "largest pencil eigenvalue, optionally the Riemannian distance");
  add_inputs(score);
  add_eigen(score);
  score->add_option("--m", cfg.m, "eigenvalues in the Riemannian distance (0 = skip)");
  subs.push_back(score);
  for (const char* name : {"node-scores", "edge-scores", "embed"}) {
    auto* sub = app.add_subcommand(name, std::string(name) + " from the top-r eigenpairs");
    add_inputs(sub);
    add_eigen(sub);
    subs.push_back(sub);
  }
  auto* dmd = app.add_subcommand("dmd", "distance mapping distortion report");
  add_inputs(dmd);
  add_eigen(dmd);
  dmd->add_option("--pairs", cfg.pairs, "CSV of node pairs");
  dmd->add_option("--top", cfg.top, "report the top edges by edge score");
  dmd->add_option("--random", cfg.random, "report seeded random input-graph edges");
  dmd->add_option("--metric", cfg.metric, "resistance, geodesic or sketch")->capture_default_str();
  dmd->add_option("--epsilon", cfg.epsilon, "sketch accuracy")->capture_default_str();
  subs.push_back(dmd);
  auto* rank = app.add_subcommand("rank", "nodes by descending score");
  add_inputs(rank);
  add_eigen(rank);
  rank->add_option("--top-k", cfg.top_k, "rows to list")->capture_default_str();
  subs.push_back(rank);
  auto* check = app.add_subcommand("oracle-check", "compare scalable results with dense references");
  add_inputs(check);
  check->add_option("--tol", cfg.tol, "eigensolver tolerance")->capture_default_str();
  check->add_option("--trials", cfg.trials, "random instances when no input is given")->capture_default_str();
  check->add_option("--n", cfg.n, "nodes per random instance")->capture_default_str();
  subs.push_back(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error kind=Usage message=" << nlohmann::json(e.what()).dump() << "\n";
    return 2;
  }

  const CLI::App* chosen = nullptr;
  for (auto* sub : subs) {
    if (sub->parsed()) chosen = sub;
  }
  cfg.command = chosen->get_name();
  if (!cfg.config.empty()) {
    try {
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(spade::detail::read_file(cfg.config));
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::BadFormat, std::string("config file: ") + e.what());
      }
      detail::apply_json(cfg, doc, *chosen);
    } catch (const Error& e) {
      err << "error kind=" << to_string(e.kind()) << " message=" << nlohmann::json(e.what()).dump() << "\n";
      return 2;
    }
  }
  return run(cfg, out, err);
}

}  // namespace spade::cli
