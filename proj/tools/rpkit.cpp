// Copyright 2026 The rpkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "json_writer.hpp"
#include "rpkit/ann.hpp"
#include "rpkit/completion.hpp"
#include "rpkit/io.hpp"
#include "rpkit/privacy.hpp"
#include "rpkit/projection.hpp"
#include "rpkit/sensing.hpp"

// Command line front end. One JSON report per run on stdout; human-readable
// notes, warnings and timings on stderr, so the report stream stays
// machine-parsable and reruns with the same flags and seed compare byte for
// byte. Exit codes: 0 success, 2 usage or validation, 3 file I/O, 4
// numerical failure.

namespace {

using rpkit::Matrix;
using rpkit::Vector;
using rpkit::tool::JsonWriter;

namespace ann = rpkit::ann;
namespace cp = rpkit::completion;
namespace io = rpkit::io;
namespace pv = rpkit::privacy;
namespace sn = rpkit::sensing;

unsigned default_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

io::MatrixFormat format_from_string(const std::string& s) {
  if (s == "csv") return io::MatrixFormat::csv;
  if (s == "rpkm") return io::MatrixFormat::rpkm;
  throw std::invalid_argument("--format must be csv or rpkm, got '" + s + "'");
}

pv::PerturbMode mode_from_string(const std::string& s) {
  if (s == "privacy") return pv::PerturbMode::privacy;
  if (s == "test") return pv::PerturbMode::test;
  throw std::invalid_argument("--mode must be privacy or test, got '" + s +
                              "'");
}

double elapsed_ms(std::chrono::steady_clock::time_point from) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - from)
      .count();
}

Vector matrix_row(const Matrix& m, std::size_t i) {
  Vector out(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) out[j] = m(i, j);
  return out;
}

bool columns_normalized(const Matrix& m) {
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) acc += m(i, j) * m(i, j);
    if (std::abs(std::sqrt(acc) - 1.0) > 1e-9) return false;
  }
  return true;
}

void put_vector(JsonWriter& w, const Vector& v) {
  w.begin_array();
  for (const double x : v) w.num(x);
  w.end_array();
}

void put_indices(JsonWriter& w, const std::vector<std::size_t>& v) {
  w.begin_array();
  for (const std::size_t x : v) w.integer(static_cast<std::uint64_t>(x));
  w.end_array();
}

void put_matrix(JsonWriter& w, const Matrix& m) {
  w.begin_array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    w.begin_array();
    for (std::size_t j = 0; j < m.cols(); ++j) w.num(m(i, j));
    w.end_array();
  }
  w.end_array();
}

void emit(const JsonWriter& w) { std::cout << w.str() << "\n"; }

// ---------------------------------------------------------------------------
// jl-dim / project / audit
// ---------------------------------------------------------------------------

struct JlDimOpts {
  std::size_t n = 0;
  double eps = 0.0;
  double c = rpkit::kDefaultAnnulusC;
};

void run_jl_dim(const JlDimOpts& o) {
  const rpkit::JlConfig cfg{o.c};
  const std::size_t k = rpkit::jl_min_dimension(o.n, o.eps, cfg);
  JsonWriter w;
  w.begin_object();
  w.field("command", "jl-dim");
  w.key("config").begin_object();
  w.field("n", static_cast<std::uint64_t>(o.n));
  w.field("eps", o.eps);
  w.field("c", o.c);
  w.end_object();
  w.field("k", static_cast<std::uint64_t>(k));
  w.field("failure_bound", rpkit::failure_bound(o.eps, k, cfg));
  w.end_object();
  emit(w);
  std::cerr << "embedding dimension " << k << " for " << o.n
            << " points at eps " << o.eps << "\n";
}

struct ProjectOpts {
  std::string input;
  std::string output;
  std::size_t k = 0;
  std::string kind = "gaussian";
  std::string scaling = "unit";
  std::uint64_t seed = 0;
  std::string format = "csv";
};

void run_project(const ProjectOpts& o) {
  const io::MatrixFormat fmt = format_from_string(o.format);
  const Matrix data = io::read_matrix(o.input);
  rpkit::ProjectionSpec spec;
  spec.kind = rpkit::projection_kind_from_string(o.kind);
  spec.input_dim = data.cols();
  spec.output_dim = o.k;
  spec.seed = o.seed;
  spec.scaling = rpkit::scaling_mode_from_string(o.scaling);
  const rpkit::ProjectionMatrix p = rpkit::sample_projection(spec);
  if (spec.non_reducing()) {
    std::cerr << "warning: k = " << o.k << " does not reduce the "
              << data.cols() << "-dimensional input\n";
  }
  const Matrix projected = rpkit::project(data, p);
  io::write_matrix(o.output, projected, fmt);
  JsonWriter w;
  w.begin_object();
  w.field("command", "project");
  w.key("config").begin_object();
  w.field("input", o.input);
  w.field("output", o.output);
  w.field("k", static_cast<std::uint64_t>(o.k));
  w.field("kind", o.kind);
  w.field("scaling", o.scaling);
  w.field("seed", o.seed);
  w.field("format", o.format);
  w.end_object();
  w.field("rows", static_cast<std::uint64_t>(data.rows()));
  w.field("input_dim", static_cast<std::uint64_t>(data.cols()));
  w.field("output_dim", static_cast<std::uint64_t>(o.k));
  w.end_object();
  emit(w);
  std::cerr << "projected " << data.rows() << "x" << data.cols() << " -> "
            << data.rows() << "x" << o.k << " (" << o.kind << ", " << o.scaling
            << ")\n";
}

struct AuditOpts {
  std::string original;
  std::string projected;
  double eps = 0.0;
};

void run_audit(const AuditOpts& o) {
  const Matrix original = io::read_matrix(o.original);
  const Matrix projected = io::read_matrix(o.projected);
  const rpkit::DistortionReport r =
      rpkit::distortion_audit(original, projected, o.eps);
  JsonWriter w;
  w.begin_object();
  w.field("command", "audit");
  w.key("config").begin_object();
  w.field("original", o.original);
  w.field("projected", o.projected);
  w.field("eps", o.eps);
  w.end_object();
  w.field("epsilon", r.epsilon);
  w.field("pair_count", static_cast<std::uint64_t>(r.pair_count));
  w.field("pass_fraction", r.pass_fraction);
  w.field("max_expansion", r.max_expansion);
  w.field("max_contraction", r.max_contraction);
  w.end_object();
  emit(w);
  std::cerr << "pass fraction " << r.pass_fraction << " over " << r.pair_count
            << " pairs\n";
}

// ---------------------------------------------------------------------------
// ann
// ---------------------------------------------------------------------------

struct AnnBuildOpts {
  std::string data;
  std::string output;
  std::size_t trees = ann::kDefaultTreeCount;
  std::size_t leaf_size = ann::kDefaultLeafSize;
  std::uint64_t seed = 0;
  unsigned threads = default_threads();
};

void run_ann_build(const AnnBuildOpts& o) {
  const Matrix data = io::read_matrix(o.data);
  const auto start = std::chrono::steady_clock::now();
  const ann::RpForest forest =
      ann::build_forest(data, o.trees, o.leaf_size, o.seed, o.threads);
  const double ms = elapsed_ms(start);
  ann::save_forest(o.output, forest);
  std::size_t nodes = 0;
  for (const ann::RpTree& t : forest.trees()) nodes += t.nodes.size();
  JsonWriter w;
  w.begin_object();
  w.field("command", "ann build");
  w.key("config").begin_object();
  w.field("data", o.data);
  w.field("output", o.output);
  w.field("trees", static_cast<std::uint64_t>(o.trees));
  w.field("leaf_size", static_cast<std::uint64_t>(o.leaf_size));
  w.field("seed", o.seed);
  w.field("threads", static_cast<std::uint64_t>(o.threads));
  w.end_object();
  w.field("rows", static_cast<std::uint64_t>(data.rows()));
  w.field("dim", static_cast<std::uint64_t>(data.cols()));
  w.field("node_count", static_cast<std::uint64_t>(nodes));
  w.end_object();
  emit(w);
  std::cerr << "built " << o.trees << " trees over " << data.rows() << "x"
            << data.cols() << " in " << ms << " ms -> " << o.output << "\n";
}

struct AnnQueryOpts {
  std::string data;
  std::string forest;
  std::string queries;
  std::size_t top_k = 0;
  std::size_t budget = 0;
  bool budget_set = false;
};

void run_ann_query(const AnnQueryOpts& o) {
  const Matrix data = io::read_matrix(o.data);
  const ann::RpForest forest = ann::load_forest(o.forest, data);
  const Matrix queries = io::read_matrix(o.queries);
  const std::size_t budget =
      o.budget_set ? o.budget : ann::default_budget(o.top_k);
  JsonWriter w;
  w.begin_object();
  w.field("command", "ann query");
  w.key("config").begin_object();
  w.field("data", o.data);
  w.field("forest", o.forest);
  w.field("queries", o.queries);
  w.field("top_k", static_cast<std::uint64_t>(o.top_k));
  w.field("budget", static_cast<std::uint64_t>(budget));
  w.end_object();
  w.key("results").begin_array();
  for (std::size_t i = 0; i < queries.rows(); ++i) {
    const ann::QueryResult r =
        ann::query(forest, matrix_row(queries, i), o.top_k, budget);
    w.begin_object();
    w.key("neighbors").begin_array();
    for (const ann::Neighbor& nb : r.neighbors) {
      w.begin_object();
      w.field("index", static_cast<std::uint64_t>(nb.index));
      w.field("distance", nb.distance);
      w.end_object();
    }
    w.end_array();
    w.field("candidate_count", static_cast<std::uint64_t>(r.candidate_count));
    w.end_object();
  }
  w.end_array();
  w.end_object();
  emit(w);
  std::cerr << "answered " << queries.rows() << " queries (top " << o.top_k
            << ", budget " << budget << ")\n";
}

struct AnnBenchOpts {
  std::string data;
  std::string queries;
  std::size_t trees = ann::kDefaultTreeCount;
  std::size_t leaf_size = ann::kDefaultLeafSize;
  std::size_t top_k = 10;
  std::size_t budget = 0;
  bool budget_set = false;
  std::uint64_t seed = 0;
  unsigned threads = default_threads();
};

void run_ann_bench(const AnnBenchOpts& o) {
  const Matrix data = io::read_matrix(o.data);
  const Matrix queries = io::read_matrix(o.queries);
  const std::size_t budget =
      o.budget_set ? o.budget : ann::default_budget(o.top_k);

  const auto t_build = std::chrono::steady_clock::now();
  const ann::RpForest forest =
      ann::build_forest(data, o.trees, o.leaf_size, o.seed, o.threads);
  const double build_ms = elapsed_ms(t_build);

  const auto t_query = std::chrono::steady_clock::now();
  double candidates = 0.0;
  for (std::size_t i = 0; i < queries.rows(); ++i) {
    candidates += static_cast<double>(
        ann::query(forest, matrix_row(queries, i), o.top_k, budget)
            .candidate_count);
  }
  const double query_ms = elapsed_ms(t_query);

  const auto t_brute = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < queries.rows(); ++i) {
    ann::brute_force_knn(data, matrix_row(queries, i), o.top_k);
  }
  const double brute_ms = elapsed_ms(t_brute);

  const double recall =
      ann::recall_at_k(forest, data, queries, o.top_k, budget);
  const double mean_candidates =
      candidates / static_cast<double>(queries.rows());

  JsonWriter w;
  w.begin_object();
  w.field("command", "ann bench");
  w.key("config").begin_object();
  w.field("data", o.data);
  w.field("queries", o.queries);
  w.field("trees", static_cast<std::uint64_t>(o.trees));
  w.field("leaf_size", static_cast<std::uint64_t>(o.leaf_size));
  w.field("top_k", static_cast<std::uint64_t>(o.top_k));
  w.field("budget", static_cast<std::uint64_t>(budget));
  w.field("seed", o.seed);
  w.field("threads", static_cast<std::uint64_t>(o.threads));
  w.end_object();
  w.field("recall", recall);
  w.field("query_count", static_cast<std::uint64_t>(queries.rows()));
  w.field("mean_candidates", mean_candidates);
  w.end_object();
  emit(w);
  std::cerr << "build " << build_ms << " ms, forest queries " << query_ms
            << " ms, brute force " << brute_ms << " ms; recall@" << o.top_k
            << " = " << recall << "\n";
}

// ---------------------------------------------------------------------------
// privacy
// ---------------------------------------------------------------------------

struct PrivPerturbOpts {
  std::string input;
  std::string output;
  std::size_t k = 0;
  double sigma = 1.0;
  std::string kind = "gaussian";
  std::string mode = "privacy";
  std::uint64_t seed = 0;
  std::string emit_key;
  std::string format = "csv";
};

void run_priv_perturb(const PrivPerturbOpts& o) {
  const io::MatrixFormat fmt = format_from_string(o.format);
  const Matrix x = io::read_matrix(o.input);
  const auto [u, key] =
      pv::perturb(x, o.k, o.sigma, o.seed,
                  rpkit::projection_kind_from_string(o.kind),
                  mode_from_string(o.mode));
  io::write_matrix(o.output, u.U, fmt);
  if (!o.emit_key.empty()) pv::save_key(o.emit_key, key);
  JsonWriter w;
  w.begin_object();
  w.field("command", "privacy perturb");
  w.key("config").begin_object();
  w.field("input", o.input);
  w.field("output", o.output);
  w.field("k", static_cast<std::uint64_t>(o.k));
  w.field("sigma", o.sigma);
  w.field("kind", o.kind);
  w.field("mode", o.mode);
  w.field("seed", o.seed);
  w.field("emit_key", o.emit_key);
  w.field("format", o.format);
  w.end_object();
  w.field("m", static_cast<std::uint64_t>(x.rows()));
  w.field("n", static_cast<std::uint64_t>(x.cols()));
  w.field("normalized", u.column_norms_normalized);
  w.end_object();
  emit(w);
  std::cerr << "perturbed " << x.rows() << "x" << x.cols() << " -> " << o.k
            << "x" << x.cols() << " (" << o.kind << ", sigma " << o.sigma
            << ")\n";
  if (!o.emit_key.empty()) std::cerr << "wrote key to " << o.emit_key << "\n";
}

struct PrivEstimateOpts {
  std::string u;
  std::string v;
  double sigma = 1.0;
};

void run_priv_estimate(const PrivEstimateOpts& o) {
  const Matrix mu = io::read_matrix(o.u);
  const Matrix mv = io::read_matrix(o.v);
  const pv::PerturbedDataset du{mu, o.sigma, columns_normalized(mu)};
  const pv::PerturbedDataset dv{mv, o.sigma, columns_normalized(mv)};
  const Matrix est = pv::estimate_inner(du, dv);
  JsonWriter w;
  w.begin_object();
  w.field("command", "privacy estimate");
  w.key("config").begin_object();
  w.field("u", o.u);
  w.field("v", o.v);
  w.field("sigma", o.sigma);
  w.end_object();
  w.field("k", static_cast<std::uint64_t>(du.k()));
  w.field("columns_u", static_cast<std::uint64_t>(du.n()));
  w.field("columns_v", static_cast<std::uint64_t>(dv.n()));
  w.key("estimate");
  put_matrix(w, est);
  w.end_object();
  emit(w);
  std::cerr << "estimated " << du.n() << "x" << dv.n()
            << " inner products at k = " << du.k() << "\n";
}

struct PrivAttackOpts {
  std::string u;
  std::string key;
  std::string attack = "exact";
  std::size_t column = 0;
  std::size_t m = 0;
  bool m_set = false;
  std::string kind = "gaussian";
  double sigma_hat = 1.0;
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
};

void run_priv_attack(const PrivAttackOpts& o) {
  const Matrix mu = io::read_matrix(o.u);
  JsonWriter w;
  w.begin_object();
  w.field("command", "privacy attack");
  if (o.attack == "exact") {
    if (o.key.empty()) {
      throw std::invalid_argument("--key is required for the exact attack");
    }
    const pv::PerturbationKey key = pv::load_key(o.key);
    const pv::PerturbedDataset du{mu, key.sigma_r, columns_normalized(mu)};
    const pv::AttackExactResult res = pv::attack_exact(du, key);
    w.key("config").begin_object();
    w.field("u", o.u);
    w.field("key", o.key);
    w.field("attack", o.attack);
    w.end_object();
    w.field("unique", res.unique);
    w.field("m", static_cast<std::uint64_t>(key.m()));
    w.field("n", static_cast<std::uint64_t>(du.n()));
    w.key("reconstruction");
    put_matrix(w, res.reconstruction);
    w.end_object();
    emit(w);
    std::cerr << (res.unique
                      ? "reconstruction is unique (k >= m)"
                      : "reconstruction is not unique (k < m)")
              << "\n";
    return;
  }
  if (o.attack != "estimate") {
    throw std::invalid_argument("--attack must be exact or estimate, got '" +
                                o.attack + "'");
  }
  if (!o.m_set) {
    throw std::invalid_argument("--m is required for the estimate attack");
  }
  if (o.column >= mu.cols()) {
    throw std::invalid_argument(
        "--column " + std::to_string(o.column) + " is out of range, " +
        o.u + " holds " + std::to_string(mu.cols()) + " columns");
  }
  const Vector ucol = mu.col(o.column);
  const pv::AttackEstimateStats stats = pv::attack_estimate(
      ucol, rpkit::projection_kind_from_string(o.kind), o.sigma_hat,
      mu.rows(), o.m, o.trials, o.seed);
  w.key("config").begin_object();
  w.field("u", o.u);
  w.field("attack", o.attack);
  w.field("column", static_cast<std::uint64_t>(o.column));
  w.field("m", static_cast<std::uint64_t>(o.m));
  w.field("kind", o.kind);
  w.field("sigma_hat", o.sigma_hat);
  w.field("trials", static_cast<std::uint64_t>(o.trials));
  w.field("seed", o.seed);
  w.end_object();
  w.field("trials", static_cast<std::uint64_t>(stats.trials));
  w.key("element_means");
  put_vector(w, stats.element_means);
  w.key("element_variances");
  put_vector(w, stats.element_variances);
  w.end_object();
  emit(w);
  std::cerr << "estimate attack: " << o.trials << " guessed keys against "
            << "column " << o.column << "\n";
}

struct PrivKmeansOpts {
  std::string input;
  std::size_t clusters = 0;
  std::size_t max_iters = 100;
  std::uint64_t seed = 0;
};

void run_priv_kmeans(const PrivKmeansOpts& o) {
  const Matrix m = io::read_matrix(o.input);
  const std::vector<std::uint32_t> assign =
      pv::lloyd_columns(m, o.clusters, o.max_iters, o.seed);
  JsonWriter w;
  w.begin_object();
  w.field("command", "privacy kmeans");
  w.key("config").begin_object();
  w.field("input", o.input);
  w.field("clusters", static_cast<std::uint64_t>(o.clusters));
  w.field("max_iters", static_cast<std::uint64_t>(o.max_iters));
  w.field("seed", o.seed);
  w.end_object();
  w.field("columns", static_cast<std::uint64_t>(m.cols()));
  w.key("assignments").begin_array();
  for (const std::uint32_t a : assign) {
    w.integer(static_cast<std::uint64_t>(a));
  }
  w.end_array();
  w.end_object();
  emit(w);
  std::cerr << "clustered " << m.cols() << " columns into " << o.clusters
            << " clusters\n";
}

struct PrivPerceptronOpts {
  std::string input;
  std::string labels;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
};

void run_priv_perceptron(const PrivPerceptronOpts& o) {
  const Matrix m = io::read_matrix(o.input);
  const Vector raw = io::read_vector(o.labels);
  std::vector<int> labels(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == 1.0) {
      labels[i] = 1;
    } else if (raw[i] == -1.0) {
      labels[i] = -1;
    } else {
      throw std::invalid_argument(o.labels + ": labels must be exactly +1 or "
                                  "-1, entry " + std::to_string(i) + " is " +
                                  io::detail::format_double(raw[i]));
    }
  }
  const pv::PerturbedDataset du{m, 1.0, columns_normalized(m)};
  const pv::PerceptronResult res =
      pv::perceptron_perturbed(du, labels, o.epochs, o.seed);
  JsonWriter w;
  w.begin_object();
  w.field("command", "privacy perceptron");
  w.key("config").begin_object();
  w.field("input", o.input);
  w.field("labels", o.labels);
  w.field("epochs", static_cast<std::uint64_t>(o.epochs));
  w.field("seed", o.seed);
  w.end_object();
  w.field("training_accuracy", res.training_accuracy);
  w.key("weights");
  put_vector(w, res.weights);
  w.end_object();
  emit(w);
  std::cerr << "trained " << o.epochs << " epochs, accuracy "
            << res.training_accuracy << "\n";
}

// ---------------------------------------------------------------------------
// sensing
// ---------------------------------------------------------------------------

struct SenseRipOpts {
  std::string matrix;
  std::size_t s = 0;
  unsigned threads = default_threads();
};

void run_sense_rip(const SenseRipOpts& o) {
  const Matrix a = io::read_matrix(o.matrix);
  const auto start = std::chrono::steady_clock::now();
  const sn::RipReport r = sn::rip_constant(a, o.s, o.threads);
  const double ms = elapsed_ms(start);
  JsonWriter w;
  w.begin_object();
  w.field("command", "sensing rip");
  w.key("config").begin_object();
  w.field("matrix", o.matrix);
  w.field("s", static_cast<std::uint64_t>(o.s));
  w.field("threads", static_cast<std::uint64_t>(o.threads));
  w.end_object();
  w.field("s", static_cast<std::uint64_t>(r.S));
  w.field("delta", r.delta);
  w.key("worst_support");
  put_indices(w, r.worst_support);
  w.field("supports_checked", static_cast<std::uint64_t>(r.supports_checked));
  w.end_object();
  emit(w);
  std::cerr << "delta_" << o.s << " = " << r.delta << " over "
            << r.supports_checked << " supports in " << ms << " ms\n";
}

struct SenseRecoverOpts {
  std::string matrix;
  std::string measurements;
  std::size_t s = 0;
};

void run_sense_recover(const SenseRecoverOpts& o) {
  const Matrix a = io::read_matrix(o.matrix);
  const Vector y = io::read_vector(o.measurements);
  const sn::RecoveryResult r = sn::recover_sparse(a, y, o.s);
  JsonWriter w;
  w.begin_object();
  w.field("command", "sensing recover");
  w.key("config").begin_object();
  w.field("matrix", o.matrix);
  w.field("measurements", o.measurements);
  w.field("s", static_cast<std::uint64_t>(o.s));
  w.end_object();
  w.field("n", static_cast<std::uint64_t>(r.signal.n));
  w.key("support");
  put_indices(w, r.signal.support);
  w.key("values");
  put_vector(w, r.signal.values);
  w.field("residual", r.residual);
  w.field("unique", r.unique);
  w.end_object();
  emit(w);
  if (r.unique) {
    std::cerr << "recovered " << r.signal.support.size()
              << " nonzeros, residual " << r.residual << "\n";
  } else {
    std::cerr << "solution is not unique at this sparsity\n";
  }
}

struct SenseBoundOpts {
  std::size_t s = 0;
  std::size_t n = 0;
  double constant = 0.0;
};

void run_sense_bound(const SenseBoundOpts& o) {
  const std::size_t m = sn::measurement_bound(o.s, o.n, o.constant);
  JsonWriter w;
  w.begin_object();
  w.field("command", "sensing bound");
  w.key("config").begin_object();
  w.field("s", static_cast<std::uint64_t>(o.s));
  w.field("n", static_cast<std::uint64_t>(o.n));
  w.field("constant", o.constant);
  w.end_object();
  w.field("m", static_cast<std::uint64_t>(m));
  w.end_object();
  emit(w);
  std::cerr << "m >= " << m << " measurements for S = " << o.s << ", n = "
            << o.n << "\n";
}

// ---------------------------------------------------------------------------
// completion
// ---------------------------------------------------------------------------

struct CompNormOpts {
  std::string input;
};

void run_comp_norm(const CompNormOpts& o) {
  const Matrix x = io::read_matrix(o.input);
  const double nn = cp::nuclear_norm(x);
  JsonWriter w;
  w.begin_object();
  w.field("command", "completion norm");
  w.key("config").begin_object();
  w.field("input", o.input);
  w.end_object();
  w.field("nuclear_norm", nn);
  w.end_object();
  emit(w);
  std::cerr << "nuclear norm " << nn << "\n";
}

struct CompCoherenceOpts {
  std::string basis;
};

void run_comp_coherence(const CompCoherenceOpts& o) {
  const Matrix u = io::read_matrix(o.basis);
  const double mu = cp::coherence(u);
  JsonWriter w;
  w.begin_object();
  w.field("command", "completion coherence");
  w.key("config").begin_object();
  w.field("basis", o.basis);
  w.end_object();
  w.field("n", static_cast<std::uint64_t>(u.rows()));
  w.field("r", static_cast<std::uint64_t>(u.cols()));
  w.field("mu", mu);
  w.end_object();
  emit(w);
  std::cerr << "coherence " << mu << " (n = " << u.rows() << ", r = "
            << u.cols() << ")\n";
}

struct CompBoundOpts {
  double mu0 = 0.0;
  std::size_t r = 0;
  std::size_t n = 0;
  double beta = 0.0;
  double constant = 0.0;
};

void run_comp_bound(const CompBoundOpts& o) {
  const std::size_t m =
      cp::sample_count_bound({o.mu0, o.r, o.n}, o.beta, o.constant);
  JsonWriter w;
  w.begin_object();
  w.field("command", "completion bound");
  w.key("config").begin_object();
  w.field("mu0", o.mu0);
  w.field("r", static_cast<std::uint64_t>(o.r));
  w.field("n", static_cast<std::uint64_t>(o.n));
  w.field("beta", o.beta);
  w.field("constant", o.constant);
  w.end_object();
  w.field("m", static_cast<std::uint64_t>(m));
  w.end_object();
  emit(w);
  std::cerr << "m >= " << m << " observed entries\n";
}

struct CompCheckOpts {
  std::string candidate;
  std::string observed;
  double tol = 1e-9;
};

void run_comp_check(const CompCheckOpts& o) {
  const Matrix candidate = io::read_matrix(o.candidate);
  const cp::ObservedMatrix observed = cp::read_observed_csv(o.observed);
  const cp::CompletionReport r =
      cp::check_completion(candidate, observed, o.tol);
  JsonWriter w;
  w.begin_object();
  w.field("command", "completion check");
  w.key("config").begin_object();
  w.field("candidate", o.candidate);
  w.field("observed", o.observed);
  w.field("tol", o.tol);
  w.end_object();
  w.field("feasible", r.feasible);
  w.field("rank", static_cast<std::uint64_t>(r.rank));
  w.field("nuclear_norm", r.nuclear_norm);
  w.end_object();
  emit(w);
  std::cerr << (r.feasible ? "feasible" : "infeasible") << ", rank " << r.rank
            << ", nuclear norm " << r.nuclear_norm << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rpkit: random projection toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rpkit 0.1.0");

  JlDimOpts jl;
  CLI::App* jl_cmd =
      app.add_subcommand("jl-dim", "embedding dimension for n points");
  jl_cmd->add_option("--n", jl.n, "number of points")->required();
  jl_cmd->add_option("--eps", jl.eps, "distortion bound in (0, 1)")
      ->required();
  jl_cmd->add_option("--c", jl.c, "annulus concentration constant")
      ->capture_default_str();
  jl_cmd->callback([&jl] { run_jl_dim(jl); });

  ProjectOpts pr;
  CLI::App* pr_cmd =
      app.add_subcommand("project", "project a data matrix to k dimensions");
  pr_cmd->add_option("--input", pr.input, "data matrix, rows are points")
      ->required();
  pr_cmd->add_option("--output", pr.output, "projected matrix destination")
      ->required();
  pr_cmd->add_option("--k", pr.k, "target dimension")->required();
  pr_cmd->add_option("--kind", pr.kind, "gaussian, sign or sparse_ternary")
      ->capture_default_str();
  pr_cmd->add_option("--scaling", pr.scaling, "unit or raw")
      ->capture_default_str();
  pr_cmd->add_option("--seed", pr.seed, "projection seed")
      ->envname("RPKIT_SEED")
      ->capture_default_str();
  pr_cmd->add_option("--format", pr.format, "output format, csv or rpkm")
      ->capture_default_str();
  pr_cmd->callback([&pr] { run_project(pr); });

  AuditOpts au;
  CLI::App* au_cmd =
      app.add_subcommand("audit", "check pairwise distance distortion");
  au_cmd->add_option("--original", au.original, "original data matrix")
      ->required();
  au_cmd->add_option("--projected", au.projected, "projected data matrix")
      ->required();
  au_cmd->add_option("--eps", au.eps, "distortion bound in (0, 1)")
      ->required();
  au_cmd->callback([&au] { run_audit(au); });

  CLI::App* ann_cmd =
      app.add_subcommand("ann", "random projection tree search");
  ann_cmd->require_subcommand(1);

  AnnBuildOpts ab;
  CLI::App* ab_cmd = ann_cmd->add_subcommand("build", "build a forest file");
  ab_cmd->add_option("--data", ab.data, "data matrix, rows are points")
      ->required();
  ab_cmd->add_option("--output", ab.output, "forest file destination")
      ->required();
  ab_cmd->add_option("--trees", ab.trees, "trees in the forest")
      ->capture_default_str();
  ab_cmd->add_option("--leaf-size", ab.leaf_size, "largest undivided node")
      ->capture_default_str();
  ab_cmd->add_option("--seed", ab.seed, "forest seed")
      ->envname("RPKIT_SEED")
      ->capture_default_str();
  ab_cmd->add_option("--threads", ab.threads, "build workers")
      ->capture_default_str();
  ab_cmd->callback([&ab] { run_ann_build(ab); });

  AnnQueryOpts aq;
  CLI::App* aq_cmd =
      ann_cmd->add_subcommand("query", "query a stored forest");
  aq_cmd->add_option("--data", aq.data, "the matrix the forest was built on")
      ->required();
  aq_cmd->add_option("--forest", aq.forest, "forest file")->required();
  aq_cmd->add_option("--queries", aq.queries, "query matrix, rows are points")
      ->required();
  aq_cmd->add_option("--top-k", aq.top_k, "neighbors per query")->required();
  CLI::Option* aq_budget =
      aq_cmd->add_option("--budget", aq.budget,
                         "candidate budget, default 10 * top-k");
  aq_cmd->callback([&aq, aq_budget] {
    aq.budget_set = aq_budget->count() > 0;
    run_ann_query(aq);
  });

  AnnBenchOpts abn;
  CLI::App* abn_cmd =
      ann_cmd->add_subcommand("bench", "recall and timing benchmark");
  abn_cmd->add_option("--data", abn.data, "data matrix, rows are points")
      ->required();
  abn_cmd->add_option("--queries", abn.queries, "query matrix")->required();
  abn_cmd->add_option("--trees", abn.trees, "trees in the forest")
      ->capture_default_str();
  abn_cmd->add_option("--leaf-size", abn.leaf_size, "largest undivided node")
      ->capture_default_str();
  abn_cmd->add_option("--top-k", abn.top_k, "neighbors per query")
      ->capture_default_str();
  CLI::Option* abn_budget =
      abn_cmd->add_option("--budget", abn.budget,
                          "candidate budget, default 10 * top-k");
  abn_cmd->add_option("--seed", abn.seed, "forest seed")
      ->envname("RPKIT_SEED")
      ->capture_default_str();
  abn_cmd->add_option("--threads", abn.threads, "build workers")
      ->capture_default_str();
  abn_cmd->callback([&abn, abn_budget] {
    abn.budget_set = abn_budget->count() > 0;
    run_ann_bench(abn);
  });

  CLI::App* priv_cmd =
      app.add_subcommand("privacy", "multiplicative perturbation");
  priv_cmd->require_subcommand(1);

  PrivPerturbOpts pp;
  CLI::App* pp_cmd = priv_cmd->add_subcommand(
      "perturb", "project records-as-columns through a hidden key");
  pp_cmd->add_option("--input", pp.input, "data matrix, columns are records")
      ->required();
  pp_cmd->add_option("--output", pp.output, "perturbed matrix destination")
      ->required();
  pp_cmd->add_option("--k", pp.k, "reduced dimension")->required();
  pp_cmd->add_option("--sigma", pp.sigma, "key entry scale sigma_r")
      ->capture_default_str();
  pp_cmd->add_option("--kind", pp.kind, "gaussian, sign or sparse_ternary")
      ->capture_default_str();
  pp_cmd->add_option("--mode", pp.mode, "privacy (requires k < m) or test")
      ->capture_default_str();
  pp_cmd->add_option("--seed", pp.seed, "key seed")
      ->envname("RPKIT_SEED")
      ->capture_default_str();
  pp_cmd->add_option("--emit-key", pp.emit_key,
                     "also write the key file (off unless given)");
  pp_cmd->add_option("--format", pp.format, "output format, csv or rpkm")
      ->capture_default_str();
  pp_cmd->callback([&pp] { run_priv_perturb(pp); });

  PrivEstimateOpts pe;
  CLI::App* pe_cmd = priv_cmd->add_subcommand(
      "estimate", "inner products between two perturbed datasets");
  pe_cmd->add_option("--u", pe.u, "first perturbed matrix")->required();
  pe_cmd->add_option("--v", pe.v, "second perturbed matrix")->required();
  pe_cmd->add_option("--sigma", pe.sigma, "key entry scale both used")
      ->capture_default_str();
  pe_cmd->callback([&pe] { run_priv_estimate(pe); });

  PrivAttackOpts pa;
  CLI::App* pa_cmd = priv_cmd->add_subcommand(
      "attack", "reconstruction attacks against a release");
  pa_cmd->add_option("--u", pa.u, "perturbed matrix")->required();
  pa_cmd->add_option("--attack", pa.attack, "exact (leaked key) or estimate")
      ->capture_default_str();
  pa_cmd->add_option("--key", pa.key, "leaked key file, exact attack only");
  pa_cmd->add_option("--column", pa.column, "record column, estimate attack")
      ->capture_default_str();
  CLI::Option* pa_m =
      pa_cmd->add_option("--m", pa.m, "attribute count guess, estimate attack");
  pa_cmd->add_option("--kind", pa.kind, "guessed key distribution")
      ->capture_default_str();
  pa_cmd->add_option("--sigma-hat", pa.sigma_hat, "guessed key entry scale")
      ->capture_default_str();
  pa_cmd->add_option("--trials", pa.trials, "guessed keys to average")
      ->capture_default_str();
  pa_cmd->add_option("--seed", pa.seed, "guess seed")
      ->envname("RPKIT_SEED")
      ->capture_default_str();
  pa_cmd->callback([&pa, pa_m] {
    pa.m_set = pa_m->count() > 0;
    run_priv_attack(pa);
  });

  PrivKmeansOpts pk;
  CLI::App* pk_cmd =
      priv_cmd->add_subcommand("kmeans", "cluster columns with Lloyd rounds");
  pk_cmd->add_option("--input", pk.input, "matrix, columns are records")
      ->required();
  pk_cmd->add_option("--clusters", pk.clusters, "cluster count")->required();
  pk_cmd->add_option("--max-iters", pk.max_iters, "Lloyd iteration cap")
      ->capture_default_str();
  pk_cmd->add_option("--seed", pk.seed, "init seed")
      ->envname("RPKIT_SEED")
      ->capture_default_str();
  pk_cmd->callback([&pk] { run_priv_kmeans(pk); });

  PrivPerceptronOpts pc;
  CLI::App* pc_cmd = priv_cmd->add_subcommand(
      "perceptron", "train a linear classifier on perturbed columns");
  pc_cmd->add_option("--input", pc.input, "matrix, columns are records")
      ->required();
  pc_cmd->add_option("--labels", pc.labels, "vector of +1/-1 labels")
      ->required();
  pc_cmd->add_option("--epochs", pc.epochs, "training epochs")
      ->capture_default_str();
  pc_cmd->add_option("--seed", pc.seed, "shuffle seed")
      ->envname("RPKIT_SEED")
      ->capture_default_str();
  pc_cmd->callback([&pc] { run_priv_perceptron(pc); });

  CLI::App* sense_cmd =
      app.add_subcommand("sensing", "restricted isometry and recovery");
  sense_cmd->require_subcommand(1);

  SenseRipOpts sr;
  CLI::App* sr_cmd = sense_cmd->add_subcommand(
      "rip", "certify the restricted isometry constant");
  sr_cmd->add_option("--matrix", sr.matrix, "sensing matrix")->required();
  sr_cmd->add_option("--s", sr.s, "sparsity order")->required();
  sr_cmd->add_option("--threads", sr.threads, "enumeration workers")
      ->capture_default_str();
  sr_cmd->callback([&sr] { run_sense_rip(sr); });

  SenseRecoverOpts sc;
  CLI::App* sc_cmd = sense_cmd->add_subcommand(
      "recover", "brute force sparse recovery from measurements");
  sc_cmd->add_option("--matrix", sc.matrix, "sensing matrix")->required();
  sc_cmd->add_option("--measurements", sc.measurements, "measurement vector")
      ->required();
  sc_cmd->add_option("--s", sc.s, "sparsity budget")->required();
  sc_cmd->callback([&sc] { run_sense_recover(sc); });

  SenseBoundOpts sb;
  CLI::App* sb_cmd = sense_cmd->add_subcommand(
      "bound", "measurement count for S-sparse recovery");
  sb_cmd->add_option("--s", sb.s, "sparsity")->required();
  sb_cmd->add_option("--n", sb.n, "signal dimension")->required();
  sb_cmd->add_option("--constant", sb.constant, "leading constant")
      ->required();
  sb_cmd->callback([&sb] { run_sense_bound(sb); });

  CLI::App* comp_cmd =
      app.add_subcommand("completion", "matrix completion formulas");
  comp_cmd->require_subcommand(1);

  CompNormOpts cn;
  CLI::App* cn_cmd =
      comp_cmd->add_subcommand("norm", "nuclear norm of a matrix");
  cn_cmd->add_option("--input", cn.input, "matrix file")->required();
  cn_cmd->callback([&cn] { run_comp_norm(cn); });

  CompCoherenceOpts cc;
  CLI::App* cc_cmd = comp_cmd->add_subcommand(
      "coherence", "coherence of an orthonormal basis");
  cc_cmd->add_option("--basis", cc.basis, "n x r orthonormal basis file")
      ->required();
  cc_cmd->callback([&cc] { run_comp_coherence(cc); });

  CompBoundOpts cb;
  CLI::App* cb_cmd = comp_cmd->add_subcommand(
      "bound", "observed-entry count for high probability completion");
  cb_cmd->add_option("--mu0", cb.mu0, "coherence bound mu0")->required();
  cb_cmd->add_option("--r", cb.r, "rank")->required();
  cb_cmd->add_option("--n", cb.n, "max matrix dimension")->required();
  cb_cmd->add_option("--beta", cb.beta, "confidence exponent, must exceed 2")
      ->required();
  cb_cmd->add_option("--constant", cb.constant, "leading constant")
      ->required();
  cb_cmd->callback([&cb] { run_comp_bound(cb); });

  CompCheckOpts ck;
  CLI::App* ck_cmd = comp_cmd->add_subcommand(
      "check", "score a candidate completion against observations");
  ck_cmd->add_option("--candidate", ck.candidate, "candidate matrix file")
      ->required();
  ck_cmd->add_option("--observed", ck.observed,
                     "observed entries, '# n1 n2' header plus i,j,value rows")
      ->required();
  ck_cmd->add_option("--tol", ck.tol, "per-entry match tolerance")
      ->capture_default_str();
  ck_cmd->callback([&ck] { run_comp_check(ck); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const rpkit::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const rpkit::numerical_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
