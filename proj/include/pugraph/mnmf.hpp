#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Sparse>

#include "pugraph/embedding.hpp"
#include "pugraph/error.hpp"
#include "pugraph/rng.hpp"

namespace pugraph {

struct MnmfConfig {
  std::size_t dim = 64;
  std::size_t communities = 8;
  double alpha = 1.0;   // community-representation term
  double beta = 1.0;    // modularity term
  double eta = 5.0;     // weight of second-order proximity in S
  double lambda = 1.0;  // penalty on H^T H - I
  std::size_t iterations = 200;
  // Rescale every factor row to unit sum after each sweep. Without it H
  // can settle with a whole community's rows at zero.
  bool normalize_rows = true;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (dim == 0) throw ConfigError("dim", "must be >= 1");
    if (communities < 2) throw ConfigError("communities", "must be >= 2");
    if (alpha < 0.0 || beta < 0.0 || eta < 0.0) throw ConfigError("alpha/beta/eta", "must be nonnegative");
    if (!(lambda > 0.0)) throw ConfigError("lambda", "must be > 0");
    if (iterations == 0) throw ConfigError("iterations", "must be >= 1");
  }
};

struct MnmfResult {
  EmbeddingMatrix embedding;  // rows of U
  Eigen::MatrixXd basis;       // M, n x dim
  Eigen::MatrixXd representation;  // U, n x dim
  Eigen::MatrixXd community_repr;  // C, k x dim
  Eigen::MatrixXd membership;      // H, n x k
  double initial_objective = 0.0;  // at the random initialisation
  std::vector<double> objective;   // after each iteration

  // Community index with the largest membership weight, per node.
  std::vector<std::size_t> communities() const {
    std::vector<std::size_t> out(static_cast<std::size_t>(membership.rows()));
    for (Eigen::Index i = 0; i < membership.rows(); ++i) {
      Eigen::Index best = 0;
      membership.row(i).maxCoeff(&best);
      out[static_cast<std::size_t>(i)] = static_cast<std::size_t>(best);
    }
    return out;
  }
};

// Modularized NMF by multiplicative updates on
//   |S - M U^T|^2 + alpha |H - U C^T|^2 - beta tr(H^T B H) + lambda |H^T H - I|^2
// with S = A + eta * cos(A_i, A_j) and B = A - k k^T / 2m.
inline MnmfResult train_mnmf(const TransactionGraph& graph, const MnmfConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<Eigen::Index>(graph.node_count());
  if (graph.edge_count() == 0) throw Error("graph", "modularity needs at least one edge");
  const auto m = static_cast<Eigen::Index>(cfg.dim);
  const auto k = static_cast<Eigen::Index>(cfg.communities);
  constexpr double tiny = 1e-15;

  std::vector<Eigen::Triplet<double>> triplets;
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    for (const Neighbor& nb : graph.neighbors(u)) triplets.emplace_back(u, nb.node, nb.weight);
  }
  Eigen::SparseMatrix<double> adj(n, n);
  adj.setFromTriplets(triplets.begin(), triplets.end());
  const Eigen::VectorXd degree = adj * Eigen::VectorXd::Ones(n);
  const double two_m = degree.sum();

  const Eigen::MatrixXd dense_adj = Eigen::MatrixXd(adj);
  Eigen::VectorXd row_norm = dense_adj.rowwise().norm();
  for (Eigen::Index i = 0; i < n; ++i) row_norm(i) = row_norm(i) > 0.0 ? 1.0 / row_norm(i) : 0.0;
  const Eigen::MatrixXd normalized = row_norm.asDiagonal() * dense_adj;
  const Eigen::MatrixXd similarity = dense_adj + cfg.eta * (normalized * normalized.transpose());

  Rng rng = make_rng(cfg.rng_seed);
  auto random_matrix = [&](Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd x(rows, cols);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = uniform_real(rng, 0.01, 1.0);
    return x;
  };
  Eigen::MatrixXd basis = random_matrix(n, m);
  Eigen::MatrixXd rep = random_matrix(n, m);
  Eigen::MatrixXd comm = random_matrix(k, m);
  Eigen::MatrixXd member = random_matrix(n, k);

  auto objective = [&] {
    const double recon = (similarity - basis * rep.transpose()).squaredNorm();
    const double community = (member - rep * comm.transpose()).squaredNorm();
    const Eigen::VectorXd kh = member.transpose() * degree;
    const double modularity = (member.transpose() * (adj * member)).trace() - kh.squaredNorm() / two_m;
    const double ortho = (member.transpose() * member - Eigen::MatrixXd::Identity(k, k)).squaredNorm();
    return recon + cfg.alpha * community - cfg.beta * modularity + cfg.lambda * ortho;
  };
  auto guarded = [&](const Eigen::MatrixXd& num, const Eigen::MatrixXd& den) {
    return num.cwiseMax(0.0).cwiseQuotient(den.cwiseMax(tiny));
  };

  MnmfResult result;
  result.initial_objective = objective();
  result.objective.reserve(cfg.iterations);
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    basis = basis.cwiseProduct(guarded(similarity * rep, basis * (rep.transpose() * rep)));

    const Eigen::MatrixXd rep_num = similarity.transpose() * basis + cfg.alpha * member * comm;
    const Eigen::MatrixXd rep_den = rep * (basis.transpose() * basis + cfg.alpha * comm.transpose() * comm);
    rep = rep.cwiseProduct(guarded(rep_num, rep_den));

    comm = comm.cwiseProduct(guarded(member.transpose() * rep, comm * (rep.transpose() * rep)));

    const Eigen::MatrixXd null_part = degree * ((degree.transpose() * member) / two_m);  // (k k^T / 2m) H
    const Eigen::MatrixXd adj_part = adj * member;
    const Eigen::MatrixXd hhh = member * (member.transpose() * member);
    const Eigen::MatrixXd uc = rep * comm.transpose();
    const Eigen::MatrixXd delta =
        (2.0 * cfg.beta * null_part).array().square().matrix() +
        (16.0 * cfg.lambda * hhh).cwiseProduct(2.0 * cfg.beta * adj_part + 2.0 * cfg.alpha * uc +
                                               (4.0 * cfg.lambda - 2.0 * cfg.alpha) * member);
    const Eigen::MatrixXd ratio =
        guarded(-2.0 * cfg.beta * null_part + delta.cwiseMax(0.0).cwiseSqrt(), 8.0 * cfg.lambda * hhh);
    member = member.cwiseProduct(ratio.cwiseSqrt());

    if (cfg.normalize_rows) {
      for (Eigen::MatrixXd* factor : {&basis, &rep, &comm, &member}) {
        const Eigen::VectorXd sums = factor->rowwise().sum();
        for (Eigen::Index i = 0; i < factor->rows(); ++i) {
          if (sums(i) > 0.0) factor->row(i) /= sums(i);
        }
      }
    }

    result.objective.push_back(objective());
  }

  result.embedding.vectors = rep;
  result.embedding.node_ids.assign(graph.external_ids().begin(), graph.external_ids().end());
  result.embedding.method_tag = "mnmf";
  result.basis = std::move(basis);
  result.representation = std::move(rep);
  result.community_repr = std::move(comm);
  result.membership = std::move(member);
  return result;
}

}  // namespace pugraph
