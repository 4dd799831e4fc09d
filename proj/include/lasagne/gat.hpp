#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lasagne/detail/rng.hpp"
#include "lasagne/detail/text.hpp"
#include "lasagne/errors.hpp"
#include "lasagne/tp_graph.hpp"

namespace lasagne {

// One embedding row per graph node, in node order.
using NodeEmbeddings = Eigen::MatrixXd;

enum class OutputNonlinearity { Identity, Elu };

struct GATParams {
  std::vector<Eigen::MatrixXd> head_weights;    // K matrices, d_out x d_in
  std::vector<Eigen::VectorXd> head_attention;  // K vectors, 2 * d_out
  double attention_slope = 0.2;                 // LeakyReLU slope inside attention
  OutputNonlinearity output_nonlinearity = OutputNonlinearity::Elu;

  std::size_t head_count() const { return head_weights.size(); }
};

inline double leaky_relu(double x, double slope) { return x >= 0.0 ? x : slope * x; }
inline double elu(double x) { return x >= 0.0 ? x : std::expm1(x); }

struct GatLayerResult {
  Eigen::MatrixXd output;                  // n x d_out
  std::vector<Eigen::MatrixXd> attention;  // per head, n x n; row i is soft over N(i)
};

namespace detail {

inline void validate_gat_inputs(const TypePredicateGraph& g, const NodeEmbeddings& h,
                                const GATParams& params) {
  if (params.head_count() == 0) throw std::invalid_argument("GAT needs at least one head");
  if (params.head_attention.size() != params.head_count())
    throw std::invalid_argument("GAT head weight/attention counts differ");
  if (static_cast<std::size_t>(h.rows()) != g.node_count())
    throw std::invalid_argument("embedding row count does not match node count");
  if (g.adjacency.size() != g.node_count())
    throw std::invalid_argument("adjacency size does not match node count");

  const Eigen::Index d_in = h.cols();
  const Eigen::Index d_out = params.head_weights.front().rows();
  for (std::size_t k = 0; k < params.head_count(); ++k) {
    if (params.head_weights[k].cols() != d_in)
      throw std::invalid_argument("head weight column count does not match embedding width");
    if (params.head_weights[k].rows() != d_out)
      throw std::invalid_argument("heads disagree on output width");
    if (params.head_attention[k].size() != 2 * d_out)
      throw std::invalid_argument("attention vector must have length 2*d_out");
  }
  for (const auto& row : g.adjacency)
    if (row.empty()) throw std::invalid_argument("graph node without self-loop");
}

}  // namespace detail

// Attention scores e_ij = LeakyReLU(a^T [W h_i || W h_j]) are softmaxed over
// each node's neighbourhood (self-loop included); head outputs are averaged
// and then passed through the output nonlinearity.
inline GatLayerResult gat_forward_detailed(const TypePredicateGraph& g, const NodeEmbeddings& h,
                                           const GATParams& params) {
  detail::validate_gat_inputs(g, h, params);

  const auto n = static_cast<Eigen::Index>(g.node_count());
  const Eigen::Index d_out = params.head_weights.front().rows();
  const auto heads = params.head_count();

  GatLayerResult result;
  result.output = Eigen::MatrixXd::Zero(n, d_out);
  result.attention.assign(heads, Eigen::MatrixXd::Zero(n, n));

  for (std::size_t k = 0; k < heads; ++k) {
    const Eigen::MatrixXd wh = h * params.head_weights[k].transpose();  // n x d_out
    const Eigen::VectorXd a_self = params.head_attention[k].head(d_out);
    const Eigen::VectorXd a_nbr = params.head_attention[k].tail(d_out);

    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& nbrs = g.adjacency[static_cast<std::size_t>(i)];
      const double self_score = a_self.dot(wh.row(i));

      Eigen::VectorXd scores(static_cast<Eigen::Index>(nbrs.size()));
      for (std::size_t t = 0; t < nbrs.size(); ++t)
        scores[static_cast<Eigen::Index>(t)] = leaky_relu(
            self_score + a_nbr.dot(wh.row(static_cast<Eigen::Index>(nbrs[t]))),
            params.attention_slope);

      const double shift = scores.maxCoeff();
      Eigen::VectorXd weights = (scores.array() - shift).exp();
      weights /= weights.sum();

      for (std::size_t t = 0; t < nbrs.size(); ++t) {
        const auto j = static_cast<Eigen::Index>(nbrs[t]);
        const double alpha = weights[static_cast<Eigen::Index>(t)];
        result.output.row(i) += alpha * wh.row(j);
        result.attention[k](i, j) = alpha;
      }
    }
  }

  result.output /= static_cast<double>(heads);
  if (params.output_nonlinearity == OutputNonlinearity::Elu)
    result.output = result.output.unaryExpr([](double x) { return elu(x); });
  return result;
}

inline Eigen::MatrixXd gat_forward(const TypePredicateGraph& g, const NodeEmbeddings& h,
                                   const GATParams& params) {
  return gat_forward_detailed(g, h, params).output;
}

// Pointer-network style scores: h_c = LeakyReLU(W_g [context; decoder]),
// then a softmax over node feature rows' dot products with h_c.
inline Eigen::VectorXd score_nodes(const Eigen::MatrixXd& node_features,
                                   const Eigen::VectorXd& context,
                                   const Eigen::VectorXd& decoder_state,
                                   const Eigen::MatrixXd& projection, double slope = 0.2) {
  if (projection.cols() != context.size() + decoder_state.size())
    throw std::invalid_argument("projection width must equal |context| + |decoder state|");
  if (projection.rows() != node_features.cols())
    throw std::invalid_argument("projection height must match node feature width");
  if (node_features.rows() == 0)
    throw std::invalid_argument("cannot score an empty node list");

  Eigen::VectorXd joint(context.size() + decoder_state.size());
  joint << context, decoder_state;
  const Eigen::VectorXd h_c =
      (projection * joint).unaryExpr([slope](double x) { return leaky_relu(x, slope); });

  Eigen::VectorXd logits = node_features * h_c;
  const double shift = logits.maxCoeff();
  Eigen::VectorXd probs = (logits.array() - shift).exp();
  probs /= probs.sum();
  return probs;
}

// Entries are uniform on [-1/sqrt(dim), 1/sqrt(dim)], seeded per node id, so
// embeddings do not depend on node order or platform.
inline NodeEmbeddings seeded_embeddings(const TypePredicateGraph& g, std::uint64_t seed,
                                        Eigen::Index dim) {
  if (dim <= 0) throw std::invalid_argument("embedding width must be positive");
  NodeEmbeddings h(static_cast<Eigen::Index>(g.node_count()), dim);
  const double half_width = 1.0 / std::sqrt(static_cast<double>(dim));
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    detail::Rng rng(detail::stable_hash(prefixed_id(g.nodes[i]), seed));
    for (Eigen::Index c = 0; c < dim; ++c)
      h(static_cast<Eigen::Index>(i), c) = rng.symmetric(half_width);
  }
  return h;
}

inline GATParams seeded_gat_params(std::uint64_t seed, std::size_t heads, Eigen::Index d_in,
                                   Eigen::Index d_out, double slope = 0.2,
                                   OutputNonlinearity output = OutputNonlinearity::Elu) {
  if (heads == 0) throw std::invalid_argument("GAT needs at least one head");
  if (d_in <= 0 || d_out <= 0) throw std::invalid_argument("widths must be positive");

  GATParams params;
  params.attention_slope = slope;
  params.output_nonlinearity = output;
  const double w_width = 1.0 / std::sqrt(static_cast<double>(d_in));
  const double a_width = 1.0 / std::sqrt(static_cast<double>(d_out));
  for (std::size_t k = 0; k < heads; ++k) {
    detail::Rng rng(detail::stable_hash("head-" + std::to_string(k), seed));
    Eigen::MatrixXd w(d_out, d_in);
    for (Eigen::Index r = 0; r < d_out; ++r)
      for (Eigen::Index c = 0; c < d_in; ++c) w(r, c) = rng.symmetric(w_width);
    Eigen::VectorXd a(2 * d_out);
    for (Eigen::Index r = 0; r < 2 * d_out; ++r) a[r] = rng.symmetric(a_width);
    params.head_weights.push_back(std::move(w));
    params.head_attention.push_back(std::move(a));
  }
  return params;
}

// `node_id v1 v2 ... v_d` per line, whitespace-separated. Every graph node
// must appear exactly once and rows must agree on width.
inline NodeEmbeddings load_embeddings(const std::string& path, const TypePredicateGraph& g) {
  std::vector<bool> seen(g.node_count(), false);
  NodeEmbeddings h;
  Eigen::Index dim = -1;

  detail::for_each_line(path, [&](std::size_t line_no, std::string_view line) {
    auto fields = detail::split_ws(line);
    if (fields.size() < 2) throw ParseError(path, line_no, "expected node id and values");

    GraphNode node = detail::parse_prefixed(path, line_no, fields[0]);
    auto index = g.index_of(node.kind, node.id);
    if (!index) throw ParseError(path, line_no, "unknown node `" + fields[0] + "`");
    if (seen[*index]) throw ParseError(path, line_no, "duplicate row for `" + fields[0] + "`");
    seen[*index] = true;

    const auto width = static_cast<Eigen::Index>(fields.size() - 1);
    if (dim < 0) {
      dim = width;
      h.resize(static_cast<Eigen::Index>(g.node_count()), dim);
    } else if (width != dim) {
      throw ParseError(path, line_no, "row width differs from previous rows");
    }

    for (Eigen::Index c = 0; c < dim; ++c) {
      const std::string& field = fields[static_cast<std::size_t>(c) + 1];
      std::size_t consumed = 0;
      double value = 0;
      try {
        value = std::stod(field, &consumed);
      } catch (const std::exception&) {
        throw ParseError(path, line_no, "bad number `" + field + "`");
      }
      if (consumed != field.size() || !std::isfinite(value))
        throw ParseError(path, line_no, "bad number `" + field + "`");
      h(static_cast<Eigen::Index>(*index), c) = value;
    }
  });

  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i])
      throw std::invalid_argument(path + ": missing embedding row for " + prefixed_id(g.nodes[i]));
  return h;
}

inline void save_embeddings(const std::string& path, const TypePredicateGraph& g,
                            const NodeEmbeddings& h) {
  if (static_cast<std::size_t>(h.rows()) != g.node_count())
    throw std::invalid_argument("embedding row count does not match node count");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out.precision(17);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    out << prefixed_id(g.nodes[i]);
    for (Eigen::Index c = 0; c < h.cols(); ++c) out << ' ' << h(static_cast<Eigen::Index>(i), c);
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace lasagne
