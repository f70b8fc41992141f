#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radctl/tokens.hpp"
#include "radctl/vocabulary.hpp"

namespace radctl {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Parameters of the longitudinal projection f = FC2 . BN . FC1.
/// Normalisation runs in inference mode on the stored running statistics,
/// which makes f affine.
struct ProjectionParams {
  Matrix fc1_weight;  // hidden x input
  Vector fc1_bias;    // hidden
  Vector bn_gamma;
  Vector bn_beta;
  Vector bn_running_mean;
  Vector bn_running_var;
  double bn_epsilon = 1e-5;
  Matrix fc2_weight;  // output x hidden
  Vector fc2_bias;    // output

  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(fc1_weight.cols()); }
  std::size_t hidden_dim() const noexcept { return static_cast<std::size_t>(fc1_weight.rows()); }
  std::size_t output_dim() const noexcept { return static_cast<std::size_t>(fc2_weight.rows()); }

  /// Throws ShapeMismatch on inconsistent shapes and InvalidParams on
  /// negative variances, a negative epsilon or var + epsilon == 0.
  void validate() const;

  /// Square 2d x 2d layers with uniform fan-in scaled weights drawn from
  /// SeededRng(seed). Reproducible across platforms.
  static ProjectionParams random(std::size_t token_dim, std::uint64_t seed);
  /// Identity layers, zero biases, gamma 1, beta 0, mean 0, var 1, epsilon 0.
  static ProjectionParams identity(std::size_t width);
};

/// FC2(BN(FC1(x))). Throws ShapeMismatch.
Vector mlp_forward(std::span<const double> x, const ProjectionParams& params);

/// Per-region fused vectors in vocabulary order.
struct JointRepresentation {
  Matrix values;                // regions x output_dim
  std::vector<bool> in_target;  // false = masked, row holds f([0, 0])

  std::size_t region_count() const noexcept { return in_target.size(); }
  std::size_t width() const noexcept { return static_cast<std::size_t>(values.cols()); }
  std::span<const double> row(RegionId r) const {
    return {values.data() + static_cast<std::ptrdiff_t>(r.value) * values.cols(), width()};
  }
};

/// Regions in `target` get f([current, prior]); all others share the single
/// vector f([0, 0]). Throws ShapeMismatch, UnknownRegion.
JointRepresentation build_joint_representation(const AnatomicalTokenSet& current, const AnatomicalTokenSet& prior,
                                               const RegionSet& target, const ProjectionParams& params);

enum class Segment : std::uint8_t { Vision = 0, Text = 1 };

/// Embedding tables for input assembly. `adapter` maps the fused width to
/// the model width with a bias-free linear map.
struct EmbedTables {
  Matrix token;     // vocab x width
  Matrix position;  // max_positions x width
  Matrix segment;   // 2 x width
  Matrix adapter;   // width x fused_width

  std::size_t width() const noexcept { return static_cast<std::size_t>(token.cols()); }
  std::size_t max_positions() const noexcept { return static_cast<std::size_t>(position.rows()); }

  static EmbedTables zeros(std::size_t vocab, std::size_t max_positions, std::size_t width, std::size_t fused_width);
  static EmbedTables random(std::size_t vocab, std::size_t max_positions, std::size_t width, std::size_t fused_width,
                            std::uint64_t seed);
};

struct MultimodalSequence {
  Matrix embeddings;                         // length x width
  std::vector<Segment> segments;
  std::vector<std::size_t> positions;        // 0, 1, 2, ...
  std::vector<std::optional<RegionId>> regions;  // set on vision positions
  std::vector<bool> masked;                  // vision positions outside A_target

  std::size_t size() const noexcept { return segments.size(); }
};

struct AssemblyOptions {
  /// Leave masked regions out of the sequence instead of feeding f([0, 0]).
  bool drop_masked = false;
};

/// [adapter(v_joint,n) for n in vocabulary order] ++ [token(id) for id in
/// indication], each plus its positional and segment embedding.
/// Throws ShapeMismatch, PositionOverflow.
MultimodalSequence assemble_multimodal_input(const JointRepresentation& joint,
                                             std::span<const std::uint32_t> indication_tokens,
                                             const EmbedTables& tables, const AssemblyOptions& options = {});

/// Maps words to ids in [0, vocab) by FNV-1a hashing of the lowercase
/// token. Used for indication text when no tokenizer vocabulary is supplied.
std::vector<std::uint32_t> hash_token_ids(std::string_view text, std::size_t vocab);

}  // namespace radctl
