#include "radctl/fusion.hpp"

#include <cmath>

#include "radctl/error.hpp"
#include "radctl/metrics/text.hpp"
#include "radctl/random.hpp"

namespace radctl {

namespace {

std::string shape(Eigen::Index r, Eigen::Index c) { return std::to_string(r) + "x" + std::to_string(c); }

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::ShapeMismatch, what);
}

void fill_uniform(Matrix& m, SeededRng& rng, double lo, double hi) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
}

void fill_uniform(Vector& v, SeededRng& rng, double lo, double hi) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(lo, hi);
}

// Inference-mode batch normalisation folded into a scale and shift.
Vector apply_projection(const Eigen::Ref<const Vector>& x, const ProjectionParams& p) {
  Vector h = p.fc1_weight * x + p.fc1_bias;
  h = (p.bn_gamma.array() * (h - p.bn_running_mean).array() /
           (p.bn_running_var.array() + p.bn_epsilon).sqrt() +
       p.bn_beta.array())
          .matrix();
  return p.fc2_weight * h + p.fc2_bias;
}

}  // namespace

void ProjectionParams::validate() const {
  const auto h = fc1_weight.rows();
  require(fc1_weight.cols() > 0 && h > 0, "fc1 weight is empty");
  require(fc1_bias.size() == h, "fc1 bias length " + std::to_string(fc1_bias.size()) + " for fc1 " +
                                    shape(fc1_weight.rows(), fc1_weight.cols()));
  require(bn_gamma.size() == h && bn_beta.size() == h && bn_running_mean.size() == h && bn_running_var.size() == h,
          "normalisation vectors must have length " + std::to_string(h));
  require(fc2_weight.cols() == h, "fc2 " + shape(fc2_weight.rows(), fc2_weight.cols()) + " after hidden width " +
                                      std::to_string(h));
  require(fc2_bias.size() == fc2_weight.rows(), "fc2 bias length " + std::to_string(fc2_bias.size()));
  if (!(bn_epsilon >= 0.0)) fail(ErrorCode::InvalidParams, "negative epsilon");
  for (Eigen::Index i = 0; i < h; ++i) {
    if (!(bn_running_var[i] >= 0.0)) fail(ErrorCode::InvalidParams, "negative running variance at " + std::to_string(i));
    if (bn_running_var[i] + bn_epsilon <= 0.0)
      fail(ErrorCode::InvalidParams, "zero variance with zero epsilon at " + std::to_string(i));
  }
}

ProjectionParams ProjectionParams::random(std::size_t token_dim, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(2 * token_dim);
  SeededRng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(n));
  ProjectionParams p;
  p.fc1_weight.resize(n, n);
  p.fc1_bias.resize(n);
  p.bn_gamma.resize(n);
  p.bn_beta.resize(n);
  p.bn_running_mean.resize(n);
  p.bn_running_var.resize(n);
  p.fc2_weight.resize(n, n);
  p.fc2_bias.resize(n);
  fill_uniform(p.fc1_weight, rng, -bound, bound);
  fill_uniform(p.fc1_bias, rng, -bound, bound);
  fill_uniform(p.bn_gamma, rng, 0.5, 1.5);
  fill_uniform(p.bn_beta, rng, -0.1, 0.1);
  fill_uniform(p.bn_running_mean, rng, -0.1, 0.1);
  fill_uniform(p.bn_running_var, rng, 0.5, 1.5);
  fill_uniform(p.fc2_weight, rng, -bound, bound);
  fill_uniform(p.fc2_bias, rng, -bound, bound);
  return p;
}

ProjectionParams ProjectionParams::identity(std::size_t width) {
  const auto n = static_cast<Eigen::Index>(width);
  ProjectionParams p;
  p.fc1_weight = Matrix::Identity(n, n);
  p.fc1_bias = Vector::Zero(n);
  p.bn_gamma = Vector::Ones(n);
  p.bn_beta = Vector::Zero(n);
  p.bn_running_mean = Vector::Zero(n);
  p.bn_running_var = Vector::Ones(n);
  p.bn_epsilon = 0.0;
  p.fc2_weight = Matrix::Identity(n, n);
  p.fc2_bias = Vector::Zero(n);
  return p;
}

Vector mlp_forward(std::span<const double> x, const ProjectionParams& params) {
  params.validate();
  require(x.size() == params.input_dim(),
          "input length " + std::to_string(x.size()) + " != " + std::to_string(params.input_dim()));
  const Eigen::Map<const Vector> in(x.data(), static_cast<Eigen::Index>(x.size()));
  return apply_projection(in, params);
}

JointRepresentation build_joint_representation(const AnatomicalTokenSet& current, const AnatomicalTokenSet& prior,
                                               const RegionSet& target, const ProjectionParams& params) {
  params.validate();
  require(current.region_count() == prior.region_count() && current.dim() == prior.dim(),
          "current and prior token sets are not aligned");
  const std::size_t d = current.dim();
  require(params.input_dim() == 2 * d,
          "projection input " + std::to_string(params.input_dim()) + " != 2 x token dim " + std::to_string(d));
  const std::size_t n = current.region_count();
  for (RegionId r : target)
    if (r.value >= n) fail(ErrorCode::UnknownRegion, "target region index " + std::to_string(r.value));

  JointRepresentation out;
  out.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(params.output_dim()));
  out.in_target.assign(n, false);

  const Vector masked = apply_projection(Vector::Zero(static_cast<Eigen::Index>(2 * d)), params);
  Vector joint(static_cast<Eigen::Index>(2 * d));
  for (std::size_t i = 0; i < n; ++i) {
    const RegionId r{static_cast<std::uint16_t>(i)};
    const auto row = static_cast<Eigen::Index>(i);
    if (!target.contains(r)) {
      out.values.row(row) = masked.transpose();
      continue;
    }
    out.in_target[i] = true;
    const auto c = current.vector(r);
    const auto p = prior.vector(r);
    std::copy(c.begin(), c.end(), joint.data());
    std::copy(p.begin(), p.end(), joint.data() + d);
    out.values.row(row) = apply_projection(joint, params).transpose();
  }
  return out;
}

EmbedTables EmbedTables::zeros(std::size_t vocab, std::size_t max_positions, std::size_t width,
                               std::size_t fused_width) {
  const auto w = static_cast<Eigen::Index>(width);
  EmbedTables t;
  t.token = Matrix::Zero(static_cast<Eigen::Index>(vocab), w);
  t.position = Matrix::Zero(static_cast<Eigen::Index>(max_positions), w);
  t.segment = Matrix::Zero(2, w);
  t.adapter = Matrix::Zero(w, static_cast<Eigen::Index>(fused_width));
  return t;
}

EmbedTables EmbedTables::random(std::size_t vocab, std::size_t max_positions, std::size_t width,
                                std::size_t fused_width, std::uint64_t seed) {
  EmbedTables t = zeros(vocab, max_positions, width, fused_width);
  SeededRng rng(seed);
  fill_uniform(t.token, rng, -0.1, 0.1);
  fill_uniform(t.position, rng, -0.1, 0.1);
  fill_uniform(t.segment, rng, -0.1, 0.1);
  const double bound = 1.0 / std::sqrt(static_cast<double>(fused_width));
  fill_uniform(t.adapter, rng, -bound, bound);
  return t;
}

MultimodalSequence assemble_multimodal_input(const JointRepresentation& joint,
                                             std::span<const std::uint32_t> indication_tokens,
                                             const EmbedTables& tables, const AssemblyOptions& options) {
  const auto width = static_cast<Eigen::Index>(tables.width());
  require(tables.position.cols() == width && tables.segment.cols() == width && tables.adapter.rows() == width,
          "embedding tables disagree on width");
  require(tables.segment.rows() == 2, "segment table needs 2 rows");
  require(static_cast<std::size_t>(tables.adapter.cols()) == joint.width(),
          "adapter input " + std::to_string(tables.adapter.cols()) + " != fused width " +
              std::to_string(joint.width()));

  std::vector<std::size_t> visual;
  for (std::size_t n = 0; n < joint.region_count(); ++n)
    if (joint.in_target[n] || !options.drop_masked) visual.push_back(n);

  const std::size_t length = visual.size() + indication_tokens.size();
  if (length > tables.max_positions())
    fail(ErrorCode::PositionOverflow,
         "sequence of " + std::to_string(length) + " exceeds " + std::to_string(tables.max_positions()) + " positions");

  MultimodalSequence seq;
  seq.embeddings.resize(static_cast<Eigen::Index>(length), width);
  seq.segments.reserve(length);
  seq.positions.reserve(length);
  seq.regions.reserve(length);
  seq.masked.reserve(length);

  std::size_t pos = 0;
  for (std::size_t n : visual) {
    const auto row = static_cast<Eigen::Index>(n);
    seq.embeddings.row(static_cast<Eigen::Index>(pos)) =
        (tables.adapter * joint.values.row(row).transpose()).transpose() +
        tables.position.row(static_cast<Eigen::Index>(pos)) + tables.segment.row(0);
    seq.segments.push_back(Segment::Vision);
    seq.positions.push_back(pos);
    seq.regions.emplace_back(RegionId{static_cast<std::uint16_t>(n)});
    seq.masked.push_back(!joint.in_target[n]);
    ++pos;
  }
  for (std::uint32_t id : indication_tokens) {
    if (id >= tables.token.rows())
      fail(ErrorCode::ShapeMismatch, "token id " + std::to_string(id) + " outside the embedding table");
    seq.embeddings.row(static_cast<Eigen::Index>(pos)) = tables.token.row(id) +
                                                          tables.position.row(static_cast<Eigen::Index>(pos)) +
                                                          tables.segment.row(1);
    seq.segments.push_back(Segment::Text);
    seq.positions.push_back(pos);
    seq.regions.emplace_back(std::nullopt);
    seq.masked.push_back(false);
    ++pos;
  }
  return seq;
}

std::vector<std::uint32_t> hash_token_ids(std::string_view text, std::size_t vocab) {
  std::vector<std::uint32_t> ids;
  if (vocab == 0) return ids;
  for (const auto& tok : tokenize(text).tokens) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : tok) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    ids.push_back(static_cast<std::uint32_t>(h % vocab));
  }
  return ids;
}

}  // namespace radctl
