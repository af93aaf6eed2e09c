#include "clic/losses/implicit.hpp"

#include <cmath>
#include <vector>

#include "clic/error.hpp"
#include "clic/losses/targets.hpp"

namespace clic::losses {
namespace {

struct Stacked {
  Matrix input;
  std::vector<Eigen::Index> offsets;  // size = groups + 1
};

Stacked stack_sets(const EnergyModel& model, std::span<const ActionSampleSet> sets) {
  Stacked s;
  Eigen::Index rows = 0;
  s.offsets.push_back(0);
  for (const auto& set : sets) {
    if (set.size() == 0) throw UsageError("loss: empty action sample set");
    rows += set.size();
    s.offsets.push_back(rows);
  }
  Matrix states(rows, model.state_dim());
  Matrix actions(rows, model.action_dim());
  for (std::size_t g = 0; g < sets.size(); ++g) {
    const auto n = sets[g].size();
    if (sets[g].state.size() != model.state_dim()) {
      throw ConfigError("loss: state width mismatch");
    }
    states.middleRows(s.offsets[g], n) = sets[g].state.transpose().replicate(n, 1);
    actions.middleRows(s.offsets[g], n) = sets[g].actions;
  }
  s.input = model.join(states, actions);
  return s;
}

// log softmax(-E) over a segment.
Vector log_policy(const Vector& energies) {
  const double lo = energies.minCoeff();
  const double lse = std::log((-(energies.array() - lo)).exp().sum()) - lo;
  return (-energies.array() - lse).matrix();
}

LossReport finish(const EnergyModel& model, const numkit::ForwardCache& cache,
                  const Matrix& out_grads, double value) {
  LossReport report;
  report.value = value;
  report.main_term = value;
  report.grads = numkit::mlp_backward(model.spec(), model.params(), cache, out_grads)
                     .param_grads;
  return report;
}

}  // namespace

LossReport kl_loss(const EnergyModel& model, std::span<const ActionSampleSet> sets,
                   std::span<const Vector> targets) {
  if (sets.empty()) throw UsageError("kl_loss: empty batch");
  if (sets.size() != targets.size()) throw UsageError("kl_loss: sets and targets differ in count");
  const Stacked st = stack_sets(model, sets);
  auto fwd = numkit::mlp_forward(model.spec(), model.params(), st.input);
  const double inv_batch = 1.0 / static_cast<double>(sets.size());

  Matrix out_grads(st.input.rows(), 1);
  double value = 0.0;
  for (std::size_t g = 0; g < sets.size(); ++g) {
    const auto begin = st.offsets[g];
    const auto n = st.offsets[g + 1] - begin;
    const Vector& t = targets[g];
    if (t.size() != n) throw UsageError("kl_loss: target not aligned with samples");
    const Vector e = fwd.outputs.col(0).segment(begin, n);
    const Vector logp = log_policy(e);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (t(i) > 0.0) value += inv_batch * t(i) * (std::log(t(i)) - logp(i));
    }
    // dKL/dE_i = t_i - p_i
    out_grads.col(0).segment(begin, n) =
        inv_batch * (t.array() - logp.array().exp()).matrix();
  }
  return finish(model, fwd.cache, out_grads, value);
}

LossReport kl_loss(const EnergyModel& model, const ActionSampleSet& set,
                   const Vector& target) {
  return kl_loss(model, std::span<const ActionSampleSet>(&set, 1),
                 std::span<const Vector>(&target, 1));
}

LossReport kl_loss_through_target(const EnergyModel& model,
                                  std::span<const ActionSampleSet> sets,
                                  std::span<const Vector> obs_probs) {
  if (sets.empty()) throw UsageError("kl_loss: empty batch");
  if (sets.size() != obs_probs.size()) throw UsageError("kl_loss: sets and observations differ in count");
  const Stacked st = stack_sets(model, sets);
  auto fwd = numkit::mlp_forward(model.spec(), model.params(), st.input);
  const double inv_batch = 1.0 / static_cast<double>(sets.size());

  Matrix out_grads(st.input.rows(), 1);
  double value = 0.0;
  for (std::size_t g = 0; g < sets.size(); ++g) {
    const auto begin = st.offsets[g];
    const auto n = st.offsets[g + 1] - begin;
    const Vector& o = obs_probs[g];
    if (o.size() != n) throw UsageError("kl_loss: observations not aligned with samples");
    const Vector e = fwd.outputs.col(0).segment(begin, n);
    const Vector logp = log_policy(e);
    const Vector t = target_policy_weighted(o, e);
    // L = sum t log o - log Z_t + log Z_p, so
    // dL/dE_j = t_j (1 - log o_j + sum_i t_i log o_i) - p_j.
    double mean_log_o = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (t(i) > 0.0) {
        mean_log_o += t(i) * std::log(o(i));
        value += inv_batch * t(i) * (std::log(t(i)) - logp(i));
      }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const double tj = t(j) > 0.0 ? t(j) * (1.0 - std::log(o(j)) + mean_log_o) : 0.0;
      out_grads(begin + j, 0) = inv_batch * (tj - std::exp(logp(j)));
    }
  }
  return finish(model, fwd.cache, out_grads, value);
}

LossReport infonce_loss(const EnergyModel& model, std::span<const InfoNceItem> items) {
  if (items.empty()) throw UsageError("infonce_loss: empty batch");
  Eigen::Index rows = 0;
  for (const auto& item : items) {
    if (item.negatives.rows() == 0) throw UsageError("infonce_loss: no negatives");
    rows += 1 + item.negatives.rows();
  }
  Matrix states(rows, model.state_dim());
  Matrix actions(rows, model.action_dim());
  std::vector<Eigen::Index> offsets{0};
  for (const auto& item : items) {
    const auto begin = offsets.back();
    const auto n = 1 + item.negatives.rows();
    states.middleRows(begin, n) = item.state.transpose().replicate(n, 1);
    actions.row(begin) = item.positive.transpose();
    actions.middleRows(begin + 1, n - 1) = item.negatives;
    offsets.push_back(begin + n);
  }
  auto fwd = numkit::mlp_forward(model.spec(), model.params(), model.join(states, actions));
  const double inv_batch = 1.0 / static_cast<double>(items.size());
  Matrix out_grads(rows, 1);
  double value = 0.0;
  for (std::size_t g = 0; g < items.size(); ++g) {
    const auto begin = offsets[g];
    const auto n = offsets[g + 1] - begin;
    const Vector e = fwd.outputs.col(0).segment(begin, n);
    // L = E_0 + log sum_j exp(-E_j)
    const double lo = e.minCoeff();
    const Vector w = (-(e.array() - lo)).exp().matrix();
    const double z = w.sum();
    value += inv_batch * (e(0) - lo + std::log(z));
    out_grads.col(0).segment(begin, n) = -inv_batch * w / z;
    out_grads(begin, 0) += inv_batch;
  }
  return finish(model, fwd.cache, out_grads, value);
}

LossReport infonce_loss(const EnergyModel& model, const Vector& state,
                        const Vector& positive, const Matrix& negatives) {
  InfoNceItem item{state, positive, negatives};
  return infonce_loss(model, std::span<const InfoNceItem>(&item, 1));
}

LossReport pvp_loss(const EnergyModel& model, const Matrix& states,
                    const Matrix& robot_actions, const Matrix& human_actions) {
  const auto b = states.rows();
  if (b == 0) throw UsageError("pvp_loss: empty batch");
  if (robot_actions.rows() != b || human_actions.rows() != b) {
    throw UsageError("pvp_loss: rows do not align");
  }
  Matrix all_states(2 * b, states.cols());
  all_states << states, states;
  Matrix all_actions(2 * b, model.action_dim());
  all_actions << human_actions, robot_actions;
  auto fwd = numkit::mlp_forward(model.spec(), model.params(),
                                 model.join(all_states, all_actions));
  const double inv_batch = 1.0 / static_cast<double>(b);
  const Vector e = fwd.outputs.col(0);
  const Vector dh = (e.head(b).array() + 1.0).matrix();
  const Vector dr = (e.tail(b).array() - 1.0).matrix();
  const double value = inv_batch * (dh.squaredNorm() + dr.squaredNorm());
  Matrix out_grads(2 * b, 1);
  out_grads.col(0).head(b) = 2.0 * inv_batch * dh;
  out_grads.col(0).tail(b) = 2.0 * inv_batch * dr;
  return finish(model, fwd.cache, out_grads, value);
}

LossReport gradient_penalty(const EnergyModel& model, const Matrix& states,
                            const Matrix& actions,
                            const GradientPenaltyConfig& config) {
  if (!(config.delta > 0.0) || config.margin < 0.0) {
    throw UsageError("gradient_penalty: need delta > 0 and margin >= 0");
  }
  const auto n = actions.rows();
  if (n == 0) throw UsageError("gradient_penalty: no actions");
  if (states.rows() != n) throw UsageError("gradient_penalty: rows do not align");
  const int dim = model.action_dim();
  LossReport report;
  report.grads = numkit::MlpParams::zeros(model.spec());
  if (config.weight == 0.0) return report;

  // Probe rows: for sample r and axis k, row 2*(r*dim + k) is +delta and the
  // next row is -delta.
  const auto probes = 2 * n * dim;
  Matrix probe_states(probes, states.cols());
  Matrix probe_actions(probes, dim);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (int k = 0; k < dim; ++k) {
      const auto row = 2 * (r * dim + k);
      probe_states.row(row) = states.row(r);
      probe_states.row(row + 1) = states.row(r);
      probe_actions.row(row) = actions.row(r);
      probe_actions.row(row + 1) = actions.row(r);
      probe_actions(row, k) += config.delta;
      probe_actions(row + 1, k) -= config.delta;
    }
  }
  auto fwd = numkit::mlp_forward(model.spec(), model.params(),
                                 model.join(probe_states, probe_actions));
  const Vector e = fwd.outputs.col(0);
  Matrix out_grads = Matrix::Zero(probes, 1);
  double value = 0.0;
  const double scale = config.weight / static_cast<double>(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    Vector g(dim);
    for (int k = 0; k < dim; ++k) {
      const auto row = 2 * (r * dim + k);
      g(k) = (e(row) - e(row + 1)) / (2.0 * config.delta);
    }
    const double norm = g.norm();
    const double excess = norm - config.margin;
    if (excess <= 0.0 || norm == 0.0) continue;
    value += scale * excess * excess;
    const double c = scale * 2.0 * excess / norm / (2.0 * config.delta);
    for (int k = 0; k < dim; ++k) {
      const auto row = 2 * (r * dim + k);
      out_grads(row, 0) = c * g(k);
      out_grads(row + 1, 0) = -c * g(k);
    }
  }
  report = finish(model, fwd.cache, out_grads, value);
  report.main_term = 0.0;
  report.penalty_term = value;
  return report;
}

}  // namespace clic::losses
