// Copyright 2026 The CDNMF Authors
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

#include "cdnmf/optim.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "cdnmf/datasets.h"
#include "cdnmf/errors.h"

namespace cdnmf {
namespace {

bool contrastive_active(const ModelState& state) {
  return state.views == ViewMode::kBoth && state.hyper.gamma > 0.0;
}

void check_finite(const DenseMatrix& m, const char* term) {
  if (!m.all_finite()) {
    throw NumericError(std::string("non-finite gradient in ") + term);
  }
}

void check_finite(double x, const char* term) {
  if (!std::isfinite(x)) throw NumericError(std::string("non-finite value of ") + term);
}

struct StackGradient {
  std::vector<DenseMatrix> factors;
  DenseMatrix rep;
};

// Gradient of ‖M − Ψ V‖² + α(Σ‖f(U_i)‖² + ‖f(V)‖²) with Ψ = U_1…U_p.
StackGradient recon_gradient(const FactorStack& stack, const DataMatrix& target, double alpha) {
  const auto& us = stack.factors;
  const std::size_t p = us.size();
  // prefix[i] = U_1…U_i (prefix[0] unused), suffix[i] = U_{i+1}…U_p.
  std::vector<DenseMatrix> prefix(p + 1), suffix(p + 1);
  prefix[1] = us[0];
  for (std::size_t i = 2; i <= p; ++i) prefix[i] = matmul(prefix[i - 1], us[i - 1]);
  const DenseMatrix& psi = prefix[p];
  const DenseMatrix& v = stack.representation;

  const DenseMatrix psi_t_m = transpose(multiply_tn(target, psi));
  const DenseMatrix m_vt = multiply(target, transpose(v));

  StackGradient g;
  g.rep = DenseMatrix(2.0 * (matmul_tn(psi, psi).eigen() * v.eigen() - psi_t_m.eigen()));
  const DenseMatrix g_psi(2.0 * (psi.eigen() * (v.eigen() * v.eigen().transpose()) - m_vt.eigen()));

  // suffix products, suffix[p] = identity of width r.
  suffix[p] = DenseMatrix::identity(v.rows());
  for (std::size_t i = p; i-- > 1;) suffix[i] = matmul(us[i], suffix[i + 1]);

  g.factors.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    // d/dU_{i+1} = (U_1…U_i)ᵀ G_Ψ (U_{i+2}…U_p)ᵀ
    DenseMatrix left = i == 0 ? g_psi : matmul_tn(prefix[i], g_psi);
    g.factors[i] = matmul_nt(left, suffix[i + 1]);
    g.factors[i].eigen() += 2.0 * alpha * us[i].eigen().cwiseMin(0.0);
  }
  g.rep.eigen() += 2.0 * alpha * v.eigen().cwiseMin(0.0);
  return g;
}

DenseMatrix reg_gradient(const DenseMatrix& rep, const SparseMatrix& laplacian, double beta) {
  // d tr(V L Vᵀ)/dV = 2 V L for symmetric L.
  DenseMatrix lv = spmm(laplacian, transpose(rep));
  return DenseMatrix((2.0 * beta) * lv.eigen().transpose());
}

double squared_norm(const DenseMatrix& m) { return m.empty() ? 0.0 : m.eigen().squaredNorm(); }

void axpy(DenseMatrix& p, double a, const DenseMatrix& g) {
  if (g.empty()) return;
  if (!p.same_shape(g)) throw ShapeError("gradient shape does not match its parameter");
  p.eigen() += a * g.eigen();
}

// Sign pattern of the head's hidden pre-activations over both views. The
// ReLU is not differentiable where an entry changes sign.
std::vector<bool> relu_pattern(const ModelState& state, const ProjectionHead& head) {
  std::vector<bool> pattern;
  if (!contrastive_active(state)) return pattern;
  for (const DenseMatrix* rep : {&state.topo.representation, &state.attr.representation}) {
    const DenseMatrix::Storage z =
        (head.w1.eigen() * rep->eigen()).colwise() + head.b1.eigen().col(0);
    for (Index i = 0; i < z.size(); ++i) pattern.push_back(z.data()[i] > 0.0);
  }
  return pattern;
}

bool is_penalized(const ModelState& state, const DenseMatrix* p) {
  auto in_stack = [&](const FactorStack& s) {
    if (p == &s.representation) return true;
    for (const auto& u : s.factors) {
      if (p == &u) return true;
    }
    return false;
  };
  return in_stack(state.topo) || in_stack(state.attr);
}

}  // namespace

double GradientBundle::global_norm() const {
  double s = 0.0;
  for (const auto& m : topo_factors) s += squared_norm(m);
  s += squared_norm(topo_rep);
  for (const auto& m : attr_factors) s += squared_norm(m);
  s += squared_norm(attr_rep);
  s += squared_norm(head.w1) + squared_norm(head.b1) + squared_norm(head.w2) +
       squared_norm(head.b2);
  return std::sqrt(s);
}

bool GradientBundle::all_finite() const { return std::isfinite(global_norm()); }

void OptimizerConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("lr must be > 0");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (grad_clip && !(*grad_clip > 0.0)) throw ConfigError("grad_clip must be > 0");
  if (steps_per_epoch < 1) throw ConfigError("steps_per_epoch must be >= 1");
  if (patience < 0) throw ConfigError("patience must be >= 0");
}

LossBreakdown total_loss(const ModelState& state, const ProjectionHead& head,
                         const NegativeSets& negs, const AttributedGraph& data) {
  LossBreakdown l;
  l.dnmf = loss_dnmf(state, data.adjacency, data.features);
  l.reg = loss_reg(state);
  if (contrastive_active(state)) l.cl = loss_contrastive(state, head, negs, state.hyper.tau);
  l.total = l.dnmf + state.hyper.beta * l.reg + state.hyper.gamma * l.cl;
  return l;
}

GradientBundle gradients(const ModelState& state, const ProjectionHead& head,
                         const NegativeSets& negs, const AttributedGraph& data,
                         LossBreakdown* loss) {
  const HyperParams& hp = state.hyper;
  GradientBundle g;
  if (state.uses_topology()) {
    StackGradient s = recon_gradient(state.topo, DataMatrix(data.adjacency), hp.alpha);
    g.topo_factors = std::move(s.factors);
    g.topo_rep = std::move(s.rep);
    for (const auto& m : g.topo_factors) check_finite(m, "topology reconstruction");
    check_finite(g.topo_rep, "topology reconstruction");
    const DenseMatrix reg = reg_gradient(state.topo.representation, state.laplacian, hp.beta);
    check_finite(reg, "topology graph regularization");
    g.topo_rep.eigen() += reg.eigen();
  }
  if (state.uses_attributes()) {
    StackGradient s = recon_gradient(state.attr, data.features, hp.alpha);
    g.attr_factors = std::move(s.factors);
    g.attr_rep = std::move(s.rep);
    for (const auto& m : g.attr_factors) check_finite(m, "attribute reconstruction");
    check_finite(g.attr_rep, "attribute reconstruction");
    const DenseMatrix reg = reg_gradient(state.attr.representation, state.laplacian, hp.beta);
    check_finite(reg, "attribute graph regularization");
    g.attr_rep.eigen() += reg.eigen();
  }

  LossBreakdown l;
  if (contrastive_active(state)) {
    ContrastiveGradient c = contrastive_gradient(state, head, negs, hp.tau);
    check_finite(c.loss, "contrastive loss");
    check_finite(c.d_topo, "contrastive loss");
    check_finite(c.d_attr, "contrastive loss");
    g.topo_rep.eigen() += hp.gamma * c.d_topo.eigen();
    g.attr_rep.eigen() += hp.gamma * c.d_attr.eigen();
    g.head = std::move(c.d_head);
    for (DenseMatrix* m : {&g.head.w1, &g.head.b1, &g.head.w2, &g.head.b2}) {
      check_finite(*m, "projection head");
      m->eigen() *= hp.gamma;
    }
    l.cl = c.loss;
  }
  if (loss) {
    l.dnmf = loss_dnmf(state, data.adjacency, data.features);
    l.reg = loss_reg(state);
    check_finite(l.dnmf, "DNMF loss");
    check_finite(l.reg, "graph regularization loss");
    l.total = l.dnmf + hp.beta * l.reg + hp.gamma * l.cl;
    *loss = l;
  }
  return g;
}

void sgd_step(ModelState& state, ProjectionHead& head, const GradientBundle& grads,
              const OptimizerConfig& config) {
  double scale = config.lr;
  if (config.grad_clip) {
    const double norm = grads.global_norm();
    if (norm > *config.grad_clip) scale *= *config.grad_clip / norm;
  }
  if (scale == 0.0) return;
  for (std::size_t i = 0; i < grads.topo_factors.size(); ++i) {
    axpy(state.topo.factors[i], -scale, grads.topo_factors[i]);
  }
  axpy(state.topo.representation, -scale, grads.topo_rep);
  for (std::size_t i = 0; i < grads.attr_factors.size(); ++i) {
    axpy(state.attr.factors[i], -scale, grads.attr_factors[i]);
  }
  axpy(state.attr.representation, -scale, grads.attr_rep);
  axpy(head.w1, -scale, grads.head.w1);
  axpy(head.b1, -scale, grads.head.b1);
  axpy(head.w2, -scale, grads.head.w2);
  axpy(head.b2, -scale, grads.head.b2);
}

std::vector<DenseMatrix*> parameters(ModelState& state, ProjectionHead& head) {
  std::vector<DenseMatrix*> out;
  if (state.uses_topology()) {
    for (auto& u : state.topo.factors) out.push_back(&u);
    out.push_back(&state.topo.representation);
  }
  if (state.uses_attributes()) {
    for (auto& u : state.attr.factors) out.push_back(&u);
    out.push_back(&state.attr.representation);
  }
  if (contrastive_active(state)) {
    for (DenseMatrix* m : {&head.w1, &head.b1, &head.w2, &head.b2}) out.push_back(m);
  }
  return out;
}

std::vector<const DenseMatrix*> gradient_list(const ModelState& state,
                                              const GradientBundle& grads) {
  std::vector<const DenseMatrix*> out;
  if (state.uses_topology()) {
    for (const auto& u : grads.topo_factors) out.push_back(&u);
    out.push_back(&grads.topo_rep);
  }
  if (state.uses_attributes()) {
    for (const auto& u : grads.attr_factors) out.push_back(&u);
    out.push_back(&grads.attr_rep);
  }
  if (contrastive_active(state)) {
    for (const DenseMatrix* m : {&grads.head.w1, &grads.head.b1, &grads.head.w2, &grads.head.b2}) {
      out.push_back(m);
    }
  }
  return out;
}

double fd_check(const ModelState& state, const ProjectionHead& head, const NegativeSets& negs,
                const AttributedGraph& data, const FdCheckOptions& options) {
  if (!(options.h > 0.0)) throw DomainError("finite-difference step must be > 0");
  const double margin = options.kink_margin.value_or(10.0 * options.h);
  const GradientBundle grads = gradients(state, head, negs, data);

  ModelState probe = state;
  ProjectionHead probe_head = head;
  std::vector<DenseMatrix*> params = parameters(probe, probe_head);
  const std::vector<const DenseMatrix*> analytic = gradient_list(state, grads);

  std::vector<std::pair<std::size_t, Index>> coords;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (Index k = 0; k < params[p]->size(); ++k) {
      const double x = params[p]->data()[static_cast<std::size_t>(k)];
      if (is_penalized(probe, params[p]) && std::abs(x) < margin) continue;
      coords.push_back({p, k});
    }
  }
  if (coords.empty()) return 0.0;

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, coords.size() - 1);
  double worst = 0.0;
  // Fourth-order central difference
  //   f' ≈ (−f(x+2h) + 8f(x+h) − 8f(x−h) + f(x−2h)) / 12h,
  // whose O(h⁴) truncation error allows a step large enough to keep round-off
  // small on losses of order α. Probes whose stencil straddles a ReLU kink
  // in the projection head are redrawn; the attempt cap keeps pathological
  // states from looping forever.
  const double offsets[4] = {2.0, 1.0, -1.0, -2.0};
  const double weights[4] = {-1.0, 8.0, -8.0, 1.0};
  const std::vector<bool> base_pattern = relu_pattern(probe, probe_head);
  int taken = 0;
  for (int attempt = 0; taken < options.samples && attempt < 20 * options.samples; ++attempt) {
    const auto [p, k] = coords[pick(rng)];
    double& x = params[p]->data()[static_cast<std::size_t>(k)];
    const double saved = x;
    double numeric = 0.0;
    bool crosses = false;
    for (int t = 0; t < 4 && !crosses; ++t) {
      x = saved + offsets[t] * options.h;
      numeric += weights[t] * total_loss(probe, probe_head, negs, data).total;
      crosses = relu_pattern(probe, probe_head) != base_pattern;
    }
    x = saved;
    if (crosses) continue;
    ++taken;
    numeric /= 12.0 * options.h;
    const double exact = analytic[p]->data()[static_cast<std::size_t>(k)];
    const double denom = std::max({std::abs(exact), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(exact - numeric) / denom);
  }
  return worst;
}

}  // namespace cdnmf
