#pragma once

#include <vector>

#include "dnlab/numerics.hpp"
#include "dnlab/sturm1d.hpp"

namespace dnlab::iso {

/// One Poeschel-Trubowitz flow: eigenfunction index k >= 1, flow time t.
struct FlowParam {
  int k = 1;
  double t = 0.0;
};

/// Applied left to right; empty is the identity.
using FlowChain = std::vector<FlowParam>;

/// theta(x) = 1 + (e^t - 1) * int_x^1 phi^2. Requires int phi^2 = 1 within 1e-6.
SampledFn1D theta(const SampledFn1D& phi, double t);

/// (log theta)'' on phi's grid, using theta' = -(e^t-1) phi^2 and
/// theta'' = -2 (e^t-1) phi phi'. Identically zero at t = 0.
SampledFn1D log_theta_d2(const sturm::Eigenfunction& phi, double t);

/// Q - 2 (log theta)'' with theta built from the k-th eigenfunction of Q.
/// Returns q itself when t == 0.
sturm::Potential1D pt_deform(const sturm::Potential1D& q, FlowParam p);

/// Same, with the eigenfunction supplied.
sturm::Potential1D pt_deform(const sturm::Potential1D& q, const sturm::Eigenfunction& phi,
                             double t);

/// Each step recomputes phi_k from the current potential.
sturm::Potential1D apply_chain(const sturm::Potential1D& q, const FlowChain& chain);

/// V - (2 / f^4) (log theta)'', where theta comes from the k-th eigenfunction
/// of the combined potential q_f + (V - lambda) f^4 of the n-dimensional warped
/// cylinder. The result satisfies q_f + (V_{k,t} - lambda) f^4 = Q_{k,t}.
Function1D deform_V(const Function1D& V, const Function1D& f, int n, double lambda, FlowParam p,
                    const Grid1D& grid);

/// Sampled variant; f and V share a grid.
SampledFn1D deform_V(const SampledFn1D& V, const SampledFn1D& f, int n, double lambda,
                     FlowParam p);

/// Left-to-right composition of deform_V.
Function1D apply_chain_V(const Function1D& V, const Function1D& f, int n, double lambda,
                         const FlowChain& chain, const Grid1D& grid);

}  // namespace dnlab::iso
