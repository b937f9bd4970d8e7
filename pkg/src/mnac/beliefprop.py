"""Loopy belief propagation on the device/channel-use bipartite graph.

Variables are per-device activity indicators; every channel use acts as a
factor tied to the devices its preamble row schedules.  Because the detector
law depends only on the scheduled-active count, a factor's outgoing messages
need just the count distribution of its other neighbors, which an exact
forward/backward dynamic program supplies in O(degree^2) per factor; no
2^degree enumeration, and no divisions (so no leave-one-out instability).

Messages live in the log2 domain and are clamped to +/-30 bits.  A compiled
kernel carries the per-factor DP when numba is importable (set
MNAC_DISABLE_NUMBA=1 to force the vectorized numpy fallback; both engines
implement the identical recursion).
"""

import math
from dataclasses import dataclass

import numpy as np

from .model import MeasurementVector, PreambleMatrix, transition_profile

__all__ = ["BpState", "bp_marginals", "factor_messages"]

MESSAGE_CLAMP_BITS = 30.0
_LOG_FLOOR = 1e-300  # keeps log2 finite before clamping


def _factor_sweep_py(r_edge, g_fac, ptr, out0, out1):
    """Per-factor forward/backward count DP over CSR-packed edges.

    For factor f with neighbor slots j = 0..d-1 holding incoming activity
    probabilities r_j, and per-count likelihoods g(0..d):

      backward:  B[j, w] = E[ g(w + count of slots >= j) ]   (valid for w <= j)
      forward:   alpha[w] = P(count of slots < j equals w)

    The message to slot j is S(beta) = sum_w alpha[w] * B[j+1, w + beta],
    written to out0/out1 in edge order.
    """
    n_fac = ptr.shape[0] - 1
    for f in range(n_fac):
        lo = ptr[f]
        hi = ptr[f + 1]
        d = hi - lo
        if d == 0:
            continue
        b = np.empty((d + 1, d + 1))
        for w in range(d + 1):
            b[d, w] = g_fac[f, w]
        for j in range(d - 1, -1, -1):
            rj = r_edge[lo + j]
            for w in range(d):
                b[j, w] = (1.0 - rj) * b[j + 1, w] + rj * b[j + 1, w + 1]
            b[j, d] = b[j + 1, d]
        alpha = np.zeros(d + 1)
        alpha[0] = 1.0
        for j in range(d):
            s0 = 0.0
            s1 = 0.0
            for w in range(j + 1):
                s0 += alpha[w] * b[j + 1, w]
                s1 += alpha[w] * b[j + 1, w + 1]
            out0[lo + j] = s0
            out1[lo + j] = s1
            rj = r_edge[lo + j]
            for w in range(j + 1, 0, -1):
                alpha[w] = alpha[w] * (1.0 - rj) + alpha[w - 1] * rj
            alpha[0] *= 1.0 - rj


def _load_kernel():
    import os

    if os.environ.get("MNAC_DISABLE_NUMBA"):
        return None
    try:
        from numba import njit
    except ImportError:
        return None
    return njit(cache=True, nogil=True)(_factor_sweep_py)


_KERNEL = _load_kernel()


def _factor_messages_numpy(r_edge, g_fac, ptr):
    """Vectorized fallback: same recursion as `_factor_sweep_py`, padded to the
    max degree with no-op slots (r = 0)."""
    degrees = np.diff(ptr)
    n_fac = degrees.shape[0]
    dmax = int(degrees.max())
    fac_of_edge = np.repeat(np.arange(n_fac), degrees)
    slot = np.arange(r_edge.shape[0]) - np.repeat(ptr[:-1], degrees)
    rpad = np.zeros((n_fac, dmax))
    rpad[fac_of_edge, slot] = r_edge
    b = np.empty((n_fac, dmax + 1, dmax + 1))
    b[:, dmax, :] = g_fac[:, : dmax + 1]
    for j in range(dmax - 1, -1, -1):
        rj = rpad[:, j : j + 1]
        b[:, j, :dmax] = (1.0 - rj) * b[:, j + 1, :dmax] + rj * b[:, j + 1, 1:]
        b[:, j, dmax] = b[:, j + 1, dmax]
    alpha = np.zeros((n_fac, dmax + 1))
    alpha[:, 0] = 1.0
    s0 = np.empty((n_fac, dmax))
    s1 = np.empty((n_fac, dmax))
    for j in range(dmax):
        nxt = b[:, j + 1, :]
        s0[:, j] = np.einsum("fw,fw->f", alpha, nxt)
        s1[:, j] = np.einsum("fw,fw->f", alpha[:, :dmax], nxt[:, 1:])
        rj = rpad[:, j : j + 1]
        alpha[:, 1:] = alpha[:, 1:] * (1.0 - rj) + alpha[:, :dmax] * rj
        alpha[:, 0] *= 1.0 - rpad[:, j]
    return s0[fac_of_edge, slot], s1[fac_of_edge, slot]


def _factor_messages_engine(r_edge, g_fac, ptr):
    if _KERNEL is not None:
        out0 = np.empty_like(r_edge)
        out1 = np.empty_like(r_edge)
        _KERNEL(r_edge, g_fac, ptr, out0, out1)
        return out0, out1
    return _factor_messages_numpy(r_edge, g_fac, ptr)


def factor_messages(incoming_active_probs, likelihood_by_count):
    """Outgoing messages of one count-symmetric factor, exactly.

    Parameters
    ----------
    incoming_active_probs : (d,) incoming P(neighbor active) per neighbor slot.
    likelihood_by_count : (d+1,) likelihood of the observed bit given the count.

    Returns
    -------
    (s_off, s_on) : each (d,).  s_off[j] / s_on[j] is the message value for
    neighbor j being inactive / active (unnormalized likelihoods).
    """
    r = np.ascontiguousarray(incoming_active_probs, dtype=np.float64)
    g = np.ascontiguousarray(likelihood_by_count, dtype=np.float64)
    if r.ndim != 1 or r.shape[0] == 0:
        raise ValueError("need at least one incoming message")
    if np.any(r < 0.0) or np.any(r > 1.0):
        raise ValueError("incoming probabilities must lie in [0, 1]")
    if g.ndim != 1 or g.shape[0] != r.shape[0] + 1:
        raise ValueError("likelihood table must have degree + 1 entries")
    ptr = np.array([0, r.shape[0]], dtype=np.int64)
    return _factor_messages_engine(r, g.reshape(1, -1), ptr)


@dataclass
class BpState:
    """Belief-propagation run summary: per-device activity marginals plus the
    final log2-domain messages keyed by the (channel-use, device) edge list."""

    marginals: np.ndarray
    iterations: int
    converged: bool
    edge_use: np.ndarray
    edge_device: np.ndarray
    fac_to_var: np.ndarray
    var_to_fac: np.ndarray


def _expit2(x):
    """Inverse of the log2-odds transform, overflow-safe."""
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp2(-x[pos]))
    ex = np.exp2(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def bp_marginals(z: MeasurementVector, preambles: PreambleMatrix, model,
                 prior: float, max_iters: int = 50, damping: float = 0.5,
                 tol: float = 1e-6) -> BpState:
    """Synchronous (flooding) loopy BP for per-device activity marginals.

    `model` supplies the channel constants; the per-count likelihood table is
    rebuilt here up to the largest row weight, which can exceed the table
    depth the model was built with.  Damping mixes each new factor message
    with the previous one; convergence is declared when no marginal moves by
    more than `tol` between sweeps.
    """
    if len(z) != preambles.n_uses:
        raise ValueError("measurement length must match the preamble rows")
    if not 0.0 < prior < 1.0:
        raise ValueError("prior must lie strictly inside (0, 1)")
    if not 0.0 <= damping < 1.0:
        raise ValueError("damping must lie in [0, 1)")
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    if not tol > 0.0:
        raise ValueError("tol must be positive")

    x = preambles.entries
    ell = preambles.total_devices
    edge_use, edge_device = np.nonzero(x)  # row-major: edges grouped by channel use
    prior_logit = math.log2(prior / (1.0 - prior))
    if edge_use.size == 0:
        return BpState(np.full(ell, prior), 0, True, edge_use, edge_device,
                       np.zeros(0), np.zeros(0))

    degrees = x.sum(axis=1, dtype=np.int64)
    ptr = np.concatenate(([0], np.cumsum(degrees)))
    dmax = int(degrees.max())
    prob_zero = transition_profile(model.params, dmax)
    g_fac = np.where(z.bits[:, None] == 0, prob_zero[None, :],
                     1.0 - prob_zero[None, :])
    g_fac = np.ascontiguousarray(g_fac)

    clamp = MESSAGE_CLAMP_BITS
    lam_f2v = np.zeros(edge_use.shape[0])
    lam_v2f = np.full(edge_use.shape[0], prior_logit)
    marg_prev = np.full(ell, prior)
    marginals = marg_prev
    converged = False
    iterations = 0
    for iterations in range(1, max_iters + 1):
        device_sum = np.bincount(edge_device, weights=lam_f2v, minlength=ell)
        lam_v2f = np.clip(prior_logit + device_sum[edge_device] - lam_f2v,
                          -clamp, clamp)
        r_edge = _expit2(lam_v2f)
        s0, s1 = _factor_messages_engine(r_edge, g_fac, ptr)
        lam_new = np.log2(np.maximum(s1, _LOG_FLOOR)) - np.log2(np.maximum(s0, _LOG_FLOOR))
        lam_new = np.clip(lam_new, -clamp, clamp)
        lam_f2v = (1.0 - damping) * lam_new + damping * lam_f2v
        device_sum = np.bincount(edge_device, weights=lam_f2v, minlength=ell)
        marginals = _expit2(prior_logit + device_sum)
        if np.max(np.abs(marginals - marg_prev)) < tol:
            converged = True
            break
        marg_prev = marginals
    return BpState(marginals, iterations, converged, edge_use, edge_device,
                   lam_f2v, lam_v2f)
