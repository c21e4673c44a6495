"""Rank-based criterion functions.

The core objective rewards candidate functions whose ordering of the
regressors lines up with large outcomes:

    Q_n(phi) = 1/(n(n-1)) * sum_i  y_i * #{ j != i : phi_j < phi_i }.

Because only the ordering of phi enters, every variant below is invariant
under strictly increasing transformations of the candidate function.  Four
variants are provided: the plain criterion, an exact-match restriction for
discrete controls, a kernel-weighted form around a fixed control value, and
a pairwise kernel form that weights pairs by their control distance.  Each
fast implementation has an O(n^2) brute-force counterpart used as a
reference in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np


@dataclass(frozen=True, eq=False)
class Sample:
    """Observed data: outcome y, special regressors z, optional controls w.

    Arrays are copied, validated (consistent lengths, finite entries) and
    frozen; rows with missing values must be dropped before construction.
    """

    y: np.ndarray
    z: np.ndarray
    w: Optional[np.ndarray] = None

    def __post_init__(self):
        y = np.array(self.y, dtype=float).ravel()
        z = np.atleast_2d(np.array(self.z, dtype=float))
        if z.shape[0] == 1 and y.size > 1 and z.shape[1] == y.size:
            z = z.T
        z = np.ascontiguousarray(z)
        w = None
        if self.w is not None:
            w = np.array(self.w, dtype=float)
            if w.ndim == 1:
                w = w[:, None]
        if z.shape[0] != y.size or (w is not None and w.shape[0] != y.size):
            raise ValueError("y, z, w must have the same number of rows")
        for name, a in (("y", y), ("z", z)) + ((("w", w),) if w is not None else ()):
            if not np.all(np.isfinite(a)):
                raise ValueError(f"non-finite values in {name}; drop missing rows first")
        for a in (y, z) + ((w,) if w is not None else ()):
            a.flags.writeable = False
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def d_z(self) -> int:
        return self.z.shape[1]

    @property
    def d_w(self) -> int:
        return 0 if self.w is None else self.w.shape[1]


_KERNEL_FAMILIES = ("uniform", "gaussian", "epanechnikov")


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """Product kernel: family plus one bandwidth per control dimension."""

    family: str
    bandwidths: np.ndarray

    def __post_init__(self):
        if self.family not in _KERNEL_FAMILIES:
            raise ValueError(f"kernel family must be one of {_KERNEL_FAMILIES}")
        s = np.asarray(self.bandwidths, dtype=float).ravel()
        if s.size == 0 or np.any(s <= 0) or not np.all(np.isfinite(s)):
            raise ValueError("bandwidths must be positive reals")
        s.flags.writeable = False
        object.__setattr__(self, "bandwidths", s)


def _kernel_1d(family: str, u: np.ndarray) -> np.ndarray:
    if family == "uniform":
        return (np.abs(u) < 1.0).astype(float)
    if family == "gaussian":
        return np.exp(-0.5 * u * u) / np.sqrt(2.0 * np.pi)
    # epanechnikov
    return np.where(np.abs(u) < 1.0, 0.75 * (1.0 - u * u), 0.0)


def kernel_weights(spec: KernelSpec, w: np.ndarray, w0) -> np.ndarray:
    """Product kernel weights of each row of w relative to the point w0."""
    w = np.atleast_2d(np.asarray(w, dtype=float))
    w0 = np.asarray(w0, dtype=float).ravel()
    if w.shape[1] != spec.bandwidths.size or w0.size != spec.bandwidths.size:
        raise ValueError("control dimension does not match bandwidth vector")
    u = (w - w0[None, :]) / spec.bandwidths[None, :]
    return np.prod(_kernel_1d(spec.family, u), axis=1)


def kernel_weight(spec: KernelSpec, w_i, w0) -> float:
    """Product kernel weight for a single control vector."""
    return float(kernel_weights(spec, np.atleast_2d(np.asarray(w_i, dtype=float)), w0)[0])


class WindowedValue(NamedTuple):
    """Criterion value plus the number of observations that carried weight."""

    value: float
    n_used: int

    @property
    def empty(self) -> bool:
        return self.n_used < 2


# --------------------------------------------------------------------------
# ranking
# --------------------------------------------------------------------------


def rank_strict_less(values) -> np.ndarray:
    """out[i] = #{ j != i : values[j] < values[i] }; ties contribute zero.

    Runs in O(n log n): a sort followed by a binary search that returns,
    for each value, the index of the first occurrence of its tie group.
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("need at least one value")
    sv = np.sort(v)
    return np.searchsorted(sv, v, side="left")


def _weighted_less_sums(phi: np.ndarray, u: np.ndarray) -> np.ndarray:
    """out[i] = sum of u[j] over j with phi[j] < phi[i] (weighted ranking)."""
    order = np.argsort(phi, kind="stable")
    ps = phi[order]
    prefix = np.concatenate(([0.0], np.cumsum(u[order])))
    return prefix[np.searchsorted(ps, phi, side="left")]


# --------------------------------------------------------------------------
# criterion variants
# --------------------------------------------------------------------------


def rank_criterion(sample: Sample, phi_values) -> float:
    """Plain rank criterion: 1/(n(n-1)) * sum_i y_i * rank_strict_less(phi)[i]."""
    phi = np.asarray(phi_values, dtype=float).ravel()
    n = sample.n
    if phi.size != n:
        raise ValueError("phi_values length must equal the sample size")
    if n < 2:
        raise ValueError("need at least two observations")
    return float(sample.y @ rank_strict_less(phi)) / (n * (n - 1))


def rank_criterion_discrete_w(sample: Sample, phi_values, w0) -> WindowedValue:
    """Criterion restricted to the subsample with controls exactly equal to w0.

    Normalized by m(m-1) over the m matching rows; returns value 0 with
    n_used < 2 (``empty`` flag) when the cell is too small.
    """
    if sample.w is None:
        raise ValueError("sample has no controls")
    phi = np.asarray(phi_values, dtype=float).ravel()
    if phi.size != sample.n:
        raise ValueError("phi_values length must equal the sample size")
    w0 = np.asarray(w0, dtype=float).ravel()
    mask = np.all(sample.w == w0[None, :], axis=1)
    m = int(np.count_nonzero(mask))
    if m < 2:
        return WindowedValue(0.0, m)
    sub_y = sample.y[mask]
    sub_phi = phi[mask]
    value = float(sub_y @ rank_strict_less(sub_phi)) / (m * (m - 1))
    return WindowedValue(value, m)


def rank_criterion_weighted(
    sample: Sample, phi_values, w0, spec: KernelSpec
) -> WindowedValue:
    """Kernel-weighted criterion around the control point w0.

    General form: sum over ordered pairs i != j of
    K_s(W_i - w0) * y_i * K_s(W_j - w0) * 1{phi_i > phi_j}, normalized by
    n(n-1).  With a uniform kernel the weights are window indicators, so
    the sum collapses to the plain rank-sum over the subsample inside the
    window (fast path); an empty window is flagged via ``n_used``.
    """
    if sample.w is None:
        raise ValueError("sample has no controls")
    phi = np.asarray(phi_values, dtype=float).ravel()
    n = sample.n
    if phi.size != n:
        raise ValueError("phi_values length must equal the sample size")
    if n < 2:
        raise ValueError("need at least two observations")
    u = kernel_weights(spec, sample.w, w0)
    if spec.family == "uniform":
        mask = u > 0.0
        m = int(np.count_nonzero(mask))
        if m < 2:
            return WindowedValue(0.0, m)
        sub_y = sample.y[mask]
        sub_phi = phi[mask]
        value = float(sub_y @ rank_strict_less(sub_phi)) / (n * (n - 1))
        return WindowedValue(value, m)
    sums = _weighted_less_sums(phi, u)
    value = float((u * sample.y) @ sums) / (n * (n - 1))
    return WindowedValue(value, int(np.count_nonzero(u > 0.0)))


def rank_criterion_pairwise(sample: Sample, phi_values, spec: KernelSpec) -> float:
    """Pairwise-kernel criterion: weights each ordered pair by K_s(W_i - W_j).

    sum_{i != j} y_i * K_s(W_i - W_j) * 1{phi_i > phi_j} / (n(n-1)).
    Inherently O(n^2); computed in row blocks to bound memory.
    """
    if sample.w is None:
        raise ValueError("sample has no controls")
    phi = np.asarray(phi_values, dtype=float).ravel()
    n = sample.n
    if phi.size != n:
        raise ValueError("phi_values length must equal the sample size")
    if n < 2:
        raise ValueError("need at least two observations")
    return float(sample.y @ pairwise_weighted_less_sums(phi, sample.w, spec)) / (n * (n - 1))


def pairwise_weighted_less_sums(
    phi: np.ndarray, w: np.ndarray, spec: KernelSpec, block: int = 256
) -> np.ndarray:
    """out[i] = sum_j K_s(W_i - W_j) * 1{phi_j < phi_i}, in row blocks."""
    n = phi.size
    s = spec.bandwidths
    out = np.empty(n)
    for start in range(0, n, block):
        stop = min(start + block, n)
        u = (w[start:stop, None, :] - w[None, :, :]) / s[None, None, :]
        kw = np.prod(_kernel_1d(spec.family, u), axis=2)
        ind = phi[None, :] < phi[start:stop, None]
        out[start:stop] = np.sum(kw * ind, axis=1)
    return out


# --------------------------------------------------------------------------
# brute-force references (used as oracles by the test suite)
# --------------------------------------------------------------------------


def bruteforce_rank_strict_less(values) -> np.ndarray:
    v = np.asarray(values, dtype=float).ravel()
    n = v.size
    out = np.zeros(n, dtype=np.intp)
    for i in range(n):
        for j in range(n):
            if j != i and v[j] < v[i]:
                out[i] += 1
    return out


def bruteforce_rank_criterion(sample: Sample, phi_values) -> float:
    phi = np.asarray(phi_values, dtype=float).ravel()
    n = sample.n
    total = 0.0
    for i in range(n):
        for j in range(n):
            if j != i and phi[i] > phi[j]:
                total += sample.y[i]
    return total / (n * (n - 1))


def bruteforce_rank_criterion_discrete_w(sample: Sample, phi_values, w0) -> float:
    """Triple-indicator double loop, normalized by m(m-1) over the cell."""
    phi = np.asarray(phi_values, dtype=float).ravel()
    w0 = np.asarray(w0, dtype=float).ravel()
    match = [bool(np.all(sample.w[i] == w0)) for i in range(sample.n)]
    m = sum(match)
    if m < 2:
        return 0.0
    total = 0.0
    for i in range(sample.n):
        for j in range(sample.n):
            if j != i and match[i] and match[j] and phi[i] > phi[j]:
                total += sample.y[i]
    return total / (m * (m - 1))


def bruteforce_rank_criterion_weighted(sample: Sample, phi_values, w0, spec: KernelSpec) -> float:
    phi = np.asarray(phi_values, dtype=float).ravel()
    n = sample.n
    total = 0.0
    for i in range(n):
        ui = kernel_weight(spec, sample.w[i], w0)
        for j in range(n):
            if j != i and phi[i] > phi[j]:
                total += ui * sample.y[i] * kernel_weight(spec, sample.w[j], w0)
    return total / (n * (n - 1))


def bruteforce_rank_criterion_pairwise(sample: Sample, phi_values, spec: KernelSpec) -> float:
    phi = np.asarray(phi_values, dtype=float).ravel()
    n = sample.n
    total = 0.0
    for i in range(n):
        for j in range(n):
            if j != i and phi[i] > phi[j]:
                total += sample.y[i] * kernel_weight(spec, sample.w[i] - sample.w[j], np.zeros(sample.d_w))
    return total / (n * (n - 1))
