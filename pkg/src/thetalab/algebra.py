"""Exact combinatorial and polynomial primitives shared by the whole pipeline.

Branch points are addressed by 1-based integer indices plus the distinguished
symbol ``INF`` for the point over infinity.  Index sets keep their members in
ascending order with ``INF`` last, so every product below has a reproducible
sign from run to run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np


class _Infinity:
    """Singleton marker for the branch point over infinity."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"


INF = _Infinity()


@dataclass(frozen=True)
class IndexSet:
    """Ordered set of branch indices: ascending integers, INF last."""

    finite: tuple[int, ...]
    infinity: bool = False

    @classmethod
    def of(cls, members: Iterable) -> "IndexSet":
        fins = []
        has_inf = False
        for m in members:
            if m is INF:
                if has_inf:
                    raise ValueError("INF appears more than once")
                has_inf = True
            else:
                fins.append(int(m))
        if len(set(fins)) != len(fins):
            raise ValueError("duplicate finite indices in IndexSet")
        return cls(tuple(sorted(fins)), has_inf)

    def __iter__(self):
        yield from self.finite
        if self.infinity:
            yield INF

    def __len__(self):
        return len(self.finite) + (1 if self.infinity else 0)

    def __contains__(self, m):
        if m is INF:
            return self.infinity
        return m in self.finite

    def union(self, other: "IndexSet") -> "IndexSet":
        if self.infinity and other.infinity:
            raise ValueError("both sets contain INF")
        return IndexSet.of(list(self) + list(other))

    def without(self, *members) -> "IndexSet":
        drop_inf = any(m is INF for m in members)
        drop_fin = {m for m in members if m is not INF}
        return IndexSet(
            tuple(i for i in self.finite if i not in drop_fin),
            self.infinity and not drop_inf,
        )

    def label(self) -> str:
        parts = [str(i) for i in self.finite]
        if self.infinity:
            parts.append("inf")
        return "{" + ",".join(parts) + "}"


@dataclass(frozen=True)
class RootOfUnityTag:
    """Nearest n-th root of unity to a ratio, with classification residuals.

    The nearest index is always reported; ``ok`` records whether both the
    modulus deviation and the phase residual stayed inside the tolerance.
    """

    order: int
    index: int
    phase_residual: float
    modulus_error: float
    ok: bool

    @property
    def value(self) -> complex:
        return np.exp(2j * np.pi * self.index / self.order)


def classify_root_of_unity(z: complex, order: int, tol: float) -> RootOfUnityTag:
    """Classify ``z`` as the nearest ``order``-th root of unity.

    ``ok`` is False when ``| |z| - 1 | > tol`` or the angular residual
    (in radians) exceeds ``tol``.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    z = complex(z)
    mod_err = abs(abs(z) - 1.0)
    ang = np.angle(z)
    k = int(np.round(ang * order / (2.0 * np.pi))) % order
    residual = abs(np.angle(z * np.exp(-2j * np.pi * k / order)))
    ok = (mod_err <= tol) and (residual <= tol)
    return RootOfUnityTag(order=order, index=k, phase_residual=float(residual),
                          modulus_error=float(mod_err), ok=bool(ok))


def elementary_symmetric(values: Sequence[complex], p: int) -> complex:
    """Elementary symmetric function sigma_p of the inputs.

    sigma_0 = 1 and sigma_p = 0 once p exceeds the number of inputs.
    Computed by incremental product expansion, which is exact up to rounding
    for the moderate degrees (<= 30) used here.
    """
    if p < 0:
        raise ValueError("degree must be nonnegative")
    vals = list(values)
    if p > len(vals):
        return 0.0 + 0.0j
    e = np.zeros(p + 1, dtype=complex)
    e[0] = 1.0
    for i, x in enumerate(vals):
        for j in range(min(p, i + 1), 0, -1):
            e[j] = e[j] + x * e[j - 1]
    return complex(e[p])


def all_elementary_symmetric(values: Sequence[complex]) -> np.ndarray:
    """All sigma_0..sigma_k of the inputs at once (k = len(values))."""
    vals = list(values)
    e = np.zeros(len(vals) + 1, dtype=complex)
    e[0] = 1.0
    for i, x in enumerate(vals):
        for j in range(i + 1, 0, -1):
            e[j] = e[j] + x * e[j - 1]
    return e


def vandermonde_delta(I: IndexSet, lam: Mapping[int, complex]) -> complex:
    """Product of (lambda_i - lambda_j) over ordered pairs i < j in I, INF skipped."""
    idx = I.finite
    out = 1.0 + 0.0j
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            out *= lam[idx[a]] - lam[idx[b]]
    return out


def pair_delta(A: IndexSet, B: IndexSet, lam: Mapping[int, complex]) -> complex:
    """Product of (lambda_i - lambda_j) over i in A, j in B, INF excluded."""
    overlap = set(A.finite) & set(B.finite)
    if overlap or (A.infinity and B.infinity):
        raise ValueError(f"pair_delta requires disjoint sets, overlap={overlap or '{INF}'}")
    out = 1.0 + 0.0j
    for i in A.finite:
        for j in B.finite:
            out *= lam[i] - lam[j]
    return out


def poly_from_roots(roots: Sequence[complex]) -> np.ndarray:
    """Monic coefficients (descending powers) of prod (z - r)."""
    coeffs = np.zeros(len(roots) + 1, dtype=complex)
    coeffs[0] = 1.0
    for k, r in enumerate(roots):
        coeffs[1:k + 2] = coeffs[1:k + 2] - r * coeffs[0:k + 1]
    return coeffs


def deleted_poly_from_roots(roots: Sequence[complex], r_index: int) -> np.ndarray:
    """Coefficients of prod_{i != r} (z - root_i), i.e. the full product
    with the r-th root deleted.  Coefficient of z^{n-1-p} is (-1)^p sigma_p
    of the remaining roots."""
    rest = [x for i, x in enumerate(roots) if i != r_index]
    return poly_from_roots(rest)


def polyval(coeffs: np.ndarray, z: complex) -> complex:
    return complex(np.polyval(coeffs, z))


def derivative_at_root(roots: Sequence[complex], r_index: int) -> complex:
    """F'(root_r) for F = prod (z - root_i): the product of differences."""
    zr = roots[r_index]
    out = 1.0 + 0.0j
    for i, x in enumerate(roots):
        if i != r_index:
            out *= zr - x
    return complex(out)
