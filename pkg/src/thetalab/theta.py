"""Riemann theta functions with rational characteristics, certified truncation.

Conventions.  With e(x) = exp(2*pi*i*x), the characteristic theta function is

    theta[eps; delta](zeta, tau)
        = sum_{m in Z^g} e( (m+eps/2)^t (tau/2) (m+eps/2) + (m+eps/2)^t (zeta+delta/2) )

for tau in the Siegel upper half-space.  Useful identities implemented here:

    transchar:    theta[eps;delta](zeta) = e(eps^t tau eps/8 + (eps^t/2)(zeta+delta/2))
                                           * theta(zeta + tau eps/2 + delta/2)
    periodicity:  theta[eps;delta](zeta + tau n + l)
                      = e(-n^t tau n/2 - n^t zeta + (l^t eps - n^t delta)/2)
                      * theta[eps;delta](zeta)
    char shift:   theta[eps+2n; delta+2l] = e(eps^t l / 2) theta[eps;delta]
    parity:       theta[eps;delta](-zeta) = e(-eps^t delta/2) theta[eps;delta](zeta)
                  for integral characteristics.

Evaluation sums over the lattice points inside the ellipsoid
|| U (m + eps/2 + Y^{-1} Im(zeta + delta/2)) || <= R, where U^t U = pi * Im tau,
with R chosen from a Gaussian tail bound so the omitted tail is below the
requested tolerance.  The argument is first range-reduced by integer lattice
shifts (tracking the periodicity prefactor) to keep exponents bounded.

Characteristics are stored as exact rationals (denominators 1, 2, 3, 6 in
practice) so that third- and sixth-period bookkeeping never drifts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np
from scipy.special import gammaincc, gamma as gamma_fn


class ThetaError(Exception):
    pass


_RADIUS_CAP = 80.0
_POINT_CAP = 8_000_000


def _efun(x: complex) -> complex:
    """e(x) = exp(2 pi i x)."""
    return complex(np.exp(2j * np.pi * x))


# ----------------------------------------------------------------------------
# Characteristics


def _to_fraction_vector(v) -> tuple[Fraction, ...]:
    out = []
    for x in v:
        if isinstance(x, Fraction):
            out.append(x)
        elif isinstance(x, (int, np.integer)):
            out.append(Fraction(int(x)))
        elif isinstance(x, float):
            fr = Fraction(x).limit_denominator(10 ** 6)
            out.append(fr)
        else:
            raise TypeError(f"characteristic entries must be rational, got {type(x)}")
    return tuple(out)


@dataclass(frozen=True)
class Characteristic:
    """Pair of rational g-vectors (eps, delta) encoding tau*eps/2 + delta/2."""

    eps: tuple[Fraction, ...]
    delta: tuple[Fraction, ...]

    @classmethod
    def of(cls, eps: Iterable, delta: Iterable) -> "Characteristic":
        e = _to_fraction_vector(eps)
        d = _to_fraction_vector(delta)
        if len(e) != len(d):
            raise ValueError("eps and delta must have equal length")
        return cls(e, d)

    @classmethod
    def zero(cls, g: int) -> "Characteristic":
        return cls(tuple([Fraction(0)] * g), tuple([Fraction(0)] * g))

    @property
    def g(self) -> int:
        return len(self.eps)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.eps + self.delta)

    def eps_float(self) -> np.ndarray:
        return np.array([float(x) for x in self.eps])

    def delta_float(self) -> np.ndarray:
        return np.array([float(x) for x in self.delta])

    def negate(self) -> "Characteristic":
        return Characteristic(tuple(-x for x in self.eps), tuple(-x for x in self.delta))

    def add(self, other: "Characteristic") -> "Characteristic":
        return Characteristic(tuple(a + b for a, b in zip(self.eps, other.eps)),
                              tuple(a + b for a, b in zip(self.delta, other.delta)))

    def label(self) -> str:
        def fmt(v):
            return ",".join(str(x) for x in v)
        return f"[{fmt(self.eps)}; {fmt(self.delta)}]"


def parity(char: Characteristic) -> int:
    """0 for even, 1 for odd; defined for integral characteristics only."""
    if not char.is_integral():
        raise ValueError("parity is defined only for integral characteristics")
    s = sum(int(e) * int(d) for e, d in zip(char.eps, char.delta))
    return s % 2


def reduce_characteristic(char: Characteristic) -> tuple[Characteristic, complex]:
    """Reduce entries into [0, 2); theta(original) = phase * theta(reduced)."""
    eps_red, delta_red, n_shift, l_shift = [], [], [], []
    for x in char.eps:
        r = x % 2
        eps_red.append(r)
        n_shift.append((x - r) / 2)
    for x in char.delta:
        r = x % 2
        delta_red.append(r)
        l_shift.append((x - r) / 2)
    expo = sum(e * l for e, l in zip(eps_red, l_shift)) / 2
    phase = _efun(float(expo))
    return Characteristic(tuple(eps_red), tuple(delta_red)), phase


def apply_transchar(char: Characteristic, zeta: np.ndarray, tau: "RiemannMatrix"):
    """Shift and prefactor with theta[eps;delta](zeta) = prefactor * theta(zeta')."""
    a = char.eps_float() / 2.0
    b = char.delta_float() / 2.0
    zeta = np.asarray(zeta, dtype=complex)
    shifted = zeta + tau.matrix @ a + b
    expo = a @ tau.matrix @ a / 2.0 + a @ (zeta + b)
    return shifted, _efun(expo)


# ----------------------------------------------------------------------------
# Riemann matrices and lattice enumeration


class RiemannMatrix:
    """g x g symmetric complex matrix with positive definite imaginary part."""

    def __init__(self, matrix, symmetry_tol: float = 1e-8):
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("tau must be a square matrix")
        asym = float(np.max(np.abs(m - m.T))) if m.size else 0.0
        if asym > symmetry_tol:
            raise ValueError(f"tau asymmetry {asym:.3e} exceeds {symmetry_tol:.1e}")
        y = np.imag(m)
        y = (y + y.T) / 2.0
        eigs = np.linalg.eigvalsh(y)
        if eigs[0] <= 0:
            raise ValueError(f"Im tau is not positive definite (min eig {eigs[0]:.3e})")
        self.matrix = (m + m.T) / 2.0
        self.g = m.shape[0]
        self.Y = y
        self.Yinv = np.linalg.inv(y)
        self.min_eig_imag = float(eigs[0])
        # upper-triangular U with U^t U = pi * Y
        self.U = np.linalg.cholesky(np.pi * y).T
        self.Uinv = np.linalg.inv(self.U)
        self.Uinv_norm = float(np.linalg.norm(self.Uinv, 2))
        self.rho = self._shortest_vector()
        self._point_cache: dict[float, np.ndarray] = {}

    def _shortest_vector(self) -> float:
        bound = min(float(np.linalg.norm(self.U[:, j])) for j in range(self.g))
        pts = _enumerate_ellipsoid(self.U, np.zeros(self.g), bound + 1e-9)
        norms = np.linalg.norm(pts @ self.U.T, axis=1)
        nz = norms[norms > 1e-12]
        return float(nz.min()) if nz.size else bound

    def lattice_points(self, radius: float) -> np.ndarray:
        """Cached integer points with ||U m|| <= radius (radius snapped up)."""
        key = math.ceil(radius * 2.0) / 2.0
        if key not in self._point_cache:
            self._point_cache[key] = _enumerate_ellipsoid(
                self.U, np.zeros(self.g), key)
        return self._point_cache[key]


def _enumerate_ellipsoid(U: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    """All integer m with ||U (m + center)|| <= radius, U upper triangular.

    Fincke-Pohst style recursion from the last coordinate down.
    """
    g = U.shape[0]
    out: list[np.ndarray] = []
    m = np.zeros(g, dtype=np.int64)
    count = 0

    def rec(level: int, partial: np.ndarray, budget: float):
        nonlocal count
        # partial: contributions of levels > level to each row's linear form
        u = U[level, level]
        off = center[level] + partial[level] / u
        half = math.sqrt(max(budget, 0.0)) / abs(u)
        lo = math.ceil(-off - half - 1e-12)
        hi = math.floor(-off + half + 1e-12)
        if hi < lo:
            return
        if level == 0:
            ks = np.arange(lo, hi + 1, dtype=np.int64)
            t = u * (ks + off)
            keep = ks[budget - t * t >= -1e-12]
            if keep.size:
                block = np.tile(m, (keep.size, 1))
                block[:, 0] = keep
                out.append(block)
                count += keep.size
                if count > _POINT_CAP:
                    raise ThetaError("lattice enumeration exceeded point cap")
            return
        for k in range(lo, hi + 1):
            t = u * (k + off)
            rem = budget - t * t
            if rem < -1e-12:
                continue
            m[level] = k
            newpart = partial + U[:, level] * (k + center[level])
            rec(level - 1, newpart, max(rem, 0.0))
        m[level] = 0

    if g == 0:
        return np.zeros((1, 0), dtype=np.int64)
    rec(g - 1, np.zeros(g), radius * radius)
    if not out:
        return np.zeros((0, g), dtype=np.int64)
    return np.concatenate(out, axis=0)


# ----------------------------------------------------------------------------
# Gaussian tail bounds


def _upper_gamma_half(k: int, a2: float) -> float:
    """integral_a^inf u^k exp(-u^2) du = Gamma((k+1)/2, a^2) / 2."""
    s = (k + 1) / 2.0
    return 0.5 * float(gamma_fn(s)) * float(gammaincc(s, a2))


def _tail_sum_bound(g: int, rho: float, R: float, extra_power: int = 0) -> float:
    """Bound on sum over ||U(m+xi)|| > R of ||U(m+xi)||^extra_power * exp(-||..||^2).

    Uniform in the offset xi.  Valid for R > rho; derived by packing disjoint
    balls of radius rho/2 around the lattice points and comparing with the
    radial Gaussian integral.
    """
    a = max(R - rho, 0.0)
    half = rho / 2.0
    # integrand bound: (u + 2*half)^extra_power * (u + half)^{g-1} e^{-u^2}
    total = 0.0
    for i in range(extra_power + 1):
        ci = math.comb(extra_power, i) * (2 * half) ** (extra_power - i)
        for j in range(g):
            cj = math.comb(g - 1, j) * half ** (g - 1 - j)
            total += ci * cj * _upper_gamma_half(i + j, a * a)
    return g * (2.0 / rho) ** g * total


def truncation_radius(tau: RiemannMatrix, tol: float, deriv_order: int = 0) -> float:
    """Radius R such that the omitted (possibly term-differentiated) tail of the
    theta series beyond ||U(m + offset)|| > R is below tol, for any offset with
    range-reduced argument."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    cworst = math.sqrt(tau.g) / 2.0 + 1.0  # after range reduction plus eps/2
    R = tau.rho + 1.0
    while R <= _RADIUS_CAP:
        t = _tail_sum_bound(tau.g, tau.rho, R)
        if deriv_order >= 1:
            t = 2 * np.pi * (tau.Uinv_norm * _tail_sum_bound(tau.g, tau.rho, R, 1)
                             + cworst * t)
        if t <= tol:
            return R
        R += 0.25
    raise ThetaError(f"truncation radius exceeds cap {_RADIUS_CAP} for tol {tol}")


# ----------------------------------------------------------------------------
# Evaluation


@dataclass(frozen=True)
class ThetaValue:
    value: complex
    truncation_bound: float


@dataclass(frozen=True)
class ThetaGradient:
    values: np.ndarray
    truncation_bound: float


def _range_reduce(char: Characteristic, zeta: np.ndarray, tau: RiemannMatrix):
    """Shift zeta by lattice vectors; returns (zeta', prefactor, n0)."""
    n0 = np.round(tau.Yinv @ np.imag(zeta)).astype(np.int64)
    l0 = np.round(np.real(zeta) - np.real(tau.matrix) @ n0).astype(np.int64)
    zr = zeta - tau.matrix @ n0 - l0
    eps = char.eps_float()
    delta = char.delta_float()
    expo = (-n0 @ tau.matrix @ n0 / 2.0 - n0 @ zr
            + (l0 @ eps - n0 @ delta) / 2.0)
    return zr, _efun(expo), n0


def _theta_core(char: Characteristic, zeta, tau: RiemannMatrix, tol: float,
                want_grad: bool):
    if tol <= 0:
        raise ValueError("tol must be positive")
    zeta = np.asarray(zeta, dtype=complex).reshape(tau.g)
    char_red, phase0 = reduce_characteristic(char)
    zr, pref, n0 = _range_reduce(char_red, zeta, tau)
    scale = max(1.0, abs(pref))
    tol_red = tol / scale

    a = char_red.eps_float() / 2.0
    b = char_red.delta_float() / 2.0
    c = tau.Yinv @ np.imag(zr)
    xi = a + c
    amp = math.exp(np.pi * c @ tau.Y @ c)
    cnorm = float(np.linalg.norm(c))

    n0norm = float(np.linalg.norm(n0)) if n0.size else 0.0

    # pick radius: amp * tail <= tol_red (tail includes the derivative weight
    # and the range-reduction shift term when the gradient is requested)
    R = tau.rho + 1.0
    while True:
        t0 = _tail_sum_bound(tau.g, tau.rho, R)
        tail = t0
        if want_grad:
            t1 = _tail_sum_bound(tau.g, tau.rho, R, 1)
            tail = 2 * np.pi * (tau.Uinv_norm * t1 + (cnorm + math.sqrt(tau.g)) * t0
                                + n0norm * t0)
        if amp * tail <= tol_red:
            break
        R += 0.25
        if R > _RADIUS_CAP:
            raise ThetaError("truncation radius exceeds cap during evaluation")

    s = np.round(xi).astype(np.int64)
    pad = float(np.linalg.norm(tau.U @ (xi - s)))
    pts = tau.lattice_points(R + pad)  # integer m' = m + s
    n = pts - s + a  # m + eps/2
    # exponent: i*pi n^t tau n + 2*pi*i n^t (zr + b)
    tn = n @ tau.matrix
    quad = np.einsum("ij,ij->i", tn, n)
    lin = n @ (zr + b)
    terms = np.exp(1j * np.pi * quad + 2j * np.pi * lin)
    val_red = terms.sum()
    vbound_red = amp * _tail_sum_bound(tau.g, tau.rho, R)
    if not want_grad:
        value = phase0 * pref * val_red
        return ThetaValue(complex(value), float(abs(pref) * vbound_red))
    grad_red = 2j * np.pi * (n.T @ terms)
    grad = phase0 * pref * (grad_red - 2j * np.pi * n0 * val_red)
    gbound_red = amp * 2 * np.pi * (
        tau.Uinv_norm * _tail_sum_bound(tau.g, tau.rho, R, 1)
        + (cnorm + math.sqrt(tau.g)) * _tail_sum_bound(tau.g, tau.rho, R))
    gbound = abs(pref) * (gbound_red + 2 * np.pi * n0norm * vbound_red)
    return ThetaGradient(np.asarray(grad, dtype=complex), float(gbound))


def theta_eval(char: Characteristic, zeta, tau: RiemannMatrix,
               tol: float = 1e-10) -> ThetaValue:
    """theta[char](zeta, tau) with omitted-tail bound below tol."""
    return _theta_core(char, zeta, tau, tol, want_grad=False)


def theta_grad(char: Characteristic, zeta, tau: RiemannMatrix,
               tol: float = 1e-8) -> ThetaGradient:
    """Componentwise d/d zeta_s of theta[char] at zeta, term-differentiated."""
    return _theta_core(char, zeta, tau, tol, want_grad=True)


def theta_value(char: Characteristic, zeta, tau: RiemannMatrix,
                tol: float = 1e-10) -> complex:
    return theta_eval(char, zeta, tau, tol).value


def theta_norm_abs(char: Characteristic, zeta, tau: RiemannMatrix,
                   tol: float = 1e-10) -> float:
    """Lattice-invariant magnitude |theta(zeta)| exp(-pi Im(zeta)^t Y^-1 Im(zeta)).

    Invariant under zeta -> zeta + tau n + l, so it is the meaningful O(1)
    quantity for vanishing tests at arguments far from the fundamental cell
    (raw |theta| grows like the inverse of that exponential).
    """
    zeta = np.asarray(zeta, dtype=complex).reshape(tau.g)
    y = np.imag(zeta)
    v = theta_eval(char, zeta, tau, tol).value
    return float(abs(v) * math.exp(-np.pi * y @ tau.Yinv @ y))


def theta_halfint_table(zeta, tau: RiemannMatrix, tol: float = 1e-8) -> np.ndarray:
    """All 4^g values theta[eps;delta](zeta) for integral eps, delta in {0,1}^g.

    Output indexed [eps_code, delta_code] with bit j of the code giving the
    j-th coordinate.  One lattice enumeration and term evaluation per
    eps-class; the delta dependence factorizes as i^(eps.delta) times a
    parity-class Walsh transform, since exp(pi i (m+eps/2)^t delta) depends
    on m only through m mod 2.

    Combined with transchar this yields all half-period translates of theta
    at once: the lattice-invariant magnitude of theta(zeta + tau eps/2 +
    delta/2) equals |theta[eps;delta](zeta)| exp(-pi Im(zeta)^t Y^-1
    Im(zeta)), which is what vanishing searches over half-periods need.
    """
    g = tau.g
    zeta = np.asarray(zeta, dtype=complex).reshape(g)
    zr, pref, n0 = _range_reduce(Characteristic.zero(g), zeta, tau)
    # the zero-characteristic range reduction is valid for every integral
    # characteristic up to a unimodular factor e((l0.eps - n0.delta)/2)
    c = tau.Yinv @ np.imag(zr)
    amp = math.exp(np.pi * c @ tau.Y @ c)
    scale = max(1.0, abs(pref))
    tol_red = tol / scale

    R = tau.rho + 1.0
    while amp * _tail_sum_bound(g, tau.rho, R) > tol_red:
        R += 0.25
        if R > _RADIUS_CAP:
            raise ThetaError("truncation radius exceeds cap in table evaluation")

    two = 2 ** g
    bits = np.arange(g)
    codes = np.arange(two)
    dvecs = ((codes[:, None] >> bits) & 1)            # delta code -> 0/1 vector
    # walsh[d, p] = (-1)^{popcount(d & p)}
    walsh = 1.0 - 2.0 * (((((codes[:, None] & codes[None, :])[..., None] >> bits) & 1)
                          .sum(-1)) % 2)
    out = np.zeros((two, two), dtype=complex)
    l0 = np.round(np.real(zeta) - np.real(tau.matrix) @ n0).astype(np.int64)
    for ecode in range(two):
        evec = (ecode >> bits) & 1
        a = evec / 2.0
        xi = a + c
        s = np.round(xi).astype(np.int64)
        pad = float(np.linalg.norm(tau.U @ (xi - s)))
        pts = tau.lattice_points(R + pad)
        n = pts - s + a
        tn = n @ tau.matrix
        quad = np.einsum("ij,ij->i", tn, n)
        lin = n @ zr
        terms = np.exp(1j * np.pi * quad + 2j * np.pi * lin)
        pcodes = ((pts - s) % 2) @ (1 << bits)
        P = (np.bincount(pcodes, weights=terms.real, minlength=two)
             + 1j * np.bincount(pcodes, weights=terms.imag, minlength=two))
        theta_red = walsh @ P                     # indexed by delta code
        dphase = np.exp(2j * np.pi * (dvecs @ evec) / 4.0)       # i^{eps.delta}
        row_pref = np.exp(2j * np.pi * ((l0 @ evec) - dvecs @ n0) / 2.0)
        out[ecode] = pref * row_pref * dphase * theta_red
    return out


def count_parities(g: int) -> tuple[int, int]:
    """(even, odd) counts over all 4^g integral characteristics mod 2."""
    even = odd = 0
    for code in range(4 ** g):
        bits = code
        eps, delta = [], []
        for _ in range(g):
            eps.append(bits & 1)
            bits >>= 1
            delta.append(bits & 1)
            bits >>= 1
        ch = Characteristic.of(eps, delta)
        if parity(ch) == 0:
            even += 1
        else:
            odd += 1
    return even, odd
