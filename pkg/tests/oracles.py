"""Independent reference computations used to pin expected values.

These deliberately avoid the library's evaluation paths: the theta oracle is
a plain full-box lattice sum, and the elliptic j target comes from the
branch-point cross-ratio.
"""

import numpy as np


def naive_theta(eps, delta, zeta, tau, box: int = 12) -> complex:
    """Full-box lattice sum over [-box, box]^g, term by term."""
    g = len(eps)
    a = np.array(eps, dtype=float) / 2.0
    b = np.array(delta, dtype=float) / 2.0
    zeta = np.asarray(zeta, dtype=complex)
    grids = np.meshgrid(*[np.arange(-box, box + 1)] * g, indexing="ij")
    m = np.stack([gg.ravel() for gg in grids], axis=1)
    n = m + a
    quad = np.einsum("ij,jk,ik->i", n, np.asarray(tau, dtype=complex), n)
    lin = n @ (zeta + b)
    return complex(np.exp(1j * np.pi * quad + 2j * np.pi * lin).sum())


def naive_theta_grad(eps, delta, zeta, tau, box: int = 12) -> np.ndarray:
    g = len(eps)
    a = np.array(eps, dtype=float) / 2.0
    b = np.array(delta, dtype=float) / 2.0
    zeta = np.asarray(zeta, dtype=complex)
    grids = np.meshgrid(*[np.arange(-box, box + 1)] * g, indexing="ij")
    m = np.stack([gg.ravel() for gg in grids], axis=1)
    n = m + a
    quad = np.einsum("ij,jk,ik->i", n, np.asarray(tau, dtype=complex), n)
    lin = n @ (zeta + b)
    terms = np.exp(1j * np.pi * quad + 2j * np.pi * lin)
    return 2j * np.pi * (n.T @ terms)


# frozen before the main build: sum over |m| <= 12 of exp(-pi m^2)
THETA_AT_I = 1.0864348112133082


def cross_ratio_j(e1: complex, e2: complex, e3: complex) -> complex:
    """j-invariant of y^2 = (x-e1)(x-e2)(x-e3) via the modular lambda."""
    lam = (e3 - e1) / (e2 - e1)
    return 256.0 * (lam * lam - lam + 1.0) ** 3 / (lam * lam * (lam - 1.0) ** 2)
