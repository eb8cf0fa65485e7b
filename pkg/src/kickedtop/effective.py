"""BCH effective Hamiltonian of the kicked top, first order in the kick
strength with the twist resummed to all orders.

H_E is tridiagonal in the J_z basis: diagonal (kappa/2j) m^2, superdiagonal
<m+1|H_E|m> = (p/2) sqrt(j(j+1) - m(m+1)) g(theta_m) with
g(theta) = (theta/2)(cot(theta/2) + i) and theta_m = kappa(2m+1)/(2j).
Its eigenvalues are unfolded quasienergies; folding modulo omega compares
them with the exact Floquet spectrum.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .floquet import FloquetSpectrum, KickedTopParams
from .spin import OperatorSet

__all__ = [
    "SingularMatrixElementError",
    "EffectiveSpectrum",
    "MatchReport",
    "build_effective_hamiltonian",
    "effective_spectrum",
    "fold_quasienergy",
    "circular_distance",
    "match_spectra",
]


class SingularMatrixElementError(ArithmeticError):
    """theta_m within tolerance of a nonzero multiple of 2 pi, where the
    off-diagonal matrix element of H_E diverges."""

    def __init__(self, m: float, l: int, theta: float):
        self.m = m
        self.l = l
        self.theta = theta
        super().__init__(
            f"singular matrix element: theta_m = {theta:.6g} at m = {m} is within "
            f"1e-9 of 2*pi*{l} (kappa*(2m+1) ~ 4*j*l*pi)"
        )


@dataclass(frozen=True)
class EffectiveSpectrum:
    """Unfolded eigenvalues E_alpha (ascending), their folded copies, modes."""

    unfolded: np.ndarray
    folded: np.ndarray
    modes: np.ndarray
    omega: float


@dataclass(frozen=True)
class MatchReport:
    """Circular-distance statistics of the folded-effective vs exact pairing.

    pairing[a] = alpha assigns sorted folded value a to exact quasienergy
    index alpha; the assignment is the cyclic alignment of the two sorted
    lists that minimizes the total circular distance.
    """

    max_circular_distance: float
    mean_circular_distance: float
    pairing: np.ndarray


def _g_factor(theta: np.ndarray) -> np.ndarray:
    """(theta/2)(cot(theta/2) + i), by series below |theta| = 1e-6."""
    theta = np.asarray(theta, dtype=float)
    out = np.empty(theta.shape, dtype=complex)
    small = np.abs(theta) < 1e-6
    ts = theta[small]
    out[small] = 1.0 + 0.5j * ts - ts**2 / 12.0
    tb = theta[~small]
    out[~small] = 0.5 * tb * (1.0 / np.tan(0.5 * tb) + 1j)
    return out


def build_effective_hamiltonian(ops: OperatorSet, par: KickedTopParams) -> np.ndarray:
    j = ops.j
    dim = ops.dim
    m = j - np.arange(dim)
    theta = par.kappa * (2.0 * m[1:] + 1.0) / (2.0 * j)  # source index m = m[1:]
    # cot pole: kappa(2m+1) within tolerance of 4*j*l*pi, l != 0
    l_near = np.round(theta / (2.0 * np.pi))
    bad = (l_near != 0) & (np.abs(theta - 2.0 * np.pi * l_near) < 1e-9)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise SingularMatrixElementError(m=float(m[1:][k]), l=int(l_near[k]), theta=float(theta[k]))
    h = np.zeros((dim, dim), dtype=complex)
    h[np.arange(dim), np.arange(dim)] = (par.kappa / (2.0 * j)) * m**2
    upper = 0.5 * par.p * np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1.0)) * _g_factor(theta)
    h[np.arange(dim - 1), np.arange(1, dim)] = upper
    h[np.arange(1, dim), np.arange(dim - 1)] = upper.conj()
    return h


def effective_spectrum(h: np.ndarray, par: KickedTopParams) -> EffectiveSpectrum:
    herm_defect = np.max(np.abs(h - h.conj().T))
    if herm_defect > 1e-10:
        raise ValueError(f"H_E not Hermitian: max |H - H^dag| = {herm_defect:.3e}")
    vals, vecs = eigh(h)
    return EffectiveSpectrum(
        unfolded=vals,
        folded=fold_quasienergy(vals, par.omega),
        modes=vecs,
        omega=par.omega,
    )


def fold_quasienergy(e, omega: float):
    """Reduce to the first Brillouin zone [-omega/2, omega/2)."""
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega}")
    return np.mod(e + 0.5 * omega, omega) - 0.5 * omega


def circular_distance(a, b, omega: float):
    """Distance on the quasienergy circle of circumference omega."""
    return np.abs(fold_quasienergy(np.asarray(a) - np.asarray(b), omega))


def match_spectra(exact: FloquetSpectrum, eff: EffectiveSpectrum) -> MatchReport:
    """Align the two folded spectra on the circle and report distances.

    Both lists are sorted on the circle; all cyclic rotation offsets are
    tried and the one with the least total circular distance wins.
    """
    omega = exact.omega
    eps = np.sort(exact.quasienergies)
    folded = eff.folded
    if len(eps) != len(folded):
        raise ValueError("spectra have different dimensions")
    order = np.argsort(folded)
    fs = folded[order]
    n = len(eps)
    shifts = np.arange(n)
    idx = (shifts[:, None] + np.arange(n)[None, :]) % n  # row k: fs rotated by k
    dists = circular_distance(fs[idx], eps[None, :], omega)
    best = int(np.argmin(dists.sum(axis=1)))
    pairing = np.empty(n, dtype=int)
    pairing[order] = np.mod(np.arange(n) - best, n)
    d = dists[best]
    return MatchReport(
        max_circular_distance=float(d.max()),
        mean_circular_distance=float(d.mean()),
        pairing=pairing,
    )
