"""One-period Floquet unitary of the kicked top, its quasienergy spectrum,
and traces of its powers.

F = exp(-i p J_x) exp(-i (kappa/2j) J_z^2); quasienergies live in the first
Brillouin zone [-omega/2, omega/2) with omega = 2 pi / T.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, schur

from .spin import OperatorSet

__all__ = [
    "KickedTopParams",
    "FloquetSpectrum",
    "build_floquet",
    "diagonalize_floquet",
    "floquet_traces",
]


@dataclass(frozen=True)
class KickedTopParams:
    """Kick strength p (radians), twist strength kappa, period T."""

    p: float
    kappa: float
    T: float = 1.0

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"T must be positive, got {self.T}")

    @property
    def omega(self) -> float:
        return 2.0 * np.pi / self.T

    @property
    def in_regular_regime(self) -> bool:
        """Advisory: the small-parameter regime where the BCH generator and
        the semiclassical landscape are trustworthy."""
        return abs(self.p) <= 0.3 and abs(self.kappa) <= 1.0


@dataclass(frozen=True)
class FloquetSpectrum:
    """Quasienergies (ascending, in the first zone) and Floquet modes.

    Column alpha of modes satisfies F |mode_alpha> = exp(-i eps_alpha T) |mode_alpha>;
    degenerate eigenphases carry an orthonormalized basis of their subspace.
    """

    quasienergies: np.ndarray
    modes: np.ndarray
    T: float = 1.0

    @property
    def omega(self) -> float:
        return 2.0 * np.pi / self.T

    @property
    def dim(self) -> int:
        return len(self.quasienergies)


def build_floquet(ops: OperatorSet, par: KickedTopParams) -> np.ndarray:
    """Kick factor times twist factor, in that order.

    The twist factor is diagonal in the J_z basis; the kick factor is built
    from one spectral decomposition of J_x (exact rotation spectrum {m}).
    """
    j = ops.j
    m = j - np.arange(ops.dim)
    w, v = eigh(ops.jx)
    kick = (v * np.exp(-1j * par.p * w)) @ v.conj().T
    twist_phases = np.exp(-1j * (par.kappa / (2.0 * j)) * m**2)
    return kick * twist_phases  # right-multiplication by the diagonal twist


def diagonalize_floquet(F: np.ndarray, T: float = 1.0) -> FloquetSpectrum:
    """Quasienergies eps = -arg(lambda)/T sorted ascending, with modes.

    arg in (-pi, pi] makes -arg/T land in [-omega/2, omega/2) directly, so
    the zone is half-open without a separate boundary fix.  The complex Schur
    form of a unitary matrix is diagonal, and its orthonormal columns give a
    clean basis even through degeneracies.
    """
    dim = F.shape[0]
    defect = np.max(np.abs(F.conj().T @ F - np.eye(dim)))
    if defect > 1e-9:
        raise ValueError(f"input is not unitary: max |F^dag F - I| = {defect:.3e}")
    t, q = schur(F, output="complex")
    eps = -np.angle(np.diag(t)) / T
    order = np.argsort(eps, kind="stable")
    return FloquetSpectrum(quasienergies=eps[order], modes=q[:, order], T=T)


def floquet_traces(F, n_max: int, T: float = 1.0) -> np.ndarray:
    """t_n = tr F^n = sum_alpha exp(-i n eps_alpha T), n = 1..n_max.

    Accepts either the unitary matrix or an existing FloquetSpectrum; traces
    are summed from the eigenphases, never by repeated matrix powers.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    spec = F if isinstance(F, FloquetSpectrum) else diagonalize_floquet(F, T)
    n = np.arange(1, n_max + 1)
    return np.exp(-1j * np.outer(n, spec.quasienergies * spec.T)).sum(axis=1)
