"""Collective spin-j operators, spin coherent states, and the stereographic
chart on the Bloch sphere.

Basis convention: the J_z eigenbasis ordered m = j, j-1, ..., -j, so row and
column 0 correspond to m = j.  The stereographic chart is centered at the +x
pole: gamma = 0 maps to the Bloch point (1, 0, 0) and the point at infinity
to (-1, 0, 0).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

__all__ = [
    "SpinSystem",
    "OperatorSet",
    "BlochVector",
    "StereoCoord",
    "build_operators",
    "bloch_from_gamma",
    "gamma_from_bloch",
    "coherent_state",
]


@dataclass(frozen=True)
class SpinSystem:
    """Total angular momentum j; the Hilbert space dimension is 2j+1."""

    j: float

    def __post_init__(self):
        two_j = 2.0 * self.j
        if self.j <= 0 or abs(two_j - round(two_j)) > 1e-12:
            raise ValueError(f"j must be a positive half-integer, got {self.j}")

    @property
    def dim(self) -> int:
        return int(round(2 * self.j)) + 1

    def m_values(self) -> np.ndarray:
        """Magnetic quantum numbers in basis order, j down to -j."""
        return self.j - np.arange(self.dim)


@dataclass(frozen=True)
class OperatorSet:
    """Dense matrices for J_x, J_y, J_z, J_+/- at fixed j, basis m = j..-j."""

    j: float
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    jplus: np.ndarray
    jminus: np.ndarray

    @property
    def dim(self) -> int:
        return self.jx.shape[0]


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @staticmethod
    def from_array(r) -> "BlochVector":
        return BlochVector(float(r[0]), float(r[1]), float(r[2]))

    def norm(self) -> float:
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2))


@dataclass(frozen=True)
class StereoCoord:
    """Point of the gamma chart; at_infinity marks the (-1, 0, 0) pole."""

    gamma: complex = 0j
    at_infinity: bool = False

    @staticmethod
    def infinity() -> "StereoCoord":
        return StereoCoord(0j, True)


def _as_stereo(g) -> StereoCoord:
    if isinstance(g, StereoCoord):
        return g
    return StereoCoord(complex(g))


def build_operators(sys: SpinSystem) -> OperatorSet:
    """Angular momentum matrices; <m+1|J_+|m> = sqrt(j(j+1) - m(m+1))."""
    j = sys.j
    m = sys.m_values()
    dim = sys.dim
    # raising coefficients for source m = m[1:], landing on m+1 = m[:-1]
    cplus = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1.0))
    jplus = np.zeros((dim, dim), dtype=complex)
    jplus[np.arange(dim - 1), np.arange(1, dim)] = cplus
    jminus = jplus.conj().T
    jx = 0.5 * (jplus + jminus)
    jy = -0.5j * (jplus - jminus)
    jz = np.diag(m.astype(complex))
    return OperatorSet(j=j, jx=jx, jy=jy, jz=jz, jplus=jplus, jminus=jminus)


def bloch_from_gamma(g) -> BlochVector:
    """Stereographic chart centered at the +x pole (point at infinity -> -x)."""
    g = _as_stereo(g)
    if g.at_infinity:
        return BlochVector(-1.0, 0.0, 0.0)
    gamma = g.gamma
    d = 1.0 + abs(gamma) ** 2
    return BlochVector(
        (1.0 - abs(gamma) ** 2) / d,
        2.0 * gamma.imag / d,
        -2.0 * gamma.real / d,
    )


def gamma_from_bloch(r: BlochVector) -> StereoCoord:
    """Inverse chart; rejects non-unit input, maps (-1,0,0) to infinity."""
    nrm = r.norm()
    if abs(nrm - 1.0) > 1e-9:
        raise ValueError(f"Bloch vector must be unit length, |r| = {nrm}")
    if 1.0 + r.x < 1e-12:
        return StereoCoord.infinity()
    return StereoCoord((-r.z + 1j * r.y) / (1.0 + r.x))


def coherent_state(sys: SpinSystem, g) -> np.ndarray:
    """Spin coherent state at chart point g.

    Built by rotating the highest-weight J_z eigenstate |j, j> onto the Bloch
    direction of g along the geodesic from the +z pole.  Unit norm by
    construction; <J>/j equals bloch_from_gamma(g) up to rounding.
    """
    ops = build_operators(sys)
    n = bloch_from_gamma(g).as_array()
    top = np.zeros(sys.dim, dtype=complex)
    top[0] = 1.0  # |j, j>, Bloch direction +z
    axis = np.cross([0.0, 0.0, 1.0], n)
    sin_th = np.linalg.norm(axis)
    cos_th = n[2]
    if sin_th < 1e-15:
        if cos_th > 0:
            return top
        axis = np.array([1.0, 0.0, 0.0])  # n = -z: rotate by pi about x
        theta = np.pi
    else:
        axis = axis / sin_th
        theta = np.arctan2(sin_th, cos_th)
    gen = axis[0] * ops.jx + axis[1] * ops.jy + axis[2] * ops.jz
    w, v = eigh(gen)
    u = (v * np.exp(-1j * theta * w)) @ v.conj().T
    return u @ top
