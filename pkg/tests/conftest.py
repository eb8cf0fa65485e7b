"""Shared fixtures: the j=40, p=0.1, kappa=0.2, T=1 working point used
throughout, plus its diagonalized spectrum and critical set."""
import numpy as np
import pytest

import kickedtop as kt


@pytest.fixture(scope="session")
def par40() -> kt.KickedTopParams:
    return kt.KickedTopParams(p=0.1, kappa=0.2, T=1.0)


@pytest.fixture(scope="session")
def ops40() -> kt.OperatorSet:
    return kt.build_operators(kt.SpinSystem(40.0))


@pytest.fixture(scope="session")
def spec40(ops40, par40) -> kt.FloquetSpectrum:
    return kt.diagonalize_floquet(kt.build_floquet(ops40, par40), par40.T)


@pytest.fixture(scope="session")
def heff40(ops40, par40) -> np.ndarray:
    return kt.build_effective_hamiltonian(ops40, par40)


@pytest.fixture(scope="session")
def cps40(par40) -> kt.CriticalSet:
    return kt.find_critical_points(par40, 40.0)


@pytest.fixture(scope="session")
def parity40(ops40) -> np.ndarray:
    """exp(-i pi J_x), the kick symmetry of both F and H_E."""
    vals, vecs = np.linalg.eigh(ops40.jx)
    return (vecs * np.exp(-1j * np.pi * vals)) @ vecs.conj().T


def rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)
