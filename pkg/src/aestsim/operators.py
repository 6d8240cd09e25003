"""Pauli operators, spin-chain Hamiltonians, and computational basis states.

Basis convention used everywhere in this package: an N-spin computational
basis state is indexed by the integer whose binary expansion carries site 1
in the most significant bit, with bit value 1 meaning the excited state |1>.
Single-spin operators are fixed accordingly:

    sigma^z |1> = +|1>,  sigma^z |0> = -|0>
    sigma^- |1> = |0>,   sigma^+ |0> = |1>
    sigma^y = i (sigma^- - sigma^+)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Single-spin operators in the (|0>, |1>) ordering fixed above.
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)

_SINGLE_SPIN = {
    "x": SIGMA_X,
    "y": SIGMA_Y,
    "z": SIGMA_Z,
    "plus": SIGMA_PLUS,
    "minus": SIGMA_MINUS,
}

_ID2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class ChainSpec:
    """Open chain of ``n_sites`` spins with nearest-neighbour couplings."""

    n_sites: int
    couplings: tuple[float, ...]

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError(f"chain needs at least 2 sites, got {self.n_sites}")
        object.__setattr__(self, "couplings", tuple(float(j) for j in self.couplings))
        if len(self.couplings) != self.n_sites - 1:
            raise ValueError(
                f"{self.n_sites}-site chain needs {self.n_sites - 1} couplings, "
                f"got {len(self.couplings)}"
            )

    @property
    def dim(self) -> int:
        return 2**self.n_sites


def pauli_site(kind: str, site: int, n_sites: int) -> np.ndarray:
    """Single-spin operator embedded at ``site`` (1-based) of an N-spin chain.

    Returns the dense ``2**n_sites`` operator acting as the chosen operator on
    ``site`` and as identity elsewhere.
    """
    if kind not in _SINGLE_SPIN:
        raise ValueError(f"unknown operator kind {kind!r}; expected one of {sorted(_SINGLE_SPIN)}")
    if not 1 <= site <= n_sites:
        raise ValueError(f"site {site} out of range 1..{n_sites}")
    op = np.array([[1.0 + 0.0j]])
    for s in range(1, n_sites + 1):
        op = np.kron(op, _SINGLE_SPIN[kind] if s == site else _ID2)
    return op


def uniform_couplings(n_sites: int) -> ChainSpec:
    """Uniform open chain, every nearest-neighbour coupling equal to -1."""
    return ChainSpec(n_sites, (-1.0,) * (n_sites - 1))


def pst_couplings(n_sites: int) -> ChainSpec:
    """Engineered couplings J_i = -sqrt(i (N - i)) giving perfect transfer.

    With these couplings the excitation placed on site 1 arrives exactly on
    site N at times t = n pi / 4 for odd integers n.
    """
    js = tuple(-math.sqrt(i * (n_sites - i)) for i in range(1, n_sites))
    return ChainSpec(n_sites, js)


def build_xy_hamiltonian(spec: ChainSpec) -> np.ndarray:
    """XY chain H = sum_i J_i (sx_i sx_{i+1} + sy_i sy_{i+1}), dense Hermitian."""
    n = spec.n_sites
    h = np.zeros((spec.dim, spec.dim), dtype=complex)
    for i, j in enumerate(spec.couplings, start=1):
        if j == 0.0:
            continue
        h += j * (
            pauli_site("x", i, n) @ pauli_site("x", i + 1, n)
            + pauli_site("y", i, n) @ pauli_site("y", i + 1, n)
        )
    return h


def state_index(excited_sites, n_sites: int) -> int:
    """Basis index of the state with the given sites excited (site 1 = MSB)."""
    idx = 0
    for site in excited_sites:
        if not 1 <= site <= n_sites:
            raise ValueError(f"site {site} out of range 1..{n_sites}")
        idx |= 1 << (n_sites - site)
    return idx


def basis_state(excited_sites, n_sites: int) -> np.ndarray:
    """Unit-norm computational basis state with the listed sites excited."""
    psi = np.zeros(2**n_sites, dtype=complex)
    psi[state_index(excited_sites, n_sites)] = 1.0
    return psi


def excitation_number(n_sites: int) -> np.ndarray:
    """Total excitation operator sum_j (1 + sigma^z_j) / 2."""
    dim = 2**n_sites
    op = np.zeros((dim, dim), dtype=complex)
    for j in range(1, n_sites + 1):
        op += 0.5 * (np.eye(dim) + pauli_site("z", j, n_sites))
    return op
