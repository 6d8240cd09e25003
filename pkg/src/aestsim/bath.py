"""Per-site bosonic baths with exponentially decaying memory.

Each spin couples to its own bath characterised by a dimensionless coupling
strength Gamma, a characteristic frequency gamma (inverse memory time), and a
temperature T (k_B = hbar = 1).  The two bath correlation functions share the
kernel Lambda(dt) = (gamma/2) exp(-gamma dt):

    alpha_z(dt) = Gamma T Lambda(dt) + i Gamma dLambda/dt
    alpha_w(dt) = Gamma T Lambda(dt)

The memory integrals of the environment response are carried by one pair of
auxiliary operators (Obar_z, Obar_w) per bath, which close the master
equation through the coupled ODEs implemented in :func:`obar_rhs`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

#: Hard validity limit on the dimensionless coupling strength.
MAX_COUPLING = 0.1
#: Above this the weak-coupling treatment starts to strain; a warning is issued.
SAFE_COUPLING = 0.05


class WeakCouplingWarning(UserWarning):
    """Coupling strength outside the comfortable weak-coupling window."""


@dataclass(frozen=True)
class BathParams:
    """Shared parameters of the independent per-site baths."""

    Gamma: float
    gamma: float
    temperature: float

    def __post_init__(self):
        if not 0.0 <= self.Gamma <= MAX_COUPLING:
            raise ValueError(
                f"coupling strength Gamma must be in [0, {MAX_COUPLING}] "
                f"(weak-coupling treatment), got {self.Gamma}"
            )
        if self.Gamma > SAFE_COUPLING:
            warnings.warn(
                f"Gamma = {self.Gamma} is above {SAFE_COUPLING}; results leave the "
                "comfortable weak-coupling window",
                WeakCouplingWarning,
                stacklevel=2,
            )
        if self.gamma <= 0:
            raise ValueError(f"bath frequency gamma must be > 0, got {self.gamma}")
        if self.temperature < 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")


def correlation_alpha_z(p: BathParams, dt: float) -> complex:
    """z-channel correlation at lag dt >= 0 (thermal part + i * kernel rate)."""
    if dt < 0:
        raise ValueError(f"time lag must be >= 0, got {dt}")
    decay = np.exp(-p.gamma * dt)
    return (p.Gamma * p.temperature * p.gamma / 2) * decay - 1j * (p.Gamma * p.gamma**2 / 2) * decay


def correlation_alpha_w(p: BathParams, dt: float) -> float:
    """w-channel correlation at lag dt >= 0; purely real, vanishes at T = 0."""
    if dt < 0:
        raise ValueError(f"time lag must be >= 0, got {dt}")
    return (p.Gamma * p.temperature * p.gamma / 2) * np.exp(-p.gamma * dt)


class OBarSet:
    """Memory-integral operators for N baths, z channel then w channel.

    Internally one contiguous array of shape (2N, dim, dim); ``o_z`` and
    ``o_w`` are views of the first and second halves.  Both channels start
    from the zero matrix at t = 0.
    """

    __slots__ = ("data",)

    def __init__(self, o_z, o_w):
        o_z = np.asarray(o_z, dtype=complex)
        o_w = np.asarray(o_w, dtype=complex)
        if o_z.shape != o_w.shape or o_z.ndim != 3 or o_z.shape[1] != o_z.shape[2]:
            raise ValueError(
                f"need matching stacks of square operators, got {o_z.shape} and {o_w.shape}"
            )
        self.data = np.concatenate([o_z, o_w], axis=0)

    @classmethod
    def zeros(cls, n_baths: int, dim: int) -> "OBarSet":
        obj = cls.__new__(cls)
        obj.data = np.zeros((2 * n_baths, dim, dim), dtype=complex)
        return obj

    @classmethod
    def from_packed(cls, data: np.ndarray, n_baths: int) -> "OBarSet":
        """Wrap an existing (2N, dim, dim) array without copying."""
        if data.shape[0] != 2 * n_baths:
            raise ValueError(f"packed array holds {data.shape[0]} operators, expected {2 * n_baths}")
        obj = cls.__new__(cls)
        obj.data = data
        return obj

    @property
    def n_baths(self) -> int:
        return self.data.shape[0] // 2

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    @property
    def o_z(self) -> np.ndarray:
        return self.data[: self.n_baths]

    @property
    def o_w(self) -> np.ndarray:
        return self.data[self.n_baths :]


def _as_dense(op) -> np.ndarray:
    return op.toarray() if hasattr(op, "toarray") else np.asarray(op)


def obar_rhs(h_sys, lindblad_ops, obars: OBarSet, p: BathParams) -> OBarSet:
    """Time derivatives of the memory operators.

    For each bath j, with A = -i H - sum_k (L_k^dag Oz_k + L_k Ow_k):

        dOz_j/dt = (Gamma T gamma / 2 - i Gamma gamma^2 / 2) L_j - gamma Oz_j + [A, Oz_j]
        dOw_j/dt = (Gamma T gamma / 2) L_j^dag             - gamma Ow_j + [A, Ow_j]

    ``h_sys`` is the full instantaneous system Hamiltonian, control included.
    The shared commutator prefactor A is formed once and reused for all 2N
    derivatives.  ``lindblad_ops`` may be dense arrays or scipy sparse.
    """
    n_b = obars.n_baths
    dim = obars.dim
    if len(lindblad_ops) != n_b:
        raise ValueError(f"got {len(lindblad_ops)} coupling operators for {n_b} baths")
    if h_sys.shape != (dim, dim):
        raise ValueError(f"Hamiltonian shape {h_sys.shape} does not match operator dim {dim}")
    for op in lindblad_ops:
        if op.shape != (dim, dim):
            raise ValueError(f"coupling operator shape {op.shape} does not match dim {dim}")

    stack = obars.data
    a = -1j * h_sys
    for k, op in enumerate(lindblad_ops):
        a = a - op.conj().T @ stack[k] - op @ stack[n_b + k]

    # [A, O_j] for every operator through two stacked products.
    d_stack = np.matmul(a, stack)
    d_stack -= (stack.reshape(2 * n_b * dim, dim) @ a).reshape(2 * n_b, dim, dim)
    d_stack -= p.gamma * stack

    az0 = correlation_alpha_z(p, 0.0)
    aw0 = correlation_alpha_w(p, 0.0)
    for j, op in enumerate(lindblad_ops):
        dense = _as_dense(op)
        d_stack[j] += az0 * dense
        d_stack[n_b + j] += aw0 * dense.conj().T

    return OBarSet.from_packed(d_stack, n_b)
