"""Detector-register algebra for delta-coupled detectors.

Basis conventions: each detector is a qubit with ``g -> 0`` and ``e -> 1``;
detector 1 is the most significant qubit of the ``2^n``-dimensional
register.  Sign vectors are enumerated with ``+1`` before ``-1`` in every
slot, so index 0 is the all-``+1`` vector.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, DegenerateStateError

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-6
PSD_TOL = 1e-8

# delta_tilde as a matrix over (j, k) with +1 first: the 2x2 Hadamard pattern
_DT = np.array([[1.0, 1.0], [1.0, -1.0]])


@dataclass(frozen=True)
class RegisterState:
    initial: tuple  # one of "g"/"e" per detector
    tau: float = 0.0

    def __post_init__(self):
        init = tuple(self.initial)
        if not init:
            raise ConfigError("register needs at least one detector")
        if any(s not in ("g", "e") for s in init):
            raise ConfigError(f"register.initial entries must be 'g' or 'e', got {init}")
        object.__setattr__(self, "initial", init)

    @property
    def n(self) -> int:
        return len(self.initial)

    def ket(self) -> np.ndarray:
        return basis_ket(self.initial)


def basis_ket(labels: Sequence[str]) -> np.ndarray:
    idx = int("".join("1" if s == "e" else "0" for s in labels), 2)
    v = np.zeros(2 ** len(labels), dtype=complex)
    v[idx] = 1.0
    return v


def monopole_matrix(omega: float, tau: float) -> np.ndarray:
    """``e^{i omega tau}|e><g| + e^{-i omega tau}|g><e|`` in the (g, e) basis."""
    up = cmath.exp(1j * omega * tau)
    return np.array([[0.0, up.conjugate()], [up, 0.0]], dtype=complex)


def delta_operator(sign: int, omega: float, tau: float) -> np.ndarray:
    if sign == 1:
        return np.eye(2, dtype=complex)
    if sign == -1:
        return monopole_matrix(omega, tau)
    raise ConfigError(f"sign must be +1 or -1, got {sign!r}")


def delta_tilde(j: int, k: int) -> int:
    if k == 1:
        return 1
    if k == -1:
        return j
    raise ConfigError(f"sign must be +1 or -1, got {k!r}")


def sign_vectors(n: int) -> list[tuple]:
    return list(itertools.product((1, -1), repeat=n))


def g_value(l: Sequence[int], j: Sequence[int], gexp: Callable) -> float:
    """One entry of the G-table, summed term by term over ``(k, m)``."""
    n = len(l)
    total = 0.0
    for k in sign_vectors(n):
        for m in sign_vectors(n):
            coef = 1
            for s in range(n):
                coef *= delta_tilde(l[s], m[s]) * delta_tilde(j[s], k[s])
            if coef:
                total += coef * gexp(tuple(ks - ms for ks, ms in zip(k, m)))
    return total / 4**n


def overlap_matrix(n: int, gexp: Callable) -> np.ndarray:
    """``Gamma[k, m] = gexp(k - m)`` over sign vectors in canonical order."""
    signs = np.array(sign_vectors(n))
    diffs = signs[:, None, :] - signs[None, :, :]
    return np.array([[gexp(tuple(d)) for d in row] for row in diffs])


def g_table(n: int, gexp: Callable) -> np.ndarray:
    """Full G-table as a ``2^n x 2^n`` real matrix ``G[l, j]``.

    With ``D = H^{(x)n}`` the sign-tilde products, ``G = D Gamma^T D^T / 4^n``.
    """
    d = np.ones((1, 1))
    for _ in range(n):
        d = np.kron(d, _DT)
    gamma = overlap_matrix(n, gexp)
    return d @ gamma.T @ d.T / 4**n


def delta_string(signs: Sequence[int], omegas: Sequence[float], tau: float) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for s, om in zip(signs, omegas):
        out = np.kron(out, delta_operator(s, om, tau))
    return out


def assemble_rho(reg: RegisterState, gt: np.ndarray, dets, *, return_trace: bool = False):
    """Post-coupling register state from the G-table.

    ``rho = sum_{j,l} G[l, j] Delta_j |E><E| Delta_l`` with every ``Delta``
    Hermitian; the result is renormalised by its trace.
    """
    n = reg.n
    if len(dets) != n:
        raise ConfigError(f"{len(dets)} detectors for a register of {n}")
    gt = np.asarray(gt)
    if gt.shape != (2**n, 2**n):
        raise ConfigError(f"G-table must be {2**n}x{2**n}, got {gt.shape}")
    omegas = [det.omega for det in dets]
    ket = reg.ket()
    vecs = np.column_stack([delta_string(j, omegas, reg.tau) @ ket for j in sign_vectors(n)])
    rho = vecs @ gt.T @ vecs.conj().T
    tr = float(np.trace(rho).real)
    if tr < 1e-12:
        raise DegenerateStateError(f"assembled density matrix has trace {tr:.3e}")
    rho = rho / tr
    return (rho, tr) if return_trace else rho


@dataclass
class DensityCheck:
    hermitian_dev: float
    trace: float
    min_eigenvalue: float

    @property
    def ok(self) -> bool:
        return (
            self.hermitian_dev < HERMITIAN_TOL
            and abs(self.trace - 1.0) < TRACE_TOL
            and self.min_eigenvalue >= -PSD_TOL
        )


def check_density(rho: np.ndarray, trace: float | None = None) -> DensityCheck:
    from .linalg import hermitian_eigenvalues

    herm = float(np.max(np.abs(rho - rho.conj().T)))
    sym = 0.5 * (rho + rho.conj().T)
    ev = hermitian_eigenvalues(sym)
    return DensityCheck(herm, float(np.trace(rho).real) if trace is None else trace, float(ev[0]))
