"""Cyclic Jacobi eigenvalues for the small Hermitian matrices used here."""

from __future__ import annotations

import math

import numpy as np


def hermitian_eigenvalues(m, *, herm_tol: float = 1e-8, max_sweeps: int = 100) -> np.ndarray:
    """Ascending real spectrum of a Hermitian matrix.

    Each rotation first removes the phase of ``a[p, q]`` with a diagonal
    unitary, then applies the real symmetric Jacobi rotation that zeroes it.
    """
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.size and np.max(np.abs(a - a.conj().T)) >= herm_tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    scale = np.linalg.norm(a) or 1.0
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(np.abs(a[offdiag]) ** 2)))
        if off <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mod = abs(apq)
                if mod <= 1e-300:
                    continue
                phase = apq / mod
                app, aqq = a[p, p].real, a[q, q].real
                zeta = float(aqq - app) / (2.0 * mod)
                if abs(zeta) > 1e150:
                    t = 0.5 / zeta
                else:
                    t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # columns p, q of J = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                jpp, jpq = c, s
                jqp, jqq = -s * phase.conjugate(), c * phase.conjugate()
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = cp * jpp + cq * jqp
                a[:, q] = cp * jpq + cq * jqq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = np.conj(jpp) * rp + np.conj(jqp) * rq
                a[q, :] = np.conj(jpq) * rp + np.conj(jqq) * rq
                a[p, q] = a[q, p] = 0.0
    else:
        raise ArithmeticError("Jacobi iteration did not converge")
    return np.sort(np.diag(a).real)
