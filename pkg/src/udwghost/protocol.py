"""Post-selection, reduced states and ghost-image reconstruction.

Pixel convention: an excited detector is a white pixel (intensity 1), a
ground-state detector a black one (intensity 0).  Qubit indices are
0-based with qubit 0 the most significant.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import ProtocolError
from .linalg import hermitian_eigenvalues

MIN_PROBABILITY = 1e-12
NEGATIVITY_TOL = 1e-10


@dataclass(frozen=True)
class Projector:
    index: int
    outcome: str = "g"

    def __post_init__(self):
        if self.outcome not in ("g", "e"):
            raise ValueError(f"projector outcome must be 'g' or 'e', got {self.outcome!r}")
        if self.index < 0:
            raise ValueError(f"projector index must be >= 0, got {self.index}")


@dataclass
class GhostImage:
    pixels: list
    probabilities: dict = field(default_factory=dict)  # outcome string -> probability


def n_qubits(rho: np.ndarray) -> int:
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    if rho.shape != (dim, dim) or 2**n != dim:
        raise ValueError(f"expected a 2^n x 2^n matrix, got shape {rho.shape}")
    return n


def _tensor(rho):
    n = n_qubits(rho)
    return rho.reshape((2,) * (2 * n)), n


def partial_trace(rho: np.ndarray, traced: Iterable[int] = ()) -> np.ndarray:
    t, n = _tensor(np.asarray(rho))
    traced = sorted(set(traced))
    if any(not 0 <= i < n for i in traced):
        raise ValueError(f"qubit indices {traced} out of range for {n} qubits")
    keep = [i for i in range(n) if i not in traced]
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:n])
    cols = list(letters[n : 2 * n])
    for i in traced:
        cols[i] = rows[i]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    red = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    dim = 2 ** len(keep)
    return red.reshape(dim, dim)


def post_select(rho: np.ndarray, proj: Projector):
    """Project one detector, trace it out and renormalise.

    Returns ``(reduced_state, probability)``.
    """
    t, n = _tensor(np.asarray(rho))
    if proj.index >= n:
        raise ProtocolError(f"projector on detector {proj.index} but state has {n} detectors")
    o = 0 if proj.outcome == "g" else 1
    idx = [slice(None)] * (2 * n)
    idx[proj.index] = o
    idx[n + proj.index] = o
    block = t[tuple(idx)]
    dim = 2 ** (n - 1)
    block = block.reshape(dim, dim)
    prob = float(np.trace(block).real)
    if prob <= MIN_PROBABILITY:
        raise ProtocolError(
            f"post-selecting detector {proj.index} on '{proj.outcome}' has probability {prob:.3e}"
        )
    return block / prob, prob


def outcome_probabilities(rho: np.ndarray) -> dict:
    n = n_qubits(rho)
    diag = np.real(np.diag(rho))
    return {"".join(bits): float(diag[i]) for i, bits in enumerate(itertools.product("ge", repeat=n))}


def ghost_image(rho_b: np.ndarray) -> GhostImage:
    """Convex sum of binary pixel templates, weighted by outcome probabilities."""
    probs = outcome_probabilities(rho_b)
    n = n_qubits(rho_b)
    pixels = [sum(p for bits, p in probs.items() if bits[i] == "e") for i in range(n)]
    return GhostImage(pixels=pixels, probabilities=probs)


def ghost_image_1px(rho_b: np.ndarray) -> GhostImage:
    if np.shape(rho_b) != (2, 2):
        raise ValueError("single-pixel image needs a 2x2 state")
    return ghost_image(rho_b)


def ghost_image_2px(rho_b: np.ndarray) -> GhostImage:
    if np.shape(rho_b) != (4, 4):
        raise ValueError("two-pixel image needs a 4x4 state")
    return ghost_image(rho_b)


def contrast(intensity_g: float, intensity_e: float) -> float:
    mean = 0.5 * (intensity_g + intensity_e)
    if not mean > 0:
        raise ProtocolError("contrast undefined: mean intensity is zero")
    return abs(intensity_e - intensity_g) / mean


def partial_transpose(rho: np.ndarray, subsystem: Iterable[int]) -> np.ndarray:
    t, n = _tensor(np.asarray(rho))
    axes = list(range(2 * n))
    for i in set(subsystem):
        if not 0 <= i < n:
            raise ValueError(f"qubit {i} out of range for {n} qubits")
        axes[i], axes[n + i] = axes[n + i], axes[i]
    return t.transpose(axes).reshape(2**n, 2**n)


def negativity(rho: np.ndarray, subsystem: Iterable[int]) -> float:
    """Minus the sum of the negative eigenvalues of the partial transpose."""
    ev = hermitian_eigenvalues(partial_transpose(rho, subsystem))
    neg = -float(np.sum(ev[ev < -NEGATIVITY_TOL]))
    return neg if neg > 0 else 0.0
