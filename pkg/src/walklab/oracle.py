"""Ground truth for small instances: explicit unitaries and eigensystems.

Everything here is validation machinery.  The fast engine is never
checked against itself: dense matrices are built column by column from
basis states, powered explicitly, and eigendecomposed via a complex
Schur reduction (which hands back an orthonormal eigenbasis, since a
unitary matrix is normal).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .engine import CoinConfig, WalkState, step
from .graphs import Graph

DIMENSION_CAP = 1024


@dataclass
class DenseOperator:
    """A full (coin_dim*N)-dimensional unitary with its arena."""

    graph: Graph
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def unitarity_defect(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m.conj().T @ m - np.eye(self.dim))))


def dense_unitary(graph: Graph, coin: CoinConfig) -> DenseOperator:
    """Column c*N+v is one step applied to the basis state (c, v)."""
    dim = graph.coin_dim * graph.n
    if dim > DIMENSION_CAP:
        raise ValueError(
            f"dense oracle capped at dimension {DIMENSION_CAP}; "
            f"requested coin_dim*N = {dim}"
        )
    coin.validate_for(graph)
    matrix = np.empty((dim, dim), dtype=np.complex128)
    for col in range(dim):
        amps = np.zeros(dim, dtype=np.complex128)
        amps[col] = 1.0
        state = WalkState(graph, amps.reshape(graph.coin_dim, graph.n))
        matrix[:, col] = step(state, coin).vector
    return DenseOperator(graph, matrix)


def dense_eigens(op: DenseOperator) -> tuple[np.ndarray, np.ndarray]:
    """Eigenphases (sorted by |phase|) and an orthonormal eigenbasis.

    Schur of a normal matrix is diagonal, so the Schur vectors are exact
    eigenvectors; plain eig would not hand back an orthonormal basis on
    the heavily degenerate spectra these walks have.
    """
    t, z = scipy.linalg.schur(op.matrix, output="complex")
    phases = np.angle(np.diag(t))
    order = np.argsort(np.abs(phases), kind="stable")
    return phases[order], z[:, order]


def eigenspace_projection(phases: np.ndarray, vectors: np.ndarray,
                          target_phase: float, vector: np.ndarray,
                          tol: float = 1e-9) -> float:
    """Squared norm of the projection of `vector` onto one eigenphase space."""
    sel = np.abs(np.angle(np.exp(1j * (phases - target_phase)))) < tol
    if not np.any(sel):
        return 0.0
    coeffs = vectors[:, sel].conj().T @ vector
    return float(np.sum(np.abs(coeffs) ** 2))


def evolve_dense(op: DenseOperator, vector: np.ndarray, steps: int) -> np.ndarray:
    """Step-by-step matrix application; returns the (steps+1, dim) history."""
    out = np.empty((steps + 1, op.dim), dtype=np.complex128)
    out[0] = vector
    for t in range(steps):
        out[t + 1] = op.matrix @ out[t]
    return out


def lift_principal_eigenvector(graph: Graph, marked_vertex: int,
                               alpha: float) -> np.ndarray:
    """|psi_good> + i |w'_alpha> assembled in the full space, normalized.

    Built mode by mode from the coin blocks: each block's conjugate pair is
    phase-aligned so its projection on |s, v> is real positive, theta = pi
    levels enter through the |s, v>-carrying direction of the -1 eigenspace,
    and stationary +1 blocks enter like the uniform state.  If alpha solves
    the secular equation this is an eigenvector of U' for e^(i alpha) up to
    rounding, which is exactly what the residual tests check.
    """
    from .spectral import (block_eigens, coin_block, lift_block_vector,
                           mode_vertex_wave, torus_modes)

    spec = graph.spec
    n = graph.n
    sv = np.zeros(graph.coin_dim * n, dtype=np.complex128)
    sv[marked_vertex::n] = 1.0 / np.sqrt(graph.coin_dim)  # layout is c*N + v

    if spec.family == "hypercube":
        modes = [m for m in np.ndindex(*(2,) * spec.dims[0]) if any(m)]
    else:
        modes = [m for m in torus_modes(spec) if any(m)]

    def cot(x):
        return np.cos(x) / np.sin(x)

    w_prime = np.sqrt(1.0 / n) * cot(alpha / 2) * _uniform_vector(graph)
    for mode in modes:
        block = coin_block(spec, mode)
        phases, vecs = block_eigens(block)
        phases = np.where(phases < -np.pi + 1e-9, phases + 2 * np.pi, phases)
        s_coin = np.full(graph.coin_dim, 1.0 / np.sqrt(graph.coin_dim))
        wave_at_v = mode_vertex_wave(graph, mode)[marked_vertex].conj()
        for j, phase in enumerate(phases):
            if phase < -1e-9:
                continue  # conjugate partners are added explicitly below
            coin_vec = vecs[:, j]
            amp = np.vdot(coin_vec, s_coin) * wave_at_v  # <Phi_mode,j | s,v>
            if abs(amp) < 1e-13:
                continue
            coin_vec = coin_vec * (amp / abs(amp))  # align: projection real > 0
            a_j = abs(amp)
            plus = lift_block_vector(graph, mode, coin_vec)
            if phase > np.pi - 1e-9:  # -1 level: a single real direction
                w_prime += a_j * cot((alpha - np.pi) / 2) * plus
            elif phase < 1e-9:  # stationary +1 block beyond the uniform state
                w_prime += a_j * cot(alpha / 2) * plus
            else:
                w_prime += a_j * (cot((alpha - phase) / 2) * plus
                                  + cot((alpha + phase) / 2) * plus.conj())
    vec = sv + 1j * w_prime
    return vec / np.linalg.norm(vec)


def _uniform_vector(graph: Graph) -> np.ndarray:
    dim = graph.coin_dim * graph.n
    return np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128)


def compare_traces(fast, dense) -> float:
    """Max absolute deviation between two equal-length probability traces."""
    a = np.asarray(fast, dtype=float)
    b = np.asarray(dense, dtype=float)
    if a.shape != b.shape:
        raise ValueError("traces must have equal length")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))
