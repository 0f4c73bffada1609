"""Walk states and the one-step evolution U' = S * C'.

The state is a complex128 array indexed (direction, vertex).  One step
costs O(coin_dim * N): the Grover coin needs one column sum per vertex
and the shift is a cyclic roll (torus), a bit flip (hypercube), a
register swap (complete graph), or the two half-moves of the
two-dimensional coin walk.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .graphs import ConfigurationError, Graph

_SQRT2 = np.sqrt(2.0)
_MAGIC = b"WLKSTAT1"

MARKINGS = ("minus_identity", "minus_c0", "projector_flip")


@dataclass(frozen=True)
class CoinConfig:
    """Which vertices are marked and how the marking acts.

    minus_identity   C1 = -I per marked vertex (grids, hypercube)
    minus_c0         C1 = -C0 per marked vertex (complete graph)
    projector_flip   whole-state reflection I - 2|s,v><s,v| (dirac2 coin)
    """

    marked: tuple[int, ...] = ()
    marking: str = "minus_identity"

    def __post_init__(self):
        object.__setattr__(self, "marked", tuple(int(v) for v in self.marked))
        if self.marking not in MARKINGS:
            raise ConfigurationError(f"unknown marking {self.marking!r}")
        if len(set(self.marked)) != len(self.marked):
            raise ConfigurationError("marked vertices must be distinct")

    def validate_for(self, graph: Graph) -> None:
        spec = graph.spec
        for v in self.marked:
            if not 0 <= v < graph.n:
                raise ConfigurationError(f"marked vertex {v} out of range")
        if self.marking == "minus_c0" and spec.family != "complete":
            raise ConfigurationError("minus_c0 marking is specific to the complete graph")
        if self.marking == "minus_identity" and spec.family == "complete":
            raise ConfigurationError("complete graph uses the minus_c0 marking")
        if spec.coin == "dirac2" and self.marked and self.marking != "projector_flip":
            raise ConfigurationError("dirac2 walk marks via projector_flip")
        if self.marking == "projector_flip" and spec.coin != "dirac2":
            raise ConfigurationError("projector_flip marking requires the dirac2 coin")


def default_coin(graph: Graph, marked=()) -> CoinConfig:
    """Marking convention the arena expects, for the given marked set."""
    spec = graph.spec
    if spec.coin == "dirac2":
        kind = "projector_flip"
    elif spec.family == "complete":
        kind = "minus_c0"
    else:
        kind = "minus_identity"
    cfg = CoinConfig(marked=tuple(marked), marking=kind)
    cfg.validate_for(graph)
    return cfg


class WalkState:
    """Complex amplitudes over (direction, vertex) for one arena."""

    __slots__ = ("graph", "amps")

    def __init__(self, graph: Graph, amps: np.ndarray):
        if amps.shape != (graph.coin_dim, graph.n):
            raise ValueError(f"amplitude array must have shape {(graph.coin_dim, graph.n)}")
        self.graph = graph
        self.amps = np.ascontiguousarray(amps, dtype=np.complex128)

    def copy(self) -> "WalkState":
        return WalkState(self.graph, self.amps.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def check_normalized(self, tol: float = 1e-9) -> None:
        defect = abs(self.norm() - 1.0)
        if defect > tol:
            raise ValueError(f"state norm off by {defect:.3e} (tolerance {tol:.1e})")

    @property
    def vector(self) -> np.ndarray:
        """Flat view, index c*N + v."""
        return self.amps.reshape(-1)

    def _grid(self) -> np.ndarray:
        """View shaped (coin_dim, *vertex_shape); last axis is the fastest coordinate."""
        return self.amps.reshape((self.graph.coin_dim,) + tuple(reversed(self.graph.vertex_shape)))


def uniform_state(graph: Graph) -> WalkState:
    """The walk's 1-eigenvector: every amplitude 1/sqrt(coin_dim*N)."""
    amp = 1.0 / np.sqrt(graph.coin_dim * graph.n)
    return WalkState(graph, np.full((graph.coin_dim, graph.n), amp, dtype=np.complex128))


def basis_state(graph: Graph, vertex: int, direction: int) -> WalkState:
    amps = np.zeros((graph.coin_dim, graph.n), dtype=np.complex128)
    amps[direction, vertex] = 1.0
    return WalkState(graph, amps)


def marked_coin_state(graph: Graph, vertex: int) -> WalkState:
    """|s, v>: uniform coin at one vertex."""
    amps = np.zeros((graph.coin_dim, graph.n), dtype=np.complex128)
    amps[:, vertex] = 1.0 / np.sqrt(graph.coin_dim)
    return WalkState(graph, amps)


def overlap(a: WalkState, b: WalkState) -> complex:
    """<a|b>."""
    return complex(np.vdot(a.amps, b.amps))


# -- coin ----------------------------------------------------------------


def _flip_marked_coin_state(state: WalkState, vertex: int) -> None:
    # rank-one reflection I - 2|s,v><s,v|
    amps = state.amps
    d = state.graph.coin_dim
    c = amps[:, vertex].sum() / np.sqrt(d)
    amps[:, vertex] -= (2.0 * c) / np.sqrt(d)


def apply_coin(state: WalkState, coin: CoinConfig) -> WalkState:
    """C': Grover coin everywhere, replaced by the marking at marked vertices.

    For projector_flip the unmarked coin is the identity and the marking is
    the whole-state reflection about |s, v>.
    """
    amps = state.amps
    if coin.marking == "projector_flip":
        for v in coin.marked:
            _flip_marked_coin_state(state, v)
        return state

    marked = coin.marked
    saved = amps[:, list(marked)].copy() if marked else None
    colsum = amps.sum(axis=0)
    amps *= -1.0
    amps += (2.0 / state.graph.coin_dim) * colsum
    if marked:
        if coin.marking == "minus_identity":
            amps[:, list(marked)] = -saved
        else:  # minus_c0: negate the Grover result
            amps[:, list(marked)] *= -1.0
    return state


# -- shift ---------------------------------------------------------------


def apply_shift(state: WalkState, inverse: bool = False) -> WalkState:
    """S: permute amplitudes along the edges (norm preserved exactly)."""
    spec = state.graph.spec
    if spec.shift == "dirac":
        return _dirac_shift(state, inverse)
    if spec.shift == "swap":
        state.amps = np.ascontiguousarray(state.amps.T)
        return state
    if spec.family == "hypercube":
        grid = state._grid()
        d = spec.dims[0]
        for i in range(d):
            axis = d - i  # vertex bit i, with axis 0 holding the coin
            grid[i] = np.roll(grid[i], 1, axis=axis - 1)
        return state
    return _torus_shift(state, inverse)


def _torus_shift(state: WalkState, inverse: bool) -> WalkState:
    grid = state._grid()
    ndim = len(state.graph.spec.dims)
    flip = state.graph.spec.shift == "flip_flop"
    # the flip-flop shift is an involution, so its inverse is itself
    sign = -1 if inverse and not flip else 1
    for axis in range(ndim):
        np_axis = ndim - 1 - axis  # vertex axes of grid[c]
        plus, minus = grid[2 * axis].copy(), grid[2 * axis + 1]
        fwd = np.roll(plus, sign, axis=np_axis)
        back = np.roll(minus, -sign, axis=np_axis)
        if flip:
            grid[2 * axis], grid[2 * axis + 1] = back, fwd
        else:
            grid[2 * axis], grid[2 * axis + 1] = fwd, back
    return state


def _dirac_shift(state: WalkState, inverse: bool) -> WalkState:
    # half-move 1: coin basis moves along y; half-move 2: Hadamard basis
    # moves along x.  Axes of the grid view: (coin, y, x).
    grid = state._grid()
    sign = -1 if inverse else 1

    def move_y():
        grid[0] = np.roll(grid[0], -sign, axis=0)  # up: y -> y-1
        grid[1] = np.roll(grid[1], sign, axis=0)

    def move_x():
        left = (grid[0] + grid[1]) / _SQRT2
        right = (grid[0] - grid[1]) / _SQRT2
        left = np.roll(left, -sign, axis=1)  # left: x -> x-1
        right = np.roll(right, sign, axis=1)
        grid[0] = (left + right) / _SQRT2
        grid[1] = (left - right) / _SQRT2

    if inverse:
        move_x()
        move_y()
    else:
        move_y()
        move_x()
    return state


# -- steps ---------------------------------------------------------------


def step(state: WalkState, coin: CoinConfig) -> WalkState:
    """One walk step U' = S * C'."""
    return apply_shift(apply_coin(state, coin))


def unstep(state: WalkState, coin: CoinConfig) -> WalkState:
    """Inverse step C'^-1 * S^-1; every coin here is an involution."""
    apply_shift(state, inverse=True)
    return apply_coin(state, coin)


def reflect_about_uniform(state: WalkState) -> WalkState:
    """state -> 2 <Phi0|state> |Phi0> - state."""
    amps = state.amps
    d_n = amps.size
    mean = amps.sum() / d_n  # <Phi0|state> / sqrt(dN)
    amps *= -1.0
    amps += 2.0 * mean
    return state


def flip_marked_vertices(state: WalkState, marked) -> WalkState:
    """Membership oracle I - 2 Pi_v: negate all amplitudes at marked vertices."""
    state.amps[:, list(marked)] *= -1.0
    return state


# -- measurement -----------------------------------------------------------


def vertex_probabilities(state: WalkState) -> np.ndarray:
    """p(v) summed over the coin register."""
    a = state.amps
    return (a.real * a.real + a.imag * a.imag).sum(axis=0)


def measure_probabilities(state: WalkState, vertices) -> tuple[np.ndarray, np.ndarray]:
    """Per requested vertex: p(v) and the neighborhood aggregate.

    p_nbhd(v) = p(v) + sum of p over the neighbors of v; the walk's final
    state concentrates on the marked vertex and its neighbors, so this is
    the success figure the experiment harness reports alongside p(v).
    """
    p_all = vertex_probabilities(state)
    vs = list(vertices)
    p = np.array([p_all[v] for v in vs])
    p_nb = np.array([p_all[v] + p_all[state.graph.neighbors(v)].sum() for v in vs])
    return p, p_nb


def neighborhood_probability(state: WalkState, vertices) -> float:
    """Combined probability of the union of {v} and its neighbors over vertices."""
    p_all = vertex_probabilities(state)
    support: set[int] = set()
    for v in vertices:
        support.add(int(v))
        support.update(int(u) for u in state.graph.neighbors(v))
    return float(p_all[sorted(support)].sum())


# -- serialization ---------------------------------------------------------


def save_state(state: WalkState, path) -> None:
    """Raw little-endian dump: 16-byte header (magic, coin_dim, N) + re/im pairs."""
    header = _MAGIC + struct.pack("<II", state.graph.coin_dim, state.graph.n)
    data = np.empty((state.amps.size, 2), dtype="<f8")
    flat = state.vector
    data[:, 0] = flat.real
    data[:, 1] = flat.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.tobytes())


def load_state(graph: Graph, path) -> WalkState:
    with open(path, "rb") as fh:
        header = fh.read(16)
        if header[:8] != _MAGIC:
            raise ValueError("not a walklab state file")
        coin_dim, n = struct.unpack("<II", header[8:])
        if (coin_dim, n) != (graph.coin_dim, graph.n):
            raise ValueError(
                f"state file is for coin_dim={coin_dim}, N={n}; "
                f"graph has coin_dim={graph.coin_dim}, N={graph.n}"
            )
        raw = np.frombuffer(fh.read(), dtype="<f8").reshape(-1, 2)
    amps = (raw[:, 0] + 1j * raw[:, 1]).reshape(coin_dim, n)
    return WalkState(graph, amps)
