"""Shared test utilities: dense principal-pair extraction and state factories."""

from __future__ import annotations

import numpy as np

from walklab import (GraphSpec, WalkState, build_graph, default_coin, dense_eigens,
                     dense_unitary, marked_coin_state, uniform_state)


def random_state(graph, seed=0) -> WalkState:
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=(graph.coin_dim, graph.n)) \
        + 1j * rng.normal(size=(graph.coin_dim, graph.n))
    amps /= np.linalg.norm(amps)
    return WalkState(graph, amps)


def principal_dense_data(spec: GraphSpec, marked: int = 0) -> dict:
    """Dense ground truth for the perturbed walk's principal pair.

    Aligns the two eigenvectors so their projections on |s, v> are real
    positive, then forms w_start = (w+ - w-)/sqrt(2), w_good = (w+ + w-)/sqrt(2).
    """
    graph = build_graph(spec)
    coin = default_coin(graph, marked=(marked,))
    op = dense_unitary(graph, coin)
    phases, vectors = dense_eigens(op)
    nonzero = np.abs(phases) > 1e-8
    alpha_dense = float(np.min(np.abs(phases[nonzero])))
    i_plus = int(np.argmin(np.abs(phases - alpha_dense)))
    i_minus = int(np.argmin(np.abs(phases + alpha_dense)))
    sv = marked_coin_state(graph, marked).vector
    phi0 = uniform_state(graph).vector
    w_plus = vectors[:, i_plus].copy()
    w_minus = vectors[:, i_minus].copy()
    w_plus *= np.exp(-1j * np.angle(np.vdot(sv, w_plus)))
    w_minus *= np.exp(-1j * np.angle(np.vdot(sv, w_minus)))
    w_start = (w_plus - w_minus) / np.sqrt(2)
    w_good = (w_plus + w_minus) / np.sqrt(2)
    return {
        "graph": graph,
        "op": op,
        "phases": phases,
        "vectors": vectors,
        "alpha": alpha_dense,
        "start_overlap": abs(np.vdot(phi0, w_start)),
        "good_overlap": abs(np.vdot(sv, w_good)),
    }


def json_numbers_close(a, b, atol=1e-9, path="$") -> None:
    """Recursive comparison of parsed JSON with numeric tolerance."""
    if isinstance(a, dict) and isinstance(b, dict):
        assert a.keys() == b.keys(), f"{path}: keys {sorted(a)} != {sorted(b)}"
        for key in a:
            json_numbers_close(a[key], b[key], atol, f"{path}.{key}")
    elif isinstance(a, list) and isinstance(b, list):
        assert len(a) == len(b), f"{path}: length {len(a)} != {len(b)}"
        for i, (x, y) in enumerate(zip(a, b)):
            json_numbers_close(x, y, atol, f"{path}[{i}]")
    elif isinstance(a, bool) or isinstance(b, bool):
        assert a == b, f"{path}: {a} != {b}"
    elif isinstance(a, (int, float)) and isinstance(b, (int, float)):
        assert abs(a - b) <= atol * max(1.0, abs(a), abs(b)), f"{path}: {a} != {b}"
    else:
        assert a == b, f"{path}: {a!r} != {b!r}"
