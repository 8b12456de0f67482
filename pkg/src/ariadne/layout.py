"""Deterministic spring layout for context graphs.

Fruchterman-Reingold style iteration; linked nodes attract toward an ideal
length proportional to (1 - cosine), all pairs repel.  No further layout
optimization is applied.  Positions are normalized to the unit square.
"""

from __future__ import annotations

import numpy as np

DEFAULT_ITERATIONS = 120


def spring_layout(
    n_nodes: int,
    edges: list[tuple[int, int, float]],
    iterations: int = DEFAULT_ITERATIONS,
    seed: int = 0,
) -> np.ndarray:
    """Positions for n_nodes given weighted edges (i, j, cosine).

    Deterministic for a fixed seed; a single node sits at (0.5, 0.5).
    """
    if n_nodes <= 0:
        return np.zeros((0, 2))
    rng = np.random.Generator(np.random.Philox(key=[np.uint64(seed), np.uint64(0)]))
    pos = rng.random((n_nodes, 2))
    if n_nodes == 1:
        return np.array([[0.5, 0.5]])

    k = 1.0 / np.sqrt(n_nodes)
    ei = np.array([e[0] for e in edges], dtype=int)
    ej = np.array([e[1] for e in edges], dtype=int)
    # Ideal spring length shrinks with similarity; floor keeps it positive.
    ideal = np.array([max(1.0 - e[2], 0.05) * k * 2.0 for e in edges])

    temp = 0.1
    cooling = temp / (iterations + 1)
    for _ in range(iterations):
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.linalg.norm(delta, axis=-1)
        np.fill_diagonal(dist, 1.0)
        # Repulsion between every pair.
        force = (k * k) / (dist * dist)
        np.fill_diagonal(force, 0.0)
        disp = np.einsum("ij,ijk->ik", force / dist, delta)  # (n, 2)
        if len(ei):
            ed = pos[ei] - pos[ej]
            edist = np.maximum(np.linalg.norm(ed, axis=1), 1e-9)
            # Attraction toward the per-edge ideal length.
            pull = (edist - ideal) * edist / ideal
            vec = ed / edist[:, None] * pull[:, None]
            np.subtract.at(disp, ei, vec)
            np.add.at(disp, ej, vec)
        length = np.maximum(np.linalg.norm(disp, axis=1), 1e-9)
        pos += disp / length[:, None] * np.minimum(length, temp)[:, None]
        temp -= cooling

    return _normalize_unit_square(pos)


def _normalize_unit_square(pos: np.ndarray) -> np.ndarray:
    out = pos.copy()
    for axis in range(2):
        lo, hi = out[:, axis].min(), out[:, axis].max()
        if hi - lo < 1e-12:
            out[:, axis] = 0.5
        else:
            out[:, axis] = (out[:, axis] - lo) / (hi - lo)
    return out
