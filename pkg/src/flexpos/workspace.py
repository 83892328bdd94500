"""Reachable-set analysis of box-constrained actuator inputs.

The reachable task-space set under the linear map is a zonotope: the
image of the input box. Translational and rotational blocks are treated
as two independent 3D zonotopes, matching how ranges and volumes are
reported. Volumes use the exact generator-triple determinant sum; a
seeded Monte-Carlo estimator is provided as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ValidationError
from .kinematics import as_matrix6

# Default safe per-actuator stroke (um); inputs beyond this are rejected.
DEFAULT_MAX_STROKE_UM = 110.0


@dataclass(frozen=True)
class InputBox:
    """Per-actuator displacement bounds in um."""

    lo: np.ndarray
    hi: np.ndarray

    def __init__(self, lo=0.0, hi=DEFAULT_MAX_STROKE_UM, max_stroke=DEFAULT_MAX_STROKE_UM):
        lo_arr = np.broadcast_to(np.asarray(lo, dtype=float), (6,)).copy()
        hi_arr = np.broadcast_to(np.asarray(hi, dtype=float), (6,)).copy()
        if not (np.all(np.isfinite(lo_arr)) and np.all(np.isfinite(hi_arr))):
            raise ValidationError("input box bounds must be finite")
        if np.any(lo_arr > hi_arr):
            raise ValidationError("input box requires lo <= hi componentwise")
        if np.any(hi_arr > max_stroke + 1e-12):
            raise ValidationError(
                f"input box hi exceeds the safe stroke of {max_stroke} um"
            )
        object.__setattr__(self, "lo", lo_arr)
        object.__setattr__(self, "hi", hi_arr)

    @property
    def widths(self) -> np.ndarray:
        return self.hi - self.lo


def axis_intervals(jacobian, box: InputBox) -> np.ndarray:
    """Exact per-axis [min, max] of the reachable pose, shape (6, 2).

    Interval arithmetic over the box: each input contributes its best and
    worst endpoint independently because the map is linear.
    """
    J = as_matrix6(jacobian, "jacobian")
    lo_term = J * box.lo
    hi_term = J * box.hi
    mins = np.minimum(lo_term, hi_term).sum(axis=1)
    maxs = np.maximum(lo_term, hi_term).sum(axis=1)
    return np.stack([mins, maxs], axis=1)


def axis_widths(jacobian, box: InputBox) -> np.ndarray:
    """Per-axis reachable range width (um for rows 1-3, urad for rows 4-6)."""
    iv = axis_intervals(jacobian, box)
    return iv[:, 1] - iv[:, 0]


def amplification_ratios(jacobian, box: InputBox) -> np.ndarray:
    """Translational range divided by input range, per X/Y/Z axis.

    Requires a uniform box (all actuators share the same width) so the
    ratio is well defined.
    """
    w = box.widths
    if not np.allclose(w, w[0], rtol=1e-12, atol=0.0):
        raise ValidationError("amplification ratios require a uniform input box")
    if w[0] <= 0.0:
        raise ValidationError("amplification ratios require a nonzero-width box")
    return axis_widths(jacobian, box)[:3] / w[0]


def translational_generators(jacobian, box: InputBox) -> np.ndarray:
    """Zonotope generators (3, 6) of the translational block."""
    J = as_matrix6(jacobian, "jacobian")
    return J[:3, :] * box.widths


def rotational_generators(jacobian, box: InputBox) -> np.ndarray:
    """Zonotope generators (3, 6) of the rotational block."""
    J = as_matrix6(jacobian, "jacobian")
    return J[3:, :] * box.widths


def _as_generators(generators) -> np.ndarray:
    G = np.asarray(generators, dtype=float)
    if G.ndim != 2 or G.shape[0] != 3:
        raise ValidationError(f"generators must have shape (3, m), got {G.shape}")
    if not np.all(np.isfinite(G)):
        raise ValidationError("generators contain non-finite entries")
    return G


def zonotope_volume(generators) -> float:
    """Exact volume of the 3D zonotope spanned by the given generators.

    Sum of |det| over all generator triples. Degenerate (rank < 3) sets
    give 0 without erroring.
    """
    G = _as_generators(generators)
    m = G.shape[1]
    total = 0.0
    for a, b, c in combinations(range(m), 3):
        total += abs(np.linalg.det(G[:, (a, b, c)]))
    return total


def zonotope_volume_mc(generators, n_samples: int = 1_000_000, seed: int = 0):
    """Monte-Carlo volume estimate of the same zonotope.

    Samples uniformly in the tight axis-aligned bounding box and counts
    membership via the facet (H-) representation built from generator
    pairs. Returns ``(estimate, standard_deviation)`` of the estimator.
    Deterministic for a fixed seed.
    """
    G = _as_generators(generators)
    m = G.shape[1]
    if n_samples < 1:
        raise ValidationError("n_samples must be >= 1")

    half = 0.5 * np.sum(np.abs(G), axis=1)  # centered bounding-box half widths
    box_vol = float(np.prod(2.0 * half))
    if box_vol == 0.0:
        return 0.0, 0.0

    scale = float(np.max(np.abs(G)))
    normals = []
    supports = []
    for a, b in combinations(range(m), 2):
        n_vec = np.cross(G[:, a], G[:, b])
        norm = np.linalg.norm(n_vec)
        if norm <= 1e-12 * scale * scale:
            continue  # parallel pair spans no facet
        n_vec = n_vec / norm
        normals.append(n_vec)
        supports.append(0.5 * np.sum(np.abs(n_vec @ G)))
    if not normals:
        return 0.0, 0.0  # rank <= 1: flat set, zero volume
    N = np.array(normals)  # (k, 3)
    S = np.array(supports)  # (k,)

    rng = np.random.default_rng(seed)
    inside = 0
    chunk = 200_000
    remaining = n_samples
    while remaining > 0:
        take = min(chunk, remaining)
        pts = rng.uniform(-half, half, size=(take, 3))
        proj = np.abs(pts @ N.T)  # centered zonotope: |n.p| <= support
        inside += int(np.count_nonzero(np.all(proj <= S + 1e-12, axis=1)))
        remaining -= take

    frac = inside / n_samples
    estimate = box_vol * frac
    std = box_vol * np.sqrt(max(frac * (1.0 - frac), 0.0) / n_samples)
    return estimate, std


@dataclass(frozen=True)
class Polygon2D:
    """Convex, counterclockwise projection polygon of the workspace.

    vertices: (k, 2) open ring (last vertex connects back to the first).
    plane: axis-pair label such as "xy" or "rx-ry".
    degenerate: True when the projection has fewer than 2 independent
        generators (a segment or a point).
    """

    vertices: np.ndarray
    plane: str
    degenerate: bool

    @property
    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)


def project_polygon(generators, plane, label: str | None = None, offset=(0.0, 0.0)) -> Polygon2D:
    """Exact 2D zonotope polygon of the projection onto an axis pair.

    Projected generators are flipped into the upper half-plane, sorted by
    angle, and accumulated along the boundary; the second half follows by
    central symmetry. Vertex count is twice the number of independent
    projected generators.

    Args:
        generators: (3, m) zonotope generators.
        plane: pair of row indices into the 3-row block, e.g. (0, 1).
        label: plane label stored on the polygon; defaults to the indices.
        offset: 2D center of the projected zonotope (shape only matters
            for analysis, so the default centers it at the origin).
    """
    G = _as_generators(generators)
    i, j = plane
    if not (0 <= i < 3 and 0 <= j < 3 and i != j):
        raise ValidationError(f"plane must be two distinct indices in 0..2, got {plane}")
    P = G[(i, j), :]
    if label is None:
        label = f"{i}-{j}"

    scale = float(np.max(np.abs(P))) if P.size else 0.0
    keep = np.linalg.norm(P, axis=0) > 1e-12 * max(scale, 1.0)
    gens = P[:, keep]
    center = np.asarray(offset, dtype=float)

    if gens.shape[1] == 0:
        return Polygon2D(vertices=center.reshape(1, 2), plane=label, degenerate=True)

    # Flip into the upper half-plane (y > 0, or y == 0 with x > 0); the
    # flipped set spans the same zonotope about its center.
    flip = (gens[1] < 0.0) | ((gens[1] == 0.0) & (gens[0] < 0.0))
    gens = np.where(flip, -gens, gens)
    order = np.argsort(np.arctan2(gens[1], gens[0]), kind="stable")
    gens = gens[:, order]

    # Merge collinear generators; a 2D zonotope edge direction appears once.
    merged = [gens[:, 0].copy()]
    for k in range(1, gens.shape[1]):
        g = gens[:, k]
        prev = merged[-1]
        if abs(prev[0] * g[1] - prev[1] * g[0]) <= 1e-12 * max(scale, 1.0) ** 2:
            merged[-1] = prev + g
        else:
            merged.append(g.copy())
    gens = np.array(merged).T

    m = gens.shape[1]
    lowest = center - 0.5 * gens.sum(axis=1)
    if m == 1:
        verts = np.array([lowest, lowest + gens[:, 0]])
        return Polygon2D(vertices=verts, plane=label, degenerate=True)

    verts = np.empty((2 * m, 2))
    verts[0] = lowest
    for k in range(m):
        if k < m - 1:
            verts[k + 1] = verts[k] + gens[:, k]
    # opposite boundary by central symmetry through the center
    for k in range(m):
        verts[m + k] = 2.0 * center - verts[k]
    return Polygon2D(vertices=verts, plane=label, degenerate=False)


_TRANS_PLANES = (((0, 1), "xy"), ((0, 2), "xz"), ((1, 2), "yz"))
_ROT_PLANES = (((0, 1), "rx-ry"), ((0, 2), "rx-rz"), ((1, 2), "ry-rz"))


def workspace_polygons(jacobian, box: InputBox) -> list[Polygon2D]:
    """The six standard projections: three translational, three rotational."""
    polys = []
    for gens, planes in (
        (translational_generators(jacobian, box), _TRANS_PLANES),
        (rotational_generators(jacobian, box), _ROT_PLANES),
    ):
        for idx, label in planes:
            polys.append(project_polygon(gens, idx, label=label))
    return polys


@dataclass(frozen=True)
class WorkspaceSummary:
    """Ranges, amplification ratios, and volumes of the reachable set."""

    intervals: np.ndarray       # (6, 2) per-axis [min, max]
    widths: np.ndarray          # (6,) um / urad
    amplification: np.ndarray   # (3,) dimensionless
    volume_translational: float  # um^3
    volume_rotational: float     # urad^3


def summarize(jacobian, box: InputBox) -> WorkspaceSummary:
    """Full workspace summary for a map and input box."""
    iv = axis_intervals(jacobian, box)
    return WorkspaceSummary(
        intervals=iv,
        widths=iv[:, 1] - iv[:, 0],
        amplification=amplification_ratios(jacobian, box),
        volume_translational=zonotope_volume(translational_generators(jacobian, box)),
        volume_rotational=zonotope_volume(rotational_generators(jacobian, box)),
    )
