"""The holomorphic 2-form on a quartic surface, patch by patch.

On chart ``c`` with pivot variable ``p`` (a chart coordinate whose partial is
nonzero) the form is ``dx_a ^ dx_b / f_p``; the ordered pair ``(a, b)`` for
each of the twelve (chart, pivot) combinations is listed in ``PATCHES`` using
homogeneous indices. Every (c, p, a, b) is an even permutation of (0, 1, 2, 3),
which is what makes the patches agree on overlaps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .projective import AffineCoords, ChartError, chart_indices, transition_jacobian
from .quartic_surface import (
    FRAME_PARTIAL_FLOOR,
    QuarticSurface,
    SingularPointError,
    SurfacePointNum,
    tangent_frame,
)

__all__ = [
    "OmegaPatch",
    "PATCHES",
    "TwoFormSample",
    "patch_for",
    "omega_eval",
    "omega_sample",
    "pivot_consistency",
    "overlap_consistency",
    "pullback_on_disk",
    "PIVOT_ADMISSIBLE",
    "OVERLAP_THRESHOLD",
]

PIVOT_ADMISSIBLE = 1e-8
OVERLAP_THRESHOLD = 1e-6
TANGENCY_TOL = 1e-8
DISK_RESIDUAL_TOL = 1e-6
FD_STEP = 1e-5


@dataclass(frozen=True)
class OmegaPatch:
    chart: int
    pivot: int  # homogeneous index of the denominator partial
    a: int
    b: int

    def slots(self) -> tuple[int, int, int]:
        """Positions of pivot, a, b among the chart coordinates."""
        idx = chart_indices(self.chart)
        return idx.index(self.pivot), idx.index(self.a), idx.index(self.b)

    def evaluate(self, grad: np.ndarray, v: np.ndarray, w: np.ndarray) -> complex:
        p, a, b = self.slots()
        return complex((v[a] * w[b] - v[b] * w[a]) / grad[p])


PATCHES: dict[tuple[int, int], OmegaPatch] = {
    (c, p): OmegaPatch(c, p, a, b)
    for c, p, a, b in [
        (0, 1, 2, 3), (0, 2, 3, 1), (0, 3, 1, 2),
        (1, 0, 3, 2), (1, 2, 0, 3), (1, 3, 2, 0),
        (2, 0, 1, 3), (2, 1, 3, 0), (2, 3, 0, 1),
        (3, 0, 2, 1), (3, 1, 0, 2), (3, 2, 1, 0),
    ]
}  # fmt: skip


def patch_for(chart: int, pivot: int) -> OmegaPatch:
    try:
        return PATCHES[(chart, pivot)]
    except KeyError:
        raise ValueError(f"no patch for chart {chart} with pivot x{pivot}") from None


@dataclass(frozen=True)
class TwoFormSample:
    point: SurfacePointNum
    v: np.ndarray
    w: np.ndarray
    value: complex


def _local_gradient(X: QuarticSurface, point: SurfacePointNum, chart: int) -> np.ndarray:
    grad = X.chart_gradient(chart, point.affine(chart))
    if np.abs(grad).max() < FRAME_PARTIAL_FLOOR:
        raise SingularPointError("all chart partials vanish at this point")
    return grad


def omega_eval(
    X: QuarticSurface,
    point: SurfacePointNum,
    v,
    w,
    chart: int | None = None,
    pivot: int | None = None,
) -> complex:
    """Omega(v, w) at ``point``; v, w are chart-local tangent vectors.

    ``pivot`` is a homogeneous index; by default the max-modulus partial.
    """
    c = point.chart if chart is None else chart
    grad = _local_gradient(X, point, c)
    v = np.asarray(v, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    scale = np.abs(grad).max()
    for vec in (v, w):
        if abs(grad @ vec) > TANGENCY_TOL * scale * max(np.abs(vec).max(), 1.0):
            raise ValueError("vector is not tangent to the surface")
    idx = chart_indices(c)
    if pivot is None:
        pivot = idx[int(np.argmax(np.abs(grad)))]
    elif abs(grad[idx.index(pivot)]) == 0:
        raise ValueError(f"partial for pivot x{pivot} vanishes")
    return patch_for(c, pivot).evaluate(grad, v, w)


def omega_sample(X: QuarticSurface, point: SurfacePointNum, v, w, **kw) -> TwoFormSample:
    return TwoFormSample(point, np.asarray(v), np.asarray(w), omega_eval(X, point, v, w, **kw))


def pivot_consistency(X: QuarticSurface, point: SurfacePointNum, chart: int | None = None) -> float:
    """Largest relative disagreement of Omega(V1, V2) across admissible pivots."""
    c = point.chart if chart is None else chart
    frame = tangent_frame(X, point, chart=c)
    grad = frame.partials
    idx = chart_indices(c)
    pivots = [idx[k] for k in range(3) if abs(grad[k]) > PIVOT_ADMISSIBLE]
    if len(pivots) < 2:
        raise ValueError("fewer than two admissible pivots at this point")
    vals = [patch_for(c, p).evaluate(grad, frame.V1, frame.V2) for p in pivots]
    ref = max(abs(x) for x in vals)
    return float(max(abs(x - y) for x in vals for y in vals) / ref)


def overlap_consistency(X: QuarticSurface, point: SurfacePointNum, chartA: int, chartB: int) -> float:
    """Relative difference of Omega evaluated in two charts on the same tangent pair."""
    x = point.x
    big = np.abs(x).max()
    for c in (chartA, chartB):
        if abs(x[c]) < OVERLAP_THRESHOLD * big:
            raise ChartError(f"point not inside chart {c}")
    if chartA == chartB:
        return 0.0
    frame = tangent_frame(X, point, chart=chartA)
    jac = transition_jacobian(AffineCoords(chartA, tuple(point.affine(chartA))), chartB)
    va, wa = frame.V1, frame.V2
    vb, wb = jac @ va, jac @ wa
    om_a = omega_eval(X, point, va, wa, chart=chartA)
    om_b = omega_eval(X, point, vb, wb, chart=chartB)
    return float(abs(om_a - om_b) / abs(om_a))


def _chart_residual(X: QuarticSurface, chart: int, u: np.ndarray) -> float:
    num = X._chart_num[chart][0]
    scale = max(1.0, float(np.abs(u).max())) ** 4
    return abs(num(u)) / (num.abs_coeff_sum() * scale)


def pullback_on_disk(
    X: QuarticSurface,
    psi: Callable[[complex], Sequence[complex]],
    gridpoints: Iterable[complex],
    chart: int = 0,
    pivot: int | None = None,
    h: float = FD_STEP,
) -> list[complex]:
    """Coefficient of dz ^ dzbar in psi^* Omega at each grid point.

    ``psi`` maps a disk into chart coordinates of X. Wirtinger derivatives come
    from central differences with step ``h``:
    d = (d/dx - i d/dy) / 2 and dbar = (d/dx + i d/dy) / 2.
    """
    idx = chart_indices(chart)
    out = []
    for z in gridpoints:
        z = complex(z)
        u = np.asarray(psi(z), dtype=np.complex128)
        if u.shape != (3,) or not np.all(np.isfinite(u)):
            raise ChartError("psi leaves the chart")
        if _chart_residual(X, chart, u) > DISK_RESIDUAL_TOL:
            raise ValueError(f"psi({z}) is off the surface")
        dx = (np.asarray(psi(z + h), dtype=np.complex128) - np.asarray(psi(z - h), dtype=np.complex128)) / (2 * h)
        dy = (np.asarray(psi(z + 1j * h), dtype=np.complex128) - np.asarray(psi(z - 1j * h), dtype=np.complex128)) / (
            2 * h
        )
        d = (dx - 1j * dy) / 2
        dbar = (dx + 1j * dy) / 2
        grad = X.chart_gradient(chart, u)
        if np.abs(grad).max() < FRAME_PARTIAL_FLOOR:
            raise SingularPointError("psi passes through a singular point")
        piv = idx[int(np.argmax(np.abs(grad)))] if pivot is None else pivot
        patch = patch_for(chart, piv)
        kp, ka, kb = patch.slots()
        out.append(complex((d[ka] * dbar[kb] - d[kb] * dbar[ka]) / grad[kp]))
    return out
