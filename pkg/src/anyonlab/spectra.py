"""Physical-sector spectra, localization metrics and the theta sweep.

Eigenstates are classified into scattering states (two particles far
apart), bulk doublons (bound pairs spread along the diagonal) and doublon
edge states pinned to either corner of the diagonal.  The doublon gap sits
beneath the upper doublon band (the N // 2 highest on-site pair states);
its closing as a function of the exchange angle marks the topological
transition.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
import math

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConvergenceFailure, InvalidParam, NoDoublonBand, NoMinimum, NotNormalized
from .model import build_hamiltonian, compress, physical_basis

__all__ = [
    "StateClass",
    "Thresholds",
    "EigenState",
    "DoublonGap",
    "SweepPoint",
    "SweepResult",
    "eigendecompose",
    "ipr",
    "state_metrics",
    "classify_state",
    "physical_spectrum",
    "doublon_gap",
    "in_gap_states",
    "theta_sweep",
    "find_transition",
]


class StateClass(str, Enum):
    SCATTERING = "scattering"
    DOUBLON_BULK = "doublon_bulk"
    DOUBLON_EDGE_LEFT = "doublon_edge_left"
    DOUBLON_EDGE_RIGHT = "doublon_edge_right"
    UNCLASSIFIED = "unclassified"

    def __str__(self):
        return self.value

    @property
    def is_doublon(self):
        return self.value.startswith("doublon")

    @property
    def is_edge(self):
        return self in (StateClass.DOUBLON_EDGE_LEFT, StateClass.DOUBLON_EDGE_RIGHT)


@dataclass(frozen=True)
class Thresholds:
    """Classification knobs.

    Attributes
    ----------
    doublon_weight : float
        Minimum weight on |m - n| <= 1 for a doublon.
    edge_weight : float
        Minimum weight in a corner block for an edge doublon.
    corner_block : int
        Side of the square corner blocks used for the edge weights.
    onsite_weight : float
        Minimum weight on m == n for a doublon to count towards the
        doublon bands.  Separates on-site pairs from nearest-neighbour
        bound states, which also live next to the diagonal.
    in_gap_margin : float
        An edge doublon counts as in-gap only when it sits at least this
        fraction of the gap inside both band edges.
    min_band_states : int
        Smallest admissible size of the upper doublon band.
    edge_region, edge_region_weight : float
        A state whose weight inside the corner square spanning this
        fraction of the lattice exceeds ``edge_region_weight`` is treated
        as an (extended) edge state when measuring the gap, even if it
        misses the strict ``edge_weight`` test near the transition.
    """

    doublon_weight: float = 0.8
    edge_weight: float = 0.5
    corner_block: int = 2
    onsite_weight: float = 0.3
    in_gap_margin: float = 0.1
    min_band_states: int = 2
    edge_region: float = 0.25
    edge_region_weight: float = 0.6


@dataclass(frozen=True, eq=False)
class EigenState:
    """One physical eigenstate and its localization metrics."""

    energy: float
    amplitudes: np.ndarray = field(repr=False)  # (N, N) complex map beta[m-1, n-1]
    ipr: float
    diag_weight: float
    onsite_weight: float
    edge_weight_left: float
    edge_weight_right: float
    corner_weight: float = 0.0
    kind: StateClass = StateClass.UNCLASSIFIED


@dataclass(frozen=True)
class DoublonGap:
    """Gap beneath the upper doublon band.

    ``spacing`` is the median level spacing inside the upper band; a
    finite array always shows a gap of about that size even where the
    infinite system is gapless.
    """

    gap: float
    lower_band_top: float
    upper_band_bottom: float
    spacing: float = 0.0

    def is_open(self, ratio=2.0):
        return self.gap > ratio * self.spacing

    @property
    def center(self):
        return 0.5 * (self.lower_band_top + self.upper_band_bottom)


def eigendecompose(h):
    """Dense Hermitian eigendecomposition with ascending energies.

    Returns
    -------
    energies : ndarray, shape (d,)
    vectors : ndarray, shape (d, d)
        Orthonormal eigenvectors stored column-wise.
    """
    try:
        energies, vectors = np.linalg.eigh(np.asarray(h))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return energies, vectors


def _norm_check(probs, tol=1e-8):
    norms = probs.reshape(probs.shape[0], -1).sum(axis=1)
    bad = np.abs(norms - 1.0) > tol
    if np.any(bad):
        raise NotNormalized(f"state norm {norms[bad][0]!r} differs from 1")


def ipr(state):
    """Inverse participation ratio sum |beta|^4 of a normalized state.

    ``state`` may be an :class:`EigenState` or any array of amplitudes.
    """
    amps = state.amplitudes if isinstance(state, EigenState) else np.asarray(state)
    probs = np.abs(amps) ** 2
    _norm_check(probs[None])
    return float(np.sum(probs ** 2))


def state_metrics(amplitudes, corner_block=2, edge_region=0.25):
    """Vectorised metrics for a stack of amplitude maps.

    Parameters
    ----------
    amplitudes : ndarray, shape (k, N, N)

    Returns
    -------
    dict of ndarrays of length k
        ``ipr``, ``diag_weight``, ``onsite_weight``, ``edge_weight_left``,
        ``edge_weight_right`` and ``corner_weight`` (the larger weight in the
        two corner squares of side ``edge_region * N``).
    """
    probs = np.abs(amplitudes) ** 2
    _norm_check(probs)
    N = probs.shape[-1]
    m, n = np.indices((N, N))
    near = np.abs(m - n) <= 1
    c = min(corner_block, N)
    q = max(1, int(round(edge_region * N)))
    return {
        "ipr": np.sum(probs ** 2, axis=(1, 2)),
        "diag_weight": np.sum(probs * near, axis=(1, 2)),
        "onsite_weight": np.trace(probs, axis1=1, axis2=2),
        "edge_weight_left": np.sum(probs[:, :c, :c], axis=(1, 2)),
        "edge_weight_right": np.sum(probs[:, N - c:, N - c:], axis=(1, 2)),
        "corner_weight": np.maximum(np.sum(probs[:, :q, :q], axis=(1, 2)),
                                    np.sum(probs[:, N - q:, N - q:], axis=(1, 2))),
    }


def classify_state(state, thresholds=None):
    """Assign a :class:`StateClass` from the state's metrics."""
    t = thresholds or Thresholds()
    if state.diag_weight < t.doublon_weight:
        return StateClass.SCATTERING
    left = state.edge_weight_left >= t.edge_weight
    right = state.edge_weight_right >= t.edge_weight
    if left and right:
        return StateClass.UNCLASSIFIED
    if left:
        return StateClass.DOUBLON_EDGE_LEFT
    if right:
        return StateClass.DOUBLON_EDGE_RIGHT
    return StateClass.DOUBLON_BULK


def physical_spectrum(params, thresholds=None):
    """Diagonalize H inside the physical sector and classify every state.

    Returns
    -------
    list of EigenState
        N(N+1)/2 states in ascending energy.
    """
    t = thresholds or Thresholds()
    N = params.n_sites
    basis = physical_basis(params)
    energies, w = eigendecompose(compress(build_hamiltonian(params), basis))
    amps = basis.expand(w).T.reshape(-1, N, N)
    metrics = state_metrics(amps, t.corner_block, t.edge_region)
    states = []
    for k, energy in enumerate(energies):
        amp = amps[k]
        amp.setflags(write=False)
        s = EigenState(
            energy=float(energy),
            amplitudes=amp,
            **{name: float(values[k]) for name, values in metrics.items()},
        )
        states.append(replace(s, kind=classify_state(s, t)))
    return states


def _is_edge_like(state, t):
    return state.kind.is_edge or state.corner_weight >= t.edge_region_weight


def doublon_gap(states, thresholds=None, n_sites=None, tol=1e-6):
    """Spectral gap beneath the upper doublon band.

    The bound pairs on the N diagonal sites form a two-band chain whose
    upper band holds N // 2 states.  The upper band is taken as the N // 2
    highest states with on-site weight above ``onsite_weight`` (corner
    states of that band included).  The gap extends from its lowest member
    down to the highest remaining state that is not localized at a corner:
    the top of the lower doublon band, or of the scattering continuum once
    the lower band has dissolved into it.

    Raises
    ------
    NoDoublonBand
        When fewer than four states qualify as on-site pairs.
    """
    t = thresholds or Thresholds()
    N = n_sites or states[0].amplitudes.shape[0]
    n_up = N // 2
    pairs = sorted((s for s in states if s.onsite_weight >= t.onsite_weight),
                   key=lambda s: s.energy, reverse=True)
    if len(pairs) < 4 or n_up < t.min_band_states:
        raise NoDoublonBand(f"only {len(pairs)} on-site pair states found")
    upper = pairs[:n_up]
    upper_ids = {id(s) for s in upper}
    bottom = min(s.energy for s in upper)
    below = [s.energy for s in states
             if id(s) not in upper_ids and s.energy <= bottom and not _is_edge_like(s, t)]
    if not below:
        raise NoDoublonBand("nothing below the upper doublon band")
    lower = max(below)
    gap = bottom - lower
    spacing = float(np.median(np.diff(sorted(s.energy for s in upper))))
    return DoublonGap(0.0 if gap <= tol else gap, lower, bottom, spacing)


def in_gap_states(states, gap, thresholds=None):
    """Edge doublons lying well inside the doublon gap."""
    t = thresholds or Thresholds()
    margin = t.in_gap_margin * gap.gap
    lo, hi = gap.lower_band_top + margin, gap.upper_band_bottom - margin
    return [s for s in states if s.kind.is_edge and lo < s.energy < hi]


@dataclass(frozen=True)
class SweepPoint:
    """Compact per-angle summary (amplitudes are dropped to save memory)."""

    theta: float
    energies: np.ndarray
    iprs: np.ndarray
    classes: tuple
    edge_weight_left: np.ndarray
    edge_weight_right: np.ndarray
    gap: DoublonGap | None
    edge_state_energy: float | None
    edge_side: str | None
    edge_state_ipr: float | None
    n_in_gap: int


@dataclass(frozen=True)
class SweepResult:
    theta_grid: np.ndarray
    points: tuple

    @property
    def gaps(self):
        return np.array([p.gap.gap if p.gap else np.nan for p in self.points])

    @property
    def edge_state_energy(self):
        return [p.edge_state_energy for p in self.points]

    @property
    def edge_sides(self):
        return [p.edge_side for p in self.points]


def _sweep_point(params, thresholds):
    states = physical_spectrum(params, thresholds)
    try:
        gap = doublon_gap(states, thresholds)
    except NoDoublonBand:
        gap = None
    inside = in_gap_states(states, gap, thresholds) if gap is not None else []
    edge = None
    if inside:
        edge = min(inside, key=lambda s: abs(s.energy - gap.center))
    side = None
    if edge is not None:
        side = "left" if edge.kind is StateClass.DOUBLON_EDGE_LEFT else "right"
    return SweepPoint(
        theta=params.theta,
        energies=np.array([s.energy for s in states]),
        iprs=np.array([s.ipr for s in states]),
        classes=tuple(s.kind for s in states),
        edge_weight_left=np.array([s.edge_weight_left for s in states]),
        edge_weight_right=np.array([s.edge_weight_right for s in states]),
        gap=gap,
        edge_state_energy=None if edge is None else edge.energy,
        edge_side=side,
        edge_state_ipr=None if edge is None else edge.ipr,
        n_in_gap=len(inside),
    )


def theta_sweep(params, theta_grid, thresholds=None, max_workers=1):
    """Spectrum, classification and doublon gap for each angle of a grid.

    Angles are independent; with ``max_workers > 1`` they run on a thread
    pool (LAPACK releases the GIL).  Results are always ordered by angle.
    """
    grid = np.asarray(theta_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("theta_grid must be a non-empty 1D sequence")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("theta_grid must be strictly increasing")
    plist = [replace(params, theta=float(th)) for th in grid]
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            points = list(pool.map(lambda p: _sweep_point(p, thresholds), plist))
    else:
        points = [_sweep_point(p, thresholds) for p in plist]
    return SweepResult(grid, tuple(points))


def gap_at(params, theta, thresholds=None):
    """Doublon gap at one angle, 0 if the bands cannot be resolved."""
    states = physical_spectrum(replace(params, theta=float(theta)), thresholds)
    try:
        return doublon_gap(states, thresholds).gap
    except NoDoublonBand:
        return 0.0


def find_transition(params, bracket=(0.5, 1.5), thresholds=None, tol=1e-3):
    """Angle of the doublon-gap minimum inside ``bracket``.

    Uses bounded derivative-free minimization (golden-section steps with
    parabolic acceleration).

    Raises
    ------
    NoMinimum
        If the minimum sits on the bracket boundary (gap monotone there)
        or the gap vanishes identically.
    """
    lo, hi = map(float, bracket)
    if not 0.0 <= lo < hi <= math.pi:
        raise InvalidParam("bracket", "must satisfy 0 <= lo < hi <= pi")
    res = minimize_scalar(lambda th: gap_at(params, th, thresholds),
                          bounds=(lo, hi), method="bounded",
                          options={"xatol": tol})
    if not res.success:
        raise NoMinimum(res.message)
    theta = float(res.x)
    ends = (gap_at(params, lo, thresholds), gap_at(params, hi, thresholds))
    if min(ends) <= res.fun or abs(theta - lo) < 2 * tol or abs(theta - hi) < 2 * tol:
        raise NoMinimum(f"gap is monotone on [{lo}, {hi}]")
    return theta
