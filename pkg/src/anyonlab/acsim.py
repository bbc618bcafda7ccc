"""Frequency-domain (AC) analysis of synthesized netlists.

Nodal analysis with the exp(-i omega t) convention: for every frequency the
node admittance matrix Y is assembled from element stamps and the circuit is
driven by a unit current injected at one node, so the voltage at that node
is the input impedance.
"""
from __future__ import annotations

from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve
from scipy.signal import find_peaks

from .circuit import epsilon_from_frequency, frequency_from_epsilon, parse_node
from .errors import ModeMismatch, SingularMatrix, ZeroFrequency
from .model import build_hamiltonian

__all__ = [
    "CLIP_OHM",
    "ImpedanceSpectrum",
    "assemble_admittance",
    "branch_admittances",
    "verify_mapping",
    "drive_node_impedance",
    "impedance_spectrum",
    "impedance_spectra",
    "impedance_map",
    "detect_peaks",
    "element_powers",
    "InGapPeak",
    "gap_window",
    "in_gap_peaks",
    "refine_peak",
]

CLIP_OHM = 1e9


def _check_frequency(f):
    if not (f > 0 and math.isfinite(f)):
        raise ZeroFrequency(f"frequency must be positive and finite, got {f!r}")


def branch_admittances(element, f, q=None):
    """Admittances (a -> b, b -> a) of one element at frequency f."""
    w = 2 * math.pi * f
    e = element
    if e.kind == "capacitor":
        y = -1j * w * e.value
        return y, y
    if e.kind == "inductor":
        z = w * e.value * ((1 / q if q else 0.0) - 1j)
        y = 1 / z
        return y, y
    if e.kind == "resistor":
        return 1 / e.value, 1 / e.value
    if e.kind == "nic_link":
        return 1 / e.value, -1 / e.value
    if e.kind == "complex_link":
        z = complex(e.factor)
        return -1j * w * e.value * z, -1j * w * e.value * z.conjugate()
    if e.kind == "ground_branch":
        y = 1 / (e.resistance + 1j / (w * e.value))
        return y, y
    raise ValueError(f"unknown element kind {e.kind!r}")


def _index(netlist):
    N = netlist.n

    def idx(name):
        node = parse_node(name)
        return None if node is None else (node[0] - 1) * N + node[1] - 1

    return idx


def assemble_admittance(netlist, f, q=None):
    """Node admittance matrix Y(f) (shape N^2 x N^2, row-major node order).

    Parameters
    ----------
    q : float, optional
        Quality factor of every inductor; None for lossless inductors.
    """
    _check_frequency(f)
    idx = _index(netlist)
    y = np.zeros((netlist.n ** 2,) * 2, dtype=complex)
    for e in netlist.elements:
        yab, yba = branch_admittances(e, f, q)
        a, b = idx(e.node_a), idx(e.node_b)
        y[a, a] += yab
        if b is not None:
            y[a, b] -= yab
            y[b, b] += yba
            y[b, a] -= yba
    return y


def verify_mapping(netlist, params, f, allow_physical=False):
    """Largest entrywise deviation of Y(f) from sigma_J (H - eps(f)).

    Returns
    -------
    float
        max |Y - sigma_J (H - eps I)| in siemens.
    """
    if netlist.mode != "ideal" and not allow_physical:
        raise ModeMismatch("mapping identity holds at all frequencies only for ideal netlists")
    _check_frequency(f)
    sigma_j = -2j * math.pi * f * netlist.c_j
    eps = float(epsilon_from_frequency(f, netlist.f0))
    h = build_hamiltonian(params)
    target = sigma_j * (h - eps * np.eye(h.shape[0]))
    return float(np.max(np.abs(assemble_admittance(netlist, f) - target)))


def drive_node_impedance(y, node, clip=CLIP_OHM):
    """Input impedance at ``node`` for a unit current injection.

    Returns
    -------
    (complex, bool)
        The impedance and an overflow flag set when |Z| was clipped at
        ``clip`` (a lossless pole).

    Raises
    ------
    SingularMatrix
        When Y cannot be factorized at all.
    """
    lu = _factor(y)
    rhs = np.zeros(y.shape[0], dtype=complex)
    rhs[node] = 1.0
    z = lu_solve(lu, rhs)[node]
    return _clip(z, clip)


def _factor(y):
    if not np.all(np.isfinite(y)):
        raise SingularMatrix("admittance matrix has non-finite entries")
    with warnings.catch_warnings():
        # exact zero pivots are lossless poles, handled just below
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(y, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if pivots.min() < 1e-30 * max(pivots.max(), 1e-300):
        # an exact zero pivot: treat as a pole by nudging it
        lu[np.diag_indices_from(lu)] = np.where(pivots < 1e-300, 1e-300, np.diag(lu))
        if not np.all(np.isfinite(lu)):
            raise SingularMatrix("LU factorization failed")
    return lu, piv


def _clip(z, clip):
    if not np.isfinite(z) or abs(z) > clip:
        phase = z / abs(z) if np.isfinite(z) and z != 0 else 1.0
        return complex(clip * phase), True
    return complex(z), False


@dataclass(frozen=True)
class ImpedanceSpectrum:
    node: tuple
    frequencies: np.ndarray
    impedance: np.ndarray
    overflow: np.ndarray
    peaks: tuple

    @property
    def magnitude(self):
        return np.abs(self.impedance)


def _node_linear(netlist, node):
    if isinstance(node, str):
        node = parse_node(node)
    m, n = node
    if not (1 <= m <= netlist.n and 1 <= n <= netlist.n):
        raise IndexError(f"node {node} outside the circuit")
    return (m - 1) * netlist.n + (n - 1), (m, n)


def _check_grid(f_grid):
    f = np.asarray(f_grid, dtype=float)
    if f.ndim != 1 or f.size == 0 or np.any(np.diff(f) <= 0):
        raise ValueError("frequency grid must be strictly increasing")
    for x in (f[0], f[-1]):
        _check_frequency(x)
    return f


def impedance_spectra(netlist, f_grid, q=None, nodes=None, clip=CLIP_OHM):
    """Driving-point impedances of many nodes over a frequency grid.

    One LU factorization per frequency, one solve per requested node.

    Returns
    -------
    z : ndarray, shape (len(f_grid), len(nodes))
    overflow : bool ndarray of the same shape
    """
    f = _check_grid(f_grid)
    if nodes is None:
        nodes = [(m, n) for m in range(1, netlist.n + 1) for n in range(1, netlist.n + 1)]
    lin = [_node_linear(netlist, nd)[0] for nd in nodes]
    rhs = np.zeros((netlist.n ** 2, len(lin)), dtype=complex)
    rhs[lin, np.arange(len(lin))] = 1.0
    z = np.empty((f.size, len(lin)), dtype=complex)
    over = np.zeros(z.shape, dtype=bool)
    for i, fi in enumerate(f):
        v = lu_solve(_factor(assemble_admittance(netlist, fi, q)), rhs)
        zi = v[lin, np.arange(len(lin))]
        bad = ~np.isfinite(zi) | (np.abs(zi) > clip)
        if np.any(bad):
            zi = np.where(bad, clip, zi)
            over[i] = bad
        z[i] = zi
    return z, over


def impedance_spectrum(netlist, node, f_grid, q=None, prominence=0.1, merge_steps=3):
    """|Z(f)| at one node with detected resonance peaks."""
    _, mn = _node_linear(netlist, node)
    f = _check_grid(f_grid)
    z, over = impedance_spectra(netlist, f, q, [mn])
    mag = np.abs(z[:, 0])
    return ImpedanceSpectrum(mn, f, z[:, 0], over[:, 0],
                             tuple(detect_peaks(f, mag, prominence, merge_steps)))


def impedance_map(netlist, f, q=None):
    """N x N grid of driving-point |Z| at a single frequency."""
    _check_frequency(f)
    z, _ = impedance_spectra(netlist, [f], q)
    return np.abs(z[0]).reshape(netlist.n, netlist.n)


def detect_peaks(frequencies, magnitude, prominence=0.1, merge_steps=3):
    """Local maxima of a spectrum.

    Peaks need a prominence of at least ``prominence`` times the global
    maximum; peaks closer than ``merge_steps`` grid points are merged,
    keeping the taller one.

    Returns
    -------
    list of (frequency, magnitude)
    """
    f = np.asarray(frequencies, dtype=float)
    mag = np.asarray(magnitude, dtype=float)
    if mag.size < 3:
        raise ValueError("need at least three samples")
    top = np.max(mag)
    if not top > 0:
        return []
    idx, _ = find_peaks(mag, prominence=prominence * top)
    kept = []
    for i in sorted(idx, key=lambda i: -mag[i]):
        if all(abs(i - j) > merge_steps for j in kept):
            kept.append(i)
    return [(float(f[i]), float(mag[i])) for i in sorted(kept)]


def element_powers(netlist, v, f, q=None):
    """Time-averaged real power absorbed by each element for node voltages v.

    Returns
    -------
    ndarray
        One entry per element of ``netlist.elements`` (watts, peak phasors).
    """
    idx = _index(netlist)
    v = np.asarray(v, dtype=complex)
    out = np.empty(len(netlist.elements))
    for k, e in enumerate(netlist.elements):
        yab, yba = branch_admittances(e, f, q)
        a, b = idx(e.node_a), idx(e.node_b)
        va = v[a]
        vb = 0.0 if b is None else v[b]
        ia = yab * (va - vb)
        ib = yba * (vb - va)
        p = np.conj(va) * ia + (0.0 if b is None else np.conj(vb) * ib)
        out[k] = 0.5 * p.real
    return out


def gap_window(gap, f0):
    """Frequency interval (f_lo, f_hi) spanned by a doublon gap.

    Energy maps to frequency through a decreasing function, so the top of
    the gap (upper band bottom) gives the lower frequency.
    """
    lo = float(frequency_from_epsilon(gap.upper_band_bottom, f0))
    hi = float(frequency_from_epsilon(gap.lower_band_top, f0))
    return lo, hi


@dataclass(frozen=True)
class InGapPeak:
    """A resonance inside a frequency window.

    ``isolated`` is set when the node shows no other peak within the
    isolation distance and no other node resonates within that distance
    with at least ``rival_ratio`` of this peak's magnitude.
    """

    node: tuple
    frequency: float
    magnitude: float
    isolated: bool
    rivals: tuple = ()

    def to_dict(self):
        return {
            "node": list(self.node),
            "frequency": self.frequency,
            "magnitude": self.magnitude,
            "isolated": self.isolated,
            "rivals": [list(r) for r in self.rivals],
        }


def in_gap_peaks(frequencies, magnitudes, nodes, window, prominence=0.1,
                 merge_steps=3, isolation_hz=200.0, rival_ratio=0.25):
    """Peaks falling inside ``window`` and their isolation status.

    Parameters
    ----------
    frequencies : array, shape (F,)
    magnitudes : array, shape (F, K)
        |Z| of K nodes.
    nodes : sequence of K (m, n) tuples
    window : (float, float)
        Frequency interval, typically from :func:`gap_window`.

    Returns
    -------
    list of InGapPeak
        Sorted by decreasing magnitude.
    """
    f = np.asarray(frequencies, dtype=float)
    mags = np.asarray(magnitudes, dtype=float)
    if mags.ndim != 2 or mags.shape != (f.size, len(nodes)):
        raise ValueError("magnitudes must have shape (len(frequencies), len(nodes))")
    lo, hi = window
    per_node = [detect_peaks(f, mags[:, k], prominence, merge_steps) for k in range(len(nodes))]
    out = []
    for k, peaks in enumerate(per_node):
        for fp, mp in peaks:
            if not lo <= fp <= hi:
                continue
            crowded = any(abs(fq - fp) <= isolation_hz for fq, _ in peaks if fq != fp)
            rivals = tuple(
                tuple(nodes[j]) for j, other in enumerate(per_node) if j != k
                and any(abs(fq - fp) <= isolation_hz and mq >= rival_ratio * mp for fq, mq in other)
            )
            out.append(InGapPeak(tuple(nodes[k]), fp, mp, not crowded and not rivals, rivals))
    out.sort(key=lambda p: (-p.magnitude, p.node))
    return out


def refine_peak(netlist, node, f_peak, q=None, half_width=10.0, step=0.05):
    """Re-locate a resonance on a fine local grid around ``f_peak``.

    Returns
    -------
    (float, float)
        Refined frequency and |Z| there.
    """
    f = np.arange(f_peak - half_width, f_peak + half_width + step / 2, step)
    z, _ = impedance_spectra(netlist, f, q, [tuple(node)])
    i = int(np.argmax(np.abs(z[:, 0])))
    return float(f[i]), float(abs(z[i, 0]))
