"""Two-anyon extended Hubbard model on an open chain.

The two-particle amplitudes ``beta[m, n]`` live on an N x N square lattice
(the "full plane").  Hopping of either particle moves along one of the two
lattice axes; the anyonic exchange angle ``theta`` only decorates bonds that
touch the main diagonal ``m == n``.  Interactions sit on the diagonal: the
on-site energy ``2 U`` and the pair hopping ``P`` that couples neighbouring
diagonal sites of a dimer.

Sites are addressed with 1-based ``(m, n)`` pairs; the matrix index is the
row-major ``(m - 1) * N + (n - 1)``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
import math

import numpy as np

from .errors import InvalidParam

__all__ = [
    "ModelParams",
    "SiteIndex",
    "validate_params",
    "site_index",
    "site_coords",
    "diagonal_energies",
    "pair_partners",
    "build_hamiltonian",
    "exchange_operator",
    "symmetry_projector",
    "physical_basis",
    "compress",
    "hamiltonian_to_json",
]


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the two-anyon chain.

    Parameters
    ----------
    n_sites : int
        Number of cavities N (>= 2).
    j : float
        Single-particle tunnelling amplitude J (non-zero).
    u : float
        On-site interaction U.
    p : float
        Two-particle (pair) hopping P.
    theta : float
        Statistical exchange angle in [0, pi].  0 is bosonic, pi is
        pseudo-fermionic.
    corner_shift : bool
        Replace U by U + J**2/(2U) on the two corner sites (1, 1) and
        (N, N).  This suppresses Tamm-like pair states bound to the corners.
    p_offset : int
        Which diagonal sites are paired by P.  With 0 the dimers are
        (1,2), (3,4), ...; with 1 they are (2,3), (4,5), ...  Sites that
        would pair beyond N are left unpaired.
    """

    n_sites: int
    j: float = 1.0
    u: float = 0.0
    p: float = 0.0
    theta: float = 0.0
    corner_shift: bool = False
    p_offset: int = 0

    def __post_init__(self):
        validate_params(self)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class SiteIndex:
    """A lattice site with both its (m, n) label and its matrix index."""

    m: int
    n: int
    linear: int

    @classmethod
    def from_mn(cls, m, n, N):
        return cls(m, n, site_index(m, n, N))

    @classmethod
    def from_linear(cls, linear, N):
        m, n = site_coords(linear, N)
        return cls(m, n, linear)


def validate_params(params):
    """Check every invariant of :class:`ModelParams`.

    Raises
    ------
    InvalidParam
        Naming the first offending field.
    """
    N = params.n_sites
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)):
        raise InvalidParam("n_sites", f"must be an integer, got {N!r}")
    if N < 2:
        raise InvalidParam("n_sites", f"must be >= 2, got {N}")
    for name in ("j", "u", "p", "theta"):
        value = getattr(params, name)
        if not isinstance(value, (int, float, np.floating, np.integer)) or isinstance(value, bool):
            raise InvalidParam(name, f"must be a real number, got {value!r}")
        if not math.isfinite(value):
            raise InvalidParam(name, "must be finite")
    if params.j == 0:
        raise InvalidParam("j", "tunnelling amplitude must be non-zero")
    if params.corner_shift and params.u == 0:
        raise InvalidParam("u", "corner shift J^2/(2U) needs U != 0")
    if not 0.0 <= params.theta <= math.pi:
        raise InvalidParam("theta", f"must lie in [0, pi], got {params.theta}")
    if params.p_offset not in (0, 1):
        raise InvalidParam("p_offset", f"must be 0 or 1, got {params.p_offset!r}")


def site_index(m, n, N):
    """Row-major matrix index of the 1-based site (m, n)."""
    if not (1 <= m <= N and 1 <= n <= N):
        raise IndexError(f"site ({m}, {n}) outside a {N}x{N} lattice")
    return (m - 1) * N + (n - 1)


def site_coords(linear, N):
    """Inverse of :func:`site_index`."""
    if not 0 <= linear < N * N:
        raise IndexError(f"index {linear} outside a {N}x{N} lattice")
    q, r = divmod(linear, N)
    return q + 1, r + 1


def diagonal_energies(params):
    """On-site pair energies 2*U_nn for n = 1..N (corner shift included)."""
    N = params.n_sites
    u = np.full(N, float(params.u))
    if params.corner_shift:
        shift = params.j ** 2 / (2.0 * params.u)
        u[0] += shift
        u[-1] += shift
    return 2.0 * u


def pair_partners(params):
    """List of 1-based dimers (a, a+1) coupled by the pair hopping P."""
    N = params.n_sites
    return [(a, a + 1) for a in range(1 + params.p_offset, N, 2)]


def _phase(theta, m, n, step):
    # exp(-i theta [sgn(n + step - m) - sgn(n - m)]); equals 1 unless the
    # bond touches the diagonal.
    return np.exp(-1j * theta * (np.sign(n + step - m) - np.sign(n - m)))


def build_hamiltonian(params):
    """Dense full-plane Hamiltonian acting on the N^2 amplitudes.

    Only the upper triangle is assembled explicitly; the lower triangle is
    its conjugate, so the result is Hermitian bit for bit.

    Returns
    -------
    numpy.ndarray
        Read-only complex array of shape (N^2, N^2).
    """
    N = params.n_sites
    J, theta = float(params.j), float(params.theta)
    dim = N * N
    idx = np.arange(dim)
    m, n = np.divmod(idx, N)  # 0-based; only differences enter the phases

    upper = np.zeros((dim, dim), dtype=complex)
    # first particle hops: (m, n) -> (m + 1, n), never touches a phase
    sel = idx[m < N - 1]
    upper[sel, sel + N] = -J
    # second particle hops: (m, n) -> (m, n + 1)
    sel = idx[n < N - 1]
    upper[sel, sel + 1] = -J * _phase(theta, m[sel], n[sel], 1)
    # pair hopping between partner diagonal sites
    for a, b in pair_partners(params):
        upper[site_index(a, a, N), site_index(b, b, N)] = params.p

    h = upper + upper.conj().T
    diag = idx[m == n]
    h[diag, diag] = diagonal_energies(params)
    h.setflags(write=False)
    return h


def exchange_operator(params):
    """Unitary involution S implementing the anyonic exchange symmetry.

    ``(S beta)[m, n] = exp(-i theta sgn(m - n)) beta[n, m]``.  Physical
    two-anyon states are the +1 eigenvectors of S and H commutes with it.
    """
    N = params.n_sites
    idx = np.arange(N * N)
    m, n = np.divmod(idx, N)
    s = np.zeros((N * N, N * N), dtype=complex)
    s[idx, n * N + m] = np.exp(-1j * params.theta * np.sign(m - n))
    s.setflags(write=False)
    return s


def symmetry_projector(s):
    """Projector (I + S)/2 onto the physical (S = +1) sector."""
    s = np.asarray(s)
    pi = 0.5 * (np.eye(s.shape[0]) + s)
    pi.setflags(write=False)
    return pi


@dataclass(frozen=True)
class PhysicalBasis:
    """Orthonormal basis of the S = +1 sector.

    Column ``k`` has weight ``coef_a[k]`` at site ``site_a[k]`` (m >= n) and,
    for off-diagonal pairs, ``coef_b[k]`` at the mirrored site ``site_b[k]``.
    For diagonal sites ``site_b == site_a`` and ``coef_b == 0``.
    """

    n_sites: int
    site_a: np.ndarray
    site_b: np.ndarray
    coef_a: np.ndarray
    coef_b: np.ndarray

    @property
    def size(self):
        return self.site_a.size

    def matrix(self):
        """Dense (N^2, K) isometry."""
        N = self.n_sites
        b = np.zeros((N * N, self.size), dtype=complex)
        cols = np.arange(self.size)
        b[self.site_a, cols] += self.coef_a
        b[self.site_b, cols] += self.coef_b
        return b

    def expand(self, w):
        """Map sector coordinates (K, ...) to full-plane amplitudes (N^2, ...)."""
        w = np.asarray(w)
        out = np.zeros((self.n_sites ** 2,) + w.shape[1:], dtype=complex)
        shape = (-1,) + (1,) * (w.ndim - 1)
        np.add.at(out, self.site_a, self.coef_a.reshape(shape) * w)
        np.add.at(out, self.site_b, self.coef_b.reshape(shape) * w)
        return out


def physical_basis(params):
    """Analytic orthonormal basis of the range of the symmetry projector.

    Diagonal sites are fixed points of S and give unit vectors.  Each pair
    m > n gives (e_mn + exp(i theta) e_nm) / sqrt(2).  Columns are ordered
    lexicographically in (m, n) over the lower triangle m >= n.
    """
    N = params.n_sites
    m, n = np.tril_indices(N)  # 0-based, m >= n, lexicographic
    site_a = m * N + n
    site_b = n * N + m
    off = m != n
    coef_a = np.where(off, 1 / math.sqrt(2), 1.0).astype(complex)
    coef_b = np.where(off, np.exp(1j * params.theta) / math.sqrt(2), 0.0)
    return PhysicalBasis(N, site_a, site_b, coef_a, coef_b)


def compress(h, basis):
    """Return B^dagger H B for the isometry B described by ``basis``."""
    h = np.asarray(h)
    hb = h[:, basis.site_a] * basis.coef_a + h[:, basis.site_b] * basis.coef_b
    hc = (basis.coef_a.conj()[:, None] * hb[basis.site_a, :]
          + basis.coef_b.conj()[:, None] * hb[basis.site_b, :])
    # restore exact Hermiticity lost to rounding
    return 0.5 * (hc + hc.conj().T)


def hamiltonian_to_json(h):
    """Debug dump ``{"dim": d, "entries": [[re, im], ...]}`` in row-major order."""
    h = np.asarray(h)
    flat = h.reshape(-1)
    return {
        "dim": int(h.shape[0]),
        "entries": [[float(z.real), float(z.imag)] for z in flat],
    }
