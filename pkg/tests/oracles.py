"""Independent reference computations used by the tests.

Nothing here imports the package's model or spectra code: each oracle
re-derives its result from the defining linear equations or from closed
forms, so agreement with the package is a genuine cross-check.
"""
import math

import numpy as np


def triangular_matrix(N, u, p, theta, j=1.0, corner_shift=False, p_offset=0):
    """Eigen-equations written directly on the amplitudes beta[m, n], m >= n.

    Amplitudes above the diagonal are eliminated with
    beta[n, m] = exp(i theta) beta[m, n] (m > n).  The result is a
    non-Hermitian matrix whose eigenvalues are the physical energies.
    Single-particle hops carry -j, pair hops +p between partner diagonal
    sites, the diagonal carries 2 U_n.
    """
    idx = {}
    for m in range(1, N + 1):
        for n in range(1, m + 1):
            idx[(m, n)] = len(idx)
    M = np.zeros((len(idx), len(idx)), dtype=complex)
    w = np.exp(1j * theta)

    def amp(m, n):
        """(column, coefficient) expressing beta[m, n] through the triangle."""
        if not (1 <= m <= N and 1 <= n <= N):
            return None
        if m >= n:
            return idx[(m, n)], 1.0
        return idx[(n, m)], w

    partners = {}
    for a in range(1 + p_offset, N, 2):
        partners[a], partners[a + 1] = a + 1, a
    for (m, n), row in idx.items():
        if m == n:
            # the interaction term and P-hops live on the diagonal
            u_n = u + (j * j / (2 * u) if corner_shift and n in (1, N) else 0.0)
            M[row, row] += 2 * u_n
            if n in partners:
                k = partners[n]
                M[row, idx[(k, k)]] += p
        # four single-particle hops; the second particle's hop across the
        # diagonal picks up the statistical phase
        for dm, dn in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            tgt = amp(m + dm, n + dn)
            if tgt is None:
                continue
            col, coef = tgt
            phase = 1.0
            if dn != 0:
                s_before = np.sign(n - m)
                s_after = np.sign(n + dn - m)
                phase = np.exp(-1j * theta * (s_after - s_before))
            M[row, col] += -j * phase * coef
    return M


def triangular_energies(*args, **kw):
    ev = np.linalg.eigvals(triangular_matrix(*args, **kw))
    assert np.max(np.abs(ev.imag)) < 1e-8
    return np.sort(ev.real)


def free_pair_energies(N, j=1.0):
    """Non-interacting bosonic pairs: e_k + e_k' with k <= k'."""
    e = [-2 * j * math.cos(k * math.pi / (N + 1)) for k in range(1, N + 1)]
    return np.sort([e[a] + e[b] for a in range(N) for b in range(a, N)])


def projector_sector_energies(h, s):
    """Energies of H inside the +1 eigenspace of S via an eigh basis of (1+S)/2."""
    proj = 0.5 * (np.eye(s.shape[0]) + s)
    proj = 0.5 * (proj + proj.conj().T)
    vals, vecs = np.linalg.eigh(proj)
    basis = vecs[:, vals > 0.5]
    hb = basis.conj().T @ h @ basis
    return np.linalg.eigvalsh(0.5 * (hb + hb.conj().T))


def ssh_dimer_chain(n_cells, v, w):
    """Open SSH chain (intra v, inter w); returns sorted energies."""
    size = 2 * n_cells
    h = np.zeros((size, size), dtype=complex)
    for k in range(size - 1):
        h[k, k + 1] = v if k % 2 == 0 else w
    h = h + h.conj().T
    return np.linalg.eigvalsh(h)


def lc_tank_impedance(f, l, c):
    """Parallel L-C to ground, exp(-i omega t): Z = 1 / (i/(wL) - i w C)."""
    w = 2 * math.pi * f
    return 1 / (1j / (w * l) - 1j * w * c)
