"""Randomized invariants (100 cases each)."""
import math

import numpy as np
from hypothesis import given, settings, strategies as st

from anyonlab.acsim import assemble_admittance, element_powers
from anyonlab.circuit import characteristic_frequency, epsilon_from_frequency, synthesize_netlist
from anyonlab.model import ModelParams, build_hamiltonian, exchange_operator, symmetry_projector
from anyonlab.spectra import physical_spectrum

CASES = settings(max_examples=100, deadline=None)

sizes = st.integers(min_value=2, max_value=6)
angles = st.floats(min_value=0.0, max_value=math.pi)
reals = st.floats(min_value=-3.0, max_value=3.0)
positive_u = st.floats(min_value=0.2, max_value=3.0)


@st.composite
def models(draw, n=sizes):
    return ModelParams(
        draw(n),
        j=draw(st.sampled_from([1.0, -1.0, 0.5])),
        u=draw(positive_u),
        p=draw(reals),
        theta=draw(angles),
        corner_shift=draw(st.booleans()),
        p_offset=draw(st.sampled_from([0, 1])),
    )


@st.composite
def circuit_models(draw):
    # 2U >= -P keeps every interaction capacitor positive
    return ModelParams(draw(st.integers(3, 5)), u=draw(st.floats(0.5, 3.0)),
                       p=-draw(st.floats(0.0, 1.0)), theta=draw(angles), corner_shift=True)


@CASES
@given(models())
def test_hermiticity(p):
    h = build_hamiltonian(p)
    assert np.array_equal(h, h.conj().T)


@CASES
@given(models())
def test_exchange_commutes_with_h(p):
    h, s = build_hamiltonian(p), exchange_operator(p)
    assert np.max(np.abs(h @ s - s @ h)) <= 1e-12 * max(1.0, np.max(np.abs(h)))


@CASES
@given(models())
def test_exchange_is_an_involution(p):
    s = exchange_operator(p)
    assert np.allclose(s @ s, np.eye(s.shape[0]), atol=1e-14)


@CASES
@given(models())
def test_projector_idempotent(p):
    pr = symmetry_projector(exchange_operator(p))
    assert np.allclose(pr @ pr, pr, atol=1e-14)
    assert np.allclose(pr, pr.conj().T, atol=1e-14)
    assert round(np.trace(pr).real) == p.n_sites * (p.n_sites + 1) // 2


@CASES
@given(models(st.integers(2, 5)))
def test_ipr_bounds(p):
    for s in physical_spectrum(p):
        assert 1.0 / p.n_sites ** 2 - 1e-12 <= s.ipr <= 1.0 + 1e-12
        assert 0.0 <= s.diag_weight <= 1.0 + 1e-12


@CASES
@given(st.floats(1e3, 1e5), st.floats(1e3, 1e5),
       st.floats(1e-6, 1e-3), st.floats(1e-7, 1e-5))
def test_epsilon_strictly_decreasing(f1, f2, l, c):
    f0 = characteristic_frequency(l, c)
    if f1 == f2:
        return
    lo, hi = sorted((f1, f2))
    assert float(epsilon_from_frequency(lo, f0)) > float(epsilon_from_frequency(hi, f0))


@CASES
@given(circuit_models(), st.floats(9e3, 14e3), st.integers(0, 2 ** 32 - 1))
def test_nic_power_balance(p, f_ref, seed):
    nl = synthesize_netlist(p, "physical", f_ref=f_ref)
    v = np.random.default_rng(seed).normal(size=(p.n_sites ** 2, 2)) @ np.array([1, 1j])
    powers = element_powers(nl, v, f_ref)
    # positive-R dissipation equals negative-R generation, relative to the
    # natural power scale omega C_J |v|^2 of the network
    scale = 2 * math.pi * f_ref * nl.c_j * np.sum(np.abs(v) ** 2)
    assert abs(powers.sum()) <= 1e-8 * scale
    if 1e-3 < p.theta < math.pi - 1e-3:  # resistors present
        generated = -powers[powers < 0].sum()
        dissipated = powers[powers > 0].sum()
        assert generated > 1e-6 * scale
        assert abs(generated - dissipated) <= 1e-8 * dissipated


@CASES
@given(circuit_models(), st.sampled_from(["ideal", "physical"]), st.floats(9e3, 14e3))
def test_reciprocity_iff_no_nic(p, mode, f):
    nl = synthesize_netlist(p, mode, f_ref=11500.0 if mode == "physical" else None)
    y = assemble_admittance(nl, f)
    symmetric = np.max(np.abs(y - y.T)) <= 1e-12 * np.max(np.abs(y))
    directional = any(e.kind == "nic_link" or (e.kind == "complex_link" and not e.is_reciprocal)
                      for e in nl.elements)
    assert nl.is_reciprocal == (not directional)
    assert symmetric == nl.is_reciprocal
