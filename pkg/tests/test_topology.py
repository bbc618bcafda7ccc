"""Effective SSH couplings, inversion and the Zak phase."""
import math

import numpy as np
import pytest

from anyonlab.errors import AmbiguousParity, GapClosed, OddSize
from anyonlab.model import ModelParams, build_hamiltonian
from anyonlab.topology import effective_ssh_couplings, inversion_operator, zak_phase, zak_setup
from oracles import ssh_dimer_chain

P0 = ModelParams(16, u=1.5, p=-0.75)


def test_effective_couplings_values():
    e0 = effective_ssh_couplings(P0)
    assert e0.j1_eff == pytest.approx(abs(1 / 1.5 - 0.75))
    assert e0.j2_eff == pytest.approx(1 / 1.5)
    assert e0.theta_c_predicted == pytest.approx(math.acos(0.5625))
    assert e0.theta_c_predicted == pytest.approx(0.9734, abs=1e-4)
    epi = effective_ssh_couplings(ModelParams(16, u=1.5, p=-0.75, theta=math.pi))
    assert epi.j1_eff == pytest.approx(1 / 1.5 + 0.75)
    assert epi.ratio > 1 > e0.ratio


def test_effective_couplings_balance_at_predicted_angle():
    th = effective_ssh_couplings(P0).theta_c_predicted
    e = effective_ssh_couplings(ModelParams(16, u=1.5, p=-0.75, theta=th))
    assert e.ratio == pytest.approx(1.0, abs=1e-12)
    # an SSH chain with equal couplings has no gap at zero energy
    levels = ssh_dimer_chain(200, e.j1_eff, e.j2_eff)
    assert np.min(np.abs(levels)) < 0.02


def test_effective_couplings_edge_cases():
    with pytest.raises(ZeroDivisionError):
        effective_ssh_couplings(ModelParams(4, u=0.0, p=-0.75))
    assert effective_ssh_couplings(ModelParams(4, u=1.5, p=-5.0)).theta_c_predicted is None


def test_inversion_is_an_involutive_permutation():
    inv = inversion_operator(4)
    assert np.array_equal(inv @ inv, np.eye(16))
    assert np.array_equal(inv.sum(axis=0), np.ones(16))
    # (1,1) <-> (4,4), (1,2) <-> (4,3)
    assert inv[15, 0] == 1 and inv[14, 1] == 1
    tr = inversion_operator(4, "transposed")
    assert tr[11, 1] == 1  # (1,2) -> (3,4)
    with pytest.raises(OddSize):
        inversion_operator(5)
    with pytest.raises(ValueError):
        inversion_operator(4, "mirror")


@pytest.mark.parametrize("theta, commutes", [(0.0, True), (math.pi, True), (1.0, False)])
def test_inversion_symmetry_only_at_integer_statistics(theta, commutes):
    # dimers (1,2), (3,4), (5,6) map onto themselves under inversion
    p = ModelParams(6, u=1.5, p=-0.75, theta=theta, corner_shift=True)
    h, inv = build_hamiltonian(p), inversion_operator(6)
    assert (np.max(np.abs(h @ inv - inv @ h)) < 1e-12) == commutes


def test_setup_terminations():
    near0, nearpi = zak_setup(0.0), zak_setup(math.pi)
    assert (near0.n_sites, near0.p_offset, near0.corner_shift) == (16, 1, True)
    assert (nearpi.n_sites, nearpi.p_offset, nearpi.corner_shift) == (18, 0, True)


def test_zak_phase_bosons():
    r = zak_phase(0.0)
    assert r.gamma == pytest.approx(math.pi)
    assert min(abs(o) for o in r.overlaps) >= 0.9
    assert r.n_sites == 16
    assert r.to_dict()["gamma"] == r.gamma


def test_zak_phase_pseudo_fermions():
    r = zak_phase(math.pi)
    assert r.gamma == 0.0
    assert min(abs(o) for o in r.overlaps) >= 0.9
    assert r.n_sites == 18


def test_zak_phase_gap_closed_near_transition():
    with pytest.raises(GapClosed):
        zak_phase(1.1)


@pytest.mark.parametrize("theta", [0.3, 2.5])
def test_zak_phase_unquantized_away_from_symmetric_points(theta):
    with pytest.raises(AmbiguousParity):
        zak_phase(theta)
