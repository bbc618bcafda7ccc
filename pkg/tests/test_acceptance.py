"""Acceptance criteria: one PASS/FAIL line per criterion.

Each test prints its line immediately (visible with ``-s``) and records it
for the end-of-run summary.  A criterion that cannot be met is kept as a
strict expected failure, so the line reads FAIL and the suite stays honest.
"""
from dataclasses import replace
import math
import time

import numpy as np
import pytest

import conftest
from anyonlab import cli
from anyonlab.acsim import assemble_admittance, gap_window, impedance_spectra, in_gap_peaks, verify_mapping
from anyonlab.circuit import epsilon_from_frequency, synthesize_netlist
from anyonlab.config import OutputConfig
from anyonlab.model import ModelParams, build_hamiltonian, exchange_operator
from anyonlab.spectra import (
    StateClass,
    doublon_gap,
    find_transition,
    in_gap_states,
    physical_spectrum,
    theta_sweep,
)
from anyonlab.topology import effective_ssh_couplings, zak_phase
from oracles import free_pair_energies, projector_sector_energies, triangular_energies
import test_properties

FIG2 = ModelParams(45, j=1.0, u=1.5, p=-0.75, corner_shift=True)
THETA_C_STRONG = math.acos(0.5625)  # arccos(-P U / (2 J^2)) = 0.9734


def report(number, passed, detail):
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
    print(line)
    conftest.ACCEPTANCE_LINES.append(line)
    return passed


# ---------------------------------------------------------------- 1

def test_criterion_1_mapping_exactness():
    t0 = time.perf_counter()
    worst = 0.0
    for theta in (0.0, 0.5, 1.0, 2.0, math.pi):
        p = ModelParams(15, u=1.5, p=-0.75, theta=theta, corner_shift=True)
        nl = synthesize_netlist(p, "ideal")
        for f in np.linspace(8000.0, 16000.0, 5):
            scale = np.max(np.abs(assemble_admittance(nl, f)))
            worst = max(worst, verify_mapping(nl, p, f) / scale)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 5
    report(1, ok, f"max relative residual {worst:.2e} (<= 1e-12), {elapsed:.1f} s (< 5 s)")
    assert ok


# ---------------------------------------------------------------- 2

def test_criterion_2_oracle_equivalence():
    t0 = time.perf_counter()
    worst = 0.0
    for N in range(2, 7):
        for theta in (0.0, 0.7, math.pi):
            for u in (0.0, 1.5):
                for p in (0.0, -0.75):
                    params = ModelParams(N, u=u, p=p, theta=theta)
                    full = projector_sector_energies(build_hamiltonian(params),
                                                     exchange_operator(params))
                    ref = triangular_energies(N, u, p, theta)
                    worst = max(worst, float(np.max(np.abs(full - ref))))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 10
    report(2, ok, f"max |delta E| {worst:.2e} (<= 1e-10) over 60 cases, {elapsed:.1f} s (< 10 s)")
    assert ok


# ---------------------------------------------------------------- 3

def test_criterion_3_free_particles():
    energies = np.array([s.energy for s in physical_spectrum(ModelParams(10))])
    dev = float(np.max(np.abs(energies - free_pair_energies(10))))
    ok = dev <= 1e-9
    report(3, ok, f"max deviation from pair sums {dev:.2e} (<= 1e-9)")
    assert ok


# ---------------------------------------------------------------- 4

@pytest.fixture(scope="module")
def fig2_sweep():
    t0 = time.perf_counter()
    sweep = theta_sweep(FIG2, np.linspace(0.0, math.pi, 91), max_workers=4)
    return sweep, time.perf_counter() - t0


@pytest.mark.slow
def test_criterion_4a_single_in_gap_state(fig2_sweep):
    sweep, elapsed = fig2_sweep
    counts = (sweep.points[0].n_in_gap, sweep.points[-1].n_in_gap)
    ok = counts == (1, 1) and elapsed < 600
    report("4a", ok, f"in-gap doublons at theta=0, pi: {counts} (expect (1, 1)); "
                     f"91-point N=45 sweep {elapsed:.0f} s (< 600 s)")
    assert ok


@pytest.mark.slow
def test_criterion_4b_edge_state_flips(fig2_sweep):
    sweep, _ = fig2_sweep
    sides = sweep.edge_sides
    first, last = sides[0], sides[-1]
    last_left = max(i for i, s in enumerate(sides) if s == "left")
    first_right = min(i for i, s in enumerate(sides) if s == "right")
    ok = first == "left" and last == "right" and last_left < first_right
    report("4b", ok, f"edge state {first} at theta=0 -> {last} at theta=pi; last left at "
                     f"{sweep.theta_grid[last_left]:.3f}, first right at "
                     f"{sweep.theta_grid[first_right]:.3f}")
    assert ok


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason=(
    "the exact N=45, U/J=1.5 gap closes near theta=1.08; 0.973 is the "
    "strong-coupling estimate, approached only for U/J >> 1"))
def test_criterion_4c_gap_minimum(fig2_sweep):
    sweep, _ = fig2_sweep
    gaps = sweep.gaps
    i = int(np.nanargmin(gaps))
    theta_grid = float(sweep.theta_grid[i])
    lo, hi = sweep.theta_grid[max(i - 3, 0)], sweep.theta_grid[min(i + 3, len(gaps) - 1)]
    theta_fine = find_transition(FIG2, (lo, hi))
    ok = abs(theta_grid - 0.973) <= 0.05
    report("4c", ok, f"gap minimum at theta={theta_grid:.3f} on the grid, {theta_fine:.3f} "
                     f"refined (target 0.973 +/- 0.05; strong-coupling estimate "
                     f"{THETA_C_STRONG:.4f}) - expected failure, see decisions ledger")
    assert ok


@pytest.mark.slow
def test_criterion_4d_edge_state_localization(fig2_sweep):
    sweep, _ = fig2_sweep
    details, ok = [], True
    for p in (sweep.points[0], sweep.points[-1]):
        bulk = np.median([q for q, c in zip(p.iprs, p.classes) if c is StateClass.DOUBLON_BULK])
        ok &= p.edge_state_ipr is not None and p.edge_state_ipr > bulk
        details.append(f"theta={p.theta:.3f}: {p.edge_state_ipr:.3f} > {bulk:.4f}")
    report("4d", ok, "in-gap IPR vs median bulk-doublon IPR: " + "; ".join(details))
    assert ok


# ---------------------------------------------------------------- 5

def test_criterion_5_zak_phases():
    z0, zpi = zak_phase(0.0), zak_phase(math.pi)
    overlaps = [abs(o) for o in z0.overlaps + zpi.overlaps]
    ok = (z0.gamma == math.pi and zpi.gamma == 0.0 and min(overlaps) >= 0.9
          and (z0.n_sites, zpi.n_sites) == (16, 18))
    report(5, ok, f"gamma(0)={z0.gamma:.6f} (N={z0.n_sites}), gamma(pi)={zpi.gamma:.6f} "
                  f"(N={zpi.n_sites}), min |parity overlap| {min(overlaps):.4f} (>= 0.9)")
    assert ok


# ---------------------------------------------------------------- 6

@pytest.fixture(scope="module")
def fig3_run(tmp_path_factory):
    cfg = cli.bundled_config("fig3")
    out = tmp_path_factory.mktemp("fig3")
    cfg = replace(cfg, outputs=OutputConfig(directory=str(out), svg=False, spice=False))
    t0 = time.perf_counter()
    report_ = cli.cmd_reproduce("fig3", cfg)
    return report_, time.perf_counter() - t0


def _ideal_peak_error(theta, node):
    p = ModelParams(15, u=1.5, p=-0.75, theta=theta, corner_shift=True)
    nl = synthesize_netlist(p, "ideal")
    states = physical_spectrum(p)
    gap = doublon_gap(states)
    edge = in_gap_states(states, gap)[0]
    f = np.arange(8000.0, 16000.001, 10.0)
    nodes = [(m, n) for m in range(1, 16) for n in range(1, 16)]
    mag = np.abs(impedance_spectra(nl, f, 200.0, nodes)[0])
    peaks = [q for q in in_gap_peaks(f, mag, nodes, gap_window(gap, nl.f0)) if q.isolated]
    assert [q.node for q in peaks] == [node]
    eps = float(epsilon_from_frequency(peaks[0].frequency, nl.f0))
    return abs(eps - edge.energy) / edge.energy


def test_criterion_6_impedance_spectra(fig3_run):
    rep, elapsed = fig3_run
    by_theta = {round(r["theta"], 3): r for r in
                [dict(theta=float(k), **v) for k, v in rep["summary"].items()]}
    crit = {c["criterion"]: c for c in rep["criteria"]}
    physical_ok = all(c["pass"] for c in rep["criteria"]) and len(crit) == 3
    errors = [c["detail"]["energy_match"]["relative_error"]
              for c in rep["criteria"] if "energy_match" in c["detail"]]
    ideal_errors = [_ideal_peak_error(0.0, (1, 1)), _ideal_peak_error(math.pi, (15, 15))]
    ok = physical_ok and max(errors) <= 0.02 and max(ideal_errors) <= 1e-3 and elapsed < 900
    report(6, ok,
           f"isolated in-gap peak nodes {by_theta[0.0]['peak_node']} @ "
           f"{by_theta[0.0]['peak_frequency']:.0f} Hz (theta=0), none (theta=1), "
           f"{by_theta[3.142]['peak_node']} @ {by_theta[3.142]['peak_frequency']:.0f} Hz "
           f"(theta=pi); energy match {max(errors):.2%} physical (<= 2%), "
           f"{max(ideal_errors):.3%} ideal (<= 0.1%); {elapsed:.0f} s (< 900 s)")
    assert ok


# ---------------------------------------------------------------- 7

PROPERTIES = [
    test_properties.test_hermiticity,
    test_properties.test_exchange_commutes_with_h,
    test_properties.test_exchange_is_an_involution,
    test_properties.test_projector_idempotent,
    test_properties.test_ipr_bounds,
    test_properties.test_epsilon_strictly_decreasing,
    test_properties.test_nic_power_balance,
    test_properties.test_reciprocity_iff_no_nic,
]


def test_criterion_7_property_suites():
    failures = []
    for prop in PROPERTIES:
        try:
            prop()
        except Exception as exc:  # noqa: BLE001 - any failure is reported
            failures.append(f"{prop.__name__}: {type(exc).__name__}")
    ok = not failures
    report(7, ok, f"{len(PROPERTIES)} property suites x 100 randomized cases, "
                  f"{len(failures)} failing" + (f" ({'; '.join(failures)})" if failures else ""))
    assert ok


# ---------------------------------------------------------------- supporting evidence

def test_strong_coupling_limit_recovers_estimate():
    """At U/J = 10 (P scaled to keep -PU/2J^2 fixed) the gap minimum moves
    onto the strong-coupling estimate, confirming that the offset seen in
    criterion 4c is a finite-U effect rather than a modelling error."""
    p = ModelParams(31, j=1.0, u=10.0, p=-0.1125, corner_shift=True)
    assert effective_ssh_couplings(p).theta_c_predicted == pytest.approx(THETA_C_STRONG)
    grid = np.linspace(0.85, 1.10, 26)
    gaps = theta_sweep(p, grid).gaps
    theta_min = float(grid[int(np.nanargmin(gaps))])
    assert abs(theta_min - THETA_C_STRONG) <= 0.03
