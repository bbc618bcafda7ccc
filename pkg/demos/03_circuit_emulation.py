"""
Electric-circuit emulator
=========================

Synthesize the 15 x 15 node circuit for bosons, check that its admittance
matrix reproduces the tight-binding Hamiltonian, and find the in-gap
resonance that betrays the doublon edge state.
"""
import numpy as np

from anyonlab import ModelParams, doublon_gap, in_gap_states, physical_spectrum
from anyonlab.acsim import gap_window, impedance_spectra, in_gap_peaks, verify_mapping
from anyonlab.circuit import epsilon_from_frequency, export_spice, synthesize_netlist

params = ModelParams(15, j=1.0, u=1.5, p=-0.75, theta=0.0, corner_shift=True)

###############################################################################
# In the ideal realization Y(f) = sigma_J (H - eps(f)) holds at every
# frequency.  The physical realization uses the published element values.
ideal = synthesize_netlist(params, "ideal")
print("ideal mapping residual at 11.5 kHz:", verify_mapping(ideal, params, 11500.0))
netlist = synthesize_netlist(params, "physical", paper_replica=True)
print(f"{len(netlist.elements)} elements, f0 = {netlist.f0:.1f} Hz")
print("\n".join(export_spice(netlist).splitlines()[:6]))

###############################################################################
# Impedance spectra of every node with lossy (Q = 200) inductors.
f = np.arange(10500.0, 12500.0, 10.0)
nodes = [(m, n) for m in range(1, 16) for n in range(1, 16)]
magnitude = np.abs(impedance_spectra(netlist, f, q=200.0, nodes=nodes)[0])

###############################################################################
# The tight-binding gap maps onto a frequency window; an isolated peak in
# it is the edge state.
states = physical_spectrum(params)
gap = doublon_gap(states)
window = gap_window(gap, netlist.f0)
edge = in_gap_states(states, gap)[0]
print(f"\ngap window {window[0]:.0f}-{window[1]:.0f} Hz")
for peak in in_gap_peaks(f, magnitude, nodes, window):
    if peak.isolated:
        eps = float(epsilon_from_frequency(peak.frequency, netlist.f0))
        print(f"isolated peak at node {peak.node}, {peak.frequency:.0f} Hz -> "
              f"eps = {eps:.4f} (edge state {edge.energy:.4f})")
