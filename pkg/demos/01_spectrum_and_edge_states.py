"""
Bound pairs and their edge states
=================================

Two interacting anyons on a 15-site chain.  We diagonalize the model in the
physical (exchange-symmetric) sector, classify every eigenstate, and look at
the doublon band gap and the single doublon edge state inside it.

Run with ``python3 demos/01_spectrum_and_edge_states.py``.
"""
import math
from collections import Counter

from anyonlab import ModelParams, doublon_gap, in_gap_states, physical_spectrum

###############################################################################
# The parameters: on-site interaction U = 1.5 and pair hopping P = -0.75 in
# units of the tunnelling J.  The corner shift removes the trivial pair states
# bound to the corners of the two-particle lattice.
base = ModelParams(15, j=1.0, u=1.5, p=-0.75, corner_shift=True)

for theta, label in [(0.0, "bosons"), (1.0, "anyons"), (math.pi, "pseudo-fermions")]:
    params = ModelParams(**{**base.to_dict(), "theta": theta})
    states = physical_spectrum(params)
    kinds = Counter(s.kind.value for s in states)
    gap = doublon_gap(states)
    print(f"theta = {theta:.3f} ({label}): {len(states)} states, {dict(kinds)}")
    print(f"    doublon gap {gap.gap:.4f} between {gap.lower_band_top:.4f} "
          f"and {gap.upper_band_bottom:.4f} (level spacing {gap.spacing:.4f})")

    ###########################################################################
    # An edge state is a bound pair pinned to one corner of the diagonal.
    # Only those sitting well inside the gap are reported.
    for s in in_gap_states(states, gap):
        print(f"    in-gap {s.kind.value}: E = {s.energy:.6f}, IPR = {s.ipr:.3f}")

###############################################################################
# At theta = 0 the in-gap state hugs the (1, 1) corner, at theta = pi the
# (N, N) corner; near theta = 1 the gap is nearly closed and no state
# survives in it.
