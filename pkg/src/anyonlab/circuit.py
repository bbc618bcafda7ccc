"""Electric-circuit emulation of the two-anyon lattice.

Every lattice site (m, n) becomes a circuit node connected to ground by an
inductor L.  Bonds become capacitive links C_J; the bonds that touch the
diagonal carry the exchange phase and become complex admittances
sigma_J * exp(-+i theta).  Diagonal nodes carry the interaction
capacitors C_U (and C_P links between pair partners).  Extra groundings make
every node's total admittance the same, so that Kirchhoff's equations at
frequency f read

    Y(f) = sigma_J (H - eps(f)),   sigma_J = -2 pi i f C_J,
    eps(f) = f0**2 / f**2 - 4,     f0 = 1 / (2 pi sqrt(L C_J)).

Time dependence is exp(-i omega t): a capacitor has admittance
-i omega C and an inductor +i / (omega L).

Two realizations are produced:

* ``ideal``: complex admittances are kept as frequency-independent
  ``complex_link`` elements.  The mapping holds at every frequency.
* ``physical``: each complex admittance sigma_J * z is realized at a
  reference frequency with R, L, C and negative-impedance converters (NIC,
  a resistance whose sign depends on the direction of the current).  The
  mapping is exact only at that frequency.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
import math

import numpy as np

from .errors import SingularSynthesis, UnsupportedSign, ValidationError
from .model import ModelParams, pair_partners

__all__ = [
    "GROUND",
    "CircuitElement",
    "Netlist",
    "ElementValues",
    "node_name",
    "parse_node",
    "node_class",
    "element_values",
    "characteristic_frequency",
    "epsilon_from_frequency",
    "frequency_from_epsilon",
    "default_reference_frequency",
    "synthesize_netlist",
    "nic_input_impedance",
    "export_spice",
    "parse_spice",
    "netlist_to_json",
]

GROUND = "0"
KINDS = ("capacitor", "inductor", "resistor", "nic_link", "complex_link", "ground_branch")

# Element values quoted for the 15 x 15 demonstration circuit
# (U = 1.5, P = -0.75 in units of J; C_J = 1 uF, L = 23.21 uH).
PAPER_REPLICA = {
    "l": 23.21e-6,
    "c_j": 1e-6,
    "c_u_corner": 2.91e-6,
    # theta = 1
    "link_c": 0.48e-6,
    "link_r": 15.8,
    "ground_r": 11.77,
    "ground_c": 2e-6,
    "c_g": 1e-6,
    # theta = pi
    "l_j": 190.21e-6,
}


def node_name(m, n):
    return f"n_{m}_{n}"


def parse_node(name):
    """Inverse of :func:`node_name`; returns None for ground."""
    if name == GROUND:
        return None
    _, m, n = name.split("_")
    return int(m), int(n)


@dataclass(frozen=True)
class CircuitElement:
    """A two-terminal branch.

    Attributes
    ----------
    kind : str
        One of ``capacitor``, ``inductor``, ``resistor``, ``nic_link``,
        ``complex_link``, ``ground_branch``.
    node_a, node_b : str
        Node names; ``node_b`` is ``"0"`` for branches to ground.
    value : float
        Capacitance (F), inductance (H) or resistance (ohm).  For
        ``nic_link`` the resistance seen from ``node_a`` toward ``node_b``
        (the opposite direction sees its negative); for ``complex_link`` the
        reference capacitance; for ``ground_branch`` the series capacitance.
    factor : complex, optional
        ``complex_link`` only: admittance from a to b is
        -i omega value * factor, from b to a -i omega value * conj(factor).
    resistance : float, optional
        ``ground_branch`` only: signed series resistance.
    role : str
        Free-form label (``L``, ``C_J``, ``C_U``, ``Z_g1`` ...).
    """

    kind: str
    node_a: str
    node_b: str
    value: float
    factor: complex | None = None
    resistance: float | None = None
    role: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown element kind {self.kind!r}")
        if self.kind == "nic_link":
            if self.value == 0 or not math.isfinite(self.value):
                raise ValidationError("NIC resistance must be finite and non-zero")
        elif not (self.value > 0 and math.isfinite(self.value)):
            raise ValidationError(f"{self.kind} value must be positive, got {self.value!r}")
        if self.kind == "complex_link" and self.factor is None:
            raise ValidationError("complex_link needs an admittance factor")
        if self.kind == "ground_branch" and (self.resistance is None or self.node_b != GROUND):
            raise ValidationError("ground_branch is a series R-C to ground")

    @property
    def is_reciprocal(self):
        if self.kind == "nic_link":
            return False
        if self.kind == "complex_link":
            return self.node_b == GROUND or complex(self.factor).imag == 0
        return True

    def to_dict(self):
        d = {"kind": self.kind, "a": self.node_a, "b": self.node_b, "value": self.value}
        if self.kind == "nic_link":
            d["direction"] = 1 if self.value > 0 else -1
        if self.factor is not None:
            d["factor"] = [complex(self.factor).real, complex(self.factor).imag]
        if self.resistance is not None:
            d["resistance"] = self.resistance
        if self.role:
            d["role"] = self.role
        return d


@dataclass(frozen=True)
class Netlist:
    n: int
    mode: str
    f_ref: float | None
    c_j: float
    l: float
    elements: tuple
    params: ModelParams
    paper_replica: bool = False

    @property
    def f0(self):
        return characteristic_frequency(self.l, self.c_j)

    @property
    def node_names(self):
        return [node_name(m, n) for m in range(1, self.n + 1) for n in range(1, self.n + 1)]

    @property
    def is_reciprocal(self):
        return all(e.is_reciprocal for e in self.elements)

    def count(self, kind=None, role=None):
        return sum(1 for e in self.elements
                   if (kind is None or e.kind == kind) and (role is None or e.role == role))


@dataclass(frozen=True)
class ElementValues:
    c_j: float
    l: float
    c_p: float
    c_u: float
    c_u_corner: float | None
    c_g: float
    link_factor: complex        # (m, n) -> (m, n+1) across the diagonal
    z_g1_factor: complex        # node (m, m+1)
    z_g2_factor: complex        # node (m+1, m)
    f0: float


def _unit(phase):
    """exp(i phase) with round-off below 1e-15 snapped to zero."""
    c, s = math.cos(phase), math.sin(phase)
    return complex(0.0 if abs(c) < 1e-15 else c, 0.0 if abs(s) < 1e-15 else s)


def _one_minus_unit(phase):
    """1 - exp(i phase) without cancellation at small phase."""
    re = 2 * math.sin(phase / 2) ** 2
    im = -math.sin(phase)
    return complex(re, 0.0 if abs(im) < 1e-15 else im)


def characteristic_frequency(l, c_j):
    """f0 = 1 / (2 pi sqrt(L C_J))."""
    return 1.0 / (2 * math.pi * math.sqrt(l * c_j))


def epsilon_from_frequency(f, f0):
    """Tight-binding energy eps = f0^2 / f^2 - 4 probed at frequency f."""
    f = np.asarray(f, dtype=float)
    return f0 ** 2 / f ** 2 - 4.0


def frequency_from_epsilon(eps, f0):
    """Inverse of :func:`epsilon_from_frequency` (needs eps > -4)."""
    eps = np.asarray(eps, dtype=float)
    return f0 / np.sqrt(eps + 4.0)


def node_class(m, n, N):
    """Site class 1..11 of node (m, n) in an N x N lattice.

    1: corner (1,1); 2: (2,1)-type co-diagonal end; 3: (1,2)-type
    co-diagonal end; 4: even diagonal; 5: lower co-diagonal m = n+1;
    6: upper co-diagonal m = n-1; 7: odd diagonal; 8: corner (N,N);
    9: edge; 10: off-diagonal corner (N,1) or (1,N); 11: interior.
    The far co-diagonal ends (N, N-1) and (N-1, N) mirror classes 2 and 3.
    """
    if not (1 <= m <= N and 1 <= n <= N):
        raise IndexError(f"site ({m}, {n}) outside a {N}x{N} lattice")
    if m == n:
        if m == 1:
            return 1
        if m == N:
            return 8
        return 4 if m % 2 == 0 else 7
    if m == n + 1:
        return 2 if m in (2, N) else 5
    if n == m + 1:
        return 3 if n in (2, N) else 6
    if (m, n) in ((N, 1), (1, N)):
        return 10
    if m in (1, N) or n in (1, N):
        return 9
    return 11


def element_values(params, c_j=1e-6, l=23.21e-6):
    """Circuit element values realizing ``params``.

    Raises
    ------
    UnsupportedSign
        For P > 0, which would need a negative capacitance.
    """
    if params.p > 0:
        raise UnsupportedSign("P > 0 cannot be realized with a capacitor")
    if params.j != 1:
        raise ValidationError("circuit synthesis works in units of J (j must be 1)")
    c_p = -params.p * c_j
    c_u = 2 * params.u * c_j - c_p
    c_u_corner = None
    if params.corner_shift:
        c_u_corner = 2 * (params.u + params.j ** 2 / (2 * params.u)) * c_j - c_p
    th = params.theta
    return ElementValues(
        c_j=c_j,
        l=l,
        c_p=c_p,
        c_u=c_u,
        c_u_corner=c_u_corner,
        c_g=2 * c_j * (1 - math.cos(th)),
        link_factor=_unit(-th),
        z_g1_factor=_one_minus_unit(th),
        z_g2_factor=_one_minus_unit(-th),
        f0=characteristic_frequency(l, c_j),
    )


def default_reference_frequency(params, c_j=1e-6, l=23.21e-6):
    """Frequency of the doublon-gap centre (falls back to eps = 2U + 2J^2/U)."""
    from .spectra import doublon_gap, physical_spectrum
    from .errors import NoDoublonBand

    try:
        eps = doublon_gap(physical_spectrum(params)).center
    except NoDoublonBand:
        eps = 2 * params.u + 2 * params.j ** 2 / params.u
    return float(frequency_from_epsilon(eps, characteristic_frequency(l, c_j)))


# ---------------------------------------------------------------------------
# synthesis

def _site_links(params):
    """Yield (a, b, factor) for every bond, factor seen from a toward b."""
    N = params.n_sites
    link = _unit(-params.theta)
    for m in range(1, N + 1):
        for n in range(1, N + 1):
            if m < N:
                yield (m, n), (m + 1, n), 1.0
            if n < N:
                # second-particle hop; touches the diagonal iff n in {m-1, m}
                yield (m, n), (m, n + 1), link if n in (m - 1, m) else 1.0


def _missing_links(params, m, n):
    """Factors of the bonds that node (m, n) lacks at the lattice boundary."""
    N = params.n_sites
    link = _unit(-params.theta)
    missing = []
    if m == 1 or m == N:
        missing.append(1.0)
    if n == N:  # missing (m, N) -> (m, N+1)
        missing.append(link if n in (m - 1, m) else 1.0)
    if n == 1:  # missing (m, 1) -> (m, 0), conjugate of (m, 0) -> (m, 1)
        missing.append(link.conjugate() if m == 1 else 1.0)
    return missing


@dataclass
class _Builder:
    mode: str
    omega: float | None
    c_j: float
    replica: dict | None
    elements: list = field(default_factory=list)

    def add(self, *args, **kw):
        self.elements.append(CircuitElement(*args, **kw))

    def admittance(self, a, b, factor, role):
        """Branch of admittance sigma_J * factor from a to b (b may be ground)."""
        z = complex(factor)
        if abs(z) < 1e-15:
            return
        if z.imag == 0 and z.real > 0:
            self.add("capacitor", a, b, self.c_j * z.real, role=role)
            return
        if self.mode == "ideal":
            self.add("complex_link", a, b, self.c_j, factor=z, role=role)
            return
        # parallel realization: -i w C_J z = -i w C_J Re z + w C_J Im z
        w, rep = self.omega, self.replica
        if rep is not None and "l_j" in rep and abs(z.real + 1) < 1e-12:
            self.add("inductor", a, b, rep["l_j"], role=role + ":L_J")
            return
        if abs(z.real) > 1e-12:
            if z.real > 0:
                c = rep["link_c"] if rep is not None and "link_c" in rep else self.c_j * z.real
                self.add("capacitor", a, b, c, role=role + ":C")
            else:
                self.add("inductor", a, b, 1 / (w * w * self.c_j * -z.real), role=role + ":L")
        if abs(z.imag) > 1e-12:
            r = 1 / (w * self.c_j * z.imag)
            if rep is not None and "link_r" in rep:
                r = math.copysign(rep["link_r"], r)
            if b == GROUND and r > 0:
                self.add("resistor", a, b, r, role=role + ":R")
            else:
                self.add("nic_link", a, b, r, role=role + ":NIC")

    def series_ground(self, a, factor, role):
        """Series R-C grounding of admittance sigma_J * factor."""
        z = complex(factor)
        if abs(z) < 1e-15:
            return
        if self.mode == "ideal":
            self.add("complex_link", a, GROUND, self.c_j, factor=z, role=role)
            return
        inv = 1 / z
        if inv.real <= 0:
            raise SingularSynthesis(f"no series R-C realizes factor {z}")
        c = self.c_j / inv.real
        r = -inv.imag / (self.omega * self.c_j)
        if self.replica is not None and "ground_c" in self.replica:
            c = self.replica["ground_c"]
            r = math.copysign(self.replica["ground_r"], r)
        self.add("ground_branch", a, GROUND, c, resistance=r, role=role)


def _replica_overrides(theta, mode):
    if mode != "physical":
        raise ValidationError("paper_replica values only exist for the physical mode")
    rep = {"c_u_corner": PAPER_REPLICA["c_u_corner"]}
    if theta == 0:
        return rep
    if abs(theta - 1.0) < 1e-9:
        keys = ("link_c", "link_r", "ground_r", "ground_c", "c_g")
    elif abs(theta - math.pi) < 1e-9:
        keys = ("l_j",)
    else:
        raise ValidationError("paper_replica values exist only for theta in {0, 1, pi}")
    rep.update({k: PAPER_REPLICA[k] for k in keys})
    return rep


def synthesize_netlist(params, mode="ideal", f_ref=None, c_j=1e-6, l=23.21e-6,
                       paper_replica=False):
    """Build the circuit for ``params``.

    Parameters
    ----------
    params : ModelParams
        Must have j == 1 and p <= 0.
    mode : {"ideal", "physical"}
    f_ref : float, optional
        Frequency (Hz) at which the physical realization is exact.  Defaults
        to the doublon-gap centre.  Ignored in ideal mode.
    c_j, l : float
        Link capacitance and grounding inductance.
    paper_replica : bool
        Use the published element values (physical mode, theta in
        {0, 1, pi}) instead of the formula-derived ones where they differ.

    Returns
    -------
    Netlist
    """
    if mode not in ("ideal", "physical"):
        raise ValidationError(f"mode must be 'ideal' or 'physical', got {mode!r}")
    replica = None
    if paper_replica:
        replica = _replica_overrides(params.theta, mode)
        c_j, l = PAPER_REPLICA["c_j"], PAPER_REPLICA["l"]
    ev = element_values(params, c_j, l)
    omega = None
    if mode == "physical":
        if f_ref is None:
            f_ref = default_reference_frequency(params, c_j, l)
        if not (f_ref and f_ref > 0 and math.isfinite(f_ref)):
            raise SingularSynthesis(f"physical mode needs f_ref > 0, got {f_ref!r}")
        omega = 2 * math.pi * f_ref
    else:
        f_ref = None

    N = params.n_sites
    b = _Builder(mode, omega, c_j, replica)
    partners = {}
    for a, c in pair_partners(params):
        partners[a] = c
        partners[c] = a

    # inter-node links
    for (m, n), (m2, n2), factor in _site_links(params):
        b.admittance(node_name(m, n), node_name(m2, n2), factor, "C_J" if factor == 1.0 else "Z")
    if ev.c_p > 0:
        for a, c in pair_partners(params):
            b.add("capacitor", node_name(a, a), node_name(c, c), ev.c_p, role="C_P")

    # groundings
    for m in range(1, N + 1):
        for n in range(1, N + 1):
            name = node_name(m, n)
            b.add("inductor", name, GROUND, l, role="L")
            for factor in _missing_links(params, m, n):
                b.admittance(name, GROUND, factor, "edge")
            if m == n:
                corner = params.corner_shift and m in (1, N)
                c_u = ev.c_u_corner if corner else ev.c_u
                if corner and replica is not None:
                    c_u = replica["c_u_corner"]
                if m not in partners:
                    c_u += ev.c_p  # C_P to ground replaces the missing partner link
                if c_u > 0:
                    b.add("capacitor", name, GROUND, c_u, role="C_U")
                elif c_u < 0:
                    raise UnsupportedSign(f"C_U = {c_u:.3g} F is negative")
                if ev.c_g > 1e-15 * c_j:
                    c_g = replica.get("c_g", ev.c_g) if replica is not None else ev.c_g
                    b.add("capacitor", name, GROUND, c_g, role="C_g")
            elif n == m + 1:
                b.series_ground(name, ev.z_g1_factor, "Z_g1")
            elif m == n + 1:
                b.series_ground(name, ev.z_g2_factor, "Z_g2")

    return Netlist(
        n=N,
        mode=mode,
        f_ref=f_ref,
        c_j=c_j,
        l=l,
        elements=tuple(b.elements),
        params=params,
        paper_replica=bool(paper_replica),
    )


def nic_input_impedance(r, r1, r2, inverting=True):
    """Input impedance of an op-amp negative-impedance converter.

    Seen from the inverting side the converter presents -R R1 / R2; from the
    opposite side it presents plain +R.
    """
    if r1 <= 0 or r2 <= 0:
        raise ValidationError("R1 and R2 must be positive")
    return -r * r1 / r2 if inverting else float(r)


# ---------------------------------------------------------------------------
# serialization

def _node_key(name):
    node = parse_node(name)
    return (1, 0, 0) if node is None else (0,) + node


def _sort_key(e):
    return (KINDS.index(e.kind), _node_key(e.node_a), _node_key(e.node_b), e.role)


def _fmt(x):
    return repr(float(x))


def export_spice(netlist, comment=None):
    """SPICE-style card deck (deterministic ordering).

    ``comment`` (single line) is written as an extra ``*`` card after the
    parameter header, e.g. the resolved run configuration.

    NIC links become negative-resistance lines ``R... a b -R`` followed by a
    comment describing the op-amp realization.  Ideal-mode complex links
    have no SPICE primitive and are emitted as ``*CLINK`` comment cards.
    """
    p = netlist.params
    lines = [
        "* two-anyon lattice circuit",
        f"* params: N={p.n_sites} J={p.j:g} U={p.u:g} P={p.p:g} theta={p.theta:.3f} "
        f"corner_shift={int(p.corner_shift)} p_offset={p.p_offset}",
        f"* mode={netlist.mode} f_ref={netlist.f_ref!r} C_J={netlist.c_j!r} L={netlist.l!r}"
        f" paper_replica={int(netlist.paper_replica)}",
    ]
    if comment:
        lines.append("* " + " ".join(str(comment).split()))
    counters = Counter()
    for e in sorted(netlist.elements, key=_sort_key):
        if e.kind == "capacitor":
            counters["C"] += 1
            lines.append(f"C{counters['C']} {e.node_a} {e.node_b} {_fmt(e.value)} ; {e.role}")
        elif e.kind == "inductor":
            counters["L"] += 1
            lines.append(f"L{counters['L']} {e.node_a} {e.node_b} {_fmt(e.value)} ; {e.role}")
        elif e.kind == "resistor":
            counters["R"] += 1
            lines.append(f"R{counters['R']} {e.node_a} {e.node_b} {_fmt(e.value)} ; {e.role}")
        elif e.kind == "nic_link":
            counters["R"] += 1
            lines.append(f"RN{counters['R']} {e.node_a} {e.node_b} {_fmt(e.value)} ; {e.role}")
            lines.append(f"* NIC: op-amp converter, R_in = {_fmt(e.value)} ohm from "
                         f"{e.node_a} toward {e.node_b}, {_fmt(-e.value)} ohm in reverse (R1 = R2)")
        elif e.kind == "ground_branch":
            counters["G"] += 1
            k = counters["G"]
            mid = f"g{k}"
            kind = "RN" if e.resistance < 0 else "R"
            lines.append(f"{kind}G{k} {e.node_a} {mid} {_fmt(e.resistance)} ; {e.role}")
            lines.append(f"CG{k} {mid} {e.node_b} {_fmt(e.value)} ; {e.role}")
        elif e.kind == "complex_link":
            counters["X"] += 1
            z = complex(e.factor)
            lines.append(f"*CLINK X{counters['X']} {e.node_a} {e.node_b} {_fmt(e.value)} "
                         f"{_fmt(z.real)} {_fmt(z.imag)} ; {e.role}")
    lines.append(".end")
    return "\n".join(lines) + "\n"


def parse_spice(text):
    """Parse the output of :func:`export_spice` back into elements."""
    elements = []
    pending = {}
    for raw in text.splitlines():
        line, _, role = raw.partition(" ; ")
        tok = line.split()
        if not tok or tok[0] == ".end":
            continue
        head = tok[0]
        if head == "*CLINK":
            _, _, a, b, c, re_, im = tok
            elements.append(CircuitElement("complex_link", a, b, float(c),
                                           factor=complex(float(re_), float(im)), role=role))
            continue
        if head.startswith("*"):
            continue
        a, b, value = tok[1], tok[2], float(tok[3])
        if head.startswith(("RG", "RNG")):
            pending[b] = (a, value, role)
        elif head.startswith("CG"):
            node, r, role = pending.pop(a)
            elements.append(CircuitElement("ground_branch", node, GROUND, value,
                                           resistance=r, role=role))
        elif head.startswith("RN"):
            elements.append(CircuitElement("nic_link", a, b, value, role=role))
        elif head[0] == "R":
            elements.append(CircuitElement("resistor", a, b, value, role=role))
        elif head[0] == "C":
            elements.append(CircuitElement("capacitor", a, b, value, role=role))
        elif head[0] == "L":
            elements.append(CircuitElement("inductor", a, b, value, role=role))
        else:
            raise ValidationError(f"cannot parse card {raw!r}")
    return elements


def netlist_to_json(netlist):
    return {
        "mode": netlist.mode,
        "f_ref": netlist.f_ref,
        "c_j": netlist.c_j,
        "l": netlist.l,
        "paper_replica": netlist.paper_replica,
        "params": netlist.params.to_dict(),
        "elements": [e.to_dict() for e in sorted(netlist.elements, key=_sort_key)],
    }
