"""Command-line interface.

Every subcommand reads one JSON run configuration (``--config``; the
bundled ``fig2``/``fig3`` configurations are used by ``reproduce``), applies
flag overrides and writes deterministic artifacts into the output
directory.  Each artifact embeds the resolved configuration: CSV files as a
``# config:`` header line, JSON files under a ``"config"`` key, SVG files
as an XML comment and SPICE decks as a ``*`` comment card.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
from dataclasses import replace
from importlib import resources
import json
import logging
import math
from pathlib import Path
import sys

import numpy as np

from . import svg
from .acsim import gap_window, impedance_spectra, in_gap_peaks, refine_peak
from .circuit import (
    epsilon_from_frequency,
    export_spice,
    netlist_to_json,
    synthesize_netlist,
)
from .config import load_config, config_from_dict, with_overrides
from .errors import NoDoublonBand, NumericalError, ValidationError
from .spectra import (
    StateClass,
    doublon_gap,
    find_transition,
    in_gap_states,
    physical_spectrum,
    theta_sweep,
)
from .topology import effective_ssh_couplings, zak_phase

__all__ = ["main", "build_parser", "FIGURES"]

log = logging.getLogger("anyonlab")

FIGURES = ("fig2", "fig3")

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3


# ---------------------------------------------------------------------------
# output helpers

def _num(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


class _Writer:
    """Writes artifacts into one directory, stamping each with the config."""

    def __init__(self, config):
        self.config = config
        self.outputs = config.outputs
        self.dir = Path(config.outputs.directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.stamp = config.to_json()
        self.written = []

    def _path(self, name):
        path = self.dir / name
        self.written.append(str(path))
        return path

    def csv(self, name, header, rows):
        if not self.outputs.csv:
            return
        lines = ["# config: " + self.stamp, ",".join(header)]
        lines += [",".join(v if isinstance(v, str) else _num(v) for v in row) for row in rows]
        self._path(name).write_text("\n".join(lines) + "\n", encoding="utf-8")

    def json(self, name, payload):
        if not self.outputs.json:
            return
        doc = dict(payload)
        doc["config"] = self.config.to_dict()
        text = json.dumps(_plain(doc), indent=2, sort_keys=True)
        self._path(name).write_text(text + "\n", encoding="utf-8")

    def svg(self, name, text):
        if self.outputs.svg:
            self._path(name).write_text(text, encoding="utf-8")

    def spice(self, name, netlist):
        if self.outputs.spice:
            text = export_spice(netlist, comment="config: " + self.stamp)
            self._path(name).write_text(text, encoding="utf-8")


def _plain(obj):
    """Convert numpy scalars/arrays and enums into JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, StateClass):
        return obj.value
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def _theta_tag(theta):
    return f"theta_{theta:.3f}"


def _gap_dict(gap):
    if gap is None:
        return None
    return {
        "gap": gap.gap,
        "lower_band_top": gap.lower_band_top,
        "upper_band_bottom": gap.upper_band_bottom,
        "spacing": gap.spacing,
        "open": gap.is_open(),
    }


# ---------------------------------------------------------------------------
# subcommands

def _select_states(states, gap, count):
    """Indices of the states drawn as heat maps: edge doublons first, then
    the extremes of the doublon spectrum."""
    chosen = [k for k, s in enumerate(states) if s.kind.is_edge]
    doublons = [k for k, s in enumerate(states)
                if s.kind is StateClass.DOUBLON_BULK and k not in chosen]
    extra = []
    while doublons and len(chosen) + len(extra) < count:
        extra.append(doublons.pop())
        if doublons and len(chosen) + len(extra) < count:
            extra.append(doublons.pop(0))
    return sorted(chosen[:count] + extra)


def cmd_spectrum(config):
    """Eigenvalue table plus |beta|^2 maps of selected states."""
    t = config.thresholds.classification
    states = physical_spectrum(config.model, t)
    try:
        gap = doublon_gap(states, t)
        inside = {id(s) for s in in_gap_states(states, gap, t)}
    except NoDoublonBand:
        gap, inside = None, set()
    out = _Writer(config)
    header = ["index", "energy", "ipr", "diag_weight", "onsite_weight",
              "edge_weight_left", "edge_weight_right", "corner_weight", "kind", "in_gap"]
    rows = [[k, s.energy, s.ipr, s.diag_weight, s.onsite_weight, s.edge_weight_left,
             s.edge_weight_right, s.corner_weight, s.kind.value, id(s) in inside]
            for k, s in enumerate(states)]
    out.csv("spectrum.csv", header, rows)
    selected = _select_states(states, gap, config.thresholds.svg_states)
    for k in selected:
        s = states[k]
        out.svg(f"state_{k:04d}.svg", svg.heatmap(
            np.abs(s.amplitudes) ** 2,
            title=f"state {k}: E = {s.energy:.5f} ({s.kind.value})",
            comment="config: " + out.stamp))
    out.json("spectrum.json", {
        "n_states": len(states),
        "gap": _gap_dict(gap),
        "in_gap_states": [
            {"index": k, "energy": s.energy, "ipr": s.ipr, "kind": s.kind.value}
            for k, s in enumerate(states) if id(s) in inside],
        "plotted_states": selected,
    })
    return {"states": states, "gap": gap, "files": out.written}


def _sweep_config(config):
    if config.sweep is None:
        raise ValidationError("this command needs a 'sweep' section")
    return config.sweep


def sweep_summary(sweep):
    """Headline numbers of a theta sweep."""
    gaps = sweep.gaps
    valid = np.where(np.isfinite(gaps))[0]
    i_min = int(valid[np.argmin(gaps[valid])]) if valid.size else None
    first, last = sweep.points[0], sweep.points[-1]
    return {
        "gap_min_theta": None if i_min is None else float(sweep.theta_grid[i_min]),
        "gap_min": None if i_min is None else float(gaps[i_min]),
        "n_in_gap_first": first.n_in_gap,
        "n_in_gap_last": last.n_in_gap,
        "edge_side_first": first.edge_side,
        "edge_side_last": last.edge_side,
    }


def cmd_ipr_map(config):
    """IPR(energy, theta) scatter and the gap(theta) curve."""
    sc = _sweep_config(config)
    t = config.thresholds.classification
    sweep = theta_sweep(config.model, sc.grid(), t, max_workers=sc.workers)
    out = _Writer(config)
    rows = []
    for p in sweep.points:
        for e, q, c in zip(p.energies, p.iprs, p.classes):
            rows.append([p.theta, e, q, c.value])
    out.csv("ipr_map.csv", ["theta", "energy", "ipr", "kind"], rows)
    grows = []
    for p in sweep.points:
        g = p.gap
        grows.append([p.theta,
                      None if g is None else g.gap,
                      None if g is None else g.lower_band_top,
                      None if g is None else g.upper_band_bottom,
                      None if g is None else g.spacing,
                      p.edge_state_energy, p.edge_side or "", p.edge_state_ipr, p.n_in_gap])
    out.csv("gap.csv", ["theta", "gap", "lower_band_top", "upper_band_bottom", "spacing",
                        "edge_state_energy", "edge_side", "edge_state_ipr", "n_in_gap"], grows)
    th = np.repeat([p.theta for p in sweep.points], [len(p.energies) for p in sweep.points])
    en = np.concatenate([p.energies for p in sweep.points])
    iprs = np.concatenate([p.iprs for p in sweep.points])
    out.svg("ipr_map.svg", svg.scatter(th, en, iprs, title="IPR(energy, theta)",
                                       xlabel="theta", ylabel="energy / J",
                                       comment="config: " + out.stamp))
    gaps = sweep.gaps
    ok = np.isfinite(gaps)
    if ok.sum() >= 2:
        out.svg("gap.svg", svg.line_plot([("doublon gap", sweep.theta_grid[ok], gaps[ok])],
                                         title="doublon gap", xlabel="theta",
                                         ylabel="gap / J", comment="config: " + out.stamp))
    summary = sweep_summary(sweep)
    out.json("ipr_map.json", {"summary": summary, "n_rows": len(rows)})
    return {"sweep": sweep, "summary": summary, "files": out.written}


def cmd_zak(config):
    """Zak phase of the upper doublon band at the configured theta."""
    res = zak_phase(config.model.theta, base_params=config.model,
                    n_sites=config.zak.n_sites, p_offset=config.zak.p_offset,
                    thresholds=config.thresholds.classification)
    out = _Writer(config)
    out.json(f"zak_{_theta_tag(res.theta)}.json", {"zak": res.to_dict()})
    return {"zak": res, "files": out.written}


def cmd_transition(config):
    """Numerical gap-closing angle next to the strong-coupling estimate."""
    tc = config.transition
    theta_c = find_transition(config.model, tc.bracket, config.thresholds.classification, tc.tol)
    try:
        ssh = effective_ssh_couplings(config.model)
        predicted = ssh.theta_c_predicted
    except ZeroDivisionError:
        predicted = None
    out = _Writer(config)
    out.json("transition.json", {"theta_c": theta_c, "theta_c_predicted": predicted})
    return {"theta_c": theta_c, "theta_c_predicted": predicted, "files": out.written}


def _circuit_one(config, theta, out):
    cc = config.circuit
    t = config.thresholds
    params = replace(config.model, theta=float(theta))
    tag = _theta_tag(params.theta)
    netlist = synthesize_netlist(params, cc.mode, cc.f_ref, cc.c_j, cc.l, cc.paper_replica)
    out.json(f"netlist_{tag}.json", {"netlist": netlist_to_json(netlist)})
    out.spice(f"netlist_{tag}.cir", netlist)

    states = physical_spectrum(params, t.classification)
    try:
        gap = doublon_gap(states, t.classification)
        edge = in_gap_states(states, gap, t.classification)
    except NoDoublonBand:
        gap, edge = None, []
    window = cc.window
    if window is None and gap is not None:
        window = gap_window(gap, netlist.f0)

    f = cc.f_grid()
    N = params.n_sites
    nodes = [(m, n) for m in range(1, N + 1) for n in range(1, N + 1)]
    for node in cc.probe_nodes:
        if node not in nodes:
            raise ValidationError(f"probe node {node} outside the {N} x {N} circuit")
    z, over = impedance_spectra(netlist, f, cc.q, nodes)
    mag = np.abs(z)
    probe_cols = [nodes.index(tuple(nd)) for nd in cc.probe_nodes]
    header = ["frequency"] + [f"absZ_{m}_{n}" for m, n in cc.probe_nodes] \
        + [f"overflow_{m}_{n}" for m, n in cc.probe_nodes]
    rows = [[f[i]] + [mag[i, c] for c in probe_cols] + [bool(over[i, c]) for c in probe_cols]
            for i in range(f.size)]
    out.csv(f"impedance_{tag}.csv", header, rows)
    out.svg(f"impedance_{tag}.svg", svg.line_plot(
        [(f"({m},{n})", f, mag[:, c]) for (m, n), c in zip(cc.probe_nodes, probe_cols)],
        title=f"|Z| at theta = {params.theta:.3f}", xlabel="frequency / Hz",
        ylabel="|Z| / ohm", logy=True, comment="config: " + out.stamp))

    peaks = []
    if window is not None:
        peaks = in_gap_peaks(f, mag, nodes, window, t.peak_prominence, t.peak_merge_steps,
                             t.isolation_hz, t.rival_ratio)
    isolated = [p for p in peaks if p.isolated]
    best = isolated[0] if isolated else None
    maps = []
    for p in (isolated or peaks[:1]):
        i = int(np.argmin(np.abs(f - p.frequency)))
        grid = mag[i].reshape(N, N)
        name = f"impedance_map_{tag}_f{int(round(f[i]))}"
        out.csv(name + ".csv", ["m"] + [f"n{n}" for n in range(1, N + 1)],
                [[m + 1] + list(grid[m]) for m in range(N)])
        out.svg(name + ".svg", svg.heatmap(grid, title=f"|Z| at {f[i]:.0f} Hz",
                                           comment="config: " + out.stamp))
        maps.append({"frequency": float(f[i]), "max_node": list(nodes[int(np.argmax(mag[i]))]),
                     "max_over_median": float(grid.max() / np.median(grid))})

    match = None
    if best is not None and edge:
        eps = float(epsilon_from_frequency(best.frequency, netlist.f0))
        target = min(edge, key=lambda s: abs(s.energy - eps))
        f_fine, _ = refine_peak(netlist, best.node, best.frequency, cc.q,
                                half_width=cc.f_step, step=cc.f_step / 200)
        eps_fine = float(epsilon_from_frequency(f_fine, netlist.f0))
        match = {"peak_epsilon": eps, "edge_state_energy": target.energy,
                 "edge_state_kind": target.kind.value,
                 "relative_error": abs(eps - target.energy) / abs(target.energy),
                 "refined_frequency": f_fine, "refined_epsilon": eps_fine,
                 "refined_relative_error": abs(eps_fine - target.energy) / abs(target.energy)}
    return {
        "theta": params.theta,
        "f_ref": netlist.f_ref,
        "f0": netlist.f0,
        "n_elements": len(netlist.elements),
        "reciprocal": netlist.is_reciprocal,
        "gap": _gap_dict(gap),
        "window": None if window is None else list(window),
        "edge_states": [{"energy": s.energy, "kind": s.kind.value} for s in edge],
        "in_window_peaks": len(peaks),
        "isolated_peaks": [p.to_dict() for p in isolated],
        "peak_node": None if best is None else list(best.node),
        "peak_frequency": None if best is None else best.frequency,
        "energy_match": match,
        "impedance_maps": maps,
        "overflow_points": int(over.sum()),
    }


def cmd_circuit(config):
    """Netlists, impedance spectra and in-gap peak analysis per theta."""
    if config.circuit is None:
        raise ValidationError("this command needs a 'circuit' section")
    thetas = config.circuit.thetas or (config.model.theta,)
    out = _Writer(config)
    results = []
    for theta in thetas:
        log.info("circuit run at theta = %.4f", theta)
        res = _circuit_one(config, theta, out)
        out.json(f"circuit_{_theta_tag(res['theta'])}.json", {"result": res})
        results.append(res)
    return {"results": results, "files": out.written}


# ---------------------------------------------------------------------------
# bundled reproductions

def bundled_config(figure):
    """Parsed bundled configuration for ``figure`` ("fig2" or "fig3")."""
    if figure not in FIGURES:
        raise ValidationError(f"unknown figure {figure!r}; choose from {', '.join(FIGURES)}")
    text = resources.files("anyonlab.configs").joinpath(f"{figure}.json").read_text("utf-8")
    return config_from_dict(json.loads(text))


def _criterion(name, passed, detail):
    return {"criterion": name, "pass": bool(passed), "detail": detail}


def reproduce_fig2(config):
    ipr = cmd_ipr_map(config)
    sweep, s = ipr["sweep"], ipr["summary"]
    first, last = sweep.points[0], sweep.points[-1]
    ends = [first, last]
    theta_c = math.acos(-config.model.p * config.model.u / (2 * config.model.j ** 2))

    def ipr_ok(p):
        bulk = [q for q, c in zip(p.iprs, p.classes) if c is StateClass.DOUBLON_BULK]
        return p.edge_state_ipr is not None and bulk and p.edge_state_ipr > float(np.median(bulk))

    zak = {}
    for theta in (0.0, math.pi):
        try:
            zak[theta] = zak_phase(theta, base_params=config.model,
                                   thresholds=config.thresholds.classification)
        except NumericalError as exc:
            zak[theta] = exc
    z0, zpi = zak[0.0], zak[math.pi]
    zak_ok = (not isinstance(z0, Exception) and not isinstance(zpi, Exception)
              and math.isclose(z0.gamma, math.pi) and zpi.gamma == 0.0
              and min(abs(o) for o in z0.overlaps + zpi.overlaps) >= 0.9)
    criteria = [
        _criterion("one in-gap doublon at theta = 0 and pi",
                   all(p.n_in_gap == 1 for p in ends),
                   {"n_in_gap": [p.n_in_gap for p in ends]}),
        _criterion("edge state moves left -> right",
                   first.edge_side == "left" and last.edge_side == "right",
                   {"sides": [first.edge_side, last.edge_side]}),
        _criterion("gap minimum at 0.973 +/- 0.05",
                   s["gap_min_theta"] is not None and abs(s["gap_min_theta"] - 0.973) <= 0.05,
                   {"gap_min_theta": s["gap_min_theta"], "strong_coupling_estimate": theta_c}),
        _criterion("in-gap state IPR above median bulk-doublon IPR",
                   all(ipr_ok(p) for p in ends),
                   {"edge_ipr": [p.edge_state_ipr for p in ends]}),
        _criterion("Zak phase pi at theta = 0 and 0 at theta = pi", zak_ok,
                   {str(k): (v.to_dict() if not isinstance(v, Exception) else repr(v))
                    for k, v in zip(("0", "pi"), (z0, zpi))}),
    ]
    return {"figure": "fig2", "summary": s, "criteria": criteria, "files": ipr["files"]}


def reproduce_fig3(config, expected=None):
    expected = expected or {0.0: (1, 1), 1.0: None, round(math.pi, 6): (15, 15)}
    res = cmd_circuit(config)
    criteria = []
    for r in res["results"]:
        want = expected.get(round(r["theta"], 6), "unspecified")
        if want == "unspecified":
            continue
        if want is None:
            ok = r["peak_node"] is None
            criteria.append(_criterion(f"no isolated in-gap peak at theta = {r['theta']:.3f}",
                                       ok, {"isolated_peaks": r["isolated_peaks"]}))
            continue
        ok = (r["peak_node"] == list(want) and len(r["isolated_peaks"]) == 1
              and r["energy_match"] is not None and r["energy_match"]["relative_error"] <= 0.02)
        criteria.append(_criterion(
            f"isolated in-gap peak only at node {want} at theta = {r['theta']:.3f}", ok,
            {"peak_node": r["peak_node"], "peak_frequency": r["peak_frequency"],
             "energy_match": r["energy_match"]}))
    summary = {f"{r['theta']:.3f}": {"peak_node": r["peak_node"],
                                     "peak_frequency": r["peak_frequency"]}
               for r in res["results"]}
    return {"figure": "fig3", "summary": summary, "criteria": criteria, "files": res["files"]}


def cmd_reproduce(figure, config=None):
    config = config or bundled_config(figure)
    report = reproduce_fig2(config) if figure == "fig2" else reproduce_fig3(config)
    out = _Writer(config)
    report["all_pass"] = all(c["pass"] for c in report["criteria"])
    out.json(f"{figure}_summary.json", {k: v for k, v in report.items() if k != "files"})
    report["files"] = report["files"] + out.written
    return report


# ---------------------------------------------------------------------------
# entry point

def build_parser():
    parser = argparse.ArgumentParser(prog="anyonlab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        p.add_argument("--config", required=needs_config, help="JSON run configuration")
        p.add_argument("--theta", help="override model.theta (number or 'pi')")
        p.add_argument("--n-sites", type=int, help="override model.n_sites")
        p.add_argument("--out", help="override outputs.directory")

    common(sub.add_parser("spectrum", help="eigenvalue table and state maps"))
    common(sub.add_parser("ipr-map", help="IPR(energy, theta) and gap(theta)"))
    common(sub.add_parser("zak", help="Zak phase of the upper doublon band"))
    common(sub.add_parser("transition", help="gap-closing angle"))
    common(sub.add_parser("circuit", help="netlist synthesis and AC analysis"))
    rep = sub.add_parser("reproduce", help="run a bundled figure configuration")
    rep.add_argument("figure", choices=FIGURES)
    common(rep, needs_config=False)
    return parser


COMMANDS = {
    "spectrum": cmd_spectrum,
    "ipr-map": cmd_ipr_map,
    "zak": cmd_zak,
    "transition": cmd_transition,
    "circuit": cmd_circuit,
}


def _report(command, result):
    if command == "reproduce":
        for c in result["criteria"]:
            print(f"{'PASS' if c['pass'] else 'FAIL'}: {c['criterion']}")
    elif command == "zak":
        z = result["zak"]
        print(f"gamma = {z.gamma:.6f} (alpha0 = {z.alpha0:.6f}, alpha_pi = {z.alpha_pi:.6f})")
    elif command == "transition":
        print(f"theta_c = {result['theta_c']:.6f} (strong-coupling estimate "
              f"{result['theta_c_predicted']})")
    for path in result.get("files", []):
        print(path)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "reproduce":
            config = load_config(args.config) if args.config else bundled_config(args.figure)
        else:
            config = load_config(args.config)
        config = with_overrides(config, args.theta, args.n_sites, args.out)
        if args.command == "reproduce":
            result = cmd_reproduce(args.figure, config)
        else:
            result = COMMANDS[args.command](config)
    except (ValidationError, TypeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalError, ArithmeticError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _report(args.command, result)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
