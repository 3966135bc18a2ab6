"""Command-line scenario runner.

    nhjump run <config | bundled-name> [--output PREFIX]
    nhjump validate <config | bundled-name>
    nhjump list

Exit status: 0 success, 1 usage, 2 config error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import evolve_master, evolve_nh
from .errors import NumericalError
from .linalg import completeness_residual, dagger, eig_biortho
from .liouvillian import (CONVENTION, build_full, build_nojump, charge_sectors,
                          effective_nh_hamiltonian, liouvillian_charge, spectra_match, spectrum)
from .models import bcs as bcs_mod
from .models.hatano_nelson import HatanoNelsonParams, fock_of, hatano_nelson, pair_state
from .models.tls import TlsParams, excited_state, tls_model, tls_reference
from .perturbation import composite_split, correct_second_order, perturbative_evolve, \
    perturbed_eigensystem
from .scenario import Scenario, ScenarioError, load_scenario

FMT = "%.15e"
DENSE_SPECTRUM_MAX = 1024

BUNDLED = {
    "fig1_obc": "Hatano-Nelson n=10 OBC: full vs no-jump Liouvillian spectra",
    "fig1_pbc": "Hatano-Nelson n=10 PBC: full vs no-jump Liouvillian spectra",
    "fig2": "Hatano-Nelson n=10 OBC: particle number, master vs no-jump evolution",
    "fig3": "Two-level atom: <sigma_z>, exact vs no-jump vs second-order perturbative",
    "fig4a": "BCS N=10 kappa=0.1: mean-field energy, exact vs no-jump vs first order",
    "fig4b": "BCS N=10 kappa=0.1: ground-state population, exact vs first order",
    "fig5": "BCS N=10: mean-field energy at Jt=10..50 for a sweep of kappa",
    "fig6": "BCS kappa=0.05: mean-field energy for N in {10, 20, 30}",
    "fig7": "BCS N=10 kappa=0.05: ground and excited populations, exact evolution",
}

CONVENTIONS = {
    "vectorization": CONVENTION,
    "composite_hamiltonian": "H~ = i L = H(x)1 - 1(x)H* + i sum k F(x)F*",
    "bcs_grid": "k_m = pi m / (N-1), m = 0..N-1, xi = -2J cos k - mu",
    "bcs_coupling": "U1 = U0 + i kappa/2 unless given",
    "bcs_gauge": "Re Delta >= 0, Re v_k <= 0",
    "eigen_gauge": "unit-norm right vectors, largest entry real positive, <l_m|r_n> = delta_mn",
    "units": "omega for tls, J for hatano-nelson and bcs",
}


# ---------------------------------------------------------------- model setup

def _build(scn: Scenario, params: dict):
    """Returns (model, rho0, context dict)."""
    if scn.model == "tls":
        p = TlsParams(**params)
        init = scn.initial or "plus"
        if init == "plus":
            rho0 = 0.5 * np.ones((2, 2), dtype=complex)
        elif init == "excited":
            rho0 = excited_state()
        elif init == "ground":
            rho0 = np.diag([0.0, 1.0]).astype(complex)
        else:
            raise ScenarioError(f"tls initial state must be plus, excited or ground, got {init!r}",
                                None, scn.source)
        return tls_model(p), rho0, {"params": p}
    if scn.model == "hatano-nelson":
        p = HatanoNelsonParams(**params)
        init = scn.initial or "0,1"
        try:
            sites = tuple(int(x) for x in init.split(","))
        except ValueError:
            raise ScenarioError(f"initial must list occupied sites, got {init!r}",
                                None, scn.source) from None
        if len(sites) > p.max_particles or len(set(sites)) != len(sites) \
                or any(not 0 <= s < p.n_sites for s in sites):
            raise ScenarioError(f"invalid occupied sites {sites}", None, scn.source)
        return hatano_nelson(p), pair_state(p, sites), {"params": p}
    p = bcs_mod.BcsParams(**params)
    if scn.initial not in (None, "ground"):
        raise ScenarioError("bcs initial state must be 'ground'", None, scn.source)
    delta = bcs_mod.bcs_gap_solve(p)
    modes = bcs_mod.bcs_modes(p, delta)
    model, space = bcs_mod.bcs_restricted_model(p, modes)
    return model, bcs_mod.ground_state(p), {"params": p, "delta": delta, "modes": modes,
                                            "space": space}


def _biortho_residuals(model) -> dict:
    es = eig_biortho(effective_nh_hamiltonian(model))
    bio = float(np.abs(dagger(es.left) @ es.right - np.eye(es.dim)).max())
    return {"nh_biorthogonality": bio, "nh_completeness": completeness_residual(es)}


def _observable_table(scn, ctx, model, name, rhos):
    """Column names and values (real) of observable ``name`` on a list of states."""
    if name == "populations":
        d = np.array([np.real(np.diag(r)) for r in rhos])
        return ["P0"] + [f"P{k}" for k in range(1, d.shape[1])], d
    if name == "P0":
        return ["P0"], np.array([[np.real(r[0, 0])] for r in rhos])
    op = model.observables[name]
    return [name], np.array([[np.real(np.trace(op @ r))] for r in rhos])


# ---------------------------------------------------------------- tasks

def _task_evolve(scn, params):
    model, rho0, ctx = _build(scn, params)
    t = scn.times
    states = {}
    residuals = _biortho_residuals(model)
    for m in scn.methods:
        if m == "exact":
            states[m] = evolve_master(model, rho0, t, normalize=not model.is_lindblad)
        elif m == "nh":
            states[m] = evolve_nh(model, rho0, t)
        else:
            states[m] = perturbative_evolve(model, rho0, t, order=scn.order)
            pes = perturbed_eigensystem(model, scn.order)
            residuals["pert_completeness"] = completeness_residual(pes.assembled)
    tables = {}
    for obs in scn.observables:
        cols, blocks = ["t"], [t[:, None]]
        for m in scn.methods:
            names, vals = _observable_table(scn, ctx, model, obs, states[m])
            cols += [f"{n}_{m}" for n in names]
            blocks.append(vals)
        tables[obs] = (cols, np.hstack(blocks))
    if "delta" in ctx:
        residuals["gap"] = bcs_mod.gap_residual(ctx["params"], ctx["delta"])
    return tables, residuals, {}


def _task_spectrum(scn, params):
    model, _, ctx = _build(scn, params)
    full, nojump = build_full(model), build_nojump(model)
    if full.matrix.shape[0] <= DENSE_SPECTRUM_MAX:
        a, b = spectrum(full), spectrum(nojump)
    else:
        if scn.model != "hatano-nelson":
            raise ScenarioError("large spectra are only supported for hatano-nelson",
                                None, scn.source)
        sectors = charge_sectors(liouvillian_charge(fock_of(ctx["params"]).occupations()))
        a, b = spectrum(full, sectors=sectors), spectrum(nojump, method="kronecker")
    report = spectra_match(a, b, scn.match_tol)
    tables = {"full": (["re", "im"], np.column_stack([a.real, a.imag])),
              "nojump": (["re", "im"], np.column_stack([b.real, b.imag]))}
    return tables, _biortho_residuals(model), {"match": report.as_dict()}


def _task_gap(scn, params):
    p = bcs_mod.BcsParams(**params)
    delta = bcs_mod.bcs_gap_solve(p)
    modes = bcs_mod.bcs_modes(p, delta)
    rows = np.array([[m.k, m.xi, m.E.real, m.E.imag, m.u.real, m.u.imag, m.v.real, m.v.imag]
                     for m in modes])
    res = bcs_mod.gap_residual(p, delta)
    tables = {"modes": (["k", "xi", "E_re", "E_im", "u_re", "u_im", "v_re", "v_im"], rows)}
    extra = {"delta0_re": delta.real, "delta0_im": delta.imag, "residual": res,
             "U1_re": p.coupling.real, "U1_im": p.coupling.imag}
    return tables, {"gap": res}, extra


def _task_corrections(scn, params):
    model, _, ctx = _build(scn, params)
    if scn.model == "tls":
        free, V = composite_split(model)
        modes = correct_second_order(free, V)
        ref = tls_reference(ctx["params"])
        e0 = np.array([m.e0 for m in modes])
        rows, dev = [], 0.0
        for j, r0 in enumerate(ref["e0"]):
            m = modes[int(np.argmin(np.abs(e0 - r0)))]
            eng = np.array([m.e0, m.e1, m.e2])
            refv = np.array([r0, ref["e1"][j], ref["e2"][j]])
            dev = max(dev, np.abs(eng - refv).max(), np.abs(m.psi1 - ref["psi1"][:, j]).max(),
                      np.abs(m.psi2 - ref["psi2"][:, j]).max())
            rows.append([j] + [f(x) for x in np.concatenate([eng, refv]) for f in (np.real, np.imag)])
        cols = ["mode"] + [f"{a}_{c}" for a in ("e0", "e1", "e2", "e0_ref", "e1_ref", "e2_ref")
                           for c in ("re", "im")]
        return {"corrections": (cols, np.array(rows))}, _biortho_residuals(model), \
            {"max_deviation": float(dev)}
    p, modes_bcs = ctx["params"], ctx["modes"]
    E0, E1 = bcs_mod.bcs_ground_corrections(p, modes_bcs)
    pes = perturbed_eigensystem(model, 1)
    ground = min(pes.modes, key=lambda m: abs(m.e0))
    extra = {"E0": E0, "E1": E1, "engine_E1_re": float((1j * ground.e1).real),
             "engine_E1_im": float((1j * ground.e1).imag),
             "norm_sq": bcs_mod.bcs_normalization(p, modes_bcs)}
    res = _biortho_residuals(model)
    res["gap"] = bcs_mod.gap_residual(p, ctx["delta"])
    rows = np.array([[m.k, m.xi, m.E.real, m.E.imag, abs(m.u) ** 2, abs(m.v) ** 2]
                     for m in modes_bcs])
    return {"modes": (["k", "xi", "E_re", "E_im", "u_abs2", "v_abs2"], rows)}, res, extra


TASKS = {"evolve-master": _task_evolve, "evolve-nh": _task_evolve,
         "evolve-perturb": _task_evolve, "spectrum": _task_spectrum, "gap": _task_gap,
         "corrections": _task_corrections}


def _sweep_point(args):
    scn, params = args
    return TASKS[scn.task](scn, params)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("NHJUMP_THREADS", "1")))
    except ValueError:
        return 1


def execute(scn: Scenario, output: str | None = None) -> list[Path]:
    """Run a parsed scenario and write its artifacts; returns the written paths."""
    prefix = Path(output or scn.output)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    if scn.sweep is None:
        tables, residuals, extra = TASKS[scn.task](scn, dict(scn.params))
    else:
        name, values = scn.sweep
        jobs = [(scn, {**scn.params, name: v}) for v in values]
        nworkers = min(_workers(), len(jobs))
        if nworkers > 1:
            with ProcessPoolExecutor(max_workers=nworkers) as pool:
                results = list(pool.map(_sweep_point, jobs))
        else:
            results = [_sweep_point(j) for j in jobs]
        tables, residuals, extra = {}, {}, {"sweep": []}
        for v, (tb, res, ex) in zip(values, results):
            for key, (cols, data) in tb.items():
                block = np.hstack([np.full((data.shape[0], 1), float(v)), data])
                if key in tables:
                    tables[key] = (tables[key][0], np.vstack([tables[key][1], block]))
                else:
                    tables[key] = ([name] + cols, block)
            for key, val in res.items():
                residuals[key] = max(residuals.get(key, 0.0), val)
            extra["sweep"].append({name: v, **ex})
    written = []
    for key, (cols, data) in tables.items():
        path = prefix.with_name(f"{prefix.name}_{key}.csv")
        np.savetxt(path, data, fmt=FMT, delimiter=",", header=",".join(cols), comments="")
        written.append(path)
    meta = {
        "version": __version__,
        "model": scn.model,
        "task": scn.task,
        "params": {k: _jsonable(v) for k, v in scn.params.items()},
        "scenario": scn.raw.get("scenario", {}),
        "conventions": CONVENTIONS,
        "residuals": {k: float(v) for k, v in residuals.items()},
        "outputs": [p.name for p in written],
        **{k: _jsonable(v) for k, v in extra.items()},
    }
    side = prefix.with_name(prefix.name + ".json")
    side.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    written.append(side)
    return written


def _jsonable(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


def validate(scn: Scenario) -> None:
    """Dry run: parameters build valid dataclasses and the initial state is admissible."""
    points = [dict(scn.params)]
    if scn.sweep:
        points = [{**scn.params, scn.sweep[0]: v} for v in scn.sweep[1]]
    for params in points:
        try:
            if scn.model == "tls":
                TlsParams(**params)
            elif scn.model == "hatano-nelson":
                p = HatanoNelsonParams(**params)
                fock_of(p)
            else:
                bcs_mod.BcsParams(**params)
        except (TypeError, ValueError) as exc:
            raise ScenarioError(str(exc), None, scn.source) from None
    if scn.model != "bcs":
        _build(replace(scn), points[0])


# ---------------------------------------------------------------- entry point

def bundled_path(name: str) -> Path:
    return Path(str(resources.files("nhjump") / "scenarios" / f"{name}.ini"))


def _resolve(arg: str) -> Path:
    p = Path(arg)
    if p.exists() or arg not in BUNDLED:
        return p
    return bundled_path(arg)


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nhjump", description="Lindblad dynamics via quantum-jump "
                                 "perturbation theory: scenario runner.")
    sub = ap.add_subparsers(dest="cmd")
    r = sub.add_parser("run", help="run a scenario file or bundled scenario")
    r.add_argument("config")
    r.add_argument("--output", help="override the output prefix")
    v = sub.add_parser("validate", help="parse and dry-run a scenario")
    v.add_argument("config")
    sub.add_parser("list", help="list bundled scenarios")
    return ap


def main(argv=None) -> int:
    ap = _parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        ap.print_usage(sys.stderr)
        return 1
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    if args.cmd == "list":
        for name, desc in BUNDLED.items():
            print(f"{name:10s} {desc}")
        return 0
    try:
        scn = load_scenario(_resolve(args.config))
        if args.cmd == "validate":
            validate(scn)
            print(f"ok: {scn.model} {scn.task}")
            return 0
        validate(scn)
        for path in execute(scn, args.output):
            print(path)
        return 0
    except ScenarioError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
