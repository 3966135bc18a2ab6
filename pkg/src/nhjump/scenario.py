"""Scenario files: INI-style ``key = value`` text with two sections.

Grammar::

    [scenario]
    model        = tls | hatano-nelson | bcs
    task         = spectrum | evolve-master | evolve-nh | evolve-perturb | gap | corrections
    times        = <start>, <stop>, <points>        ; evolve-* tasks, points >= 2
    sample_times = <t1>, <t2>, ...                  ; optional explicit grid instead of times
    order        = 1 | 2                            ; evolve-perturb, default 1
    output       = <path prefix>                    ; CSV/JSON files are <prefix>_*.csv, <prefix>.json
    observables  = <name>, ...                      ; optional, model dependent
    methods      = exact, nh, pert                  ; optional, evolve-* tasks
    initial      = <state>                          ; optional, model dependent
    sweep        = <param>: <v1>, <v2>, ...         ; optional parameter sweep
    match_tol    = <float>                          ; spectrum task, default 1e-8

    [params]
    <model parameters>

Lines starting with ``#`` or ``;`` are comments.
"""
from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

MODELS = ("tls", "hatano-nelson", "bcs")
TASKS = ("spectrum", "evolve-master", "evolve-nh", "evolve-perturb", "gap", "corrections")
METHODS = ("exact", "nh", "pert")

REQUIRED_PARAMS = {
    "tls": ("omega", "gamma_p", "gamma_x", "gamma_z"),
    "hatano-nelson": ("n_sites", "J", "kappa", "bc"),
    "bcs": ("J", "mu", "U0", "kappa", "N"),
}
OPTIONAL_PARAMS = {
    "tls": (),
    "hatano-nelson": ("max_particles",),
    "bcs": ("U1",),
}
OBSERVABLES = {
    "tls": ("sigma_z",),
    "hatano-nelson": ("N",),
    "bcs": ("E_aver", "P0", "populations"),
}
MODEL_TASKS = {
    "tls": ("spectrum", "evolve-master", "evolve-nh", "evolve-perturb", "corrections"),
    "hatano-nelson": ("spectrum", "evolve-master", "evolve-nh", "evolve-perturb"),
    "bcs": TASKS,
}
DEFAULT_METHODS = {"evolve-master": ("exact",), "evolve-nh": ("nh",),
                   "evolve-perturb": ("exact", "nh", "pert")}
INT_PARAMS = {"n_sites", "N", "max_particles"}
STR_PARAMS = {"bc"}
COMPLEX_PARAMS = {"U1"}


class ScenarioError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, source: str = "<config>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}" if line else source
        super().__init__(f"{where}: {message}")


@dataclass
class Scenario:
    model: str
    task: str
    params: dict
    output: str
    times: Optional[np.ndarray] = None
    order: int = 1
    observables: tuple = ()
    methods: tuple = ()
    initial: Optional[str] = None
    sweep: Optional[tuple] = None  # (param, [values])
    match_tol: float = 1e-8
    source: str = "<config>"
    raw: dict = field(default_factory=dict)


def _line_map(text: str) -> dict:
    """(section, key) -> 1-based line number; (section, None) for headers."""
    out = {}
    section = None
    for i, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        m = re.match(r"^\[([^\]]+)\]", s)
        if m:
            section = m.group(1).strip()
            out[(section, None)] = i
            continue
        m = re.match(r"^([^=:#;\s][^=:]*?)\s*[=:]", s)
        if m and section is not None:
            out[(section, m.group(1).strip().lower())] = i
    return out


def _number(value: str, key: str, line, source):
    try:
        if key in INT_PARAMS:
            return int(value)
        if key in STR_PARAMS:
            return value.strip()
        if key in COMPLEX_PARAMS:
            return complex(value.replace(" ", "").replace("i", "j"))
        return float(value)
    except ValueError:
        raise ScenarioError(f"cannot parse {key} = {value!r}", line, source) from None


def _floats(value: str, key: str, line, source) -> list[float]:
    try:
        return [float(x) for x in value.split(",") if x.strip()]
    except ValueError:
        raise ScenarioError(f"{key}: expected comma-separated numbers", line, source) from None


def parse_scenario(text: str, source: str = "<config>") -> Scenario:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keep parameter case (J, U0, N)
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        if line is None and getattr(exc, "errors", None):
            line = exc.errors[0][0]
        raise ScenarioError(str(exc).splitlines()[0], line, source) from None
    lines = _line_map(text)

    def ln(section, key=None):
        return lines.get((section, key.lower() if key else None))

    if not cp.has_section("scenario"):
        raise ScenarioError("missing [scenario] section", None, source)
    sc = {k.lower(): v.strip() for k, v in cp.items("scenario")}
    for key in ("model", "task", "output"):
        if key not in sc:
            raise ScenarioError(f"missing required key '{key}'", ln("scenario"), source)
    model, task = sc["model"], sc["task"]
    if model not in MODELS:
        raise ScenarioError(f"unknown model {model!r}; expected one of {MODELS}",
                            ln("scenario", "model"), source)
    if task not in TASKS:
        raise ScenarioError(f"unknown task {task!r}; expected one of {TASKS}",
                            ln("scenario", "task"), source)
    if task not in MODEL_TASKS[model]:
        raise ScenarioError(f"task {task!r} not available for model {model!r}",
                            ln("scenario", "task"), source)

    raw_params = dict(cp.items("params")) if cp.has_section("params") else {}
    allowed = REQUIRED_PARAMS[model] + OPTIONAL_PARAMS[model]
    params = {}
    for key, value in raw_params.items():
        if key not in allowed:
            raise ScenarioError(f"unknown parameter {key!r} for model {model!r}",
                                ln("params", key), source)
        params[key] = _number(value, key, ln("params", key), source)

    sweep = None
    if "sweep" in sc:
        name, _, values = sc["sweep"].partition(":")
        name = name.strip()
        if name not in allowed or not values.strip():
            raise ScenarioError(f"bad sweep {sc['sweep']!r}; expected '<param>: v1, v2, ...'",
                                ln("scenario", "sweep"), source)
        vals = [_number(v.strip(), name, ln("scenario", "sweep"), source)
                for v in values.split(",") if v.strip()]
        sweep = (name, vals)
    missing = [k for k in REQUIRED_PARAMS[model] if k not in params
               and not (sweep and sweep[0] == k)]
    if missing:
        raise ScenarioError(f"missing parameters for {model}: {', '.join(missing)}",
                            ln("params") or ln("scenario"), source)

    times = None
    if task.startswith("evolve"):
        if "sample_times" in sc:
            t = _floats(sc["sample_times"], "sample_times", ln("scenario", "sample_times"), source)
            times = np.array(t)
            if len(t) < 2 or np.any(np.diff(times) <= 0) or times[0] < 0:
                raise ScenarioError("sample_times must be >= 2 increasing non-negative values",
                                    ln("scenario", "sample_times"), source)
        elif "times" in sc:
            t = _floats(sc["times"], "times", ln("scenario", "times"), source)
            if len(t) != 3 or t[2] < 2 or int(t[2]) != t[2] or t[1] <= t[0] or t[0] < 0:
                raise ScenarioError("times must be 'start, stop, points' with points >= 2",
                                    ln("scenario", "times"), source)
            times = np.linspace(t[0], t[1], int(t[2]))
        else:
            raise ScenarioError("evolve tasks need 'times' or 'sample_times'",
                                ln("scenario"), source)

    order = 1
    if "order" in sc:
        if sc["order"] not in ("1", "2"):
            raise ScenarioError("order must be 1 or 2", ln("scenario", "order"), source)
        order = int(sc["order"])

    observables = OBSERVABLES[model][:1]
    if "observables" in sc:
        observables = tuple(x.strip() for x in sc["observables"].split(",") if x.strip())
        bad = [o for o in observables if o not in OBSERVABLES[model]]
        if bad or not observables:
            raise ScenarioError(f"unknown observables {bad}; {model} offers {OBSERVABLES[model]}",
                                ln("scenario", "observables"), source)

    methods = DEFAULT_METHODS.get(task, ())
    if "methods" in sc:
        methods = tuple(x.strip() for x in sc["methods"].split(",") if x.strip())
        bad = [m for m in methods if m not in METHODS]
        if bad or not methods:
            raise ScenarioError(f"unknown methods {bad}; expected subset of {METHODS}",
                                ln("scenario", "methods"), source)

    match_tol = 1e-8
    if "match_tol" in sc:
        match_tol = _number(sc["match_tol"], "match_tol", ln("scenario", "match_tol"), source)

    known = {"model", "task", "times", "sample_times", "order", "output", "observables",
             "methods", "initial", "sweep", "match_tol"}
    for key in sc:
        if key not in known:
            raise ScenarioError(f"unknown key {key!r}", ln("scenario", key), source)

    return Scenario(model=model, task=task, params=params, output=sc["output"], times=times,
                    order=order, observables=observables, methods=methods,
                    initial=sc.get("initial"), sweep=sweep, match_tol=float(match_tol),
                    source=source, raw={"scenario": sc, "params": raw_params})


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read file: {exc.strerror}", None, str(path)) from None
    return parse_scenario(text, source=str(path))
