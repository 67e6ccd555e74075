"""Suite configuration: JSON schema, reference resolution and instance registry.

A configuration is a JSON object::

    {
      "schema": 1,
      "seed": 7,
      "spaces": [{"id": "p1", "preset": "product:1"}],
      "sets": [{"id": "idg", "space": "p1", "affine": {"M": [[1]], "p": [0]},
                "with": ["ea", "ebar", "h1", "h2"]}],
      "generate": [{"prefix": "ga", "kind": "affine", "count": 3, "dim": 2, "seed": 1}],
      "functions": [{"id": "abs", "max_affine": {"pieces": [...]}}],
      "enlargements": [{"id": "abs.eps", "kind": "eps_subdiff", "fn": "abs"}],
      "checks": [{"check": "transportation_2pt", "on": ["idg.*"], "trials": 1000}],
      "output": {"path": "report.json", "format": "json"}
    }

``spaces``, ``sets``, ``functions`` and ``enlargements`` may also be given as
objects keyed by id. Each set registers ``<set>.phi``, ``<set>.theta`` and
``<set>.theta_star`` as functions; the tags under ``with`` add the
enlargements ``<set>.ea``, ``<set>.ebar``, ``<set>.h1``, ``<set>.h2``,
``<set>.corrupted`` (and functions ``<set>.h1``, ``<set>.h2``).
"""

from __future__ import annotations

import fnmatch
import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..enlargements import make_corrupted, make_ea, make_ebar, make_eps_subdiff, make_from_repr
from ..errors import ConfigError, SsdError
from ..functions import MaxAffine, PlusQ, PolyhedralHull, Quadratic, quad_on_graph
from ..generators import gen_random_instances
from ..representative import average_repr, penalized_repr, standard_reprs, young_repr
from ..sets import AffineGraph, SubdiffGraph, set_from_spec
from ..spaces import space_from_spec

SCHEMA = 1
SET_KINDS = ("finite", "affine", "subdiff")
WITH_TAGS = ("ea", "ebar", "h1", "h2", "corrupted")


@dataclass
class SuiteConfig:
    """Parsed configuration with every reference resolved."""

    seed: int
    spaces: dict = field(default_factory=dict)
    sets: dict = field(default_factory=dict)
    functions: dict = field(default_factory=dict)
    enlargements: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    calibration: bool = True
    output: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


def _entries(raw, key):
    """Normalize a section given as a list of ``{"id": ...}`` or an id-keyed object."""
    sec = raw.get(key, [])
    if isinstance(sec, dict):
        return [(str(k), v) for k, v in sec.items()]
    if not isinstance(sec, list):
        raise ConfigError(f"'{key}' must be a list or an object")
    out = []
    for i, e in enumerate(sec):
        if not isinstance(e, dict) or "id" not in e:
            raise ConfigError(f"{key}[{i}] needs an 'id'")
        out.append((str(e["id"]), {k: v for k, v in e.items() if k != "id"}))
    return out


def _unique(reg, ident, what):
    if ident in reg:
        raise ConfigError(f"duplicate {what} id {ident!r}")


def _space(ref, spaces):
    if isinstance(ref, str) and ref in spaces:
        return spaces[ref]
    try:
        return space_from_spec(ref)
    except SsdError as exc:
        raise ConfigError(f"unresolved space {ref!r}: {exc}") from exc


def _set_ref(ref, cfg):
    try:
        return cfg.sets[ref]
    except (KeyError, TypeError):
        raise ConfigError(f"unresolved set reference {ref!r}") from None


def fn_from_spec(spec, cfg: SuiteConfig):
    """Build a :class:`ConvexFn` from its JSON form; strings are references."""
    if isinstance(spec, str):
        if spec in cfg.functions:
            return cfg.functions[spec]
        raise ConfigError(f"unresolved function reference {spec!r}")
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ConfigError(f"function spec must have exactly one kind: {spec!r}")
    (kind, body), = spec.items()
    try:
        if kind == "max_affine":
            pieces = body["pieces"]
            ineq = body.get("ineq")
            eq = body.get("eq")
            return MaxAffine([p["g"] for p in pieces], [p["c"] for p in pieces],
                             ineq=None if ineq is None else (ineq["A"], ineq["b"]),
                             eq=None if eq is None else (eq["A"], eq["b"]))
        if kind == "hull":
            return PolyhedralHull(body["points"], body["values"], body.get("rays"),
                                  body.get("ray_values"), body.get("lines"),
                                  body.get("line_values"))
        if kind == "quadratic":
            return Quadratic(body["P"], body.get("l"), body.get("c0", 0.0), body.get("C"),
                             body.get("d"))
        if kind == "quad_on_graph":
            sp = _space(body.get("space", f"product:{len(body['M'])}"), cfg.spaces)
            return quad_on_graph(sp, body["M"], body.get("p"))
        if kind == "plus_q":
            return PlusQ(fn_from_spec(body["base"], cfg), _space(body["space"], cfg.spaces))
        if kind == "conjugate":
            return fn_from_spec(body, cfg).conjugate_fn()
        if kind == "fitzpatrick":
            A = _set_ref(body["set"], cfg)
            which = body.get("which", "phi")
            if which not in ("phi", "theta", "theta_star"):
                raise ConfigError(f"unknown Fitzpatrick function {which!r}")
            return getattr(A, which)()
        if kind == "penalized":
            return penalized_repr(_set_ref(body["set"], cfg), float(body["t"]))
        if kind == "young":
            return young_repr(fn_from_spec(body, cfg))
        if kind == "average":
            return average_repr(_set_ref(body["set"], cfg))
    except ConfigError:
        raise
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed {kind} function spec: {exc}") from exc
    except SsdError as exc:
        raise ConfigError(f"invalid {kind} function: {exc}") from exc
    raise ConfigError(f"unknown function kind {kind!r}")


def _register_set(cfg, ident, A, tags):
    _unique(cfg.sets, ident, "set")
    cfg.sets[ident] = A
    try:
        for name in ("phi", "theta", "theta_star"):
            cfg.functions[f"{ident}.{name}"] = getattr(A, name)()
    except SsdError as exc:
        raise ConfigError(f"set {ident!r}: {exc}") from exc
    bad = set(tags) - set(WITH_TAGS)
    if bad:
        raise ConfigError(f"unknown enlargement tag(s) {sorted(bad)} on set {ident!r}")
    reprs = standard_reprs(A) if ({"h1", "h2"} & set(tags)) else {}
    for tag in tags:
        key = f"{ident}.{tag}"
        if tag == "ea":
            E = make_ea(A)
        elif tag == "ebar":
            E = make_ebar(A)
        elif tag == "corrupted":
            E = make_corrupted(A)
        else:
            if tag not in reprs:
                raise ConfigError(f"no standard representative functions for set {ident!r}")
            cfg.functions[key] = reprs[tag]
            E = make_from_repr(A, reprs[tag], check=False, label=f"A_{tag}")
        cfg.enlargements[key] = E


def _enlargement(spec, cfg):
    kind = spec.get("kind")
    try:
        if kind == "ea":
            return make_ea(_set_ref(spec["set"], cfg), force=spec.get("force", False))
        if kind == "ebar":
            return make_ebar(_set_ref(spec["set"], cfg), force=spec.get("force", False))
        if kind == "from_repr":
            return make_from_repr(_set_ref(spec["set"], cfg), fn_from_spec(spec["fn"], cfg),
                                  check=spec.get("check", True), seed=spec.get("seed", 0))
        if kind == "eps_subdiff":
            return make_eps_subdiff(fn_from_spec(spec["fn"], cfg))
        if kind == "corrupted":
            return make_corrupted(_set_ref(spec["set"], cfg), spec.get("height", 1.0),
                                  spec.get("width", 0.5), spec.get("center"), spec.get("seed", 0))
    except ConfigError:
        raise
    except KeyError as exc:
        raise ConfigError(f"enlargement spec missing {exc}") from exc
    except SsdError as exc:
        raise ConfigError(f"invalid enlargement: {exc}") from exc
    raise ConfigError(f"unknown enlargement kind {kind!r}")


def parse_config(raw: dict[str, Any]) -> SuiteConfig:
    """Validate ``raw`` and build every instance it declares."""
    from .suite import CHECKS, resolve_targets

    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    if raw.get("schema") != SCHEMA:
        raise ConfigError(f"unsupported or missing schema version {raw.get('schema')!r}; expected {SCHEMA}")
    seed = raw.get("seed")
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("a top-level integer seed is required (seeds are never implicit)")
    cfg = SuiteConfig(seed=seed, calibration=bool(raw.get("calibration", True)),
                      output=dict(raw.get("output", {})), raw=raw)

    for ident, spec in _entries(raw, "spaces"):
        _unique(cfg.spaces, ident, "space")
        body = spec.get("preset", spec.get("gram")) if isinstance(spec, dict) else spec
        if body is None:
            raise ConfigError(f"space {ident!r} needs 'preset' or 'gram'")
        cfg.spaces[ident] = _space(body, {})

    for ident, spec in _entries(raw, "sets"):
        kinds = [k for k in SET_KINDS if k in spec]
        if len(kinds) != 1:
            raise ConfigError(f"set {ident!r} must have exactly one of {SET_KINDS}")
        sp = _space(spec.get("space", "product:1"), cfg.spaces)
        body = {kinds[0]: spec[kinds[0]]}
        if "assume_maximal" in spec:
            body["assume_maximal"] = spec["assume_maximal"]
        try:
            A = set_from_spec(sp, body)
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed set {ident!r}: {exc}") from exc
        except SsdError as exc:
            raise ConfigError(f"invalid set {ident!r}: {exc}") from exc
        _register_set(cfg, ident, A, spec.get("with", []))

    for i, g in enumerate(raw.get("generate", [])):
        try:
            specs = gen_random_instances(g["kind"], g["count"], g["dim"], g["seed"],
                                         points=g.get("points", 5), pieces=g.get("pieces"))
        except KeyError as exc:
            raise ConfigError(f"generate[{i}] missing {exc}") from exc
        except SsdError as exc:
            raise ConfigError(f"generate[{i}]: {exc}") from exc
        prefix = g.get("prefix", f"gen{i}_")
        for k, spec in enumerate(specs):
            sp = _space(spec.pop("space"), cfg.spaces)
            _register_set(cfg, f"{prefix}{k}", set_from_spec(sp, spec), g.get("with", []))

    for ident, spec in _entries(raw, "functions"):
        _unique(cfg.functions, ident, "function")
        cfg.functions[ident] = fn_from_spec(spec, cfg)

    for ident, spec in _entries(raw, "enlargements"):
        _unique(cfg.enlargements, ident, "enlargement")
        if "enlargement" in spec:
            spec = spec["enlargement"]
        cfg.enlargements[ident] = _enlargement(spec, cfg)

    checks = raw.get("checks", [])
    if not isinstance(checks, list):
        raise ConfigError("'checks' must be a list")
    for i, c in enumerate(checks):
        if not isinstance(c, dict) or "check" not in c:
            raise ConfigError(f"checks[{i}] needs a 'check' name")
        if c["check"] not in CHECKS:
            raise ConfigError(f"unknown check name {c['check']!r}")
        if c.get("expect", "pass") not in ("pass", "fail"):
            raise ConfigError(f"checks[{i}]: expect must be 'pass' or 'fail'")
        entry = dict(c)
        entry["targets"] = resolve_targets(cfg, c)
        entry.setdefault("seed", cfg.seed + i)
        cfg.checks.append(entry)
    return cfg


def load_config(path) -> SuiteConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(raw)


def match_ids(patterns, pool, what):
    """Expand ids and shell-style globs against ``pool`` keeping declaration order."""
    if isinstance(patterns, str):
        patterns = [patterns]
    out = []
    for pat in patterns:
        if any(ch in pat for ch in "*?["):
            hits = [k for k in pool if fnmatch.fnmatchcase(k, pat)]
            if not hits:
                raise ConfigError(f"pattern {pat!r} matches no {what}")
        elif pat in pool:
            hits = [pat]
        else:
            raise ConfigError(f"unresolved {what} reference {pat!r}")
        out.extend(h for h in hits if h not in out)
    return out


def is_maximal_kind(A):
    return isinstance(A, (AffineGraph, SubdiffGraph)) or A.maximal_by_construction


def as_point(text, dim=None):
    """Parse ``"1,2"`` or ``"[1, 2]"`` into a vector."""
    text = text.strip()
    try:
        vals = json.loads(text) if text.startswith("[") else [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"cannot parse point {text!r}") from exc
    v = np.asarray(vals, dtype=float).ravel()
    if dim is not None and v.size != dim:
        raise ConfigError(f"point has {v.size} coordinates, function needs {dim}")
    return v
