"""Scenario files: parsing, validation and task execution.

A scenario file is YAML holding either one scenario mapping or
``scenarios: [...]``.  Every scenario names a ``task`` and may give
``field``, ``family``, ``seed``, ``params``, ``assert`` and ``outputs``.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import yaml

from . import dynsim, intpoly, popdiff, torus
from .errors import ParseError, RingDynError, TaskError, ValidationError
from .multipoly import MultiPolyQ
from .presets import PresetRegistry
from .reals import SymbolicReal, symbolic_from_dict
from .ring import AlgebraicNumber, NumberFieldSpec, make_field

TASKS = ("certify", "orbit", "khintchine", "popdiff", "limit-check")
SCENARIO_KEYS = {"name", "task", "field", "family", "seed", "params", "assert", "outputs", "description"}


# --- YAML with line numbers ----------------------------------------------------------

class LineDict(dict):
    line: int = 0


class LineList(list):
    line: int = 0


class _LineLoader(yaml.SafeLoader):
    pass


def _construct_mapping(loader, node):
    loader.flatten_mapping(node)
    out = LineDict(loader.construct_pairs(node, deep=True))
    out.line = node.start_mark.line + 1
    return out


def _construct_seq(loader, node):
    out = LineList(loader.construct_sequence(node, deep=True))
    out.line = node.start_mark.line + 1
    return out


_LineLoader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping)
_LineLoader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_SEQUENCE_TAG, _construct_seq)


def parse_text(text: str, source: str = "<scenario>") -> List[LineDict]:
    try:
        data = yaml.load(text, Loader=_LineLoader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        where = f"{source}:{mark.line + 1}:{mark.column + 1}" if mark else source
        raise ParseError(f"{where}: {exc.problem or exc}") from exc
    except yaml.YAMLError as exc:
        raise ParseError(f"{source}: {exc}") from exc
    if data is None:
        return []
    if isinstance(data, dict) and "scenarios" in data:
        items = data["scenarios"]
        if items is None:
            return []
        if not isinstance(items, list):
            raise ValidationError(f"{source}: 'scenarios' must be a list")
    elif isinstance(data, dict):
        items = [data]
    elif isinstance(data, list):
        items = data
    else:
        raise ValidationError(f"{source}: top level must be a mapping or a list")
    for i, item in enumerate(items):
        if not isinstance(item, dict):
            raise ValidationError(f"{source}: scenarios[{i}] must be a mapping")
    return list(items)


def parse_file(path: str) -> List[LineDict]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    return parse_text(text, str(path))


# --- validation helpers ------------------------------------------------------------------

class Ctx:
    """Key path and line of the value being validated."""

    def __init__(self, path: str, line: int):
        self.path, self.line = path, line

    def sub(self, key, value=None) -> "Ctx":
        line = getattr(value, "line", 0) or self.line
        sep = "" if isinstance(key, int) else "."
        k = f"[{key}]" if isinstance(key, int) else str(key)
        return Ctx(f"{self.path}{sep}{k}", line)

    def fail(self, msg: str) -> ValidationError:
        return ValidationError(f"{self.path} (line {self.line}): {msg}")


def _get(d: dict, key: str, ctx: Ctx, kind=None, default=..., check: Optional[Callable] = None):
    if key not in d:
        if default is ...:
            raise ctx.fail(f"missing required key '{key}'")
        return default
    v = d[key]
    c = ctx.sub(key, v)
    if kind is not None and not isinstance(v, kind):
        names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise c.fail(f"expected {names}, got {type(v).__name__}")
    if check is not None and not check(v):
        raise c.fail(f"invalid value {v!r}")
    return v


def _fraction(v, ctx: Ctx) -> Fraction:
    if isinstance(v, bool):
        raise ctx.fail("expected a rational, got a boolean")
    try:
        return Fraction(str(v))
    except (ValueError, ZeroDivisionError):
        raise ctx.fail(f"not a rational number: {v!r}") from None


def _symbolic(v, ctx: Ctx) -> SymbolicReal:
    try:
        if isinstance(v, float):
            return SymbolicReal(Fraction(str(v)))
        return symbolic_from_dict(v)
    except (KeyError, ValueError, TypeError) as exc:
        raise ctx.fail(f"bad real {v!r}: {exc}") from None


def _int_poly(v, ctx: Ctx) -> MultiPolyQ:
    """Univariate polynomial from a coefficient list (lowest degree first)."""
    if not isinstance(v, list) or not v:
        raise ctx.fail("polynomial must be a nonempty coefficient list")
    p = MultiPolyQ.univariate([_fraction(c, ctx.sub(i, c)) for i, c in enumerate(v)])
    if not intpoly.is_z_valued(p):
        raise ctx.fail("polynomial must be integer-valued")
    return p


def _multi_poly(v, nvars: int, ctx: Ctx) -> MultiPolyQ:
    """Coefficient list (one variable) or {"e1,e2": coefficient}."""
    if isinstance(v, list):
        if nvars != 1:
            raise ctx.fail("coefficient lists describe one-variable polynomials")
        return MultiPolyQ.univariate([_fraction(c, ctx.sub(i, c)) for i, c in enumerate(v)])
    if isinstance(v, dict):
        terms = {}
        for k, c in v.items():
            mono = _monomial(k, nvars, ctx.sub(k, c))
            terms[mono] = _fraction(c, ctx.sub(k, c))
        return MultiPolyQ(nvars, terms)
    raise ctx.fail("polynomial must be a coefficient list or a monomial mapping")


def _monomial(k, nvars: int, ctx: Ctx) -> Tuple[int, ...]:
    parts = [p for p in str(k).replace(" ", "").split(",") if p != ""]
    try:
        mono = tuple(int(p) for p in parts)
    except ValueError:
        raise ctx.fail(f"bad monomial key {k!r}") from None
    if len(mono) != nvars or any(e < 0 for e in mono):
        raise ctx.fail(f"monomial {k!r} needs {nvars} nonnegative exponents")
    return mono


# --- resolved scenario -------------------------------------------------------------------

@dataclass
class Scenario:
    name: str
    task: str
    field: NumberFieldSpec
    family: List[intpoly.PolyOverK]
    seed: int
    params: dict
    asserts: dict
    outputs: dict
    ctx: Ctx
    resolved: dict = field(default_factory=dict)


def resolve(raw: dict, index: int, registry: PresetRegistry, default_seed: int, source: str) -> Scenario:
    ctx = Ctx(f"{source}:scenarios[{index}]", getattr(raw, "line", 0))
    unknown = set(raw) - SCENARIO_KEYS
    if unknown:
        raise ctx.fail(f"unknown keys {sorted(unknown)}")
    name = str(_get(raw, "name", ctx, default=f"scenario{index}"))
    if not name or any(ch in name for ch in "/\\") or name.startswith("."):
        raise ctx.sub("name").fail("name must be a plain file-name component")
    task = _get(raw, "task", ctx, str)
    if task not in TASKS:
        raise ctx.sub("task").fail(f"unknown task {task!r}; expected one of {', '.join(TASKS)}")
    field_spec = raw.get("field", "rational")
    fctx = ctx.sub("field", field_spec)
    fam_raw = raw.get("family")
    if fam_raw is not None and isinstance(fam_raw, str) and "field" not in raw:
        try:
            field_spec = registry.family(fam_raw).get("field", "rational")
        except KeyError as exc:
            raise ctx.sub("family").fail(str(exc.args[0])) from None
    K = _resolve_field(field_spec, fctx, registry)
    family = _resolve_family(fam_raw, K, ctx.sub("family", fam_raw), registry) if fam_raw is not None else []
    seed = _get(raw, "seed", ctx, int, default=default_seed)
    params = _get(raw, "params", ctx, dict, default=LineDict())
    asserts = _get(raw, "assert", ctx, dict, default=LineDict())
    outputs = _get(raw, "outputs", ctx, dict, default=LineDict())
    for key in outputs:
        if key not in ("json", "csv", "summary"):
            raise ctx.sub("outputs").fail(f"unknown output kind {key!r}")
    sc = Scenario(name, task, K, family, seed, params, asserts, outputs, ctx)
    sc.resolved = {
        "name": name,
        "task": task,
        "field": K.to_dict(),
        "family": [p.to_literal() for p in family],
        "seed": seed,
    }
    VALIDATORS[task](sc)
    return sc


def _resolve_field(spec, ctx: Ctx, registry: PresetRegistry) -> NumberFieldSpec:
    try:
        if isinstance(spec, str):
            return registry.field(spec)
        if isinstance(spec, dict):
            mp = _get(spec, "min_poly", ctx, list)
            return make_field([int(_fraction(c, ctx)) if _fraction(c, ctx).denominator == 1 else _fraction(c, ctx)
                               for c in mp], assert_irreducible=bool(spec.get("assert_irreducible", False)),
                              name=spec.get("name"))
    except KeyError as exc:
        raise ctx.fail(str(exc.args[0])) from None
    except RingDynError as exc:
        raise ctx.fail(f"{type(exc).__name__}: {exc}") from None
    raise ctx.fail("field must be a preset name or a {min_poly: [...]} mapping")


def _resolve_family(spec, K: NumberFieldSpec, ctx: Ctx, registry: PresetRegistry) -> List[intpoly.PolyOverK]:
    if isinstance(spec, str):
        try:
            fam = registry.family(spec)
        except KeyError as exc:
            raise ctx.fail(str(exc.args[0])) from None
        fam_field = registry.field(fam.get("field", "rational"))
        if fam_field != K:
            raise ctx.fail(f"family {spec!r} is defined over field {fam.get('field')!r}")
        spec = fam["polys"]
    if not isinstance(spec, list) or not spec:
        raise ctx.fail("family must be a preset name or a nonempty list of polynomials")
    out = []
    for i, lit in enumerate(spec):
        c = ctx.sub(i, lit)
        if not isinstance(lit, list):
            raise c.fail("polynomial literal must be a coefficient list")
        try:
            for j, coef in enumerate(lit):
                if isinstance(coef, list) and len(coef) != K.degree:
                    raise c.sub(j, coef).fail(f"coordinate list needs {K.degree} entries")
            out.append(intpoly.PolyOverK.from_literal(K, lit))
        except (ValueError, ZeroDivisionError) as exc:
            raise c.fail(str(exc)) from None
        except RingDynError as exc:
            raise c.fail(f"{type(exc).__name__}: {exc}") from None
    return out


def _modulus(v, K: NumberFieldSpec, ctx: Ctx) -> AlgebraicNumber:
    if isinstance(v, list):
        if len(v) != K.degree:
            raise ctx.fail(f"modulus coordinates need {K.degree} entries")
        el = K.element([_fraction(x, ctx) for x in v])
    else:
        el = K.scalar(_fraction(v, ctx))
    if el.is_zero() or not el.is_integral():
        raise ctx.fail("modulus must be a nonzero algebraic integer")
    return el


# --- per-task validation -----------------------------------------------------------------

def _check_keys(d: dict, allowed: Sequence[str], ctx: Ctx) -> None:
    extra = set(d) - set(allowed)
    if extra:
        raise ctx.fail(f"unknown keys {sorted(extra)}")


def _validate_certify(sc: Scenario) -> None:
    p, c = sc.params, sc.ctx.sub("params", sc.params)
    _check_keys(p, ["moduli", "samples"], c)
    _check_keys(sc.asserts, ["intersective", "independent", "ok_valued"], sc.ctx.sub("assert", sc.asserts))
    if not sc.family:
        raise sc.ctx.fail("certify needs a family")
    if "moduli" in p:
        mods = _get(p, "moduli", c, list)
        sc.params["_moduli"] = [_modulus(m, sc.field, c.sub("moduli").sub(i, m)) for i, m in enumerate(mods)]
    else:
        sc.params["_moduli"] = intpoly.default_moduli(sc.field)
    sc.params["_samples"] = _get(p, "samples", c, int, default=100, check=lambda x: x >= 0)
    sc.resolved["moduli"] = [[str(x) for x in m.coords] for m in sc.params["_moduli"]]
    sc.resolved["samples"] = sc.params["_samples"]


def _validate_orbit(sc: Scenario) -> None:
    p, c = sc.params, sc.ctx.sub("params", sc.params)
    _check_keys(p, ["maps", "exponents", "x", "sequence", "ladder", "c_max", "characters", "threads",
                    "closure_samples"], c)
    _check_keys(sc.asserts, ["closure_dim", "cosets", "equidistributed"], sc.ctx.sub("assert", sc.asserts))
    if "sequence" in p:
        seq = _get(p, "sequence", c, dict)
        sctx = c.sub("sequence", seq)
        nvars = _get(seq, "nvars", sctx, int, default=1, check=lambda x: 1 <= x <= 3)
        coords = _get(seq, "coords", sctx, list)
        terms = []
        for i, co in enumerate(coords):
            cc = sctx.sub("coords").sub(i, co)
            if not isinstance(co, dict):
                raise cc.fail("each coordinate is a {monomial: real} mapping")
            terms.append({_monomial(k, nvars, cc.sub(k, v)): _symbolic(v, cc.sub(k, v)) for k, v in co.items()})
        try:
            sc.params["_u"] = torus.PolynomialTorusSequence.from_terms(nvars, terms)
        except (KeyError, ValueError) as exc:
            raise sctx.fail(str(exc)) from None
    else:
        maps_raw = _get(p, "maps", c, list)
        maps = []
        for i, mr in enumerate(maps_raw):
            mc = c.sub("maps").sub(i, mr)
            if not isinstance(mr, dict):
                raise mc.fail("map must be {A: rows, t: translation}")
            A = _get(mr, "A", mc, list)
            t = _get(mr, "t", mc, list)
            try:
                maps.append(torus.AffineUnipotentMap(A, [_symbolic(v, mc.sub("t").sub(j, v)) for j, v in enumerate(t)]))
            except RingDynError as exc:
                raise mc.fail(f"{type(exc).__name__}: {exc}") from None
            except (ValueError, TypeError) as exc:
                raise mc.fail(str(exc)) from None
        exps_raw = _get(p, "exponents", c, list)
        if len(exps_raw) != len(maps):
            raise c.sub("exponents").fail("need one exponent polynomial per map")
        nv = 1
        for e in exps_raw:
            if isinstance(e, dict):
                nv = len(next(iter(e)).split(",")) if e else 1
        exps = [_multi_poly(e, nv, c.sub("exponents").sub(i, e)) for i, e in enumerate(exps_raw)]
        m = maps[0].m if maps else 0
        x = [_symbolic(v, c.sub("x").sub(i, v)) for i, v in enumerate(_get(p, "x", c, list, default=[0] * m))]
        try:
            sc.params["_u"] = torus.closed_form_orbit(maps, exps, x)
        except RingDynError as exc:
            raise c.fail(f"{type(exc).__name__}: {exc}") from None
        sc.params["_maps"], sc.params["_exps"], sc.params["_x"] = maps, exps, x
    sc.params["_ladder"] = [int(n) for n in _get(p, "ladder", c, list, default=list(torus.DEFAULT_LADDER))]
    if not sc.params["_ladder"] or min(sc.params["_ladder"]) < 1:
        raise c.sub("ladder").fail("ladder must hold positive box sizes")
    sc.params["_c_max"] = _get(p, "c_max", c, int, default=3, check=lambda x: x >= 1)
    chars = _get(p, "characters", c, list, default=None)
    sc.params["_chars"] = [tuple(int(v) for v in ch) for ch in chars] if chars is not None else None
    sc.params["_threads"] = _get(p, "threads", c, int, default=None)
    sc.params["_samples"] = _get(p, "closure_samples", c, int, default=1000, check=lambda x: x >= 0)
    sc.resolved.update({"sequence": sc.params["_u"].to_dict(), "ladder": sc.params["_ladder"],
                        "c_max": sc.params["_c_max"], "closure_samples": sc.params["_samples"],
                        "characters": None if chars is None else [list(ch) for ch in sc.params["_chars"]]})


def _shift_list(p: dict, c: Ctx) -> List[MultiPolyQ]:
    if "shifts" in p:
        raw = _get(p, "shifts", c, list)
        return [_int_poly(s, c.sub("shifts").sub(i, s)) for i, s in enumerate(raw)]
    mults = _get(p, "multipliers", c, list)
    base = _int_poly(_get(p, "p", c, list), c.sub("p"))
    return [base * int(_fraction(r, c.sub("multipliers"))) for r in mults]


def _range(p: dict, c: Ctx, default=None) -> List[int]:
    rg = _get(p, "range", c, list, default=default)
    if rg is None:
        return None
    if len(rg) != 2 or not all(isinstance(v, int) for v in rg):
        raise c.sub("range").fail("range must be [first, last] integers")
    return list(range(rg[0], rg[1] + 1))


def _validate_khintchine(sc: Scenario) -> None:
    p, c = sc.params, sc.ctx.sub("params", sc.params)
    _check_keys(p, ["system", "alpha", "A", "rectangles", "m", "a", "shifts", "multipliers", "p", "k", "delta",
                    "eps", "range", "moduli", "quadrature_points"], c)
    _check_keys(sc.asserts, ["nonempty", "max_gap", "syndetic_at_scale", "min_popular_count", "refused"],
                sc.ctx.sub("assert", sc.asserts))
    kind = _get(p, "system", c, str, default="rotation")
    if kind not in ("rotation", "skew", "finite"):
        raise c.sub("system").fail("system must be rotation, skew or finite")
    shifts = _shift_list(p, c)
    where = c.sub("rectangles" if kind == "skew" else "A", p.get("rectangles" if kind == "skew" else "A"))
    try:
        if kind == "rotation":
            alpha = _symbolic(_get(p, "alpha", c), c.sub("alpha"))
            ivs = [(_fraction(a, where), _fraction(b, where)) for a, b in _get(p, "A", c, list)]
            system = dynsim.IntervalRotationSystem(alpha, ivs)
            mu = system.measure
            sc.resolved.update({"alpha": alpha.to_dict(), "A": [[str(a), str(b)] for a, b in system.intervals]})
        elif kind == "skew":
            alpha = _symbolic(_get(p, "alpha", c), c.sub("alpha"))
            rects = [tuple(_fraction(v, where) for v in r) for r in _get(p, "rectangles", c, list)]
            system = dynsim.SkewProductSystem(alpha, rects)
            mu = system.measure
            sc.resolved.update({"alpha": alpha.to_dict(), "rectangles": [[str(v) for v in r] for r in rects]})
        else:
            m = _get(p, "m", c, int, check=lambda x: x >= 1)
            system = dynsim.FiniteRotationSystem(m, _get(p, "a", c, int, default=1))
            elems = _get(p, "A", c, list)
            sc.params["_set"] = system.make_set(int(e) for e in elems)
            mu = system.density(sc.params["_set"])
            sc.resolved.update({"m": m, "a": system.a, "A": sorted({int(e) % m for e in elems})})
    except (ValueError, TypeError) as exc:
        raise where.fail(str(exc)) from None
    sc.params["_system"] = system
    sc.params["_shifts"] = shifts
    sc.params["_k"] = _get(p, "k", c, int, default=len(shifts))
    sc.params["_delta"] = _fraction(_get(p, "delta", c, default=str(mu)), c.sub("delta"))
    sc.params["_eps"] = _fraction(_get(p, "eps", c), c.sub("eps"))
    ns = _range(p, c)
    if ns is None:
        raise c.fail("missing required key 'range'")
    sc.params["_range"] = ns
    if sc.family:
        mods = _get(p, "moduli", c, list, default=None)
        sc.params["_moduli"] = ([_modulus(m_, sc.field, c.sub("moduli").sub(i, m_)) for i, m_ in enumerate(mods)]
                                if mods is not None else intpoly.default_moduli(sc.field))
        sc.resolved["moduli"] = [[str(x) for x in m_.coords] for m_ in sc.params["_moduli"]]
    sc.params["_qpoints"] = _get(p, "quadrature_points", c, int, default=2048)
    sc.resolved.update({
        "system": kind, "shifts": [str(s) for s in shifts], "k": sc.params["_k"],
        "delta": str(sc.params["_delta"]), "eps": str(sc.params["_eps"]), "range": [ns[0], ns[-1]] if ns else [],
    })


def _grid_set(spec: dict, N: int, d: int, seed: int, c: Ctx) -> popdiff.GridSet:
    kind = _get(spec, "kind", c, str)
    try:
        if kind == "random":
            rs = popdiff.random_set(N, float(_fraction(_get(spec, "delta", c), c)), seed, d)
            return rs.grid
        if kind == "interval":
            return popdiff.interval_set(N, _get(spec, "lo", c, int, default=0), _get(spec, "hi", c, int), d)
        if kind == "residue":
            return popdiff.residue_class_set(N, _get(spec, "q", c, int), _get(spec, "residues", c, list, default=[0]), d)
        if kind == "quadratic_residue":
            return popdiff.quadratic_residue_set(N, d)
        if kind == "full":
            return popdiff.GridSet.full(d, N)
        if kind == "empty":
            return popdiff.GridSet(d, N)
        if kind == "file":
            path = Path(_get(spec, "path", c, str))
            data = path.read_bytes()
            g = popdiff.GridSet.from_bytes(data) if data[:4] == popdiff.MAGIC else popdiff.GridSet.from_rle(data.decode())
            if (g.d, g.N) != (d, N):
                raise c.fail("file grid does not match N and d")
            return g
    except OSError as exc:
        raise c.fail(f"cannot read grid file: {exc.strerror}") from None
    except ValueError as exc:
        raise c.fail(str(exc)) from None
    raise c.sub("kind").fail(f"unknown set kind {kind!r}")


def _validate_popdiff(sc: Scenario) -> None:
    p, c = sc.params, sc.ctx.sub("params", sc.params)
    _check_keys(p, ["N", "d", "set", "eps", "radius", "shifts", "threads"], c)
    _check_keys(sc.asserts, ["min_popular_fraction", "nonempty"], sc.ctx.sub("assert", sc.asserts))
    N = _get(p, "N", c, int, check=lambda x: x >= 1)
    d = _get(p, "d", c, int, default=sc.field.degree if sc.family else 1, check=lambda x: 1 <= x <= 3)
    if N ** d > 1 << 26:
        raise c.fail("grid too large (N^d must be at most 2^26)")
    setspec = _get(p, "set", c, dict)
    sc.params["_E"] = _grid_set(setspec, N, d, sc.seed, c.sub("set", setspec))
    if sc.family:
        if sc.field.degree != d:
            raise c.sub("d").fail("grid dimension must equal the field degree")
        sc.params["_family"] = sc.family
    else:
        if d != 1:
            raise c.fail("integer shifts need d = 1; use a family over a degree-d field")
        sc.params["_family"] = [_int_poly(s, c.sub("shifts").sub(i, s)) for i, s in enumerate(_get(p, "shifts", c, list))]
    sc.params["_eps"] = _fraction(_get(p, "eps", c), c.sub("eps"))
    if sc.params["_eps"] <= 0:
        raise c.sub("eps").fail("eps must be positive")
    R = _get(p, "radius", c, int, default=math.isqrt(N), check=lambda x: x >= 1)
    sc.params["_range"] = [n for n in itertools.product(range(-R, R + 1), repeat=d) if any(n)]
    sc.params["_threads"] = _get(p, "threads", c, int, default=None)
    sc.resolved.update({"N": N, "d": d, "set": {k: str(v) for k, v in setspec.items()},
                        "eps": str(sc.params["_eps"]), "radius": R,
                        "shifts": [str(s) for s in sc.params["_family"]] if not sc.family else None})


def _function(spec, c: Ctx) -> dynsim.StepFunction:
    if not isinstance(spec, dict) or len(spec) != 1:
        raise c.fail("function must be one of {indicator: [...]}, {constant: c}, {character: k}")
    (kind, v), = spec.items()
    if kind == "indicator":
        try:
            return dynsim.StepFunction.indicator((_fraction(a, c), _fraction(b, c)) for a, b in v)
        except (ValueError, TypeError) as exc:
            raise c.fail(str(exc)) from None
    if kind == "constant":
        return dynsim.StepFunction.constant(_fraction(v, c))
    if kind == "character":
        if not isinstance(v, int):
            raise c.fail("character frequency must be an integer")
        return dynsim.StepFunction.character(v)
    raise c.fail(f"unknown function kind {kind!r}")


def _validate_limit(sc: Scenario) -> None:
    p, c = sc.params, sc.ctx.sub("params", sc.params)
    _check_keys(p, ["alpha", "r", "s", "p", "functions", "ladder"], c)
    _check_keys(sc.asserts, ["max_gap", "decreasing"], sc.ctx.sub("assert", sc.asserts))
    alpha = _symbolic(_get(p, "alpha", c), c.sub("alpha"))
    sc.params["_system"] = dynsim.IntervalRotationSystem(alpha, [])
    sc.params["_r"] = _get(p, "r", c, int)
    sc.params["_s"] = _get(p, "s", c, int)
    sc.params["_p"] = _int_poly(_get(p, "p", c, list), c.sub("p"))
    fns = _get(p, "functions", c, list)
    if len(fns) != 3:
        raise c.sub("functions").fail("need exactly three functions f0, f1, f2")
    sc.params["_fs"] = [_function(f, c.sub("functions").sub(i, f)) for i, f in enumerate(fns)]
    sc.params["_ladder"] = [int(n) for n in _get(p, "ladder", c, list, default=list(dynsim.DEFAULT_LIMIT_LADDER))]
    sc.resolved.update({"alpha": alpha.to_dict(), "r": sc.params["_r"], "s": sc.params["_s"],
                        "p": str(sc.params["_p"]), "functions": [json.loads(json.dumps(f, default=str)) for f in fns],
                        "ladder": sc.params["_ladder"]})


VALIDATORS = {
    "certify": _validate_certify,
    "orbit": _validate_orbit,
    "khintchine": _validate_khintchine,
    "popdiff": _validate_popdiff,
    "limit-check": _validate_limit,
}


# --- execution -------------------------------------------------------------------------

@dataclass
class Outcome:
    name: str
    task: str
    passed: bool
    summary: str
    report: dict
    csv: Optional[str] = None
    assertions: List[dict] = field(default_factory=list)


def _assertion(name: str, expected, actual, ok: bool) -> dict:
    return {"name": name, "expected": expected, "actual": actual, "status": "pass" if ok else "fail"}


def _run_certify(sc: Scenario, threads: int) -> Outcome:
    fam, K = sc.family, sc.field
    ok_valued = all(intpoly.is_ok_valued(p, K) for p in fam)
    independent = intpoly.is_independent_family(fam, K)
    rep = intpoly.certify_family(fam, sc.params["_moduli"], K)
    shifts = []
    for m in rep.moduli:
        xi = rep.witnesses[str(m)]
        if xi is not None:
            sh = intpoly.intersective_shift(fam, m, xi, K, samples=sc.params["_samples"], seed=sc.seed)
            shifts.append({"modulus": [str(x) for x in m.coords], "xi": [str(x) for x in xi.coords],
                           "D": [str(x) for x in sh.D.coords], "samples_checked": sh.samples_checked})
    report = {"verdict": rep.verdict, "certification": rep.to_dict(), "ok_valued": ok_valued,
              "independent": independent, "shifts": shifts}
    checks = []
    a = sc.asserts
    if "intersective" in a:
        checks.append(_assertion("intersective", a["intersective"], rep.certified, rep.certified == bool(a["intersective"])))
    if "independent" in a:
        checks.append(_assertion("independent", a["independent"], independent, independent == bool(a["independent"])))
    if "ok_valued" in a:
        checks.append(_assertion("ok_valued", a["ok_valued"], ok_valued, ok_valued == bool(a["ok_valued"])))
    return Outcome(sc.name, sc.task, all(ch["status"] == "pass" for ch in checks), rep.verdict, report, None, checks)


def _run_orbit(sc: Scenario, threads: int) -> Outcome:
    u: torus.PolynomialTorusSequence = sc.params["_u"]
    closure = torus.orbit_closure(u)
    nthreads = sc.params["_threads"] or threads
    eq = torus.equidistribution_report(u, closure, sc.params["_ladder"], sc.params["_c_max"],
                                       chars=sc.params["_chars"], threads=nthreads)
    rng = random.Random(sc.seed)
    worst = 0.0
    for _ in range(sc.params["_samples"]):
        n = tuple(rng.randint(-10 ** 4, 10 ** 4) for _ in range(u.nvars))
        worst = max(worst, closure.distance(u.evaluate_float(n)))
    report = eq.to_dict()
    report["closure_max_distance"] = worst
    summary = (f"closure dim {closure.dim} of {u.m}, {len(closure.cosets)} coset(s) mod {list(closure.modulus)}; "
               f"{sum(r.status for r in eq.results)}/{len(eq.results)} characters pass")
    checks = []
    a = sc.asserts
    if "closure_dim" in a:
        checks.append(_assertion("closure_dim", a["closure_dim"], closure.dim, closure.dim == a["closure_dim"]))
    if "cosets" in a:
        checks.append(_assertion("cosets", a["cosets"], len(closure.cosets), len(closure.cosets) == a["cosets"]))
    if "equidistributed" in a:
        ok = eq.passed and worst < 1e-9
        checks.append(_assertion("equidistributed", a["equidistributed"], ok, ok == bool(a["equidistributed"])))
    return Outcome(sc.name, sc.task, all(ch["status"] == "pass" for ch in checks), summary, report, eq.to_csv(), checks)


def _run_khintchine(sc: Scenario, threads: int) -> Outcome:
    checks = []
    a = sc.asserts
    if sc.family:
        try:
            dynsim.require_jointly_intersective(sc.family, sc.params["_moduli"], sc.field)
        except dynsim.FamilyRefused as exc:
            report = {"refused": True, "reason": str(exc)}
            if "refused" in a:
                checks.append(_assertion("refused", a["refused"], True, bool(a["refused"])))
            passed = bool(checks) and all(ch["status"] == "pass" for ch in checks)
            return Outcome(sc.name, sc.task, passed, f"family refused: {exc}", report, None, checks)
    system = sc.params["_system"]
    series = dynsim.multicorrelation(system, sc.params["_shifts"], sc.params["_range"], A=sc.params.get("_set"),
                                     quadrature_points=sc.params["_qpoints"])
    rep = dynsim.khintchine_report(series, sc.params["_delta"], sc.params["_k"], sc.params["_eps"])
    summary_json = rep.summary()
    summary_json["refused"] = False
    if series.errors:
        summary_json["max_quadrature_error"] = max(series.errors)
    summary = (f"threshold {rep.threshold} ({float(rep.threshold)}): {rep.popular_count}/{len(rep.scanned)} popular, "
               f"max gap {rep.max_gap}")
    if "nonempty" in a:
        ok = (rep.popular_count > 0) == bool(a["nonempty"])
        checks.append(_assertion("nonempty", a["nonempty"], rep.popular_count > 0, ok))
    if "max_gap" in a:
        checks.append(_assertion("max_gap", a["max_gap"], rep.max_gap, rep.max_gap == a["max_gap"]))
    if "syndetic_at_scale" in a:
        checks.append(_assertion("syndetic_at_scale", a["syndetic_at_scale"], rep.syndetic_at_scale,
                                 rep.syndetic_at_scale == bool(a["syndetic_at_scale"])))
    if "min_popular_count" in a:
        checks.append(_assertion("min_popular_count", a["min_popular_count"], rep.popular_count,
                                 rep.popular_count >= a["min_popular_count"]))
    if "refused" in a:
        checks.append(_assertion("refused", a["refused"], False, not a["refused"]))
    return Outcome(sc.name, sc.task, all(ch["status"] == "pass" for ch in checks), summary, summary_json,
                   series.to_csv(), checks)


def _run_popdiff(sc: Scenario, threads: int) -> Outcome:
    E = sc.params["_E"]
    nthreads = sc.params["_threads"] or threads
    rep = popdiff.popular_differences(E, sc.params["_family"], sc.params["_eps"], sc.params["_range"], threads=nthreads)
    summary = (f"density {E.density}, threshold {float(rep.threshold):.6g}: "
               f"{len(rep.popular)}/{len(rep.counts)} popular ({rep.popular_fraction:.4f})")
    checks = []
    a = sc.asserts
    if "min_popular_fraction" in a:
        bound = float(a["min_popular_fraction"])
        checks.append(_assertion("min_popular_fraction", bound, rep.popular_fraction, rep.popular_fraction >= bound))
    if "nonempty" in a:
        checks.append(_assertion("nonempty", a["nonempty"], bool(rep.popular), bool(rep.popular) == bool(a["nonempty"])))
    report = rep.summary()
    report["set_popcount"] = E.popcount
    return Outcome(sc.name, sc.task, all(ch["status"] == "pass" for ch in checks), summary, report, rep.to_csv(), checks)


def _run_limit(sc: Scenario, threads: int) -> Outcome:
    lc = dynsim.kronecker_limit_check(sc.params["_system"], sc.params["_r"], sc.params["_s"], sc.params["_p"],
                                      sc.params["_fs"], sc.params["_ladder"])
    summary = f"rhs {lc.rhs.real:.12g}; gaps " + ", ".join(f"N={N}: {g:.3g}" for N, g in zip(lc.ladder, lc.gaps))
    checks = []
    a = sc.asserts
    if "max_gap" in a:
        bound = float(a["max_gap"])
        checks.append(_assertion("max_gap", bound, lc.gaps[-1], lc.gaps[-1] <= bound))
    if "decreasing" in a:
        checks.append(_assertion("decreasing", a["decreasing"], lc.decreasing, lc.decreasing == bool(a["decreasing"])))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "gap"])
    for N, z, g in zip(lc.ladder, lc.lhs, lc.gaps):
        w.writerow([N, repr(z.real), repr(z.imag), repr(lc.rhs.real), repr(lc.rhs.imag), repr(g)])
    return Outcome(sc.name, sc.task, all(ch["status"] == "pass" for ch in checks), summary, lc.to_dict(),
                   buf.getvalue(), checks)


RUNNERS = {
    "certify": _run_certify,
    "orbit": _run_orbit,
    "khintchine": _run_khintchine,
    "popdiff": _run_popdiff,
    "limit-check": _run_limit,
}


def execute(sc: Scenario, threads: int = 1) -> Outcome:
    try:
        out = RUNNERS[sc.task](sc, threads)
    except RingDynError as exc:
        raise TaskError(f"{sc.ctx.path} (line {sc.ctx.line}): {type(exc).__name__}: {exc}") from exc
    out.report = {"scenario": sc.resolved, "result": out.report, "assertions": out.assertions,
                  "passed": out.passed, "summary": out.summary}
    return out


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=str) + "\n"


def write_outputs(sc: Scenario, out: Outcome, out_dir: Path) -> List[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    names = {"json": f"{sc.name}.json", "csv": f"{sc.name}.csv", "summary": f"{sc.name}.summary.txt"}
    names.update({k: str(v) for k, v in sc.outputs.items()})
    path = out_dir / names["json"]
    path.write_text(dumps(out.report))
    written.append(path)
    if out.csv is not None:
        path = out_dir / names["csv"]
        path.write_text(out.csv)
        written.append(path)
    lines = [f"{sc.name} [{sc.task}]: {'PASS' if out.passed else 'FAIL'}", out.summary]
    for ch in out.assertions:
        lines.append(f"  assert {ch['name']}: expected {ch['expected']}, got {ch['actual']} -> {ch['status']}")
    path = out_dir / names["summary"]
    path.write_text("\n".join(lines) + "\n")
    written.append(path)
    return written


def load_scenarios(path: str, registry: PresetRegistry, seed: int) -> List[Scenario]:
    raws = parse_file(path)
    scenarios = [resolve(raw, i, registry, seed, str(path)) for i, raw in enumerate(raws)]
    seen = set()
    for sc in scenarios:
        if sc.name in seen:
            raise sc.ctx.fail(f"duplicate scenario name {sc.name!r}")
        seen.add(sc.name)
    return scenarios
