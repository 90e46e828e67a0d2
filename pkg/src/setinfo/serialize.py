"""JSON encoding for every exchanged object.

All floats are written as decimal strings with 17 significant digits so a
round trip through a file is lossless; infinities are the strings "inf" and
"-inf". Parsers accept plain JSON numbers as well.
"""

from __future__ import annotations

import json
import math

import numpy as np

from . import phicatalog
from .convexsets import (
    ConvexSpec,
    DVarN,
    HadamardScale,
    HPolyhedron,
    LinearPullback,
    PhiHypograph,
    Translate,
    VPolyhedron,
)
from .decision import Hypothesis, LossSpec
from .errors import SchemaError
from .experiments import Experiment, Kernel, RefMeasure
from .information import FunctionClass, InfoResult
from .phicatalog import PhiGenerator

INF = float("inf")


def fmt_float(x) -> str:
    x = float(x)
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def parse_float(v) -> float:
    if isinstance(v, bool):
        raise SchemaError(f"expected a number, got {v!r}")
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, str):
        s = v.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return INF
        if s in ("-inf", "-infinity"):
            return -INF
        if s == "nan":
            return float("nan")
        try:
            return float(s)
        except ValueError:
            raise SchemaError(f"not a number: {v!r}") from None
    raise SchemaError(f"expected a number, got {type(v).__name__}")


def encode_array(a):
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        return fmt_float(a)
    if a.ndim == 1:
        return [fmt_float(x) for x in a]
    return [encode_array(row) for row in a]


def parse_array(v, what: str = "array") -> np.ndarray:
    def rec(u):
        if isinstance(u, list):
            return [rec(x) for x in u]
        return parse_float(u)

    try:
        return np.asarray(rec(v), dtype=float)
    except SchemaError:
        raise
    except Exception as exc:
        raise SchemaError(f"malformed {what}: {exc}") from None


def _need(d: dict, key: str, what: str):
    if not isinstance(d, dict) or key not in d:
        raise SchemaError(f"{what} is missing field {key!r}")
    return d[key]


# --- phi generators ----------------------------------------------------------


def generator_to_dict(gen: PhiGenerator) -> dict:
    if gen.recipe is None:
        raise SchemaError(f"generator {gen.name!r} carries no serializable recipe")
    return _encode_recipe(gen.recipe)


def _encode_recipe(recipe: dict) -> dict:
    kind = recipe["kind"]
    if kind == "builtin":
        return {"kind": "builtin", "name": recipe["name"]}
    if kind == "channel":
        return {
            "kind": "channel",
            "base": _encode_recipe(recipe["base"]),
            "r1": fmt_float(recipe["r1"]),
            "r2": fmt_float(recipe["r2"]),
        }
    if kind == "offset":
        return {"kind": "offset", "base": _encode_recipe(recipe["base"]), "c": fmt_float(recipe["c"])}
    if kind == "csiszar":
        return {"kind": "csiszar", "base": _encode_recipe(recipe["base"])}
    raise SchemaError(f"unknown generator recipe kind {kind!r}")


def generator_from_dict(d: dict) -> PhiGenerator:
    kind = _need(d, "kind", "generator")
    if kind == "builtin":
        name = _need(d, "name", "builtin generator")
        if name not in phicatalog.BUILTIN_NAMES:
            raise SchemaError(f"unknown builtin generator {name!r}")
        return phicatalog.builtin(name)
    if kind == "channel":
        base = generator_from_dict(_need(d, "base", "channel generator"))
        return phicatalog.channel_transform(
            base, parse_float(_need(d, "r1", "channel generator")),
            parse_float(_need(d, "r2", "channel generator")),
        )
    if kind == "offset":
        base = generator_from_dict(_need(d, "base", "offset generator"))
        return phicatalog.affine_offset(base, parse_float(_need(d, "c", "offset generator")))
    if kind == "csiszar":
        return phicatalog.csiszar_conjugate(generator_from_dict(_need(d, "base", "csiszar generator")))
    raise SchemaError(f"unknown generator kind {kind!r}")


# --- convex sets ---------------------------------------------------------------


def spec_to_dict(spec: ConvexSpec) -> dict:
    rep = spec.rep
    if isinstance(rep, PhiHypograph):
        rep_d = {"kind": "phi", "generator": generator_to_dict(rep.generator)}
    elif isinstance(rep, VPolyhedron):
        rep_d = {
            "kind": "vpoly",
            "vertices": encode_array(rep.vertices),
            "rays": encode_array(rep.rays) if rep.rays.shape[0] else [],
        }
    elif isinstance(rep, HPolyhedron):
        rep_d = {
            "kind": "hpoly",
            "normals": encode_array(rep.normals),
            "offsets": encode_array(rep.offsets),
        }
    elif isinstance(rep, DVarN):
        rep_d = {"kind": "dvar", "n": rep.n}
    else:
        raise SchemaError(f"unknown representation {type(rep).__name__}")
    transforms = []
    for t in spec.transforms:
        if isinstance(t, LinearPullback):
            transforms.append({"kind": "pullback", "matrix": encode_array(t.matrix)})
        elif isinstance(t, Translate):
            transforms.append({"kind": "translate", "p": encode_array(t.p)})
        else:
            transforms.append({"kind": "hadamard", "v": encode_array(t.v)})
    return {"dim": spec.dim, "rep": rep_d, "transforms": transforms}


def spec_from_dict(d: dict) -> ConvexSpec:
    dim = _need(d, "dim", "set spec")
    if not isinstance(dim, int) or dim < 1:
        raise SchemaError(f"set dim must be a positive integer, got {dim!r}")
    rep_d = _need(d, "rep", "set spec")
    kind = _need(rep_d, "kind", "set rep")
    if kind == "phi":
        rep = PhiHypograph(generator_from_dict(_need(rep_d, "generator", "phi rep")))
    elif kind == "vpoly":
        vertices = parse_array(_need(rep_d, "vertices", "vpoly rep"), "vertices")
        rays_raw = rep_d.get("rays", [])
        rays = parse_array(rays_raw, "rays") if rays_raw else np.zeros((0, 0))
        rep = VPolyhedron(vertices, rays)
    elif kind == "hpoly":
        rep = HPolyhedron(
            parse_array(_need(rep_d, "normals", "hpoly rep"), "normals"),
            parse_array(_need(rep_d, "offsets", "hpoly rep"), "offsets"),
        )
    elif kind == "dvar":
        n = _need(rep_d, "n", "dvar rep")
        if not isinstance(n, int):
            raise SchemaError(f"dvar n must be an integer, got {n!r}")
        rep = DVarN(n)
    else:
        raise SchemaError(f"unknown set rep kind {kind!r}")
    transforms = []
    for td in d.get("transforms", []):
        tkind = _need(td, "kind", "transform")
        if tkind == "pullback":
            transforms.append(LinearPullback(parse_array(_need(td, "matrix", "pullback"), "matrix")))
        elif tkind == "translate":
            transforms.append(Translate(parse_array(_need(td, "p", "translate"), "p")))
        elif tkind == "hadamard":
            transforms.append(HadamardScale(parse_array(_need(td, "v", "hadamard"), "v")))
        else:
            raise SchemaError(f"unknown transform kind {tkind!r}")
    try:
        return ConvexSpec(dim=dim, rep=rep, transforms=tuple(transforms))
    except Exception as exc:
        raise SchemaError(f"inconsistent set spec: {exc}") from None


# --- experiments and kernels ----------------------------------------------------


def experiment_to_dict(e: Experiment) -> dict:
    return {"n": e.n, "m": e.m, "rows": encode_array(e.rows)}


def experiment_from_dict(d: dict) -> Experiment:
    rows = parse_array(_need(d, "rows", "experiment"), "experiment rows")
    e = _wrap_schema(lambda: Experiment(rows), "experiment")
    for key in ("n", "m"):
        if key in d and d[key] != getattr(e, key):
            raise SchemaError(f"experiment says {key}={d[key]} but rows give {getattr(e, key)}")
    return e


def kernel_to_dict(k: Kernel) -> dict:
    return {"rows_in": k.rows_in, "cols_out": k.cols_out, "matrix": encode_array(k.matrix)}


def kernel_from_dict(d: dict) -> Kernel:
    return _wrap_schema(lambda: Kernel(parse_array(_need(d, "matrix", "kernel"), "kernel matrix")), "kernel")


def ref_to_dict(ref: RefMeasure) -> dict:
    return {"weights": encode_array(ref.weights)}


def ref_from_dict(d: dict) -> RefMeasure:
    return _wrap_schema(lambda: RefMeasure(parse_array(_need(d, "weights", "reference"), "weights")), "reference")


def _wrap_schema(build, what: str):
    try:
        return build()
    except SchemaError:
        raise
    except Exception as exc:
        raise SchemaError(f"invalid {what}: {exc}") from None


# --- results, losses, classes -----------------------------------------------------


def info_result_to_dict(res: InfoResult) -> dict:
    return {
        "value": fmt_float(res.value),
        "witness": None if res.witness is None else encode_array(res.witness),
        "per_outcome": encode_array(res.per_outcome),
    }


def loss_to_dict(loss: LossSpec) -> dict:
    out = {"form": loss.form, "n": loss.n, "grid": encode_array(loss.grid)}
    if loss.table is not None:
        out["table"] = encode_array(loss.table)
    return out


def loss_from_dict(d: dict) -> LossSpec:
    form = _need(d, "form", "loss")
    n = _need(d, "n", "loss")
    grid = parse_array(_need(d, "grid", "loss"), "loss grid")
    table = parse_array(d["table"], "loss table") if d.get("table") is not None else None
    return _wrap_schema(
        lambda: LossSpec(form=form, n=n, grid=grid, table=table,
                         allow_negative=bool(d.get("allow_negative", table is not None))),
        "loss",
    )


def hypothesis_from_dict(d: dict, loss: LossSpec | None = None) -> Hypothesis:
    if "predictions" in d:
        return _wrap_schema(lambda: Hypothesis(parse_array(d["predictions"], "predictions")), "hypothesis")
    if "indices" in d:
        if loss is None:
            raise SchemaError("index-form hypothesis needs a loss grid to resolve against")
        idx = d["indices"]
        if not all(isinstance(i, int) and 0 <= i < len(loss.grid) for i in idx):
            raise SchemaError("hypothesis indices out of range for the loss grid")
        return Hypothesis(loss.grid[np.asarray(idx, dtype=int)])
    raise SchemaError("hypothesis needs either predictions or indices")


def hypothesis_to_dict(h: Hypothesis) -> dict:
    return {"predictions": encode_array(h.predictions)}


def fclass_to_dict(fclass: FunctionClass) -> dict:
    return {"n": fclass.n, "m": fclass.m, "members": [encode_array(f) for f in fclass.members]}


def fclass_from_dict(d: dict) -> FunctionClass:
    members = _need(d, "members", "function class")
    if not isinstance(members, list) or not members:
        raise SchemaError("function class needs a nonempty member list")
    return _wrap_schema(
        lambda: FunctionClass(tuple(parse_array(f, "member") for f in members)),
        "function class",
    )


# --- files -------------------------------------------------------------------------


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def dump_json(obj, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from None
    except OSError as exc:
        raise SchemaError(f"{path}: {exc.strerror or exc}") from None
