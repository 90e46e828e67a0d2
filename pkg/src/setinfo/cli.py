"""Command-line front end.

Exit codes: 0 on success, 1 when a computation fails (including a verify run
with failures or an infinite value under --require-finite), 2 on usage or
parse errors.
"""

from __future__ import annotations

import functools
import sys

import click
import numpy as np

from . import convexsets, serialize
from . import verify as verify_mod
from .decision import FORMS, TABLE, Hypothesis, bayes_risk, bridge_set, constrained_bayes_risk, constrained_bridge_class, make_loss
from .errors import SchemaError, SetInfoError
from .experiments import RefMeasure, uniform_ref
from .information import d_entropy, d_information, f_information, f_mutual_information, mi_experiment
from .phicatalog import BUILTIN_NAMES, builtin, d_phi_set

INF = float("inf")


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except SchemaError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except SetInfoError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _csv_rows(doc, prefix=()):
    if isinstance(doc, dict):
        for key, val in doc.items():
            yield from _csv_rows(val, prefix + (str(key),))
    elif isinstance(doc, (list, tuple)):
        for i, val in enumerate(doc):
            yield from _csv_rows(val, prefix + (str(i),))
    else:
        yield ",".join(prefix + (str(doc),))


def _emit(doc: dict, out: str | None, fmt: str) -> None:
    if fmt == "csv":
        text = "\n".join(_csv_rows(doc)) + "\n"
    else:
        text = serialize.dumps(doc)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _parse_vector(token: str, what: str) -> np.ndarray:
    if token.startswith("@"):
        doc = serialize.load_json(token[1:])
        if isinstance(doc, dict):
            doc = doc.get("weights", doc.get("values"))
        return serialize.parse_array(doc, what)
    try:
        return np.array([float(x) for x in token.split(",") if x.strip() != ""])
    except ValueError:
        raise SchemaError(f"{what}: expected comma-separated numbers or @file, got {token!r}") from None


def _load_set(path: str):
    doc = serialize.load_json(path)
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: expected an object describing a set or a generator")
    if "rep" in doc:
        return serialize.spec_from_dict(doc)
    if "kind" in doc:
        return d_phi_set(serialize.generator_from_dict(doc))
    raise SchemaError(f"{path}: neither a set spec (rep) nor a generator recipe (kind)")


def _resolve_ref(token: str | None, e):
    if token in (None, "average"):
        return None
    if token == "uniform":
        return uniform_ref(e)
    return RefMeasure(_parse_vector(f"@{token}" if not token.startswith("@") else token, "reference"))


_format_option = click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
                              help="Output encoding.")
_out_option = click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None,
                           help="Write to a file instead of stdout.")


@click.group()
def main():
    """Convex-set information measures, Bayes risks, and their bridges."""


@main.command()
@click.argument("experiment_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("set_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--ref", default=None, help="Reference measure: average (default), uniform, or a file.")
@click.option("--witness", is_flag=True, help="Include the witness table in the result.")
@click.option("--require-finite", is_flag=True, help="Fail (exit 1) when the value is infinite.")
@_out_option
@_format_option
@_guarded
def compute(experiment_file, set_file, ref, witness, require_finite, out, fmt):
    """Information of an experiment with respect to a set (or a phi recipe)."""
    e = serialize.experiment_from_dict(serialize.load_json(experiment_file))
    spec = _load_set(set_file)
    res = d_information(spec, e, _resolve_ref(ref, e))
    if require_finite and res.value == INF:
        raise SetInfoError("value is infinite")
    doc = serialize.info_result_to_dict(res)
    if not witness:
        doc["witness"] = None
    _emit(doc, out, fmt)


@main.command()
@click.argument("experiment_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--loss", "loss_form", type=click.Choice([f for f in FORMS if f != TABLE]),
              default="zero_one", help="Loss family (default grid).")
@click.option("--prior", default=None, help="Prior over labels: comma list or @file (default uniform).")
@click.option("--hypotheses", "hyp_file", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON list of hypotheses for the constrained bridge.")
@_out_option
@_format_option
@_guarded
def bridge(experiment_file, loss_form, prior, hyp_file, out, fmt):
    """Bayes risk and the matching bridge-set information, with their gap."""
    e = serialize.experiment_from_dict(serialize.load_json(experiment_file))
    loss = make_loss(loss_form, e.n)
    pi = _parse_vector(prior, "prior") if prior else np.full(e.n, 1.0 / e.n)
    brisk = bayes_risk(loss, pi, e)
    info = d_information(bridge_set(loss, pi), e).value
    doc = {
        "loss": loss_form,
        "prior": serialize.encode_array(pi),
        "bayes_risk": serialize.fmt_float(brisk),
        "bridge_information": serialize.fmt_float(info),
        "gap": serialize.fmt_float(abs(brisk + info)),
    }
    if hyp_file is not None:
        hdocs = serialize.load_json(hyp_file)
        if not isinstance(hdocs, list):
            raise SchemaError(f"{hyp_file}: expected a JSON list of hypotheses")
        hyps = [serialize.hypothesis_from_dict(h, loss) for h in hdocs]
        cb = constrained_bayes_risk(loss, hyps, pi, e)
        ci = f_information(constrained_bridge_class(loss, hyps, pi), e).value
        doc["constrained_bayes_risk"] = serialize.fmt_float(cb)
        doc["constrained_bridge_information"] = serialize.fmt_float(ci)
        doc["constrained_gap"] = serialize.fmt_float(abs(cb + ci))
    _emit(doc, out, fmt)


@main.command()
@click.argument("mu")
@click.argument("nu")
@click.option("--phi", "phi_name", type=click.Choice(list(BUILTIN_NAMES)), default="kl",
              help="Builtin generator for the entropy set.")
@click.option("--set", "set_file", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Explicit set spec instead of --phi.")
@_out_option
@_format_option
@_guarded
def entropy(mu, nu, phi_name, set_file, out, fmt):
    """Set-entropy of MU relative to NU (comma lists or @file)."""
    mu_v = _parse_vector(mu, "mu")
    nu_v = _parse_vector(nu, "nu")
    spec = _load_set(set_file) if set_file else d_phi_set(builtin(phi_name))
    value = d_entropy(spec, mu_v, nu_v)
    _emit({"value": serialize.fmt_float(value)}, out, fmt)


@main.command()
@click.argument("joint_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--phi", "phi_name", type=click.Choice(list(BUILTIN_NAMES)), default="kl",
              help="Builtin generator (set route).")
@click.option("--fclass", "fclass_file", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Finite function class instead of --phi.")
@_out_option
@_format_option
@_guarded
def mi(joint_file, phi_name, fclass_file, out, fmt):
    """Mutual information of a joint distribution (JSON matrix)."""
    doc = serialize.load_json(joint_file)
    if isinstance(doc, dict):
        doc = doc.get("joint", doc.get("rows"))
    joint = serialize.parse_array(doc, "joint distribution")
    if fclass_file is not None:
        fclass = serialize.fclass_from_dict(serialize.load_json(fclass_file))
        res = f_mutual_information(fclass, joint)
    else:
        res = d_information(d_phi_set(builtin(phi_name)), mi_experiment(joint))
    result = serialize.info_result_to_dict(res)
    result["witness"] = None
    _emit(result, out, fmt)


@main.command()
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False), default=None,
              help="TrialConfig JSON; flags below override nothing when this is given.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--trials", type=int, default=100, show_default=True)
@click.option("--suites", default=None, help="Comma-separated suite names (default: all).")
@click.option("--tol", type=float, default=None, help="Override every suite tolerance.")
@_out_option
@_guarded
def verify(config_file, seed, trials, suites, tol, out):
    """Run the randomized identity suites; exit 0 only if everything passes."""
    if config_file is not None:
        cfg = verify_mod.config_from_dict(serialize.load_json(config_file))
    else:
        kwargs = {"seed": seed, "trials": trials}
        if suites:
            wanted = tuple(s.strip() for s in suites.split(",") if s.strip())
            bad = [s for s in wanted if s not in verify_mod.SUITE_NAMES]
            if bad:
                raise click.UsageError(
                    f"unknown suite {bad[0]!r}; choose from "
                    + ", ".join(verify_mod.SUITE_NAMES))
            kwargs["suites"] = wanted
        if tol is not None:
            kwargs["tol"] = tol
        cfg = verify_mod.TrialConfig(**kwargs)
    reports = verify_mod.run_all(cfg)
    doc = verify_mod.full_report(cfg, reports)
    _emit(doc, out, "json")
    for rep in reports:
        click.echo(f"{rep.suite}: {rep.passed} passed, {rep.failed} failed, "
                   f"worst gap {serialize.fmt_float(rep.worst_gap)}", err=True)
    if not doc["all_passed"]:
        sys.exit(1)


@main.command()
@click.argument("phi_name", type=click.Choice(list(BUILTIN_NAMES)))
@click.option("--window", default="-10,10,-10,10", show_default=True,
              help="x0,x1,y0,y1 rectangle.")
@click.option("--grid", default=241, show_default=True, type=click.IntRange(2))
@_out_option
@_guarded
def regions(phi_name, window, grid, out):
    """CSV boundary samples (x,y,set) of D_phi and its polar in a window."""
    w = _parse_vector(window, "window")
    if w.size != 4:
        raise SchemaError(f"window needs four numbers, got {w.size}")
    spec = d_phi_set(builtin(phi_name))
    pts = convexsets.region_boundary(spec, grid=grid, window=tuple(w))
    lines = ["x,y,set"]
    for name in ("D", "Dpolar"):
        for x, y in pts[name]:
            lines.append(f"{serialize.fmt_float(x)},{serialize.fmt_float(y)},{name}")
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


@main.command()
@click.argument("phi_name", type=click.Choice(list(BUILTIN_NAMES)), required=False)
@_out_option
@_format_option
@_guarded
def catalog(phi_name, out, fmt):
    """Builtin generators with their boundary constants and sample values."""
    names = [phi_name] if phi_name else list(BUILTIN_NAMES)
    probes = (0.5, 1.0, 2.0)
    entries = []
    for name in names:
        gen = builtin(name)
        entries.append({
            "name": name,
            "phi_at_zero": serialize.fmt_float(gen.phi_at_zero),
            "phi_slope_inf": serialize.fmt_float(gen.phi_slope_inf),
            "value": {serialize.fmt_float(t): serialize.fmt_float(gen.value(t)) for t in probes},
            "conjugate": {serialize.fmt_float(t): serialize.fmt_float(gen.conjugate(t)) for t in probes},
        })
    _emit({"generators": entries}, out, fmt)


if __name__ == "__main__":
    main()
