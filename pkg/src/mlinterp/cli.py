"""Command-line batch interface.

Every command writes one JSON report (sorted keys, 17 significant digits)
to ``--out`` or stdout.  Exit status: 0 success, 1 a verification predicate
in the report is false, 2 input error (a JSON error object is printed).
"""
from __future__ import annotations

import math
import sys
from pathlib import Path

import click

from . import apps, constants, exponents, interp, lorentz
from .errors import CombinationMismatch
from .spaces import indicator
from .io import (
    dumps,
    load_claims,
    load_function,
    load_json,
    load_kernel,
    load_space,
    parse_number,
    parse_vector,
    region_csv,
)

DEFAULT_WOLFF_PS = "4/3,3/2,2,3,4"
SEED_SWEEP_POINTS = 21


class Failed(Exception):
    """Raised after the report is written when a verification predicate fails."""


def _emit(ctx: click.Context, report: dict):
    text = dumps(report)
    out = ctx.obj["out"]
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _tuple(text: str) -> exponents.ExponentTuple:
    return exponents.validate_tuple(parse_vector(text))


def _spaces(paths) -> dict:
    out = {}
    for p in paths:
        obj = load_json(p)
        for s in obj if isinstance(obj, list) else [obj]:
            sp = load_space(s)
            out[sp.id] = sp
    return out


def _kernel(path, space_paths):
    return load_kernel(load_json(path), _spaces(space_paths))


class Group(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except Failed:
            ctx.exit(1)
        except (ValueError, OSError, KeyError, TypeError) as exc:
            err = {"error": {"type": type(exc).__name__, "message": str(exc)}}
            click.echo(dumps(err), nl=False)
            ctx.exit(2)


@click.group(cls=Group)
@click.option("--threads", type=click.IntRange(1, 256), default=1, show_default=True,
              help="Worker cap; reports do not depend on it.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the JSON report here instead of stdout.")
@click.pass_context
def main(ctx, threads, out):
    """Interpolation workbench for multilinear forms on finite measure spaces."""
    ctx.ensure_object(dict)
    ctx.obj.update(threads=threads, out=out)


@main.command()
@click.argument("function_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--p", "ps", default="1,2,inf", show_default=True,
              help="Comma-separated exponents.")
@click.pass_context
def norm(ctx, function_file, ps):
    """Lorentz functionals of a function file."""
    f = load_function(load_json(function_file))
    rows = []
    for p in parse_vector(ps):
        row = {"p": p, "dual_exponent": lorentz.dual_exponent(p),
               "lp": lorentz.lp_norm(f, p), "weak": lorentz.weak_norm(f, p)}
        row["lorentz1_rearrangement"] = (
            lorentz.lorentz1_rearrangement(f, p) if 1 <= p < math.inf else None)
        row["lorentz1_dual"] = lorentz.lorentz1_dual(f, p) if 1 < p < math.inf else None
        rows.append(row)
    _emit(ctx, {"norms": rows})


@main.group(name="tuple", cls=Group)
def tuple_group():
    """Exponent tuples."""


@tuple_group.command()
@click.option("--alpha", required=True, help="Entries, e.g. 1/2,1/2,0")
@click.pass_context
def classify(ctx, alpha):
    t = _tuple(alpha)
    report = {"alpha": list(t.entries)}
    report.update(exponents.classify(t).to_json())
    _emit(ctx, report)


@main.group(cls=Group)
def region():
    """Strong-type exponent regions."""


@region.command()
@click.argument("claims_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--resolution", type=click.IntRange(2, 200), default=12, show_default=True)
@click.option("--delta", type=float, default=exponents.DEFAULT_DELTA, show_default=True)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None,
              help="Also write the lattice samples with an inside flag.")
@click.pass_context
def deduce(ctx, claims_file, resolution, delta, csv_path):
    claims = [t for t, _ in load_claims(load_json(claims_file))]
    reg = exponents.deduce_strong_region(claims, resolution, delta)
    if csv_path:
        Path(csv_path).write_text(region_csv(reg.csv_rows()))
    _emit(ctx, reg.to_json())


@main.group(cls=Group)
def const():
    """Restricted weak-type and strong-type constants."""


@const.command()
@click.argument("kernel_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--alpha", required=True)
@click.option("--mode", type=click.Choice(["exhaustive", "search"]), default="exhaustive",
              show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--iters", type=click.IntRange(0), default=200, show_default=True)
@click.option("--restarts", type=click.IntRange(1), default=32, show_default=True)
@click.option("--space", "space_files", multiple=True, type=click.Path(exists=True))
@click.pass_context
def rwt(ctx, kernel_file, alpha, mode, seed, iters, restarts, space_files):
    k = _kernel(kernel_file, space_files)
    m = constants.Exhaustive() if mode == "exhaustive" else constants.RandomSearch(seed, iters, restarts)
    claim = constants.restricted_weak_constant(k, _tuple(alpha), m, threads=ctx.obj["threads"])
    _emit(ctx, claim.to_json())


@const.command()
@click.argument("kernel_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--alpha", required=True)
@click.option("--max-iter", type=click.IntRange(1), default=500, show_default=True)
@click.option("--tol", type=float, default=1e-12, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--restarts", type=click.IntRange(1), default=4, show_default=True)
@click.option("--from-sets/--no-from-sets", default=True, show_default=True,
              help="Also start from the extremal indicator sets (small kernels only).")
@click.option("--space", "space_files", multiple=True, type=click.Path(exists=True))
@click.pass_context
def strong(ctx, kernel_file, alpha, max_iter, tol, seed, restarts, from_sets, space_files):
    k = _kernel(kernel_file, space_files)
    t = _tuple(alpha)
    cfg = constants.AscentConfig(max_iter, tol, seed, restarts)
    initial = None
    if from_sets and t.is_good and sum(k.dims) <= SEED_SWEEP_POINTS:
        # indicators reach the restricted constant, so the ascent can only beat it
        best = constants.restricted_weak_constant(k, t, threads=ctx.obj["threads"])
        initial = [indicator(E) for E in best.witness]
    _emit(ctx, constants.strong_type_lower(k, t, cfg, initial).to_json())


@main.group(name="interp", cls=Group)
def interp_group():
    """The interpolation theorem on a concrete form."""


def _setup(ctx, kernel_file, claims_file, alpha, thetas, space_files):
    k = _kernel(kernel_file, space_files)
    target = _tuple(alpha)
    claims = []
    for t, b in load_claims(load_json(claims_file)):
        if b is None:
            claims.append(constants.restricted_weak_constant(k, t, threads=ctx.obj["threads"]))
        else:
            claims.append(constants.EstimateClaim(t, b, "user"))
    if thetas:
        w = exponents.combination_weights(parse_vector(thetas))
    else:
        w = exponents.solve_combination(target, [c.tuple for c in claims])
        if w is None:
            raise CombinationMismatch("target is not a convex combination of the claims")
    return k, claims, w, target


_interp_options = [
    click.argument("kernel_file", type=click.Path(exists=True, dir_okay=False)),
    click.argument("claims_file", type=click.Path(exists=True, dir_okay=False)),
    click.option("--alpha", required=True),
    click.option("--thetas", default=None, help="Combination weights; solved for when omitted."),
    click.option("--space", "space_files", multiple=True, type=click.Path(exists=True)),
]


def _with_options(fn):
    for opt in reversed(_interp_options):
        fn = opt(fn)
    return fn


@interp_group.command()
@_with_options
@click.pass_context
def verify(ctx, kernel_file, claims_file, alpha, thetas, space_files):
    k, claims, w, target = _setup(ctx, kernel_file, claims_file, alpha, thetas, space_files)
    rep = interp.verify_theorem(k, claims, w, target, threads=ctx.obj["threads"])
    _emit(ctx, rep.to_json())
    if not rep.passed:
        raise Failed


@interp_group.command()
@_with_options
@click.option("--epsilon", type=float, default=None, help="Defaults to 0.01 * A.")
@click.pass_context
def trace(ctx, kernel_file, claims_file, alpha, thetas, space_files, epsilon):
    k, claims, w, target = _setup(ctx, kernel_file, claims_file, alpha, thetas, space_files)
    tr = interp.trace_proof(k, claims, w, target, epsilon, threads=ctx.obj["threads"])
    _emit(ctx, {"alpha": list(target.entries), "thetas": list(w.thetas),
                "claims": [c.to_json() for c in claims], "trace": tr.to_json()})
    if not tr.ok:
        raise Failed


@main.group(cls=Group)
def app():
    """Generators and checks for the applications."""


@app.command()
@click.option("--n", type=int, default=8, show_default=True)
@click.option("--p", "ps", default=DEFAULT_WOLFF_PS, show_default=True)
@click.option("--kernel-out", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def wolff(ctx, n, ps, kernel_out):
    """Wolff pipeline: weak (1,1) claims for T and T* give every L^p, 1 < p < inf."""
    k = apps.make_wolff_pair(n)
    if kernel_out:
        Path(kernel_out).write_text(dumps(k.to_json()))
    threads = ctx.obj["threads"]
    tuples = [exponents.validate_tuple(v) for v in ((1.0, 0.0), (0.0, 1.0))]
    claims = [constants.restricted_weak_constant(k, t, threads=threads) for t in tuples]
    runs = []
    for p in parse_vector(ps):
        target = exponents.validate_tuple((1.0 / p, 1.0 - 1.0 / p))
        w = exponents.solve_combination(target, tuples)
        rep = interp.verify_theorem(k, claims, w, target, threads=threads)
        runs.append({"p": p, **rep.to_json()})
    ok = all(r["pass"] for r in runs)
    _emit(ctx, {"n": n, "claims": [c.to_json() for c in claims], "runs": runs, "pass": ok})
    if not ok:
        raise Failed


def _cz_cfg(m, side, c_size, c_grad, eps):
    return apps.CZConfig(m, side, c_size, c_grad, eps)


_cz_options = [
    click.option("--m", type=int, default=2, show_default=True),
    click.option("--side", "side", type=int, default=6, show_default=True, help="Grid side S."),
    click.option("--c-size", type=float, default=1.0, show_default=True),
    click.option("--c-grad", type=float, default=8.0, show_default=True),
    click.option("--eps", type=float, default=1.0, show_default=True, help="Truncation radius."),
]


def _cz(fn):
    for opt in reversed(_cz_options):
        fn = opt(fn)
    return fn


@app.command(name="cz-gen")
@_cz
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def cz_gen(ctx, m, side, c_size, c_grad, eps, seed):
    k = apps.make_cz_kernel(_cz_cfg(m, side, c_size, c_grad, eps), seed)
    _emit(ctx, k.to_json())


@app.command(name="cz-check")
@click.argument("kernel_file", type=click.Path(exists=True, dir_okay=False))
@_cz
@click.option("--space", "space_files", multiple=True, type=click.Path(exists=True))
@click.pass_context
def cz_check(ctx, kernel_file, m, side, c_size, c_grad, eps, space_files):
    res = apps.check_cz_bounds(_kernel(kernel_file, space_files), _cz_cfg(m, side, c_size, c_grad, eps))
    _emit(ctx, res.to_json())
    if not res.ok:
        raise Failed


@app.command(name="bht-adjoint")
@click.option("--N", "N", type=int, default=7, show_default=True)
@click.option("--alpha", type=int, default=1, show_default=True)
@click.option("--beta", type=int, default=2, show_default=True)
@click.option("--eps", type=int, default=1, show_default=True)
@click.option("--T", "T", type=int, default=2, show_default=True)
@click.pass_context
def bht_adjoint(ctx, N, alpha, beta, eps, T):
    cfg = apps.BHTConfig(N, alpha, beta, eps, T)
    r = apps.bht_adjoint_identity_residual(cfg)
    ok = r <= 1e-12
    _emit(ctx, {"N": N, "alpha": alpha, "beta": beta, "eps": eps, "T": T,
                "residual": r, "pass": ok})
    if not ok:
        raise Failed


if __name__ == "__main__":
    sys.exit(main())
