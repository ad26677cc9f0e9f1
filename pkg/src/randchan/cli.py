"""Command-line interface.

Exit codes: 0 on success, 2 when any run is flagged non-converged (the
outputs are still written; the brackets remain valid), 1 on usage or I/O
errors.  RANDCHAN_THREADS caps worker-thread parallelism for sweep and
design-study runs.
"""

import json
import sys
from dataclasses import dataclass

import click

from .capacity import solve_capacity
from .channel import ProbabilityVector, load_channel_csv, normalize_rows, save_matrix_csv
from .design import (
    LognormalFamilyConstraints,
    design_optimum,
    evaluate_experiment,
    optimal_gain_search,
)
from .distributions import DistributionSpec, sample_gain_matrix
from .harness import (
    DesignStudyRecord,
    SweepRecord,
    emit_results,
    load_design_config,
    load_sweep_config,
    run_capacity_sweep,
    run_design_study,
)
from .ratebounds import (
    RateBoundParams,
    clamped,
    prop4_ub_tail,
    prop5_lb_tail,
    realized_a,
    theorem2_tail,
)

_FAMILY_ALIASES = {
    "exp": "exponential",
    "exponential": "exponential",
    "uniform": "uniform",
    "lognormal": "lognormal",
    "gamma": "gamma",
    "chi2": "chi_squared",
    "chi_squared": "chi_squared",
    "beta": "beta",
    "two_point": "two_point",
    "point_mass": "point_mass",
}


def _parse_spec(family, params):
    name = _FAMILY_ALIASES.get(family)
    if name is None:
        raise click.UsageError(f"unknown family {family!r}; known: {sorted(set(_FAMILY_ALIASES))}")
    kv = {}
    for item in params:
        if "=" not in item:
            raise click.UsageError(f"--param expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        kv[key.strip()] = float(value)
    try:
        return DistributionSpec(name, kv)
    except (KeyError, ValueError) as exc:
        raise click.UsageError(f"bad parameters for family {name}: {exc}")


@click.group()
def cli():
    """Capacity brackets and asymptotics for row-normalized random channels."""


@cli.command()
@click.argument("matrix", type=click.Path(exists=True, dir_okay=False))
@click.option("--tol", type=float, default=1e-6, show_default=True, help="bracket gap target, bits")
@click.option("--max-iter", type=int, default=10_000, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="emit JSON including the achieving distribution")
def capacity(matrix, tol, max_iter, as_json):
    """Certified capacity bracket of the channel stored in MATRIX (CSV)."""
    W = load_channel_csv(matrix)
    bracket = solve_capacity(W, tol=tol, max_iter=max_iter)
    if as_json:
        payload = {
            "lower_bits": bracket.lower,
            "upper_bits": bracket.upper,
            "gap_bits": bracket.gap,
            "iterations": bracket.iterations,
            "converged": bracket.converged,
            "input_distribution": bracket.input_distribution.values.tolist(),
        }
        click.echo(json.dumps(payload, indent=2))
    else:
        click.echo(f"lower      {bracket.lower:.12g}")
        click.echo(f"upper      {bracket.upper:.12g}")
        click.echo(f"gap        {bracket.gap:.12g}")
        click.echo(f"iterations {bracket.iterations}")
        click.echo(f"converged  {bracket.converged}")
    return 0 if bracket.converged else 2


@cli.command()
@click.option("--family", required=True, help="exp|uniform|lognormal|gamma|chi2|beta|two_point|point_mass")
@click.option("--param", multiple=True, help="family parameter as key=value; repeatable")
@click.option("--n", type=int, required=True, help="input alphabet size")
@click.option("--gamma", type=float, default=1.0, show_default=True, help="output/input size ratio")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False, writable=True))
@click.option("--normalize", is_flag=True, help="write the row-normalized channel instead of the gains")
def generate(family, param, n, gamma, seed, out, normalize):
    """Sample a gain matrix and write it as headerless CSV."""
    spec = _parse_spec(family, param)
    gain = sample_gain_matrix(spec, n, gamma, seed)
    save_matrix_csv(normalize_rows(gain) if normalize else gain, out)
    return 0


@cli.command("rate-bound")
@click.option("--family", required=True)
@click.option("--param", multiple=True)
@click.option("--n", type=int, required=True)
@click.option("--m", type=int, required=True)
@click.option("--t", type=float, required=True, help="deviation threshold, bits")
@click.option("--K", "K", type=float, default=None, help="Bernstein scale; default from analytic second moments")
@click.option("--T", "T", type=float, default=None, help="Bernstein growth; default 1 (flagged)")
@click.option("--a-ub", type=float, default=None, help="log-Lipschitz floor, upper-bound branch")
@click.option("--a-lb", type=float, default=None, help="log-Lipschitz floor, lower-bound branch")
@click.option("--seed", type=int, default=0, show_default=True, help="seed for realized-a sampling when floors are omitted")
@click.option("--json", "as_json", is_flag=True)
def rate_bound(family, param, n, m, t, K, T, a_ub, a_lb, seed, as_json):
    """Evaluate the finite-size deviation bounds at threshold t."""
    spec = _parse_spec(family, param)
    realized = None
    if a_ub is None or a_lb is None:
        gain = sample_gain_matrix(spec, n, m / n, seed)
        if gain.m != m:
            raise click.UsageError(f"m={m} not representable as ceil(gamma*n) for n={n}")
        realized = realized_a(gain)
        a_ub = a_ub if a_ub is not None else realized.a_ub
        a_lb = a_lb if a_lb is not None else realized.a_lb
    params = RateBoundParams.from_spec(spec, a_ub=a_ub, a_lb=a_lb, K=K, T=1.0 if T is None else T)
    raw_thm = theorem2_tail(t, n, m, params)
    raw_p4 = prop4_ub_tail(t, n, params)
    raw_p5 = prop5_lb_tail(t, n, m, params)
    payload = {
        "t": t,
        "n": n,
        "m": m,
        "mu1n": params.mu1n,
        "mu2n_bits": params.mu2n,
        "K": params.constants.K,
        "T": params.constants.T,
        "T_defaulted": T is None,
        "a_ub": a_ub,
        "a_lb": a_lb,
        "a_realized_from_sample": realized is not None,
        "capacity_tail_raw": raw_thm,
        "capacity_tail": clamped(raw_thm),
        "upper_bound_tail_raw": raw_p4,
        "upper_bound_tail": clamped(raw_p4),
        "lower_bound_tail_raw": raw_p5,
        "lower_bound_tail": clamped(raw_p5),
    }
    if as_json:
        click.echo(json.dumps(payload, indent=2))
    else:
        for key, value in payload.items():
            click.echo(f"{key} {value}")
    return 0


@dataclass(frozen=True)
class _GainRecord:
    trial: int
    n: int
    mode: str
    gain_bits: float


@cli.command()
@click.option("--l1", type=float, default=1.0, show_default=True)
@click.option("--u1", type=float, default=10.0, show_default=True)
@click.option("--l2", type=float, default=0.0, show_default=True)
@click.option("--u2", type=float, default=2.0, show_default=True)
@click.option("--n", type=int, required=True)
@click.option("--trials", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--mode", type=click.Choice(["optimal", "suboptimal"]), default="suboptimal", show_default=True)
@click.option("--grid-resolution", type=float, default=0.05, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False, writable=True))
def design(l1, u1, l2, u2, n, trials, seed, mode, grid_resolution, out):
    """Monte-Carlo information gains for the constrained lognormal family."""
    c = LognormalFamilyConstraints(l1=l1, u1=u1, l2=l2, u2=u2)
    prior = ProbabilityVector.uniform(n)
    if mode == "optimal":
        gains = optimal_gain_search(prior, c, n, resolution=grid_resolution, trials=trials, seed=seed)
    else:
        opt = design_optimum(c)
        gains = evaluate_experiment(prior, opt.z_star, opt.sigma2_star, n, trials, seed)
    records = [_GainRecord(trial=i, n=n, mode=mode, gain_bits=float(g)) for i, g in enumerate(gains)]
    emit_results(records, format="csv", path=out)
    return 0


@cli.command()
@click.option("--config", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--threads", type=int, default=None, help="worker threads; defaults to RANDCHAN_THREADS or 1")
@click.option("--timings", type=click.Path(dir_okay=False, writable=True), default=None,
              help="also write per-run wall times (non-deterministic) to this CSV")
def sweep(config, threads, timings):
    """Run the capacity sweep described by a JSON config."""
    cfg = load_sweep_config(config)
    records = run_capacity_sweep(cfg, threads=threads)
    if cfg.out:
        emit_results(records, format=cfg.format, path=cfg.out,
                     exclude_fields=("wall_time_s",), record_type=SweepRecord)
    if timings:
        emit_results(records, format="csv", path=timings, record_type=SweepRecord)
    bad = sum(1 for r in records if not r.converged)
    click.echo(f"{len(records)} runs, {bad} non-converged" + (f", results in {cfg.out}" if cfg.out else ""))
    return 2 if bad else 0


@cli.command("design-study")
@click.option("--config", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--threads", type=int, default=None)
def design_study(config, threads):
    """Run the experiment-design study described by a JSON config."""
    cfg = load_design_config(config)
    records = run_design_study(cfg, threads=threads)
    if cfg.out:
        emit_results(records, format=cfg.format, path=cfg.out, record_type=DesignStudyRecord)
    degenerate = sum(1 for r in records if r.degenerate_variance)
    click.echo(
        f"{len(records)} sizes, {cfg.trials} trials each"
        + (f", {degenerate} degenerate-variance rows" if degenerate else "")
        + (f", results in {cfg.out}" if cfg.out else "")
    )
    return 0


def main(argv=None) -> int:
    """Entry point with the documented exit-code contract."""
    try:
        code = cli.main(args=argv, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return int(code) if isinstance(code, int) else 0


if __name__ == "__main__":
    sys.exit(main())
