"""Command-line front-end: kernel evaluation, eigenvalue tables,
admissibility reports, inner products, interpolation, and figure data.

Exit codes: 0 success/admissible, 1 domain error or unreadable input,
2 invalid parameters, 3 inadmissible, 4 indeterminate, 5 singular Gram
system.
"""

from __future__ import annotations

import json
import math
import sys

import click
import numpy as np

from .admissibility import builtin_candidate, candidate_from_samples, check_admissibility
from .errors import (
    DomainError,
    KernelMismatchError,
    ParameterError,
    SingularGramError,
)
from .kernels import (
    FOUR_PI,
    AltGen,
    CuiFreden,
    Lebedev,
    LegendreGen,
    VonMisesFisher,
    parse_kernel,
)
from .space import PointExpansion, RkhsSpace, inner_product_gram, inner_product_spectral, fit_interpolant, sh_analysis
from .special import UnitVector

EXIT_DOMAIN = 1
EXIT_PARAMS = 2
EXIT_INADMISSIBLE = 3
EXIT_INDETERMINATE = 4
EXIT_SINGULAR = 5


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_kernel(text: str):
    try:
        return parse_kernel(text)
    except ParameterError as exc:
        _fail(str(exc), EXIT_PARAMS)


def _write_lines(lines, output: str) -> None:
    payload = "\n".join(lines) + "\n"
    if output == "-":
        click.echo(payload, nl=False)
    else:
        with open(output, "w") as handle:
            handle.write(payload)


@click.group()
def main():
    """Isotropic reproducing kernels on the 2-sphere."""


@main.command("eval")
@click.option("--kernel", "kernel_text", required=True, help="Kernel JSON or name:params.")
@click.option("--z", "z", type=float, default=None, help="Dot-product argument in [-1, 1].")
@click.option("--theta", "theta", type=float, default=None, help="Angular separation in radians.")
def cmd_eval(kernel_text, z, theta):
    """Evaluate the univariate kernel profile k(z) or k(cos theta)."""
    kernel = _load_kernel(kernel_text)
    if (z is None) == (theta is None):
        _fail("provide exactly one of --z or --theta", EXIT_PARAMS)
    arg = math.cos(theta) if theta is not None else z
    try:
        value = kernel.univariate(arg)
    except DomainError as exc:
        _fail(str(exc), EXIT_DOMAIN)
    click.echo(f"{value:.15g}")


@main.command("eigs")
@click.option("--kernel", "kernel_text", required=True, help="Kernel JSON or name:params.")
@click.option("--degree", "-L", "l_max", type=int, required=True, help="Largest degree.")
@click.option("--output", default="-", help="CSV destination path or '-'.")
def cmd_eigs(kernel_text, l_max, output):
    """Closed-form eigenvalue table: rows of (l, lambda_l, alpha_l)."""
    kernel = _load_kernel(kernel_text)
    if l_max < 0:
        _fail("degree must be non-negative", EXIT_PARAMS)
    lines = ["l,lambda,alpha"]
    for l in range(l_max + 1):
        lam = kernel.eigenvalue(l)
        lines.append(f"{l},{lam:.17g},{kernel.legendre_coefficient(l):.17g}")
    _write_lines(lines, output)


@main.command("admit")
@click.argument("source")
@click.option("--degree", "-L", "l_max", type=int, default=64, help="Spectrum truncation.")
@click.option("--tol", type=float, default=1e-12, help="Positivity tolerance.")
@click.option("--singular/--smooth", default=False, help="Sample files: treat profile as endpoint-singular.")
@click.option("--output", default="-", help="Report destination path or '-'.")
def cmd_admit(source, l_max, tol, singular, output):
    """Admissibility report for a builtin candidate or a samples CSV.

    SOURCE is a builtin name ('cui-raw', 'lebedev-raw', 'leggen:rho=0.5',
    any kernel shorthand/JSON) or a path to a CSV of z,k(z) samples.
    """
    try:
        candidate = builtin_candidate(source)
    except ParameterError:
        try:
            table = np.loadtxt(source, delimiter=",", comments="#")
        except OSError:
            _fail(f"{source!r} is neither a builtin candidate nor a readable file", EXIT_DOMAIN)
        except ValueError as exc:
            _fail(f"could not parse samples from {source!r}: {exc}", EXIT_DOMAIN)
        if table.ndim != 2 or table.shape[1] != 2:
            _fail("samples file must have two columns: z,k", EXIT_DOMAIN)
        candidate = candidate_from_samples(
            table[:, 0], table[:, 1], label=source, singular_at_one=singular
        )
    report = check_admissibility(candidate, l_max=l_max, tol=tol)
    _write_lines([report.to_json()], output)
    if report.admissible:
        return
    if report.exception_set and set(report.exception_set) == set(report.indeterminate_set):
        sys.exit(EXIT_INDETERMINATE)
    sys.exit(EXIT_INADMISSIBLE)


# Figure sweeps: (parameter values, column formatter, abscissa kind, builder).
# Values enumerate the published curve families including the intermediate
# increments; abscissa is co-latitude except the z sweep of figure 3.
_FIGURES = {
    2: {
        "values": [(50 + 5 * i) / 100 for i in range(41)],  # 0.5 .. 2.5 by 0.05
        "label": lambda v: f"eta={v:.2f}",
        "abscissa": "theta",
        "kernel": lambda v: CuiFreden(eta=v),
    },
    3: {
        "values": [(10 + i) / 10 for i in range(51)],  # 1.0 .. 6.0 by 0.1
        "label": lambda v: f"eta={v:.1f}",
        "abscissa": "z",
        "kernel": lambda v: Lebedev(eta=v),
    },
    4: {
        "values": [(50 + 25 * i) / 1000 for i in range(37)],  # 0.05 .. 0.95 by 0.025
        "label": lambda v: f"rho={v:.3f}",
        "abscissa": "theta",
        "kernel": lambda v: LegendreGen(rho=v),
    },
    5: {
        "values": [(20 + 5 * i) / 100 for i in range(45)],  # 0.2 .. 2.4 by 0.05
        "label": lambda v: f"rho={v:.2f}",
        "abscissa": "theta",
        "kernel": lambda v: AltGen(rho=v),
    },
    6: {
        "values": list(range(101)),  # kappa = 0 .. 100 by 1
        "label": lambda v: f"kappa={v:d}",
        "abscissa": "theta",
        "kernel": lambda v: VonMisesFisher(kappa=float(v)),
    },
}


def figure_table(figure_id: int, samples: int = 181) -> list[str]:
    """CSV lines for one published curve family; importable for tests."""
    if figure_id not in _FIGURES:
        raise ParameterError(f"figure id must be one of {sorted(_FIGURES)}, got {figure_id}")
    if samples < 2:
        raise ParameterError(f"sample count must be >= 2, got {samples}")
    spec = _FIGURES[figure_id]
    lines = []
    if figure_id == 6:
        # kappa = 0 has no RKHS (eigenvalues vanish above degree 0); the
        # column reports the uniform-distribution limit of the profile.
        lines.append("# kappa=0 column is the uniform limit 1/(4*pi), a degenerate boundary case")
    if spec["abscissa"] == "theta":
        grid = np.linspace(0.0, math.pi, samples)
        z = np.cos(grid)
        head = "theta"
    else:
        grid = np.linspace(-1.0, 1.0, samples)
        z = grid
        head = "z"
    z = np.clip(z, -1.0, 1.0)
    columns = []
    for value in spec["values"]:
        if figure_id == 6 and value == 0:
            columns.append(np.full(samples, 1.0 / FOUR_PI))
        else:
            columns.append(spec["kernel"](value).univariate(z))
    lines.append(head + "," + ",".join(spec["label"](v) for v in spec["values"]))
    for i in range(samples):
        row = [f"{grid[i]:.17g}"] + [f"{col[i]:.17g}" for col in columns]
        lines.append(",".join(row))
    return lines


@main.command("figure")
@click.argument("figure_id", type=int)
@click.option("--samples", type=int, default=181, help="Abscissa sample count.")
@click.option("--output", default="-", help="CSV destination path or '-'.")
def cmd_figure(figure_id, samples, output):
    """Emit the data behind one of the published curve families (2-6)."""
    try:
        lines = figure_table(figure_id, samples)
    except ParameterError as exc:
        _fail(str(exc), EXIT_PARAMS)
    _write_lines(lines, output)


def _load_expansion(path: str) -> PointExpansion:
    try:
        with open(path) as handle:
            return PointExpansion.from_dict(json.load(handle))
    except OSError as exc:
        _fail(f"cannot read expansion {path!r}: {exc}", EXIT_DOMAIN)
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        _fail(f"malformed expansion {path!r}: {exc}", EXIT_PARAMS)


@main.command("innerprod")
@click.argument("left", type=click.Path())
@click.argument("right", type=click.Path())
@click.option("--method", default="gram", help="'gram' or 'spectral:L'.")
def cmd_innerprod(left, right, method):
    """Inner product of two point-expansion JSON files."""
    f = _load_expansion(left)
    g = _load_expansion(right)
    try:
        if method == "gram":
            value = inner_product_gram(f, g)
        elif method.startswith("spectral:"):
            l_max = int(method.split(":", 1)[1])
            if f.kernel != g.kernel:
                raise KernelMismatchError("expansions use different kernels")
            space = RkhsSpace.build(f.kernel, l_max)
            value = inner_product_spectral(
                sh_analysis(f, l_max), sh_analysis(g, l_max), space
            )
        else:
            _fail(f"unknown method {method!r}", EXIT_PARAMS)
    except KernelMismatchError as exc:
        _fail(str(exc), EXIT_PARAMS)
    except ValueError as exc:
        _fail(str(exc), EXIT_PARAMS)
    click.echo(f"{value.real:.15g} {value.imag:.15g}")


@main.command("fit")
@click.argument("data", type=click.Path())
@click.option("--kernel", "kernel_text", required=True, help="Kernel JSON or name:params.")
@click.option("--ridge", type=float, default=0.0, help="Diagonal regularization.")
@click.option("--output", default="-", help="Expansion JSON destination or '-'.")
def cmd_fit(data, kernel_text, ridge, output):
    """Fit an interpolating expansion to CSV rows of theta,phi,re,im."""
    kernel = _load_kernel(kernel_text)
    try:
        table = np.loadtxt(data, delimiter=",", comments="#", skiprows=1, ndmin=2)
    except OSError as exc:
        _fail(f"cannot read {data!r}: {exc}", EXIT_DOMAIN)
    except ValueError as exc:
        _fail(f"could not parse {data!r}: {exc}", EXIT_DOMAIN)
    if table.shape[1] != 4:
        _fail("fit data must have columns theta,phi,re,im", EXIT_DOMAIN)
    try:
        points = [UnitVector(t, p) for t, p in table[:, :2]]
    except DomainError as exc:
        _fail(str(exc), EXIT_DOMAIN)
    values = table[:, 2] + 1j * table[:, 3]
    try:
        expansion = fit_interpolant(kernel, points, values, ridge=ridge)
    except SingularGramError as exc:
        _fail(str(exc), EXIT_SINGULAR)
    residual = max(
        (abs(expansion(p) - v) for p, v in zip(points, values)), default=0.0
    )
    _write_lines([expansion.to_json()], output)
    click.echo(f"max node residual: {residual:.3e}", err=True)


if __name__ == "__main__":
    main()
