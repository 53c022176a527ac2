"""Numerical admissibility pipeline for candidate univariate kernels.

Given any function k on [-1, 1], decide whether it generates an isotropic
reproducing kernel on the sphere: finite energy (square-summable
eigenvalues) and strictly positive Legendre-Fourier coefficients
lambda_l = 2 pi Int k(z) P_l(z) dz. Candidates that fail at finitely many
degrees can be repaired by adding scaled Legendre terms, and any
admissible candidate can be normalized so lambda_0 = 1.

Verdicts are certified only up to the truncation degree and quadrature
accuracy; no analytic tail claim is made.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ParameterError, QuadratureConvergenceError, RepairError
from .kernels import FOUR_PI, CuiFreden, KernelFamily, Lebedev, parse_kernel
from .special import QuadratureRule, gauss_legendre, graded_rule, legendre_p, legendre_table

__all__ = [
    "UnivariateCandidate",
    "AdmissibilityReport",
    "default_rule",
    "energy_check",
    "compute_spectrum",
    "check_admissibility",
    "repair",
    "normalize",
    "nonnegativity_check",
    "candidate_from_kernel",
    "candidate_from_samples",
    "builtin_candidate",
]

# Defaults: graded 8 panels x 32 nodes for endpoint-singular candidates,
# plain Gauss-Legendre with max(64, 2L) nodes otherwise.
SINGULAR_PANELS = 8
SINGULAR_NODES = 32
DEFAULT_TRUNCATION = 64
POSITIVITY_TOL = 1e-12
# Quadrature-limited: graded rules resolve singular profiles to ~1e-9, so
# the lambda_0 = 1 flag cannot honestly be tighter than this.
NORMALIZED_TOL = 1e-6
MAX_EXCEPTIONS = 4
CONVERGED_RTOL = 1e-8
DIVERGED_RTOL = 1e-4


@dataclass(frozen=True)
class UnivariateCandidate:
    """A candidate profile z -> k(z) under test.

    ``singular_at_one`` selects the graded quadrature for profiles whose
    derivative blows up at z = 1 (sqrt(1 - z)-type behavior).
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    label: str
    singular_at_one: bool = False

    def __call__(self, z):
        return self.evaluator(np.asarray(z, dtype=float))


@dataclass(frozen=True)
class AdmissibilityReport:
    """Outcome of the admissibility check for one candidate.

    ``exception_set`` lists degrees with lambda_l <= tolerance; the
    verdict is truncation-limited, which is why ``truncation`` is part of
    the report. ``nonnegative`` records probability-density eligibility,
    not an admissibility requirement.
    """

    label: str
    energy: float
    hilbert_schmidt_ok: bool
    lambdas: np.ndarray
    exception_set: tuple[int, ...]
    admissible: bool
    normalized: bool
    nonnegative: bool
    truncation: int
    tolerance: float

    def __post_init__(self) -> None:
        lambdas = np.asarray(self.lambdas, dtype=float)
        lambdas.setflags(write=False)
        object.__setattr__(self, "lambdas", lambdas)

    @property
    def indeterminate_set(self) -> tuple[int, ...]:
        """Exception degrees whose coefficient is positive but below
        tolerance: too small to certify, not provably wrong."""
        return tuple(l for l in self.exception_set if 0.0 < self.lambdas[l])

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "energy": self.energy,
            "hilbert_schmidt_ok": self.hilbert_schmidt_ok,
            "lambdas": [float(v) for v in self.lambdas],
            "exception_set": list(self.exception_set),
            "admissible": self.admissible,
            "normalized": self.normalized,
            "nonnegative": self.nonnegative,
            "truncation": self.truncation,
            "tolerance": self.tolerance,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def default_rule(candidate: UnivariateCandidate, l_max: int = DEFAULT_TRUNCATION) -> QuadratureRule:
    if candidate.singular_at_one:
        return graded_rule(SINGULAR_NODES, SINGULAR_PANELS)
    return gauss_legendre(max(64, 2 * l_max))


def _refine(rule: QuadratureRule) -> QuadratureRule:
    """Same construction with doubled node count (per panel when graded)."""
    if rule.graded:
        return graded_rule(2 * (len(rule) // rule.panels), rule.panels)
    return gauss_legendre(2 * len(rule))


def _energy(candidate: UnivariateCandidate, rule: QuadratureRule) -> tuple[float, float]:
    """Energy integral and the relative change under node doubling."""
    coarse = rule.integrate(lambda z: candidate(z) ** 2)
    fine = _refine(rule).integrate(lambda z: candidate(z) ** 2)
    scale = max(abs(fine), np.finfo(float).tiny)
    return fine, abs(fine - coarse) / scale


def energy_check(candidate: UnivariateCandidate, rule: QuadratureRule | None = None) -> float:
    """Energy Int_{-1}^{1} k^2(z) dz of the candidate.

    Raises QuadratureConvergenceError when doubling the node count moves
    the value by more than 1e-4 relative, the signature of a profile too
    rough for the selected rule.
    """
    rule = rule or default_rule(candidate)
    value, change = _energy(candidate, rule)
    if not math.isfinite(value) or change > DIVERGED_RTOL:
        raise QuadratureConvergenceError(
            f"energy quadrature did not converge for {candidate.label!r} "
            f"(relative change {change:.3e})"
        )
    return value


def compute_spectrum(
    candidate: UnivariateCandidate,
    l_max: int,
    rule: QuadratureRule | None = None,
) -> np.ndarray:
    """Eigenvalues lambda_l = 2 pi Int k(z) P_l(z) dz for l = 0 .. l_max.

    Deterministic given the rule: the Legendre table is evaluated once on
    the nodes and each integral is a fixed-order weighted sum.
    """
    rule = rule or default_rule(candidate, l_max)
    weighted = rule.weights * candidate(rule.nodes)
    table = legendre_table(l_max, rule.nodes)
    return 2.0 * math.pi * (table @ weighted)


def nonnegativity_check(candidate: UnivariateCandidate, grid: int = 512) -> tuple[float, bool]:
    """Minimum of k over a Chebyshev grid plus endpoints, and whether it
    clears -1e-12. Chebyshev spacing clusters points at the endpoints,
    where the closed-form families attain their minima."""
    if grid < 2:
        raise ValueError(f"grid must have at least 2 points, got {grid}")
    cheb = np.cos((2 * np.arange(grid) + 1) * math.pi / (2 * grid))
    z = np.concatenate(([-1.0], np.sort(cheb), [1.0]))
    values = candidate(z)
    low = float(np.min(values))
    return low, bool(low >= -1e-12)


def check_admissibility(
    candidate: UnivariateCandidate,
    l_max: int = DEFAULT_TRUNCATION,
    tol: float = POSITIVITY_TOL,
    rule: QuadratureRule | None = None,
    grid: int = 512,
) -> AdmissibilityReport:
    """Full admissibility report: energy, spectrum, exception set, verdict.

    Failures are encoded in the report rather than raised; the verdict is
    admissible only when the energy quadrature converged and every
    lambda_l up to l_max exceeds tol.
    """
    rule = rule or default_rule(candidate, l_max)
    energy, change = _energy(candidate, rule)
    hs_ok = math.isfinite(energy) and change < CONVERGED_RTOL
    lambdas = compute_spectrum(candidate, l_max, rule)
    exceptions = tuple(int(l) for l in np.nonzero(lambdas <= tol)[0])
    return AdmissibilityReport(
        label=candidate.label,
        energy=energy,
        hilbert_schmidt_ok=hs_ok,
        lambdas=lambdas,
        exception_set=exceptions,
        admissible=hs_ok and not exceptions,
        normalized=abs(lambdas[0] - 1.0) <= NORMALIZED_TOL,
        nonnegative=nonnegativity_check(candidate, grid)[1],
        truncation=l_max,
        tolerance=tol,
    )


def repair(
    candidate: UnivariateCandidate,
    report: AdmissibilityReport,
    fill: float,
    max_exceptions: int = MAX_EXCEPTIONS,
) -> UnivariateCandidate:
    """Add scaled Legendre terms on the exception set so the repaired
    profile's coefficients there equal ``fill``.

    The new profile is k(z) + sum_l (fill - lambda_l) (2l+1)/(4 pi) P_l(z)
    over the exception degrees. A large exception set defeats the point of
    a closed-form kernel, hence the cardinality bound.
    """
    if fill <= 0:
        raise ParameterError(f"fill value must be positive, got {fill}")
    if not report.exception_set:
        raise RepairError("nothing to repair: exception set is empty")
    if len(report.exception_set) > max_exceptions:
        raise RepairError(
            f"exception set {report.exception_set} exceeds the repair bound "
            f"({max_exceptions})"
        )
    corrections = [
        (l, (fill - report.lambdas[l]) * (2 * l + 1) / FOUR_PI)
        for l in report.exception_set
    ]
    base = candidate.evaluator

    def repaired(z):
        out = np.asarray(base(z), dtype=float).copy()
        for l, coeff in corrections:
            out += coeff * legendre_p(l, z)
        return out

    return UnivariateCandidate(
        evaluator=repaired,
        label=f"{candidate.label}+repaired",
        singular_at_one=candidate.singular_at_one,
    )


def normalize(
    candidate: UnivariateCandidate, rule: QuadratureRule | None = None
) -> UnivariateCandidate:
    """Scale the candidate so its recomputed lambda_0 equals 1."""
    rule = rule or default_rule(candidate, 0)
    lam0 = float(compute_spectrum(candidate, 0, rule)[0])
    if lam0 <= POSITIVITY_TOL:
        raise ParameterError(
            f"cannot normalize {candidate.label!r}: lambda_0 = {lam0:.3e}"
        )
    base = candidate.evaluator
    scale = 1.0 / lam0

    def scaled(z):
        return scale * np.asarray(base(z), dtype=float)

    return UnivariateCandidate(
        evaluator=scaled,
        label=f"{candidate.label}+normalized",
        singular_at_one=candidate.singular_at_one,
    )


def candidate_from_kernel(kernel: KernelFamily) -> UnivariateCandidate:
    """Wrap a closed-form family's profile as a candidate."""
    return UnivariateCandidate(
        evaluator=kernel.univariate,
        label=f"{kernel.family}({', '.join(f'{k}={v:g}' for k, v in kernel.params.items())})",
        singular_at_one=kernel.endpoint_singular,
    )


def candidate_from_samples(
    z: np.ndarray,
    values: np.ndarray,
    label: str,
    singular_at_one: bool = False,
) -> UnivariateCandidate:
    """Candidate interpolating tabulated samples with a cubic spline."""
    z = np.asarray(z, dtype=float)
    values = np.asarray(values, dtype=float)
    if z.ndim != 1 or z.shape != values.shape or z.size < 4:
        raise ValueError("need matching 1-d arrays with at least 4 samples")
    order = np.argsort(z)
    spline = CubicSpline(z[order], values[order])
    return UnivariateCandidate(
        evaluator=lambda t: spline(np.clip(t, z.min(), z.max())),
        label=label,
        singular_at_one=singular_at_one,
    )


def _cui_raw(z):
    # un-repaired profile in the 1/(4 pi) scale convention: its lambda_0
    # vanishes, all higher coefficients equal 1/(l (l+1) (2l+1))
    return (1.0 - 2.0 * np.log1p(np.sqrt((1.0 - z) / 2.0))) / FOUR_PI


def _lebedev_raw(z):
    return (1.0 / 3.0 - 0.5 * np.sqrt((1.0 - z) / 2.0)) / FOUR_PI


def builtin_candidate(name: str) -> UnivariateCandidate:
    """Named candidates for the CLI: 'cui-raw', 'lebedev-raw', or any
    kernel shorthand such as 'leggen:rho=0.5'."""
    key = name.strip().lower()
    if key == "cui-raw":
        return UnivariateCandidate(_cui_raw, "cui-raw", singular_at_one=True)
    if key == "lebedev-raw":
        return UnivariateCandidate(_lebedev_raw, "lebedev-raw", singular_at_one=True)
    return candidate_from_kernel(parse_kernel(name))
