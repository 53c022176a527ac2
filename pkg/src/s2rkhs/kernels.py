"""Closed-form isotropic kernel families on the 2-sphere.

Each family exposes the univariate profile k(z) on [-1, 1], the positive
eigenvalue sequence lambda_l of the associated integral operator, the
Legendre coefficients alpha_l = (2l + 1) lambda_l / (4 pi), and the
bivariate kernel K(x, y) = k(x . y). Profiles are vectorized over z.
"""

from __future__ import annotations

import json
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, fields
from functools import lru_cache

import numpy as np

from .errors import DomainError, ParameterError
from .special import UnitVector, bessel_i_half_ratios, bessel_j0

__all__ = [
    "KernelFamily",
    "CuiFreden",
    "Lebedev",
    "LegendreGen",
    "LegendreGenDeriv",
    "AltGen",
    "VonMisesFisher",
    "EigenvalueSequence",
    "vmf_eigenvalues",
    "kernel_from_dict",
    "parse_kernel",
]

FOUR_PI = 4.0 * math.pi

# Default truncation: smallest L with lambda_L / lambda_0 below this, capped.
TRUNCATION_TAIL = 1e-14
TRUNCATION_CAP = 512


@dataclass(frozen=True)
class EigenvalueSequence:
    """Strictly positive eigenvalues lambda_0 .. lambda_L of an isotropic
    kernel; entry l carries multiplicity 2l + 1."""

    values: np.ndarray
    isotropic: bool = True

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise ValueError("eigenvalues must form a non-empty 1-d array")
        if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
            raise ValueError("eigenvalues must be finite and strictly positive")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def truncation(self) -> int:
        return self.values.size - 1

    def __getitem__(self, l: int) -> float:
        return float(self.values[l])

    def head_energy(self) -> float:
        """Sum of (2l + 1) lambda_l^2 up to the truncation."""
        l = np.arange(self.values.size)
        return float(np.dot(2 * l + 1, self.values**2))

    def tail_estimate(self) -> float:
        """Geometric bound on the square-summability tail beyond L."""
        if self.values.size < 2:
            return 0.0
        last = self.values[-1]
        ratio = (last / self.values[-2]) ** 2
        if ratio >= 1.0:
            return math.inf
        big_l = self.truncation
        return float((2 * big_l + 3) * last**2 * ratio / (1.0 - ratio))


class KernelFamily(ABC):
    """Common surface of the closed-form families."""

    family: str = ""
    endpoint_singular = False  # derivative singularity of k at z = 1

    @abstractmethod
    def profile(self, z):
        """Univariate k(z) without domain checks; z may be an array."""

    @abstractmethod
    def eigenvalue(self, l: int) -> float:
        """Closed-form lambda_l."""

    def eigenvalue_array(self, l_max: int) -> np.ndarray:
        return np.array([self.eigenvalue(l) for l in range(l_max + 1)])

    def univariate(self, z):
        """k(z) with |z| <= 1 enforced (1e-12 slack for rounding)."""
        scalar = np.isscalar(z)
        z = np.asarray(z, dtype=float)
        if np.any(np.abs(z) > 1.0 + 1e-12):
            raise DomainError("kernel argument outside [-1, 1]")
        out = self.profile(np.clip(z, -1.0, 1.0))
        return float(out) if scalar else out

    def bivariate(self, x: UnitVector, y: UnitVector) -> float:
        return float(self.univariate(x.dot(y)))

    def legendre_coefficient(self, l: int) -> float:
        return (2 * l + 1) * self.eigenvalue(l) / FOUR_PI

    def eigenvalues(self, l_max: int | None = None) -> EigenvalueSequence:
        """Validated eigenvalue sequence up to l_max.

        With l_max omitted, truncate at the first degree whose eigenvalue
        falls below TRUNCATION_TAIL of lambda_0, capped at TRUNCATION_CAP.
        """
        if l_max is not None:
            return EigenvalueSequence(self.eigenvalue_array(l_max))
        lam0 = self.eigenvalue(0)
        values = [lam0]
        for l in range(1, TRUNCATION_CAP + 1):
            lam = self.eigenvalue(l)
            values.append(lam)
            if lam < TRUNCATION_TAIL * lam0:
                break
        return EigenvalueSequence(np.array(values))

    @property
    def params(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def to_dict(self) -> dict:
        return {"family": self.family, "params": dict(self.params)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, KernelFamily)
            and self.family == other.family
            and self.params == other.params
        )

    def __hash__(self) -> int:
        return hash((self.family, tuple(sorted(self.params.items()))))


@dataclass(frozen=True, eq=False)
class CuiFreden(KernelFamily):
    """Logarithmic kernel with eigenvalues 1/(l (l+1) (2l+1)) scaled by eta.

    k(z) = (1 + eta (1 - 2 log(1 + sqrt((1-z)/2)))) / (4 pi); lambda_0 = 1
    for every eta > 0. Only eigenvalue positivity is required, so no
    nonnegativity constraint is placed on k itself.
    """

    eta: float

    family = "CuiFreden"
    endpoint_singular = True

    def __post_init__(self) -> None:
        if not self.eta > 0:
            raise ParameterError(f"eta must be positive, got {self.eta}")

    def profile(self, z):
        return (1.0 + self.eta * (1.0 - 2.0 * np.log1p(np.sqrt((1.0 - z) / 2.0)))) / FOUR_PI

    def eigenvalue(self, l: int) -> float:
        if l == 0:
            return 1.0
        return self.eta / (l * (l + 1) * (2 * l + 1))


@dataclass(frozen=True, eq=False)
class Lebedev(KernelFamily):
    """Affine-in-sqrt((1-z)/2) kernel, eigenvalues eta/((4l^2-1)(2l+3)).

    Nonnegative on [-1, 1] exactly when 0 < eta <= 6, which is the range
    where it can double as a probability density.
    """

    eta: float

    family = "Lebedev"
    endpoint_singular = True

    def __post_init__(self) -> None:
        if not self.eta > 0:
            raise ParameterError(f"eta must be positive, got {self.eta}")

    def profile(self, z):
        const = 1.0 / FOUR_PI + self.eta / (12.0 * math.pi)
        return const - (self.eta / (8.0 * math.pi)) * np.sqrt((1.0 - z) / 2.0)

    def eigenvalue(self, l: int) -> float:
        if l == 0:
            return 1.0
        return self.eta / ((4 * l * l - 1) * (2 * l + 3))


@dataclass(frozen=True, eq=False)
class LegendreGen(KernelFamily):
    """Generating-function kernel 1/(4 pi sqrt(1 - 2 z rho + rho^2)).

    Exponentially decaying eigenvalues rho^l / (2l + 1); rho in (0, 1)
    controls the spread.
    """

    rho: float

    family = "LegendreGen"

    def __post_init__(self) -> None:
        if not 0.0 < self.rho < 1.0:
            raise ParameterError(f"rho must lie in (0, 1), got {self.rho}")

    def profile(self, z):
        return 1.0 / (FOUR_PI * np.sqrt(1.0 - 2.0 * z * self.rho + self.rho**2))

    def eigenvalue(self, l: int) -> float:
        return self.rho**l / (2 * l + 1)


@dataclass(frozen=True, eq=False)
class LegendreGenDeriv(KernelFamily):
    """First rho-derivative of the generating-function kernel plus a
    constant term c0 > 0 that fills the degree-0 gap.

    k(z) = (c0 + (z - rho)/(1 - 2 rho z + rho^2)^{3/2}) / (4 pi), with
    lambda_0 = c0 and lambda_l = l rho^{l-1} / (2l + 1) for l >= 1.
    """

    rho: float
    c0: float = 1.0

    family = "LegendreGenDeriv"

    def __post_init__(self) -> None:
        if not 0.0 < self.rho < 1.0:
            raise ParameterError(f"rho must lie in (0, 1), got {self.rho}")
        if not self.c0 > 0:
            raise ParameterError(f"c0 must be positive, got {self.c0}")

    def profile(self, z):
        denom = (1.0 - 2.0 * self.rho * z + self.rho**2) ** 1.5
        return (self.c0 + (z - self.rho) / denom) / FOUR_PI

    def eigenvalue(self, l: int) -> float:
        if l == 0:
            return self.c0
        return l * self.rho ** (l - 1) / (2 * l + 1)


@dataclass(frozen=True, eq=False)
class AltGen(KernelFamily):
    """Exponential-Bessel kernel e^{rho z} J_0(rho sqrt(1 - z^2)) / (4 pi).

    Super-exponentially decaying eigenvalues rho^l / ((2l + 1) l!), so the
    square-summability condition holds for every rho > 0.
    """

    rho: float

    family = "AltGen"

    def __post_init__(self) -> None:
        if not self.rho > 0:
            raise ParameterError(f"rho must be positive, got {self.rho}")

    def profile(self, z):
        return np.exp(self.rho * z) * bessel_j0(self.rho * np.sqrt(1.0 - z * z)) / FOUR_PI

    def eigenvalue(self, l: int) -> float:
        if l <= 170:
            return self.rho**l / ((2 * l + 1) * math.factorial(l))
        # factorial overflows double beyond 170!; log form underflows to 0
        # gracefully instead
        return math.exp(l * math.log(self.rho) - math.lgamma(l + 1.0)) / (2 * l + 1)


@lru_cache(maxsize=64)
def _vmf_ratio_table(kappa: float, l_max: int) -> np.ndarray:
    out = bessel_i_half_ratios(kappa, l_max)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class VonMisesFisher(KernelFamily):
    """Spherical analogue of the Gaussian: k(z) = kappa e^{kappa z} / (4 pi sinh kappa).

    Evaluated as kappa e^{kappa (z - 1)} / (2 pi (1 - e^{-2 kappa})) so no
    intermediate exceeds e^0 and kappa = 100 stays finite. Eigenvalues are
    the Bessel ratios I_{l+1/2}(kappa)/I_{1/2}(kappa), obtained by backward
    recurrence; the textbook forward recursion loses all accuracy for
    l > kappa and is kept only as a validation identity. kappa = 0 is
    excluded: it would zero every eigenvalue above degree 0.
    """

    kappa: float

    family = "VonMisesFisher"

    def __post_init__(self) -> None:
        if not self.kappa > 0:
            raise ParameterError(f"kappa must be positive, got {self.kappa}")

    def profile(self, z):
        k = self.kappa
        return k * np.exp(k * (z - 1.0)) / (2.0 * math.pi * -np.expm1(-2.0 * k))

    def eigenvalue(self, l: int) -> float:
        return float(_vmf_ratio_table(self.kappa, max(l, 8))[l])

    def eigenvalue_array(self, l_max: int) -> np.ndarray:
        return np.array(_vmf_ratio_table(self.kappa, l_max)[: l_max + 1])


def vmf_eigenvalues(kappa: float, l_max: int) -> EigenvalueSequence:
    """Eigenvalue sequence of the von Mises-Fisher kernel up to l_max."""
    if kappa <= 0:
        raise ParameterError(f"kappa must be positive, got {kappa}")
    return EigenvalueSequence(bessel_i_half_ratios(kappa, l_max))


_FAMILIES: dict[str, type[KernelFamily]] = {
    cls.family: cls
    for cls in (CuiFreden, Lebedev, LegendreGen, LegendreGenDeriv, AltGen, VonMisesFisher)
}

_ALIASES = {
    "cuifreden": "CuiFreden",
    "cui-freden": "CuiFreden",
    "cui": "CuiFreden",
    "lebedev": "Lebedev",
    "legendregen": "LegendreGen",
    "leggen": "LegendreGen",
    "legendregenderiv": "LegendreGenDeriv",
    "leggen-deriv": "LegendreGenDeriv",
    "altgen": "AltGen",
    "vonmisesfisher": "VonMisesFisher",
    "von-mises-fisher": "VonMisesFisher",
    "vmf": "VonMisesFisher",
}


def kernel_from_dict(data: dict) -> KernelFamily:
    """Inverse of KernelFamily.to_dict()."""
    try:
        cls = _FAMILIES[data["family"]]
        params = {k: float(v) for k, v in data.get("params", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise ParameterError(f"malformed kernel description: {data!r}") from exc
    try:
        return cls(**params)
    except TypeError as exc:
        raise ParameterError(f"bad parameters for {cls.family}: {params}") from exc


def parse_kernel(text: str) -> KernelFamily:
    """Parse either a JSON object or a shorthand like 'leggen:rho=0.5'.

    Shorthand is name[:key=value[,key=value...]] with the family name
    case-insensitive (aliases: cui, leggen, leggen-deriv, altgen, vmf).
    """
    text = text.strip()
    if text.startswith("{"):
        try:
            return kernel_from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParameterError(f"invalid kernel JSON: {exc}") from exc
    name, _, rest = text.partition(":")
    family = _ALIASES.get(name.strip().lower())
    if family is None:
        raise ParameterError(f"unknown kernel family {name!r}")
    params: dict[str, float] = {}
    if rest.strip():
        for item in rest.split(","):
            key, sep, value = item.partition("=")
            if not sep:
                raise ParameterError(f"expected key=value, got {item!r}")
            try:
                params[key.strip()] = float(value)
            except ValueError as exc:
                raise ParameterError(f"non-numeric value in {item!r}") from exc
    return kernel_from_dict({"family": family, "params": params})
