"""RKHS computations: point expansions, inner products, operator powers.

Functions of the form f = sum_p alpha_p K(., y_p) are the native finite
representation in the space induced by a kernel. Their inner products can
be computed two independent ways: directly from kernel evaluations (the
Gram path) or from spherical-harmonic coefficients weighted by inverse
eigenvalues (the spectral path). Both are provided, along with the
orthonormal basis sqrt(lambda_l) Y_l^m, spectral operator powers, and
residual checks for the reproducing and eigenfunction properties.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    KernelMismatchError,
    SingularGramError,
    TruncationMismatchError,
)
from .kernels import EigenvalueSequence, KernelFamily, kernel_from_dict
from .special import (
    SphereRule,
    SphericalHarmonicIndex,
    UnitVector,
    sph_harm_flat,
    sph_harm_grid,
    sphere_rule,
)

__all__ = [
    "PointExpansion",
    "SHCoefficientVector",
    "RkhsSpace",
    "inner_product_gram",
    "sh_analysis",
    "inner_product_spectral",
    "basis_phi",
    "phi_coefficients",
    "apply_operator_power",
    "eigenfunction_residual",
    "reproducing_residual",
    "fit_interpolant",
]


@dataclass(frozen=True)
class PointExpansion:
    """f = sum_p coefficients[p] * K(., points[p]); P = 0 is the zero vector."""

    kernel: KernelFamily
    points: tuple[UnitVector, ...]
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coefficients, dtype=complex)
        points = tuple(self.points)
        if coeffs.ndim != 1 or coeffs.size != len(points):
            raise ValueError("points and coefficients must have matching length")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "points", points)

    @classmethod
    def zero(cls, kernel: KernelFamily) -> "PointExpansion":
        return cls(kernel, (), np.zeros(0, dtype=complex))

    @property
    def count(self) -> int:
        return len(self.points)

    def __call__(self, x: UnitVector) -> complex:
        """Evaluate f(x) = sum_p alpha_p k(x . y_p)."""
        if not self.points:
            return 0j
        dots = np.array([x.dot(p) for p in self.points])
        return complex(np.dot(self.coefficients, self.kernel.univariate(dots)))

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel.to_dict(),
            "points": [[p.theta, p.phi] for p in self.points],
            "coeffs": [[c.real, c.imag] for c in self.coefficients],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> "PointExpansion":
        kernel = kernel_from_dict(data["kernel"])
        points = tuple(UnitVector(t, p) for t, p in data["points"])
        coeffs = np.array([complex(re, im) for re, im in data["coeffs"]], dtype=complex)
        return cls(kernel, points, coeffs)


def _flat_index(l: int, m: int) -> int:
    return l * l + l + m


@dataclass(frozen=True)
class SHCoefficientVector:
    """Spherical-harmonic coefficients <f, Y_l^m> packed flat.

    Entry (l, m) sits at index l^2 + l + m; a truncation L holds
    (L + 1)^2 entries.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        size = values.size
        root = math.isqrt(size)
        if values.ndim != 1 or root * root != size or size == 0:
            raise ValueError("coefficient vector length must be a perfect square")
        if not np.all(np.isfinite(values)):
            raise ValueError("coefficients must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def truncation(self) -> int:
        return math.isqrt(self.values.size) - 1

    def entry(self, l: int, m: int) -> complex:
        SphericalHarmonicIndex(l, m)  # validates the pair
        if l > self.truncation:
            raise TruncationMismatchError(f"degree {l} beyond truncation {self.truncation}")
        return complex(self.values[_flat_index(l, m)])

    @classmethod
    def unit(cls, l_max: int, l: int, m: int, value: complex = 1.0) -> "SHCoefficientVector":
        """Vector with a single mass at (l, m)."""
        values = np.zeros((l_max + 1) ** 2, dtype=complex)
        values[_flat_index(l, m)] = value
        return cls(values)


@dataclass(frozen=True)
class RkhsSpace:
    """A kernel together with its validated eigenvalue sequence."""

    kernel: KernelFamily
    eigenvalues: EigenvalueSequence

    @classmethod
    def build(cls, kernel: KernelFamily, l_max: int | None = None) -> "RkhsSpace":
        return cls(kernel, kernel.eigenvalues(l_max))

    @property
    def truncation(self) -> int:
        return self.eigenvalues.truncation

    def per_entry_eigenvalues(self, l_max: int) -> np.ndarray:
        """lambda_l repeated over the 2l + 1 orders, flat up to l_max."""
        if l_max > self.truncation:
            raise TruncationMismatchError(
                f"requested degree {l_max} beyond space truncation {self.truncation}"
            )
        lam = self.eigenvalues.values[: l_max + 1]
        return np.repeat(lam, 2 * np.arange(l_max + 1) + 1)


def inner_product_gram(f: PointExpansion, g: PointExpansion) -> complex:
    """<f, g> from kernel evaluations: sum_pq alpha_p conj(beta_q) K(x_q, y_p).

    Conjugate-symmetric, and <f, f> is real and non-negative because the
    Gram matrix is positive semi-definite.
    """
    if f.kernel != g.kernel:
        raise KernelMismatchError("expansions use different kernels")
    if not f.points or not g.points:
        return 0j
    ycart = np.array([p.cartesian for p in f.points])
    xcart = np.array([p.cartesian for p in g.points])
    dots = np.clip(xcart @ ycart.T, -1.0, 1.0)  # (Q, P)
    gram = f.kernel.univariate(dots)
    return complex(np.conj(g.coefficients) @ gram @ f.coefficients)


def sh_analysis(f: PointExpansion, l_max: int) -> SHCoefficientVector:
    """Spherical-harmonic coefficients of a point expansion.

    <f, Y_l^m> = sum_p alpha_p lambda_l conj(Y_l^m(y_p)) -- exact given the
    closed-form eigenvalues, no quadrature involved.
    """
    lam = f.kernel.eigenvalue_array(l_max)
    per_entry = np.repeat(lam, 2 * np.arange(l_max + 1) + 1)
    out = np.zeros((l_max + 1) ** 2, dtype=complex)
    for alpha, point in zip(f.coefficients, f.points):
        out += alpha * np.conj(sph_harm_flat(l_max, point))
    return SHCoefficientVector(out * per_entry)


def inner_product_spectral(
    f_hat: SHCoefficientVector,
    g_hat: SHCoefficientVector,
    space: RkhsSpace,
) -> complex:
    """<f, g> in the space from Fourier coefficients: sum F conj(G) / lambda."""
    if f_hat.truncation != g_hat.truncation:
        raise TruncationMismatchError(
            f"truncations differ: {f_hat.truncation} vs {g_hat.truncation}"
        )
    lam = space.per_entry_eigenvalues(f_hat.truncation)
    return complex(np.sum(f_hat.values * np.conj(g_hat.values) / lam))


def basis_phi(space: RkhsSpace, index: SphericalHarmonicIndex, x: UnitVector) -> complex:
    """Orthonormal basis function sqrt(lambda_l) Y_l^m(x) of the space."""
    if index.degree > space.truncation:
        raise TruncationMismatchError(
            f"degree {index.degree} beyond space truncation {space.truncation}"
        )
    lam = space.eigenvalues[index.degree]
    return math.sqrt(lam) * complex(
        sph_harm_flat(index.degree, x)[_flat_index(index.degree, index.order)]
    )


def phi_coefficients(f_hat: SHCoefficientVector, space: RkhsSpace) -> np.ndarray:
    """Coefficients <f, phi_l^m> in the space's orthonormal basis:
    the L2 coefficients divided by sqrt(lambda_l)."""
    lam = space.per_entry_eigenvalues(f_hat.truncation)
    return f_hat.values / np.sqrt(lam)


def apply_operator_power(
    f_hat: SHCoefficientVector, space: RkhsSpace, power: float
) -> SHCoefficientVector:
    """Entrywise lambda_l^power scaling: the spectral operator power.

    power = 1 is the kernel integral operator, power = +-1/2 the
    isometries between the sphere's L2 space and the RKHS, power = 0 the
    identity.
    """
    if power == 0:
        return f_hat
    lam = space.per_entry_eigenvalues(f_hat.truncation)
    return SHCoefficientVector(f_hat.values * lam**power)


def eigenfunction_residual(
    space: RkhsSpace,
    index: SphericalHarmonicIndex,
    samples: list[UnitVector],
    rule: SphereRule | None = None,
) -> float:
    """Max over samples of |(L_K Y_l^m)(x) - lambda_l Y_l^m(x)|.

    The integral operator is applied by product quadrature, so degrees
    beyond the rule's resolution alias and the residual will not be small;
    that failure mode is the caller's guard against under-resolution.
    """
    rule = rule or sphere_rule()
    l, m = index.degree, index.order
    lam = space.kernel.eigenvalue(l)
    harmonics = sph_harm_grid(l, m, rule.z_nodes, rule.phi_nodes)
    grid = rule.cartesian_grid()
    worst = 0.0
    for x in samples:
        dots = np.clip(grid @ x.cartesian, -1.0, 1.0)
        applied = rule.integrate(space.kernel.univariate(dots) * harmonics)
        expected = lam * complex(sph_harm_flat(l, x)[_flat_index(l, m)])
        worst = max(worst, abs(applied - expected))
    return worst


def reproducing_residual(
    space: RkhsSpace,
    f: PointExpansion,
    y: UnitVector,
    l_max: int | None = None,
) -> float:
    """|<f, K(., y)> - f(y)| with the inner product taken spectrally.

    K(., y) is represented as the single-point expansion with unit
    coefficient at y, so the check exercises the same machinery as any
    other inner product. Exact reproduction is truncation-limited.
    """
    l_max = space.truncation if l_max is None else l_max
    delta = PointExpansion(space.kernel, (y,), np.ones(1, dtype=complex))
    lhs = inner_product_spectral(sh_analysis(f, l_max), sh_analysis(delta, l_max), space)
    return abs(lhs - f(y))


def fit_interpolant(
    kernel: KernelFamily,
    points: list[UnitVector],
    values,
    ridge: float = 0.0,
) -> PointExpansion:
    """Solve (G + ridge I) alpha = values for the expansion through the data.

    G is the kernel Gram matrix of the points, Hermitian positive
    semi-definite for any admissible kernel; a positive ridge restores
    invertibility when points cluster. Raises SingularGramError when the
    regularized system is numerically singular.
    """
    if ridge < 0:
        raise ValueError(f"ridge must be non-negative, got {ridge}")
    points = list(points)
    values = np.asarray(values, dtype=complex)
    if values.ndim != 1 or values.size != len(points):
        raise ValueError("points and values must have matching length")
    if not points:
        return PointExpansion.zero(kernel)
    cart = np.array([p.cartesian for p in points])
    gram = kernel.univariate(np.clip(cart @ cart.T, -1.0, 1.0))
    system = gram + ridge * np.eye(len(points))
    spectrum = np.linalg.eigvalsh(system)
    if spectrum[-1] <= 0 or spectrum[0] <= spectrum[-1] * np.finfo(float).eps:
        raise SingularGramError(
            f"Gram system is numerically singular "
            f"(eigenvalue range [{spectrum[0]:.3e}, {spectrum[-1]:.3e}])"
        )
    alpha = np.linalg.solve(system.astype(complex), values)
    return PointExpansion(kernel, tuple(points), alpha)
