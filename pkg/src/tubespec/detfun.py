"""Boundary forms and the scaled characteristic determinant.

An eigenvalue is a zero of the 4x4 determinant obtained by applying the four
lambda-affine boundary forms to the exponential fundamental system.  Raw
entries span hundreds of orders of magnitude, so the determinant is computed
from the anchored basis with every row divided by its largest entry; the
removed factors are tracked so that

    true determinant = value * exp(logscale)

holds exactly, with ``logscale`` real.  Phases of the removed complex column
anchors are folded back into ``value``, which keeps the scaled determinant
analytic in lambda (away from anchor switches) and makes argument-principle
counts of ``value`` identical to those of the true determinant.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .charbasis import characteristic_roots_many, quartic_coeffs_many
from .errors import ConfluentBasis, NotAnEigenvalue
from .model import ProblemSpec

__all__ = [
    "BoundaryForm",
    "CharDetValue",
    "EigenfunctionSample",
    "boundary_rows",
    "char_det",
    "char_det_many",
    "char_det_derivative",
    "local_scale",
    "eigenfunction",
]

#: lambda perturbation policy for (near-)confluent exponents
_PERTURB_DIR = cmath.exp(1j * np.pi / 7)
_PERTURB_REL = 1e-8
_CONFLUENT_RETRIES = 3


@dataclass(frozen=True)
class BoundaryForm:
    """One boundary row: (coeffs0 + lambda*coeffs1) . (w, w', w'', w''') at an end."""

    endpoint: int  # 0 or 1
    coeffs0: np.ndarray  # (4,) complex
    coeffs1: np.ndarray  # (4,) complex

    def weights(self, lam: complex) -> np.ndarray:
        return self.coeffs0 + lam * self.coeffs1


def _end_forms(end, endpoint: int):
    """The two rows contributed by one end, in the variant's natural order."""
    z = np.zeros(4)

    def row(c0, c1=None):
        return BoundaryForm(endpoint, np.asarray(c0, dtype=complex),
                            np.asarray(z if c1 is None else c1, dtype=complex))

    if end.variant == "generalized":
        k1, k2, k3, k4 = end.k
        sgn = 1.0 if endpoint == 0 else -1.0
        # moment row:  w'' -/+ (k1 + lambda k2) w' = 0   (sign flips at s=1)
        # shear row:   w''' +/- (k3 + lambda k4) w  = 0
        return [
            row([0.0, -sgn * k1, 1.0, 0.0], [0.0, -sgn * k2, 0.0, 0.0]),
            row([sgn * k3, 0.0, 0.0, 1.0], [sgn * k4, 0.0, 0.0, 0.0]),
        ]
    if end.variant == "clamped":
        return [row([1.0, 0.0, 0.0, 0.0]), row([0.0, 1.0, 0.0, 0.0])]
    if end.variant == "free":
        return [row([0.0, 0.0, 1.0, 0.0]), row([0.0, 0.0, 0.0, 1.0])]
    if end.variant == "hinged":
        return [row([1.0, 0.0, 0.0, 0.0]), row([0.0, 0.0, 1.0, 0.0])]
    if end.variant == "guided":
        return [row([0.0, 1.0, 0.0, 0.0]), row([0.0, 0.0, 0.0, 1.0])]
    raise ValueError(f"unknown end variant {end.variant!r}")


def boundary_rows(lam: complex, spec: ProblemSpec):
    """The four boundary forms of the spec; lambda is accepted for signature
    symmetry with the evaluation routines (the forms themselves are
    lambda-affine and returned unevaluated)."""
    del lam
    return _end_forms(spec.end0, 0) + _end_forms(spec.end1, 1)


@dataclass(frozen=True)
class CharDetValue:
    """Scaled characteristic determinant; true value = value * exp(logscale)."""

    value: complex
    logscale: float

    def rescaled(self, ref_logscale: float) -> complex:
        """The value expressed at a caller-chosen reference scale."""
        return self.value * np.exp(self.logscale - ref_logscale)


def _boundary_matrix_many(lams, spec, mu, anchor):
    """Assemble anchored boundary matrices for a batch of lambdas.

    Returns (B (K,4,4), row_lognorm (K,4)); column m of B is scaled by
    exp(-mu_m * anchor_m) and every row is divided by its largest magnitude.
    """
    k = lams.shape[0]
    forms = boundary_rows(None, spec)
    powers = mu[:, None, :] ** np.arange(4)[None, :, None]  # (K, j, m)
    b = np.empty((k, 4, 4), dtype=complex)
    for i, f in enumerate(forms):
        w = f.coeffs0[None, :, None] + lams[:, None, None] * f.coeffs1[None, :, None]
        expfac = np.exp(mu * (f.endpoint - anchor))  # (K, m)
        b[:, i, :] = (w * powers).sum(axis=1) * expfac
    rn = np.abs(b).max(axis=2)
    rn = np.where(rn == 0.0, 1.0, rn)
    b /= rn[:, :, None]
    return b, np.log(rn)


def char_det_many(lams, spec: ProblemSpec):
    """Vectorized scaled determinant over an array of lambdas.

    Returns (values (K,) complex, logscales (K,) float).  Confluent points
    follow the perturbation policy (fixed direction, relative size 1e-8).
    """
    lams = np.asarray(lams, dtype=complex).ravel()
    p = spec.physical
    work = lams.copy()
    a2, a1, a0 = quartic_coeffs_many(work, p)
    mu, confluent, anchor = characteristic_roots_many(a2, a1, a0)
    for attempt in range(_CONFLUENT_RETRIES):
        if not confluent.any():
            break
        bump = _PERTURB_REL * (10.0 ** attempt) * (1.0 + np.abs(work)) * _PERTURB_DIR
        work = np.where(confluent, work + bump, work)
        a2, a1, a0 = quartic_coeffs_many(work, p)
        mu2, conf2, anch2 = characteristic_roots_many(a2, a1, a0)
        mu = np.where(confluent[:, None], mu2, mu)
        anchor = np.where(confluent[:, None], anch2, anchor)
        confluent = confluent & conf2
    if confluent.any():
        raise ConfluentBasis("confluent basis persisted through perturbation retries")

    b, row_lognorm = _boundary_matrix_many(work, spec, mu, anchor)
    sign, logabs = np.linalg.slogdet(b)
    col = (mu * anchor).sum(axis=1)  # complex removed column factor
    values = sign * np.exp(logabs) * np.exp(1j * col.imag)
    values = np.where(np.isfinite(logabs), values, 0.0 + 0.0j)
    logscales = row_lognorm.sum(axis=1) + col.real
    return values, logscales


def char_det(lam: complex, spec: ProblemSpec) -> CharDetValue:
    """Scaled characteristic determinant at one lambda."""
    v, ls = char_det_many([lam], spec)
    return CharDetValue(complex(v[0]), float(ls[0]))


def char_det_derivative(lam: complex, spec: ProblemSpec, h: float | None = None) -> complex:
    """Central-difference derivative, expressed at char_det(lam)'s logscale.

    The ratio char_det(lam).value / char_det_derivative(lam) is then a
    scale-consistent Newton step.
    """
    lam = complex(lam)
    if h is None:
        h = 1e-6 * (1.0 + abs(lam))
    ref = char_det(lam, spec).logscale
    vp = char_det(lam + h, spec)
    vm = char_det(lam - h, spec)
    return (vp.rescaled(ref) - vm.rescaled(ref)) / (2.0 * h)


def local_scale(lam: complex, spec: ProblemSpec, radius_rel: float = 0.12, npts: int = 8) -> float:
    """Typical |scaled determinant| near lam: max over a probe circle.

    Used to normalize residual thresholds; the max over the circle is robust
    against the probe touching other zeros.  Probe points falling inside the
    exclusion disk around -1/alpha are dropped.
    """
    from .model import exclusion_radius

    lam = complex(lam)
    r = radius_rel * (1.0 + abs(lam))
    probes = lam + r * np.exp(2j * np.pi * np.arange(npts) / npts)
    alpha = spec.physical.alpha
    keep = np.abs(probes + 1.0 / alpha) > 1.5 * exclusion_radius(alpha)
    if keep.any():
        probes = probes[keep]
    else:
        probes = lam + 3.0 * exclusion_radius(alpha) * np.exp(2j * np.pi * np.arange(npts) / npts)
    v, _ = char_det_many(probes, spec)
    return float(np.abs(v).max())


@dataclass(frozen=True)
class EigenfunctionSample:
    """Null-direction coefficients and grid samples of an eigenfunction."""

    a: np.ndarray  # (4,) coefficients of the anchored basis columns
    grid: np.ndarray  # (n,) points in [0, 1]
    w_values: np.ndarray  # (n,) complex, normalized to max |w| = 1
    residual: float  # sigma_min / sigma_max of the boundary matrix


def eigenfunction(lam_star: complex, spec: ProblemSpec, grid_size: int = 201) -> EigenfunctionSample:
    """Reconstruct w at an accepted eigenvalue from the smallest singular direction."""
    lam = np.asarray([complex(lam_star)])
    p = spec.physical
    a2, a1, a0 = quartic_coeffs_many(lam, p)
    mu, confluent, anchor = characteristic_roots_many(a2, a1, a0)
    if confluent[0]:
        raise ConfluentBasis("eigenfunction at a confluent basis point")
    b, _ = _boundary_matrix_many(lam, spec, mu, anchor)
    _, svals, vh = np.linalg.svd(b[0])
    residual = float(svals[-1] / svals[0])
    if residual > 1e-6:
        raise NotAnEigenvalue(f"singular-value residual {residual:.2e} exceeds 1e-6 at {lam_star}")
    a = np.conj(vh[-1])
    grid = np.linspace(0.0, 1.0, grid_size)
    w = np.zeros(grid_size, dtype=complex)
    for m in range(4):
        w += a[m] * np.exp(mu[0, m] * (grid - anchor[0, m]))
    peak = np.abs(w).max()
    scale = 1.0 / peak if peak > 0 else 1.0
    return EigenfunctionSample(a * scale, grid, w * scale, residual)
