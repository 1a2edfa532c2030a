"""Fundamental systems of the fourth-order pencil ODE.

For each admissible lambda the ODE

    w'''' + a2 w'' + a1 w' + a0 w = 0,
    a2 = eta/(1+alpha*lambda),
    a1 = 2*lambda*beta*sqrt(eta)/(1+alpha*lambda),
    a0 = (delta*lambda + lambda**2)/(1+alpha*lambda),

has the exponential fundamental system exp(mu_m * s) with mu_m the roots of
the characteristic quartic.  The basis is evaluated in anchored form
mu^j * exp(mu*(s - sigma)), sigma in {0, 1} chosen by the sign of Re mu, so
no entry can overflow on [0, 1]; the removed column factors are tracked.

The module also provides the large-|rho| asymptotic family (the Birkhoff
bracket form) and a diagnostic comparing exact exponents against rho*omega_m.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfluentBasis, ExcludedPoint, NoConvergence
from .model import SECTOR, PhysicalParams, rho_to_lambda

__all__ = [
    "QuarticCoeffs",
    "FundamentalBasis",
    "BasisEval",
    "BirkhoffBasis",
    "quartic_coeffs",
    "quartic_coeffs_many",
    "characteristic_roots",
    "characteristic_roots_many",
    "basis_eval",
    "birkhoff_basis",
    "lemma_diagnostic",
    "LemmaDiagnostic",
]

#: residual bound defining an acceptable root: |p(mu)| <= RESIDUAL_TOL * max(1, |mu|^4)
RESIDUAL_TOL = 1e-10
#: roots closer than CONFLUENCE_TOL * max(1+|mu|) flag the basis as confluent
CONFLUENCE_TOL = 1e-6
_POLISH_ITERS = 50


@dataclass(frozen=True)
class QuarticCoeffs:
    """Coefficients of mu^4 + a2 mu^2 + a1 mu + a0 (the mu^3 term vanishes)."""

    a2: complex
    a1: complex
    a0: complex


def quartic_coeffs(lam: complex, p: PhysicalParams) -> QuarticCoeffs:
    """Characteristic-quartic coefficients at a single lambda."""
    a2, a1, a0 = quartic_coeffs_many(np.asarray([lam], dtype=complex), p)
    return QuarticCoeffs(complex(a2[0]), complex(a1[0]), complex(a0[0]))


def quartic_coeffs_many(lams: np.ndarray, p: PhysicalParams):
    """Vectorized quartic coefficients; raises ExcludedPoint near -1/alpha."""
    lams = np.asarray(lams, dtype=complex)
    denom = 1.0 + p.alpha * lams
    from .model import exclusion_radius

    if np.any(np.abs(lams + 1.0 / p.alpha) < exclusion_radius(p.alpha)):
        raise ExcludedPoint("quartic coefficients requested inside the exclusion disk")
    sq = np.sqrt(p.eta)
    a2 = p.eta / denom
    a1 = 2.0 * lams * p.beta * sq / denom
    a0 = (p.delta * lams + lams * lams) / denom
    return a2, a1, a0


@dataclass(frozen=True)
class FundamentalBasis:
    """Four characteristic exponents with anchors and a confluence flag."""

    mu: np.ndarray  # (4,) complex
    confluent: bool
    anchor: np.ndarray  # (4,) float, sigma_m in {0, 1}

    @property
    def column_logscale(self) -> complex:
        """Sum of the removed per-column exponents mu_m * sigma_m."""
        return complex(np.sum(self.mu * self.anchor))


def _quartic_residual(mu, a2, a1, a0):
    return ((mu * mu + a2) * mu + a1) * mu + a0


def _quartic_dresidual(mu, a2, a1):
    return (4.0 * mu * mu + 2.0 * a2) * mu + a1


def characteristic_roots_many(a2, a1, a0):
    """Roots of a batch of quartics via companion eigenvalues plus polishing.

    Returns (mu (K,4) sorted by (Re, Im), confluent (K,) bool, anchor (K,4)).
    """
    a2 = np.atleast_1d(np.asarray(a2, dtype=complex))
    a1 = np.atleast_1d(np.asarray(a1, dtype=complex))
    a0 = np.atleast_1d(np.asarray(a0, dtype=complex))
    k = a2.shape[0]
    comp = np.zeros((k, 4, 4), dtype=complex)
    comp[:, 1, 0] = 1.0
    comp[:, 2, 1] = 1.0
    comp[:, 3, 2] = 1.0
    comp[:, 0, 3] = -a0
    comp[:, 1, 3] = -a1
    comp[:, 2, 3] = -a2
    mu = np.linalg.eigvals(comp)

    # Newton polishing, vectorized over all roots at once; oversized steps
    # (stationary points near repeated roots) are suppressed
    A2 = a2[:, None]
    A1 = a1[:, None]
    A0 = a0[:, None]
    for _ in range(_POLISH_ITERS):
        scale = np.maximum(1.0, np.abs(mu) ** 4)
        res = _quartic_residual(mu, A2, A1, A0)
        bad = np.abs(res) > RESIDUAL_TOL * scale
        if not bad.any():
            break
        dres = _quartic_dresidual(mu, A2, A1)
        denom = np.where(dres == 0, 1.0, dres)
        step = np.where(bad & (dres != 0), res / denom, 0.0)
        step = np.where(np.abs(step) > 0.5 * (1.0 + np.abs(mu)), 0.0, step)
        if not step.any():
            break
        mu = mu - step

    order = np.lexsort((mu.imag, mu.real), axis=1)
    mu = np.take_along_axis(mu, order, axis=1)

    diff = np.abs(mu[:, :, None] - mu[:, None, :])
    diff[:, np.arange(4), np.arange(4)] = np.inf
    gap = diff.min(axis=(1, 2))
    confluent = gap < CONFLUENCE_TOL * (1.0 + np.abs(mu)).max(axis=1)
    anchor = (mu.real > 0.0).astype(float)

    scale = np.maximum(1.0, np.abs(mu) ** 4)
    res = np.abs(_quartic_residual(mu, a2[:, None], a1[:, None], a0[:, None]))
    bad_rows = (res > RESIDUAL_TOL * scale).any(axis=1)
    if np.any(bad_rows & ~confluent):
        raise NoConvergence("quartic root polishing failed after 50 iterations")
    return mu, confluent, anchor


def characteristic_roots(c: QuarticCoeffs) -> FundamentalBasis:
    """Exact exponents of the quartic, polished to the residual invariant."""
    mu, confluent, anchor = characteristic_roots_many([c.a2], [c.a1], [c.a0])
    return FundamentalBasis(mu[0], bool(confluent[0]), anchor[0])


@dataclass(frozen=True)
class BasisEval:
    """Anchored basis values: entry (j, m) is mu_m^j * exp(mu_m*(s - sigma_m)).

    True (unanchored) column values are recovered by multiplying column m
    with exp(logscale[m]) up to the anchored phase; only magnitudes of the
    removed factors are recorded here.
    """

    values: np.ndarray  # (4, 4) complex, rows = derivative order 0..3
    logscale: np.ndarray  # (4,) float, Re(mu_m) * sigma_m


def basis_eval(b: FundamentalBasis, s: float) -> BasisEval:
    if b.confluent:
        raise ConfluentBasis("basis has (near-)repeated exponents; perturb lambda and retry")
    powers = b.mu[None, :] ** np.arange(4)[:, None]
    values = powers * np.exp(b.mu * (s - b.anchor))[None, :]
    return BasisEval(values, b.mu.real * b.anchor)


@dataclass(frozen=True)
class BirkhoffBasis:
    """First-order asymptotic bracket 1 + W_m(s)/rho of the solution family.

    W_m(s) = (1/4) * sqrt(1/alpha) * (delta - 1/alpha) * omega_m * s.
    """

    rho: complex
    brackets: np.ndarray  # (4,) complex at the requested s


def birkhoff_basis(rho: complex, s: float, p: PhysicalParams) -> BirkhoffBasis:
    if abs(rho) < 2.0:
        raise ValueError("birkhoff_basis is an asymptotic form; requires |rho| >= 2")
    omega = np.asarray(SECTOR.omega)
    w = 0.25 * np.sqrt(1.0 / p.alpha) * (p.delta - 1.0 / p.alpha) * omega * s
    return BirkhoffBasis(complex(rho), 1.0 + w / rho)


# ---------------------------------------------------------------------------
# diagnostic: exact exponents vs the asymptotic family rho*omega_m


@dataclass(frozen=True)
class LemmaDiagnostic:
    """Gap table |mu_m - rho*omega_m| over a log-spaced |rho| sweep.

    ``exponent[m]`` is the fitted decay power p in gap ~ coeff * |rho|^-p and
    ``coefficient[m]`` the accompanying magnitude, both from a least-squares
    line through log(gap) vs log|rho|.
    """

    abs_rho: np.ndarray  # (K,)
    gaps: np.ndarray  # (K, 4)
    exponent: np.ndarray  # (4,)
    coefficient: np.ndarray  # (4,)

    def rows(self):
        """Iterate CSV rows (abs_rho, m, gap, fitted_exponent)."""
        for i, r in enumerate(self.abs_rho):
            for m in range(4):
                yield float(r), m + 1, float(self.gaps[i, m]), float(self.exponent[m])


def lemma_diagnostic(p: PhysicalParams, abs_rho=None, arg_rho=np.pi / 4 * 0.75) -> LemmaDiagnostic:
    """Measure how fast the exact exponents approach rho*omega_m.

    The sweep stays on a fixed ray inside the sector; each exact root is
    matched to its nearest asymptotic partner.  Requires |rho| >= 2
    throughout (asymptotic regime guard).
    """
    if abs_rho is None:
        abs_rho = np.geomspace(10.0, 1e3, 13)
    abs_rho = np.asarray(abs_rho, dtype=float)
    if np.any(abs_rho < 2.0):
        raise ValueError("lemma_diagnostic requires |rho| >= 2")
    rhos = abs_rho * np.exp(1j * arg_rho)
    lams = np.asarray([rho_to_lambda(r, p.alpha) for r in rhos])
    a2, a1, a0 = quartic_coeffs_many(lams, p)
    mu, _, _ = characteristic_roots_many(a2, a1, a0)
    omega = np.asarray(SECTOR.omega)
    target = rhos[:, None] * omega[None, :]
    # nearest-exact-root match per asymptotic column
    dist = np.abs(mu[:, :, None] - target[:, None, :])
    gaps = dist.min(axis=1)

    logr = np.log(abs_rho)
    exponent = np.empty(4)
    coefficient = np.empty(4)
    floor = 1e-13 * (1.0 + abs_rho)
    for m in range(4):
        g = np.maximum(gaps[:, m], floor)
        slope, intercept = np.polyfit(logr, np.log(g), 1)
        exponent[m] = -slope
        coefficient[m] = np.exp(intercept)
    return LemmaDiagnostic(abs_rho, gaps, exponent, coefficient)
