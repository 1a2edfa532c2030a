"""Problem definition: physical parameters, end conditions, sector constants,
and the bijection between the eigenvalue parameter lambda and its quartic
sector representative rho (lambda = alpha * rho**4).

Everything here is an immutable value object; all functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BetaOutOfRange,
    ExcludedPoint,
    NegativeParameter,
    NonPositiveAlpha,
    ValidationError,
)

__all__ = [
    "PhysicalParams",
    "EndCondition",
    "ProblemSpec",
    "SectorConstants",
    "SpectralPoint",
    "SECTOR",
    "validate",
    "exclusion_radius",
    "map_lambda_rho",
    "rho_to_lambda",
]


@dataclass(frozen=True)
class PhysicalParams:
    """The quadruple (alpha, beta, eta, delta) of the tube model.

    alpha > 0 is the viscoelastic damping coefficient, beta in [0, 1) the
    density ratio parameter, eta >= 0 the squared flow speed scale, and
    delta >= 0 the external viscous damping.  beta = 0 is admitted so the
    classical-beam regressions are expressible.
    """

    alpha: float
    beta: float = 0.0
    eta: float = 0.0
    delta: float = 0.0

    def check(self):
        errs = []
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            errs.append(("alpha", NonPositiveAlpha("alpha must be > 0")))
        if not (math.isfinite(self.beta) and 0.0 <= self.beta < 1.0):
            errs.append(("beta", BetaOutOfRange("beta must lie in [0, 1)")))
        if not (math.isfinite(self.eta) and self.eta >= 0.0):
            errs.append(("eta", NegativeParameter("eta must be >= 0")))
        if not (math.isfinite(self.delta) and self.delta >= 0.0):
            errs.append(("delta", NegativeParameter("delta must be >= 0")))
        return errs


#: canonical variant names for tube ends
_CANONICAL = ("clamped", "free", "hinged", "guided")


@dataclass(frozen=True)
class EndCondition:
    """Boundary condition at one end of the tube.

    ``variant`` is either ``"generalized"`` with the four nonnegative
    parameters (kA, kB, kC, kD) -- which play the role of (k1, k2, k3, k4)
    for the end in question -- or one of the canonical variants
    ``clamped`` / ``free`` / ``hinged`` / ``guided``, which carry no
    parameters.
    """

    variant: str
    k: tuple = field(default=())

    @staticmethod
    def generalized(k1, k2, k3, k4) -> "EndCondition":
        return EndCondition("generalized", (float(k1), float(k2), float(k3), float(k4)))

    @staticmethod
    def clamped() -> "EndCondition":
        return EndCondition("clamped")

    @staticmethod
    def free() -> "EndCondition":
        return EndCondition("free")

    @staticmethod
    def hinged() -> "EndCondition":
        return EndCondition("hinged")

    @staticmethod
    def guided() -> "EndCondition":
        return EndCondition("guided")

    def check(self, label: str):
        errs = []
        if self.variant == "generalized":
            if len(self.k) != 4:
                errs.append((label, NegativeParameter("generalized end needs four k parameters")))
            else:
                for j, kj in enumerate(self.k, start=1):
                    if not (math.isfinite(kj) and kj >= 0.0):
                        errs.append(
                            (f"{label}.k{j}", NegativeParameter("k parameters must be finite and >= 0"))
                        )
        elif self.variant in _CANONICAL:
            if self.k:
                errs.append((label, NegativeParameter(f"{self.variant} end carries no parameters")))
        else:
            errs.append((label, NegativeParameter(f"unknown variant {self.variant!r}")))
        return errs


@dataclass(frozen=True)
class ProblemSpec:
    """A complete problem instance: physical quadruple plus both ends."""

    physical: PhysicalParams
    end0: EndCondition
    end1: EndCondition


def validate(raw: ProblemSpec) -> ProblemSpec:
    """Check every type invariant; raise ValidationError listing all violations."""
    errs = []
    errs += raw.physical.check()
    errs += raw.end0.check("end0")
    errs += raw.end1.check("end1")
    if errs:
        raise ValidationError([(f, str(e)) for f, e in errs])
    return raw


# ---------------------------------------------------------------------------
# sector constants


@dataclass(frozen=True)
class SectorConstants:
    """The four fourth roots of -1 ordering the exponential growth rates.

    For every rho with arg rho in [pi/8, pi/4] the real parts of rho*omega_m
    are nondecreasing in m, so omega_1 labels the fastest-decaying solution
    on [0, 1] and omega_4 the fastest-growing one.
    """

    omega: tuple = (
        complex(math.cos(3 * math.pi / 4), math.sin(3 * math.pi / 4)),
        complex(math.cos(5 * math.pi / 4), math.sin(5 * math.pi / 4)),
        complex(math.cos(math.pi / 4), math.sin(math.pi / 4)),
        complex(math.cos(7 * math.pi / 4), math.sin(7 * math.pi / 4)),
    )
    sector_arg_range: tuple = (math.pi / 8, math.pi / 4)

    @property
    def omega1(self):
        return self.omega[0]

    @property
    def omega2(self):
        return self.omega[1]

    @property
    def omega3(self):
        return self.omega[2]

    @property
    def omega4(self):
        return self.omega[3]


SECTOR = SectorConstants()


# ---------------------------------------------------------------------------
# lambda <-> rho


def exclusion_radius(alpha: float) -> float:
    """Radius of the disk around lambda = -1/alpha removed from all searches.

    -1/alpha is continuous spectrum, not an eigenvalue; root finding must not
    stall on the accumulation point.
    """
    return 1e-6 * (1.0 + 1.0 / alpha)


def _check_excluded(lam: complex, alpha: float):
    if abs(lam + 1.0 / alpha) < exclusion_radius(alpha):
        raise ExcludedPoint(f"lambda={lam} inside the exclusion disk around {-1.0/alpha}")


@dataclass(frozen=True)
class SpectralPoint:
    """An eigenvalue parameter with its canonical quartic representative.

    rho**4 * alpha = lambda.  For Im lambda >= 0 the representative has
    arg rho in [0, pi/4]; for Im lambda < 0 it is the conjugate of the
    representative of conj(lambda).
    """

    lam: complex
    rho: complex


def map_lambda_rho(lam: complex, alpha: float) -> SpectralPoint:
    """Canonical branch of rho = (lambda/alpha)**(1/4).

    The principal quartic root is taken for Im lambda >= 0 (mapping the
    closed upper half-plane onto the sector 0 <= arg rho <= pi/4); the lower
    half-plane is reached by conjugation, matching the mirror symmetry of
    the spectrum.
    """
    lam = complex(lam)
    _check_excluded(lam, alpha)
    if lam.imag < 0.0:
        return SpectralPoint(lam, np.conj(map_lambda_rho(np.conj(lam), alpha).rho))
    z = lam / alpha
    r = abs(z)
    if r == 0.0:
        return SpectralPoint(lam, 0j)
    theta = math.atan2(z.imag, z.real)  # in [0, pi] for Im >= 0
    rho = r ** 0.25 * complex(math.cos(theta / 4.0), math.sin(theta / 4.0))
    return SpectralPoint(lam, rho)


def rho_to_lambda(rho: complex, alpha: float) -> complex:
    """Inverse map lambda = alpha * rho**4 (total, no branch bookkeeping)."""
    rho = complex(rho)
    return alpha * rho ** 4
