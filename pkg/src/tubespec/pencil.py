"""Independent oracle: Chebyshev collocation of the quadratic eigenvalue pencil.

Clearing the (1+alpha*lambda) denominator in the tube ODE gives

    lambda^2 w + lambda (alpha w'''' + 2 beta sqrt(eta) w' + delta w)
             + (w'''' + eta w'') = 0

with the four lambda-affine boundary rows substituted at the two collocation
rows nearest each endpoint.  Companion linearization with the stacking
[w, lambda*w] turns this into a dense generalized eigenvalue problem of
dimension 2(n+1), solved by QZ.  Collocation of unbounded pencils always
produces spurious eigenvalues, so results are double-filtered: agreement
between two resolutions and a characteristic-determinant residual check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .detfun import boundary_rows, char_det, local_scale
from .errors import ResolutionTooLow, SolverFailure
from .model import ProblemSpec, exclusion_radius

__all__ = ["ChebGrid", "QuadraticPencil", "OracleSpectrum", "chebdif", "build_pencil", "oracle_spectrum"]

#: resolution bump between the two filter passes
RES_STEP = 16
#: relative movement bound for the two-resolution filter
MOVE_TOL = 1e-6
#: scaled determinant residual bound for kept eigenvalues
DET_RESIDUAL_TOL = 1e-6


def chebdif(n: int, m: int):
    """Chebyshev point differentiation matrices of orders 1..m on [-1, 1].

    Classic Weideman--Reddy construction on the n+1 extrema points
    x_j = cos(j*pi/n) (descending), with the trigonometric-identity and
    flipping tricks for accuracy and the negative-sum trick on the diagonal.
    Returns (x, [D1, ..., Dm]).
    """
    if n < 1 or m < 1 or m > n:
        raise ValueError("need 1 <= m <= n")
    npts = n + 1
    n1 = npts // 2
    n2 = math.ceil(npts / 2)
    k = np.arange(npts)
    th = k * math.pi / n
    x = np.sin(math.pi * np.arange(n, -n - 2, -2) / (2.0 * n))

    t = np.tile(th / 2.0, (npts, 1))
    dx = 2.0 * np.sin(t.T + t) * np.sin(t.T - t)
    dx[n1:, :] = -np.flipud(np.fliplr(dx[:n2, :]))
    np.fill_diagonal(dx, 1.0)
    z = 1.0 / dx
    np.fill_diagonal(z, 0.0)

    c = scipy.linalg.toeplitz((-1.0) ** k)
    c[0, :] *= 2.0
    c[-1, :] *= 2.0
    c[:, 0] /= 2.0
    c[:, -1] /= 2.0

    mats = []
    d = np.eye(npts)
    for ell in range(1, m + 1):
        d = ell * z * (c * np.tile(np.diag(d)[:, None], (1, npts)) - d)
        np.fill_diagonal(d, -d.sum(axis=1) + np.diag(d))
        mats.append(d.copy())
    return x, mats


@dataclass(frozen=True)
class ChebGrid:
    """Collocation nodes on [0, 1] (ascending) with derivative matrices 1..4."""

    n: int
    nodes: np.ndarray  # (n+1,)
    diff: tuple  # diff[k-1] is the order-k matrix

    @staticmethod
    def build(n: int) -> "ChebGrid":
        x, mats = chebdif(n, 4)
        # s = (1 - x)/2 maps the descending extrema points to ascending [0, 1]
        nodes = (1.0 - x) / 2.0
        nodes[0] = 0.0
        nodes[-1] = 1.0
        scaled = tuple(((-2.0) ** k) * mats[k - 1] for k in range(1, 5))
        return ChebGrid(n, nodes, scaled)


@dataclass(frozen=True)
class QuadraticPencil:
    """Matrices of lambda^2 M2 + lambda C + K with boundary rows substituted."""

    K: np.ndarray
    C: np.ndarray
    M2: np.ndarray
    bc_rows: tuple  # indices of the four replaced rows
    grid: ChebGrid


def build_pencil(spec: ProblemSpec, n: int) -> QuadraticPencil:
    """Assemble the collocated pencil at polynomial degree n (n >= 16)."""
    if n < 16:
        raise ResolutionTooLow(f"collocation degree {n} < 16")
    p = spec.physical
    grid = ChebGrid.build(n)
    d1, d2, d3, d4 = grid.diff
    npts = n + 1
    eye = np.eye(npts)

    kmat = d4 + p.eta * d2
    cmat = p.alpha * d4 + 2.0 * p.beta * math.sqrt(p.eta) * d1 + p.delta * eye
    m2 = np.eye(npts)

    # boundary functionals: value and first three derivatives at each end
    funcs = {
        0: (eye[0], d1[0], d2[0], d3[0]),
        1: (eye[n], d1[n], d2[n], d3[n]),
    }
    forms = boundary_rows(None, spec)
    bc_rows = (0, 1, n - 1, n)
    placement = {0: forms[0], 1: forms[1], n - 1: forms[2], n: forms[3]}
    for row, form in placement.items():
        f0, f1, f2, f3 = funcs[form.endpoint]
        stack = np.vstack([f0, f1, f2, f3])
        kmat[row] = form.coeffs0.real @ stack
        cmat[row] = form.coeffs1.real @ stack
        m2[row] = 0.0
    return QuadraticPencil(kmat, cmat, m2, bc_rows, grid)


@dataclass(frozen=True)
class OracleSpectrum:
    """Collocation eigenvalues double-filtered for spuriousness.

    ``eigenvalues`` lists the finite candidates from the lower resolution;
    entries passing both filters are replaced by their (more accurate)
    higher-resolution partners and flagged in ``kept``.
    """

    eigenvalues: np.ndarray
    kept: np.ndarray
    n_used: tuple

    @property
    def kept_eigenvalues(self) -> np.ndarray:
        return self.eigenvalues[self.kept]


def _linearized_eigenvalues(pen: QuadraticPencil) -> np.ndarray:
    npts = pen.K.shape[0]
    a = np.zeros((2 * npts, 2 * npts))
    b = np.zeros_like(a)
    a[:npts, npts:] = np.eye(npts)
    a[npts:, :npts] = -pen.K
    a[npts:, npts:] = -pen.C
    b[:npts, :npts] = np.eye(npts)
    b[npts:, npts:] = pen.M2
    try:
        w = scipy.linalg.eig(a, b, right=False)
    except Exception as exc:  # pragma: no cover - LAPACK failure is exotic
        raise SolverFailure(str(exc)) from exc
    w = w[np.isfinite(w)]
    return w[np.abs(w) < 1e12]


def _snap_real(lams: np.ndarray) -> np.ndarray:
    snap = np.abs(lams.imag) <= 1e-10 * (1.0 + np.abs(lams))
    return np.where(snap, lams.real + 0.0j, lams)


def raw_spectra(spec: ProblemSpec, n_lo: int, n_hi: int):
    """Finite linearization eigenvalues at two resolutions, exclusion-filtered."""
    alpha = spec.physical.alpha
    out = []
    for n in (n_lo, n_hi):
        w = _snap_real(_linearized_eigenvalues(build_pencil(spec, n)))
        w = w[np.abs(w + 1.0 / alpha) > exclusion_radius(alpha)]
        idx = np.lexsort((w.imag, w.real))
        out.append(w[idx])
    return out


def oracle_spectrum(spec: ProblemSpec, n: int = 64) -> OracleSpectrum:
    """Filtered collocation spectrum using resolutions n and n + 16.

    A candidate is kept when its nearest higher-resolution partner moved by
    less than 1e-6 relative and the scaled characteristic determinant at the
    partner is below 1e-6 of the local determinant scale.
    """
    lo, hi = raw_spectra(spec, n, n + RES_STEP)
    kept = np.zeros(lo.shape, dtype=bool)
    vals = lo.copy()
    if hi.size:
        for i, lam in enumerate(lo):
            j = int(np.argmin(np.abs(hi - lam)))
            partner = hi[j]
            if abs(partner - lam) >= MOVE_TOL * (1.0 + abs(lam)):
                continue
            v = char_det(partner, spec)
            if abs(v.value) <= DET_RESIDUAL_TOL * local_scale(partner, spec):
                kept[i] = True
                vals[i] = partner
    return OracleSpectrum(vals, kept, (n, n + RES_STEP))
