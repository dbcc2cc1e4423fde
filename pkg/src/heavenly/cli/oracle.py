"""Finite-difference Ricci tensor, independent of the exact pipeline.

The metric at a point is assembled numerically from the null tetrad
(g = E^-T eta E^-1, with the frame vectors as the columns of E), using second
partials of u evaluated at the point.  Metric derivatives are central
differences with one level of Richardson extrapolation.

Arithmetic runs in mpmath at ``dps`` significant digits.  Metrics of random
cubic draws easily reach condition numbers around 1e6, and in double
precision the roundoff of the second differences then swamps the answer.
"""

from __future__ import annotations

import warnings
from typing import Callable, Sequence

import mpmath
import numpy as np

from ..arith import MPoly
from ..core import EquationConstants

DEFAULT_DPS = 40

# frame metric in the order (W, Z, W~, Z~)
ETA = np.array(
    [
        [0, 0, -1, 0],
        [0, 0, 0, 1],
        [-1, 0, 0, 0],
        [0, 1, 0, 0],
    ]
)


class ConditioningWarning(RuntimeWarning):
    pass


def _mpf_q(q) -> mpmath.mpf:
    return mpmath.mpf(int(q.numerator)) / int(q.denominator)


def hessian_evaluator(u: MPoly) -> Callable[[Sequence], np.ndarray]:
    """Callable returning the 4x4 Hessian of ``u`` (object array of mpf)."""
    parts = {}
    for i in range(4):
        for j in range(i, 4):
            p = u.diff(i).diff(j)
            parts[(i, j)] = [(e, _mpf_q(c)) for e, c in p.items()]

    def hess(x):
        H = np.empty((4, 4), dtype=object)
        for (i, j), terms in parts.items():
            acc = mpmath.mpf(0)
            for e, c in terms:
                t = c
                for v, k in zip(x, e):
                    if k:
                        t = t * v**k
                acc += t
            H[i, j] = H[j, i] = acc
        return H

    return hess


def _inv(m: np.ndarray) -> np.ndarray:
    inv = mpmath.matrix(m.tolist()) ** -1
    return np.array(inv.tolist(), dtype=object)


def tetrad_metric(hess: np.ndarray, consts: EquationConstants) -> np.ndarray:
    a, b, c = (_mpf_q(v) for v in (consts.a, consts.b, consts.c))
    u12, u14, u24, u44 = hess[0, 1], hess[0, 3], hess[1, 3], hess[3, 3]
    delta = a * u44 + b * u14
    k = 1 / mpmath.sqrt(abs(delta))
    z = mpmath.mpf(0)
    E = (
        np.array(
            [
                [z, u14, a, -u12],
                [-c, u44, -b, -u24],
                [z, z, z, -1],
                [-1, z, z, z],
            ],
            dtype=object,
        ).T
        * k
    )
    Ei = _inv(E)
    return Ei.T.dot(ETA).dot(Ei)


def _derivs(gfn, x: np.ndarray, h):
    """First and second partials of g at x, Richardson-extrapolated."""
    I = np.eye(4, dtype=int)

    def d1(step):
        return np.stack([(gfn(x + step * I[k]) - gfn(x - step * I[k])) / (2 * step) for k in range(4)])

    def d2(step):
        out = np.empty((4, 4, 4, 4), dtype=object)
        g0 = gfn(x)
        for k in range(4):
            for l in range(k, 4):
                if k == l:
                    v = (gfn(x + step * I[k]) - 2 * g0 + gfn(x - step * I[k])) / step**2
                else:
                    v = (
                        gfn(x + step * (I[k] + I[l]))
                        - gfn(x + step * (I[k] - I[l]))
                        - gfn(x - step * (I[k] - I[l]))
                        + gfn(x - step * (I[k] + I[l]))
                    ) / (4 * step**2)
                out[k, l] = out[l, k] = v
        return out

    dg = (4 * d1(h / 2) - d1(h)) / 3
    ddg = (4 * d2(h / 2) - d2(h)) / 3
    return dg, ddg


def ricci_from_derivatives(g: np.ndarray, dg: np.ndarray, ddg: np.ndarray):
    """Ricci tensor and the magnitude of its Gamma-squared terms.

    dg[k, i, j] = d_k g_ij, ddg[k, l, i, j] = d_k d_l g_ij.  Works for float
    and object (mpf) arrays alike.
    """
    gi = _inv(g) if g.dtype == object else np.linalg.inv(g)
    # Gamma^m_{nr} = 1/2 g^{ml} (d_n g_lr + d_r g_ln - d_l g_nr)
    low = (np.einsum("nlr->lnr", dg) + np.einsum("rln->lnr", dg) - dg) / 2
    gam = np.einsum("ml,lnr->mnr", gi, low)
    # d_s Gamma^m_{nr}
    dlow = (np.einsum("snlr->slnr", ddg) + np.einsum("srln->slnr", ddg) - ddg) / 2
    dgi = -np.einsum("ma,sab,bl->sml", gi, dg, gi)
    dgam = np.einsum("sml,lnr->smnr", dgi, low) + np.einsum("ml,slnr->smnr", gi, dlow)
    t1 = np.einsum("mmnr->nr", dgam)
    t2 = np.einsum("rmnm->nr", dgam)
    q1 = np.einsum("mml,lnr->nr", gam, gam)
    q2 = np.einsum("mrl,lnm->nr", gam, gam)
    ricci = t1 - t2 + q1 - q2
    scale = max(max(abs(v) for v in q1.flat), max(abs(v) for v in q2.flat))
    return ricci, scale


def numeric_ricci_oracle(
    u,
    consts: EquationConstants,
    point: Sequence,
    h: float = 1e-3,
    with_scale: bool = False,
    dps: int = DEFAULT_DPS,
):
    """Finite-difference Ricci tensor at ``point`` as a 4x4 float array.

    ``u`` is an MPoly or a callable returning the Hessian at a point.  Warns
    with ConditioningWarning when the point lies within 10 h of the
    hypersurface Delta = 0 (measured by |Delta| / |grad Delta|).  With
    ``with_scale`` the largest Gamma-squared term is returned as well.
    """
    hess = hessian_evaluator(u) if isinstance(u, MPoly) else u
    with mpmath.workdps(dps):
        x = np.array([mpmath.mpf(str(v)) if isinstance(v, float) else _to_mpf(v) for v in point], dtype=object)
        _check_conditioning(hess, consts, x, h)
        step = mpmath.mpf(h)

        def gfn(p):
            return tetrad_metric(hess(p), consts)

        dg, ddg = _derivs(gfn, x, step)
        ricci, scale = ricci_from_derivatives(gfn(x), dg, ddg)
        out = np.array([[float(v) for v in row] for row in ricci])
        scale = max(float(scale), 1e-300)
    return (out, scale) if with_scale else out


def _to_mpf(v):
    if hasattr(v, "numerator") and hasattr(v, "denominator"):
        return mpmath.mpf(int(v.numerator)) / int(v.denominator)
    return mpmath.mpf(v)


def locus_distance(hess, consts: EquationConstants, x) -> float:
    """|Delta| / |grad Delta| at x (exact distance when Delta is affine)."""
    a, b = _mpf_q(consts.a), _mpf_q(consts.b)

    def delta(p):
        H = hess(p)
        return a * H[3, 3] + b * H[0, 3]

    x = np.array([_to_mpf(v) for v in x], dtype=object)
    d0 = delta(x)
    # Delta is affine for cubic u, so a unit-step difference is exact there
    I = np.eye(4, dtype=int)
    grad = [(delta(x + I[k]) - delta(x - I[k])) / 2 for k in range(4)]
    gn = mpmath.sqrt(sum(g * g for g in grad))
    if gn == 0:
        return float("inf") if d0 != 0 else 0.0
    return float(abs(d0) / gn)


def _check_conditioning(hess, consts, x, h):
    dist = locus_distance(hess, consts, x)
    if dist <= 10 * h:
        warnings.warn(
            f"point {tuple(float(v) for v in x)} is {dist:.3g} from Delta = 0 (step {h}); "
            "results are ill-conditioned",
            ConditioningWarning,
            stacklevel=3,
        )


def well_conditioned_points(
    u: MPoly,
    consts: EquationConstants,
    rng,
    count: int,
    min_distance: float = 0.5,
    box: int = 3,
    sign: int | None = None,
):
    """Random quarter-grid points in [-box, box]^4 at least ``min_distance``
    from Delta = 0, optionally restricted to the chart sign(Delta) = sign."""
    hess = hessian_evaluator(u)
    a, b = _mpf_q(consts.a), _mpf_q(consts.b)
    out = []
    for _ in range(10000):
        if len(out) == count:
            break
        p = tuple(rng.randint(-4 * box, 4 * box) / 4 for _ in range(4))
        if sign is not None:
            H = hess([mpmath.mpf(x) for x in p])
            if (a * H[3, 3] + b * H[0, 3] > 0) != (sign > 0):
                continue
        if locus_distance(hess, consts, p) >= min_distance:
            out.append(p)
    return out
