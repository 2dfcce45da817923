"""Parametrized IFS families on a compact interval.

Maps carry closed-form x- and lambda-derivatives where available;
custom evaluators can fall back to central finite differences in
lambda (flagged).  All evaluators accept numpy arrays in x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from weakref import WeakKeyDictionary

import numpy as np

FD_STEP_SCALE = np.finfo(float).eps ** (1.0 / 3.0)  # central-difference optimum


class EvaluationError(ValueError):
    pass


class AuditFailure(RuntimeError):
    pass


def fd_step(lam: float) -> float:
    return FD_STEP_SCALE * max(1.0, abs(lam))


@dataclass(frozen=True, eq=False)
class Poly:
    """Polynomial parameter curve, coefficients in ascending order."""

    coeffs: tuple

    def __call__(self, lam):
        return np.polynomial.polynomial.polyval(lam, np.asarray(self.coeffs))

    def deriv(self) -> "Poly":
        c = np.polynomial.polynomial.polyder(np.asarray(self.coeffs, dtype=float))
        return Poly(tuple(c) if len(c) else (0.0,))


def poly(*coeffs) -> Poly:
    return Poly(tuple(float(c) for c in coeffs))


CONST_ZERO = poly(0.0)


@dataclass(frozen=True, eq=False)
class AffineMap:
    """x -> a(lam) * x + b(lam)."""

    slope: Poly
    offset: Poly
    dlam_exact = True

    def value(self, lam, x):
        return self.slope(lam) * x + self.offset(lam)

    def dx(self, lam, x):
        return self.slope(lam) * np.ones_like(np.asarray(x, dtype=float))

    def dlam(self, lam, x):
        return self.slope.deriv()(lam) * x + self.offset.deriv()(lam)


@dataclass(frozen=True, eq=False)
class RationalMap:
    """x -> (n0(lam) + n1(lam) x) / (d0(lam) + d1(lam) x)."""

    n0: Poly
    n1: Poly
    d0: Poly
    d1: Poly
    dlam_exact = True

    def value(self, lam, x):
        return (self.n0(lam) + self.n1(lam) * x) / (self.d0(lam) + self.d1(lam) * x)

    def dx(self, lam, x):
        den = self.d0(lam) + self.d1(lam) * x
        return (self.n1(lam) * self.d0(lam) - self.n0(lam) * self.d1(lam)) / den ** 2

    def dlam(self, lam, x):
        num = self.n0(lam) + self.n1(lam) * x
        den = self.d0(lam) + self.d1(lam) * x
        dnum = self.n0.deriv()(lam) + self.n1.deriv()(lam) * x
        dden = self.d0.deriv()(lam) + self.d1.deriv()(lam) * x
        return (dnum * den - num * dden) / den ** 2


@dataclass(frozen=True, eq=False)
class ShiftedMap:
    """base(x) + a(lam), with the base frozen at a fixed parameter."""

    base: object
    shift: Poly
    base_lam: float = 0.0
    dlam_exact = True

    def value(self, lam, x):
        return self.base.value(self.base_lam, x) + self.shift(lam)

    def dx(self, lam, x):
        return self.base.dx(self.base_lam, x)

    def dlam(self, lam, x):
        return self.shift.deriv()(lam) * np.ones_like(np.asarray(x, dtype=float))


@dataclass(frozen=True, eq=False)
class CustomMap:
    """Callback-backed map; missing dlam falls back to finite differences."""

    value_fn: object
    dx_fn: object
    dlam_fn: object = None

    @property
    def dlam_exact(self):
        return self.dlam_fn is not None

    def value(self, lam, x):
        return self.value_fn(lam, x)

    def dx(self, lam, x):
        return self.dx_fn(lam, x)

    def dlam(self, lam, x):
        if self.dlam_fn is not None:
            return self.dlam_fn(lam, x)
        h = fd_step(lam)
        return (self.value_fn(lam + h, x) - self.value_fn(lam - h, x)) / (2 * h)


def affine_map(a, b) -> AffineMap:
    """Affine map with constant or Poly coefficients."""
    a = a if isinstance(a, Poly) else poly(a)
    b = b if isinstance(b, Poly) else poly(b)
    return AffineMap(a, b)


def moebius_shift(c) -> RationalMap:
    """x -> (x + c(lam)) / (x + c(lam) + 1)."""
    c = c if isinstance(c, Poly) else poly(c)
    one = poly(1.0)
    c_plus_1 = Poly(tuple(np.polynomial.polynomial.polyadd(c.coeffs, [1.0])))
    return RationalMap(n0=c, n1=one, d0=c_plus_1, d1=one)


def bernoulli_psi(sign: int) -> AffineMap:
    """psi_0 = lam*x - (1-lam) for sign 0, psi_1 = lam*x + (1-lam) for sign 1."""
    if sign == 0:
        return AffineMap(poly(0.0, 1.0), poly(-1.0, 1.0))
    if sign == 1:
        return AffineMap(poly(0.0, 1.0), poly(1.0, -1.0))
    raise ValueError("sign must be 0 or 1")


@dataclass(frozen=True, eq=False)
class IfsFamily:
    maps: tuple
    domain: tuple  # (x_lo, x_hi)
    param_interval: tuple  # (lam_lo, lam_hi)

    def __post_init__(self):
        if len(self.maps) < 1:
            raise ValueError("need at least one map")
        if not self.domain[0] < self.domain[1]:
            raise ValueError("degenerate domain")

    @property
    def m(self) -> int:
        return len(self.maps)

    @property
    def diam(self) -> float:
        return self.domain[1] - self.domain[0]

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.domain[0] + self.domain[1])

    def map(self, j: int):
        if not 1 <= j <= self.m:
            raise ValueError(f"symbol {j} outside 1..{self.m}")
        return self.maps[j - 1]

    def check_lam(self, lam: float):
        lo, hi = self.param_interval
        if not lo - 1e-12 <= lam <= hi + 1e-12:
            raise EvaluationError(f"lambda {lam} outside parameter interval")

    @property
    def dlam_exact(self) -> bool:
        return all(mp.dlam_exact for mp in self.maps)


@dataclass
class AuditReport:
    gamma1: float
    gamma2: float
    invariant: bool
    derivative_ok: bool
    monotone_increasing: tuple
    grid_size: int
    log_dx_lipschitz: float  # max |d/dx log|f'|| over the grid, for variation bounds

    @property
    def passed(self) -> bool:
        return self.invariant and self.derivative_ok


_audit_cache: WeakKeyDictionary = WeakKeyDictionary()


def regularity_audit(fam: IfsFamily, grid_size: int = 256) -> AuditReport:
    """Sample |f'| and domain invariance on a (x, lambda) grid.

    Estimates are grid-resolution limited; a PASS is evidence, not proof.
    """
    cached = _audit_cache.get(fam)
    if cached is not None and cached.grid_size >= grid_size:
        return cached
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    lo, hi = fam.domain
    xs = np.linspace(lo, hi, grid_size)
    lams = np.linspace(*fam.param_interval, grid_size)[:, None]
    g1, g2 = np.inf, 0.0
    invariant = True
    deriv_ok = True
    monotone = []
    lip = 0.0
    pad = 1e-9 * fam.diam
    step = xs[1] - xs[0]
    for mp in fam.maps:
        v = np.broadcast_to(np.asarray(mp.value(lams, xs[None, :]),
                                       dtype=float), (len(lams), len(xs)))
        d = np.broadcast_to(np.asarray(mp.dx(lams, xs[None, :]),
                                       dtype=float), (len(lams), len(xs)))
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(d))):
            raise EvaluationError("non-finite map evaluation in audit")
        ad = np.abs(d)
        g1 = min(g1, float(ad.min()))
        g2 = max(g2, float(ad.max()))
        if ad.min() <= 0.0 or ad.max() >= 1.0:
            deriv_ok = False
        if v.min() < lo - pad or v.max() > hi + pad:
            invariant = False
        monotone.append(bool(np.all(d > 0)))
        dl = np.abs(np.diff(np.log(np.maximum(ad, 1e-300)), axis=1))
        if dl.size:
            lip = max(lip, float(dl.max()) / step)
    report = AuditReport(gamma1=float(g1), gamma2=float(g2),
                         invariant=invariant, derivative_ok=deriv_ok,
                         monotone_increasing=tuple(monotone),
                         grid_size=grid_size, log_dx_lipschitz=float(lip))
    _audit_cache[fam] = report
    return report


def evaluate_map(fam: IfsFamily, j: int, lam: float, x):
    """(value, d/dx, d/dlam) of f_j at (lam, x)."""
    fam.check_lam(lam)
    lo, hi = fam.domain
    xa = np.asarray(x, dtype=float)
    if np.any(xa < lo - 1e-9 * fam.diam) or np.any(xa > hi + 1e-9 * fam.diam):
        raise EvaluationError("x outside domain")
    mp = fam.map(j)
    v = mp.value(lam, x)
    if not np.all(np.isfinite(v)):
        raise EvaluationError("non-finite map value")
    return v, mp.dx(lam, x), mp.dlam(lam, x)


def compose_word(fam: IfsFamily, u, lam: float, x):
    """f_u(x) and its x-derivative by the chain-rule product.

    Accepts a SymbolWord or any iterable of symbols; the empty word is
    the identity.
    """
    fam.check_lam(lam)
    syms = getattr(u, "symbols", tuple(u))
    y = np.asarray(x, dtype=float)
    dy = np.ones_like(y)
    for s in reversed(syms):
        mp = fam.map(s)
        dy = mp.dx(lam, y) * dy
        y = mp.value(lam, y)
    return y, dy


def compose_word_batch(fam: IfsFamily, words: np.ndarray, lam: float, x0):
    """Vectorized f_u(x0) over a (k, n) array of words; returns values (k,)."""
    k, n = words.shape
    y = np.full(k, float(x0))
    for pos in range(n - 1, -1, -1):
        col = words[:, pos]
        for j in range(1, fam.m + 1):
            mask = col == j
            if mask.any():
                y[mask] = fam.maps[j - 1].value(lam, y[mask])
    return y


def tail_fixed_point(fam: IfsFamily, lam: float, tol: float = 1e-14,
                     max_iter: int = 100000) -> float:
    """Attracting fixed point of f_1, i.e. Pi(1^infty)."""
    x = fam.midpoint
    mp = fam.maps[0]
    for _ in range(max_iter):
        x_new = float(mp.value(lam, x))
        if abs(x_new - x) < tol:
            return x_new
        x = x_new
    raise EvaluationError("fixed-point iteration for the tail did not converge")


def _pad_word(fam, u, depth):
    syms = list(getattr(u, "symbols", tuple(u)))
    if len(syms) < depth:
        syms += [1] * (depth - len(syms))  # 1^infty tail convention
    return syms[:depth]


def natural_projection(fam: IfsFamily, lam: float, u, depth: int):
    """f_{u|depth}(x0) with x0 the domain midpoint, plus the tail bound."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    syms = _pad_word(fam, u, depth)
    v, _ = compose_word(fam, syms, lam, fam.midpoint)
    aud = regularity_audit(fam)
    return float(v), aud.gamma2 ** depth * fam.diam


def projection_lambda_derivative(fam: IfsFamily, lam: float, u, depth: int,
                                 method: str = "auto") -> float:
    """d/dlam Pi^lam(u) truncated at `depth`.

    The recursion path peels one symbol at a time,
    d = a' + f' * d_next, and needs exact lambda-derivatives of the
    maps; the finite-difference path differentiates the truncated
    projection directly.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    fam.check_lam(lam)
    if method == "auto":
        method = "recursion" if fam.dlam_exact else "fd"
    syms = _pad_word(fam, u, depth)
    if method == "recursion":
        x = fam.midpoint
        d = 0.0
        for s in reversed(syms):
            mp = fam.map(s)
            d = float(mp.dlam(lam, x)) + float(mp.dx(lam, x)) * d
            x = float(mp.value(lam, x))
        return d
    if method == "fd":
        h = fd_step(lam)
        lo, hi = fam.param_interval
        if lam - h < lo or lam + h > hi:
            raise EvaluationError("finite-difference step leaves parameter interval")
        vp, _ = compose_word(fam, syms, lam + h, fam.midpoint)
        vm, _ = compose_word(fam, syms, lam - h, fam.midpoint)
        return float(vp - vm) / (2 * h)
    raise ValueError(f"unknown method {method!r}")


def cylinder_interval(fam: IfsFamily, lam: float, u):
    """Image interval f_u(X); endpoints via the domain endpoints for
    monotone maps, min/max over a small grid otherwise."""
    fam.check_lam(lam)
    syms = getattr(u, "symbols", tuple(u))
    aud = regularity_audit(fam)
    if all(aud.monotone_increasing) or _strictly_monotone(fam, lam):
        pts = np.array(fam.domain)
    else:
        pts = np.linspace(*fam.domain, 65)
    v, _ = compose_word(fam, syms, lam, pts)
    return float(np.min(v)), float(np.max(v))


def _strictly_monotone(fam, lam) -> bool:
    xs = np.linspace(*fam.domain, 33)
    for mp in fam.maps:
        d = np.asarray(mp.dx(lam, xs))
        if not (np.all(d > 0) or np.all(d < 0)):
            return False
    return True


def metric_d_lambda(fam: IfsFamily, lam: float, u, v) -> float:
    """d_lambda(u, v) = |f_{u ^ v}(X)|; equals |X| when first symbols differ."""
    from .words import SymbolWord, common_prefix
    if not isinstance(u, SymbolWord):
        u = SymbolWord(tuple(u), fam.m)
    if not isinstance(v, SymbolWord):
        v = SymbolWord(tuple(v), fam.m)
    w = common_prefix(u, v)
    if len(w) == 0:
        return fam.diam
    lo, hi = cylinder_interval(fam, lam, w)
    return hi - lo
