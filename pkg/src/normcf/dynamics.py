"""The natural-extension domain and Monte-Carlo checks on it.

A point ``(u, v)`` of ``(-1, 1) x [0, 1]`` corresponds to the pair of rows

    P = (1/t, -u t),   P' = (v/t, t)        (up to the factor 1/sqrt(1+uv))

where the stretch ``t`` makes ``F_t(1, -u) = F_t(v, 1)``.  The domain splits by
comparing ``F(P + P')`` and ``F(P - P')`` with ``F(P)``:

* both larger: the reduced region ``Omega``;
* ``F(P + P') <= F(P)``: the singularization area ``S``;
* ``F(P - P') <= F(P)``: ``S'`` when ``u > 0``, ``S''`` otherwise.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import exactnum as en
from .critdet import critical_determinant
from .exactnum import AmbiguousComparison, Ordering, compare
from .norms import INF, Norm, PNorm, equalize_t_np, parse_norm
from .regcf import RandomStream, omega_rect_mass
from .spectrum import D_F_np

HALF = Fraction(1, 2)
SCHEMA_VERSION = 1


class RegionLabel(enum.Enum):
    Omega = "Omega"
    S = "S"
    Sprime = "Sprime"
    Sdoubleprime = "Sdoubleprime"
    BoundarySet = "BoundarySet"
    ASet = "ASet"

    @property
    def in_omega(self) -> bool:
        return self in (RegionLabel.Omega, RegionLabel.ASet)


_CODES = list(RegionLabel)
_CODE = {lab: i for i, lab in enumerate(_CODES)}


# ---------------------------------------------------------------------------
# pointwise classification


def _pm_squares(F: Norm, u, v):
    """``(F(P)^2, F(P+P')^2, F(P-P')^2)`` in stretched coordinates."""
    one = Fraction(1)
    w = F.equalize_w((one, -u), (v, one))
    base = F.stretched_sq(w, one, u)
    plus = F.stretched_sq(w, 1 + v, 1 - u)
    minus = F.stretched_sq(w, 1 - v, 1 + u)
    return base, plus, minus


def _cmp(a, b) -> Ordering:
    r = compare(a, b)
    if r is Ordering.AMBIGUOUS:
        raise AmbiguousComparison("region test undecided at the precision cap")
    return r


def _label_from(u, rp: Ordering, rm: Ordering) -> RegionLabel:
    if rp is Ordering.LESS:
        return RegionLabel.S
    if rm is Ordering.LESS:
        return RegionLabel.Sprime if _cmp(u, 0) is Ordering.GREATER else RegionLabel.Sdoubleprime
    if rp is Ordering.GREATER and rm is Ordering.GREATER:
        return RegionLabel.Omega
    return RegionLabel.BoundarySet


def classify(F: Norm, u, v) -> RegionLabel:
    """Region label of ``(u, v)``; exact arithmetic for exact inputs."""
    if isinstance(u, float) or isinstance(v, float):
        return _CODES[int(classify_np(F, np.array([u]), np.array([v]))[0])]
    if en.is_exact(u) and not -1 < u < 1:
        raise ValueError("u must lie in (-1, 1)")
    if en.is_exact(v) and v == 1:
        # the top edge is the image of [1/2, 1) x {0} under T
        return RegionLabel.Sprime if _cmp(u, 0) is not Ordering.LESS else RegionLabel.Sdoubleprime
    on_axis = en.is_exact(v) and v == 0
    if on_axis:
        ru = _cmp(u, HALF)
        if ru is Ordering.GREATER:
            return RegionLabel.S
        if ru is Ordering.EQUAL:
            return RegionLabel.BoundarySet
    base, plus, minus = _pm_squares(F, u, v)
    label = _label_from(u, _cmp(plus, base), _cmp(minus, base))
    if on_axis and label is RegionLabel.BoundarySet and _cmp(en.nabs(u), HALF) is Ordering.LESS:
        # one-sided limit v -> 0+: the point is in the closure of Omega when
        # the reduced condition holds just above the axis
        above = [_label_from(u, *(_cmp(x, b) for x in (p, m)))
                 for b, p, m in (_pm_squares(F, u, Fraction(1, 1 << k)) for k in (40, 60))]
        if all(lab is RegionLabel.Omega for lab in above):
            return RegionLabel.ASet
    return label


def map_M(u, v):
    """``M(u, v) = (-u/(1+u), 1 - v)``."""
    return -u / (1 + u), 1 - v


def map_MT(u, v):
    """``M o T`` on ``S``: ``(u - 1, v/(v + 1))``."""
    return u - 1, v / (v + 1)


def map_T_on_S(u, v):
    """The Gauss-map extension restricted to ``S`` (where ``1/2 <= u < 1``)."""
    return (1 - u) / u, 1 / (v + 1)


# ---------------------------------------------------------------------------
# vectorized float classification


def margins_np(F: Norm, U, V):
    """Relative margins ``F(P+P')/F(P) - 1`` and ``F(P-P')/F(P) - 1``."""
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    one = np.ones_like(U)
    t = equalize_t_np(F, one, -U, V, one)
    base = F.eval_np(1.0 / t, U * t)
    plus = F.eval_np((1.0 + V) / t, (1.0 - U) * t)
    minus = F.eval_np((1.0 - V) / t, (1.0 + U) * t)
    return plus / base - 1.0, minus / base - 1.0


def classify_np(F: Norm, U, V, tol: float = 1e-11, exact_fallback: bool = False) -> np.ndarray:
    """Label codes (indices into ``list(RegionLabel)``) for float arrays.

    Points whose margins are within ``tol`` of zero are labelled BoundarySet,
    or re-decided exactly at their rational value when ``exact_fallback``.
    """
    U = np.atleast_1d(np.asarray(U, dtype=float))
    V = np.atleast_1d(np.asarray(V, dtype=float))
    U, V = np.broadcast_arrays(U, V)
    out = np.full(U.shape, _CODE[RegionLabel.BoundarySet], dtype=np.int8)
    top = V >= 1.0
    inner = ~top
    with np.errstate(invalid="ignore", divide="ignore"):
        mp, mm = margins_np(F, np.where(inner, U, 0.0), np.where(inner, V, 0.5))
    s = inner & (mp < -tol)
    sp = inner & ~s & (mm < -tol)
    om = inner & (mp > tol) & (mm > tol)
    out[s] = _CODE[RegionLabel.S]
    out[sp & (U > 0)] = _CODE[RegionLabel.Sprime]
    out[sp & (U <= 0)] = _CODE[RegionLabel.Sdoubleprime]
    out[om] = _CODE[RegionLabel.Omega]
    out[top & (U >= 0)] = _CODE[RegionLabel.Sprime]
    out[top & (U < 0)] = _CODE[RegionLabel.Sdoubleprime]
    axis = V == 0.0
    out[axis & (U > 0.5)] = _CODE[RegionLabel.S]
    undecided = np.flatnonzero((out == _CODE[RegionLabel.BoundarySet]) & ~(axis & (U > 0.5)))
    for i in undecided:
        u, v = float(U.flat[i]), float(V.flat[i])
        if exact_fallback or v == 0.0:
            try:
                out.flat[i] = _CODE[classify(F, Fraction(u), Fraction(v))]
            except AmbiguousComparison:
                out.flat[i] = _CODE[RegionLabel.BoundarySet]
    return out


def in_S_np(F: Norm, U, V, tol: float = 1e-11):
    """Float membership in ``S`` on ``u >= 1/2``: (inside, undecided) masks."""
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    if isinstance(F, PNorm) and F.p != INF:
        p = float(F.p)
        if p == 1.0:
            d = 1.0 - U * (2.0 - V)
        elif p == 2.0:
            d = (1.0 + 2.0 * V) - U * (2.0 + V)
        else:
            lhs = ((1.0 + V) ** p - 1.0) * (1.0 - U**p)
            rhs = (1.0 - V**p) * (U**p - (1.0 - U) ** p)
            d = lhs - rhs
    elif isinstance(F, PNorm):
        d = np.ones_like(U)  # sup-norm: S meets v > 0 nowhere
    else:
        d, _ = margins_np(F, U, V)
    inside = (d < -tol) & (U >= 0.5) & (V < 1.0)
    undecided = (np.abs(d) <= tol) & (U >= 0.5) & (V < 1.0)
    return inside, undecided


def grid_centres(n: int):
    """Cell centres of an ``n x n`` grid on ``(-1, 1) x [0, 1]`` as exact-in-float values."""
    u = (2 * np.arange(n) + 1 - n) / n
    v = (2 * np.arange(n) + 1) / (2 * n)
    return u, v


def label_grid(F: Norm, n: int, exact_fallback: bool = True):
    """``(U, V, codes)`` over the ``n x n`` cell-centre grid."""
    u, v = grid_centres(n)
    U, V = np.meshgrid(u, v, indexing="ij")
    codes = classify_np(F, U.ravel(), V.ravel(), exact_fallback=exact_fallback)
    return U.ravel(), V.ravel(), codes


# ---------------------------------------------------------------------------
# max of D over the closure of Omega


@dataclass
class SupResult:
    value: float
    u: float
    v: float


def _closure_mask(F: Norm, U, V, tol=1e-9):
    with np.errstate(invalid="ignore", divide="ignore"):
        mp, mm = margins_np(F, U, V)
    far = (1.0 - U) ** 2 + (1.0 - V) ** 2 > 0.05**2
    return (mp >= -tol) & (mm >= -tol) & far & (V < 1.0) & (np.abs(U) < 1.0)


def _best(F: Norm, U, V, k):
    mask = _closure_mask(F, U, V)
    if not mask.any():
        return []
    with np.errstate(invalid="ignore", divide="ignore"):
        D = D_F_np(F, U[mask], V[mask])
    D = np.where(np.isfinite(D), D, -np.inf)
    order = np.argsort(D)[::-1][:k]
    Um, Vm = U[mask], V[mask]
    return [(float(D[i]), float(Um[i]), float(Vm[i])) for i in order]


def sup_D_search(F: Norm, grid: int = 128, zoom_levels: int = 8, keep: int = 6) -> SupResult:
    if grid < 64:
        raise ValueError("grid must be at least 64")
    u = np.linspace(-1.0, 1.0, grid + 1)[1:-1]
    v = np.linspace(0.0, 1.0, grid + 1)[:-1]
    U, V = (a.ravel() for a in np.meshgrid(u, v, indexing="ij"))
    cands = _best(F, U, V, keep)
    h = 2.0 / grid
    for _ in range(zoom_levels):
        pts = []
        for _, cu, cv in cands:
            uu = np.clip(np.linspace(cu - 2 * h, cu + 2 * h, 33), -1 + 1e-12, 1 - 1e-12)
            vv = np.clip(np.linspace(cv - 2 * h, cv + 2 * h, 33), 0.0, 1 - 1e-12)
            a, b = np.meshgrid(uu, vv, indexing="ij")
            pts.append((a.ravel(), b.ravel()))
        U = np.concatenate([p[0] for p in pts])
        V = np.concatenate([p[1] for p in pts])
        cands = sorted(set(cands + _best(F, U, V, keep)), reverse=True)[:keep]
        h /= 8
    return SupResult(*cands[0])


def sup_D_over_region(F: Norm, grid: int = 128) -> float:
    """Maximum of ``D_F`` over the closure of Omega away from ``(1, 1)``; tends to ``1/Delta``."""
    return sup_D_search(F, grid).value


# ---------------------------------------------------------------------------
# measure of S


@dataclass
class MassEnclosure:
    lo: float
    hi: float
    inside_cells: int
    boundary_cells: int

    @property
    def mid(self) -> float:
        return (self.lo + self.hi) / 2

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi


def measure_S(F: Norm, quadrature_cells: int = 1 << 18) -> MassEnclosure:
    """Enclosure of the invariant mass of ``S``.

    ``S`` lies in ``[1/2, 1) x [0, 1]``.  Cells whose four corners are all
    inside count fully, cells with mixed or undecided corners widen the
    error bar.
    """
    if isinstance(F, PNorm) and F.p == INF:
        return MassEnclosure(0.0, 0.0, 0, 0)
    n = max(4, int(math.isqrt(quadrature_cells)))
    us = np.linspace(0.5, 1.0, n + 1)
    vs = np.linspace(0.0, 1.0, n + 1)
    U, V = np.meshgrid(us, vs, indexing="ij")
    inside, undecided = in_S_np(F, U, V)
    # the right edge u = 1 is excluded from S, use its left limit
    inside[-1, :] = inside[-2, :]
    undecided[-1, :] |= undecided[-2, :]
    corners_in = inside[:-1, :-1] & inside[1:, :-1] & inside[:-1, 1:] & inside[1:, 1:]
    corners_out = ~(inside | undecided)
    all_out = corners_out[:-1, :-1] & corners_out[1:, :-1] & corners_out[:-1, 1:] & corners_out[1:, 1:]
    mixed = ~(corners_in | all_out)
    mass = _cell_masses(us, vs)
    lo = float(mass[corners_in].sum())
    extra = float(mass[mixed].sum())
    slack = 1e-12
    return MassEnclosure(max(0.0, lo - slack), lo + extra + slack, int(corners_in.sum()), int(mixed.sum()))


def _cell_masses(us, vs):
    u0, u1 = us[:-1, None], us[1:, None]
    v0, v1 = vs[None, :-1], vs[None, 1:]
    L = np.log1p
    return (L(u1 * v1) - L(u1 * v0) - L(u0 * v1) + L(u0 * v0)) / math.log(2)


def omega_S1() -> float:
    """Closed form ``1 - 1/(2 log 2)`` of the invariant mass of ``S_1``."""
    return 1 - 1 / (2 * math.log(2))


# ---------------------------------------------------------------------------
# orbit sampling


class SampleAmbiguous(RuntimeError):
    pass


def _sample_seed(seed: int, index: int, attempt: int) -> int:
    state = np.random.SeedSequence([seed, index, attempt]).generate_state(2, np.uint32)
    return int(state[0]) << 32 | int(state[1])


def _orbit(F: Norm, digits: list[int], tol: float = 1e-11):
    """Float ``(mu_m, nu_m)`` of the F-expansion of ``[0; digits]``.

    The last 40 digits only serve to converge the backward recursion for u.
    """
    b = np.asarray(digits, dtype=float)  # b_1, b_2, ...
    R = len(b)
    v = np.empty(R + 1)
    v[0] = 0.0
    for n in range(1, R + 1):
        v[n] = 1.0 / (b[n - 1] + v[n - 1])
    u = np.empty(R + 1)
    u[R] = 0.5
    for n in range(R - 1, -1, -1):
        u[n] = 1.0 / (b[n] + u[n + 1])
    N = R - 40
    u, v = u[:N], v[:N]
    inside, undecided = in_S_np(F, u, v, tol)
    omit = inside.copy()
    omit[0] = u[0] >= 0.5
    if undecided[1:].any() or u[0] == 0.5:
        raise SampleAmbiguous
    if (omit[1:] & omit[:-1]).any():
        raise RuntimeError("consecutive omissions")
    kept = np.flatnonzero(~omit)
    prev = np.concatenate(([-1], kept[:-1]))
    gap2 = (kept - prev) == 2
    mu = np.where(gap2, -u[kept] * u[kept - 1], u[kept])
    nu = np.where(gap2, v[kept] * v[kept - 1], v[kept])
    return mu, nu


def sample_orbit(F: Norm, stream_seed: int, terms: int):
    """``(mu_m, nu_m)`` for ``m < terms`` along a uniform random alpha."""
    stream = RandomStream(stream_seed)
    R = int(terms * 1.5) + 80
    while True:
        digits = stream.prefix(R + 1)[1:]
        mu, nu = _orbit(F, digits)
        if len(mu) >= terms:
            return mu[:terms], nu[:terms]
        R *= 2


def _sample_task(args):
    spec, seed, index, terms, delta = args
    F = parse_norm(spec)
    redraws = 0
    while True:
        try:
            mu, nu = sample_orbit(F, _sample_seed(seed, index, redraws), terms)
            break
        except SampleAmbiguous:
            redraws += 1
    d = delta * D_F_np(F, mu, nu)
    return d, mu, nu, redraws


# ---------------------------------------------------------------------------
# simulation


@dataclass
class SimulationReport:
    norm: str
    samples: int
    terms_per_sample: int
    mean_delta: float
    mean_stderr: float
    histogram: list  # (lo, hi, mass)
    histogram_counts: list
    max_delta_fraction: float
    threshold: float
    seed: int
    redraws: int
    min_delta: float
    max_delta: float
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return asdict(self)

    def histogram_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lo", "hi", "mass"])
        for lo, hi, m in self.histogram:
            w.writerow([repr(lo), repr(hi), repr(m)])
        return buf.getvalue()


def _run_samples(spec: str, samples: int, terms: int, seed: int, delta: float, workers: int):
    tasks = [(spec, seed, i, terms, delta) for i in range(samples)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_sample_task, tasks, chunksize=max(1, samples // (4 * workers))))
    return [_sample_task(t) for t in tasks]


def simulate(
    F: Norm | str,
    samples: int,
    terms: int,
    seed: int,
    bins: int = 50,
    threshold: float = 0.99,
    workers: int = 1,
) -> SimulationReport:
    """Mean, histogram and running-max statistics of ``delta_F(alpha; m)``
    over uniformly drawn alpha."""
    if samples < 1 or terms < 100:
        raise ValueError("need samples >= 1 and terms >= 100")
    spec = F if isinstance(F, str) else F.spec
    Fn = parse_norm(spec)
    delta = en.to_float(critical_determinant(Fn))
    results = _run_samples(spec, samples, terms, seed, delta, workers)
    means = np.array([r[0].mean() for r in results])
    allv = np.concatenate([r[0] for r in results])
    counts, edges = np.histogram(np.clip(allv, 0.0, 1.0), bins=bins, range=(0.0, 1.0))
    masses = counts / counts.sum()
    hist = [(float(edges[i]), float(edges[i + 1]), float(masses[i])) for i in range(bins)]
    hits = np.array([r[0].max() >= threshold for r in results])
    return SimulationReport(
        norm=spec,
        samples=samples,
        terms_per_sample=terms,
        mean_delta=float(means.mean()),
        mean_stderr=float(means.std(ddof=1) / math.sqrt(samples)) if samples > 1 else float("nan"),
        histogram=hist,
        histogram_counts=[int(c) for c in counts],
        max_delta_fraction=float(hits.mean()),
        threshold=threshold,
        seed=seed,
        redraws=int(sum(r[3] for r in results)),
        min_delta=float(allv.min()),
        max_delta=float(allv.max()),
    )


def ergodic_constant(p) -> float:
    """Almost-sure mean of ``delta_p(alpha; m)`` for ``p`` in ``{1, 2, inf}``."""
    if p == INF or p == "inf":
        return (1 + math.log(4)) / math.log(16)
    if Fraction(p) == 1:
        return (3 - math.log(4)) / 2
    if Fraction(p) == 2:
        return 1 / math.log(3)
    raise ValueError("closed form known for p in {1, 2, inf} only")


# ---------------------------------------------------------------------------
# equidistribution


@dataclass
class EquidistributionReport:
    grid: int
    points: int
    omega_mass: float  # invariant mass of Omega, should equal 1 - omega(S)
    cells: list = field(default_factory=list)  # (i, j, observed, expected, z)

    @property
    def max_abs_z(self) -> float:
        return max((abs(c[4]) for c in self.cells), default=0.0)

    def failures(self, k: float = 3.0) -> list:
        return [c for c in self.cells if abs(c[4]) > k]


def omega_cell_masses(F: Norm, grid: int = 16, sub: int = 64, fine: int = 512) -> np.ndarray:
    """Invariant mass of ``Omega`` inside each cell of a ``grid x grid`` partition
    of ``(-1, 1) x [0, 1]``.  Cells split by the boundary of Omega are
    integrated with a finer midpoint rule."""
    masses = np.zeros((grid, grid))
    for i in range(grid):
        u0, u1 = -1 + 2 * i / grid, -1 + 2 * (i + 1) / grid
        for j in range(grid):
            v0, v1 = j / grid, (j + 1) / grid
            for k, n in enumerate((sub, fine)):
                uc = u0 + (np.arange(n) + 0.5) * (u1 - u0) / n
                vc = v0 + (np.arange(n) + 0.5) * (v1 - v0) / n
                Uc, Vc = np.meshgrid(uc, vc, indexing="ij")
                codes = classify_np(F, Uc.ravel(), Vc.ravel())
                om = (codes == _CODE[RegionLabel.Omega]) | (codes == _CODE[RegionLabel.ASet])
                if k == 0 and (om.all() or not om.any()):
                    masses[i, j] = omega_rect_mass(u0, u1, v0, v1) if om.all() else 0.0
                    break
                if k == 1:
                    du, dv = (u1 - u0) / n, (v1 - v0) / n
                    dens = 1.0 / (math.log(2) * (1.0 + Uc.ravel() * Vc.ravel()) ** 2)
                    masses[i, j] = float((dens * om).sum() * du * dv)
    return masses


def equidistribution(F: Norm, samples: int = 50, terms: int = 10_000, seed: int = 0, grid: int = 16) -> EquidistributionReport:
    """Compare the empirical law of ``(mu_m, nu_m)`` with ``omega`` restricted
    to Omega and renormalized, cell by cell with binomial standard errors."""
    spec = F.spec
    counts = np.zeros((grid, grid))
    total = 0
    for r in _run_samples(spec, samples, terms, seed, 1.0, 1):
        # m = 0 always sits on the axis v = 0, a null set; drop the transient
        mu, nu = r[1][1:], r[2][1:]
        i = np.clip(((mu + 1) / 2 * grid).astype(int), 0, grid - 1)
        j = np.clip((nu * grid).astype(int), 0, grid - 1)
        np.add.at(counts, (i, j), 1)
        total += len(mu)
    masses = omega_cell_masses(F, grid)
    om = masses.sum()
    expected = masses / om
    rep = EquidistributionReport(grid, total, float(om))
    for i in range(grid):
        for j in range(grid):
            e = expected[i, j]
            obs = counts[i, j] / total
            if e <= 0:
                z = 0.0 if obs == 0 else math.inf
            else:
                z = (obs - e) / math.sqrt(e * (1 - e) / total)
            rep.cells.append((i, j, float(obs), float(e), float(z)))
    return rep


def report_json(report) -> str:
    return json.dumps(report.to_dict() if hasattr(report, "to_dict") else asdict(report), sort_keys=True, indent=2)
