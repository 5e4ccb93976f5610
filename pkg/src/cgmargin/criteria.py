"""Stability intervals for the uncertain gain delta from the locus of M(jw).

Implements the exact eigenvalue analysis plus the small gain, circle,
positive real, and Popov graphical criteria.  All graphical bounds come
from real-axis intercepts of enclosing geometry: a positive intercept x
maps to the lower bound -1/x and a negative intercept to the upper
bound -1/x.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, SoundnessError, UnstableFixedPartError
from .lti import StateSpace, freq_response, is_hurwitz
from .mdelta import MDeltaModel, closed_loop_matrix

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

CROSSING_IM_TOL = 1e-9

# fixed Popov-slope probes used while sampling, so the base grid is
# refined near the features every criterion reads off later
PROBE_SLOPES = (-10.0, -1.0, -0.1, -0.01, 0.01, 0.1, 1.0, 10.0)

CRITERIA = ("exact", "small_gain", "circle", "positive_real", "popov")


def golden_min(f, a: float, b: float, rel_tol: float = 1e-9, max_iter: int = 200):
    """Golden-section minimum of a unimodal f on [a, b]; returns (x, f(x))."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= rel_tol * max(abs(a), abs(b), 1e-300):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def golden_max(f, a: float, b: float, **kw):
    x, fneg = golden_min(lambda t: -f(t), a, b, **kw)
    return x, -fneg


@dataclass(frozen=True, eq=False)
class LocusSummary:
    """Refined samples of M(jw) with the quantities the criteria consume."""

    omegas: np.ndarray          # sorted, starts at 0
    values: np.ndarray          # complex samples of M(jw)
    popov_ordinate: np.ndarray  # w * Im[M(jw)] per sample
    x_max: float                # max Re over the locus
    x_min: float                # min Re over the locus
    real_axis_crossings: tuple  # of (omega, x) with Im ~ 0, includes w = 0
    evaluator: object = field(repr=False)   # callable w -> complex M(jw)
    refine_tol: float = 1e-8


@dataclass(frozen=True)
class StabilityInterval:
    """Admissible range of the c.g. shift delta under one criterion."""

    lower: float
    upper: float
    criterion: str
    witnesses: dict
    lower_unbounded: bool = False
    upper_unbounded: bool = False


@dataclass(frozen=True)
class VerificationReport:
    criterion: str
    passed: bool
    n_checked: int
    failures: tuple   # of (delta, max_real_part)
    notes: str = ""


def _evaluator(M: StateSpace):
    def ev(w: float) -> complex:
        return complex(M.evaluate(1j * w)[0, 0])
    return ev


def _local_max_indices(y: np.ndarray) -> np.ndarray:
    inner = (y[1:-1] >= y[:-2]) & (y[1:-1] >= y[2:])
    return np.nonzero(inner)[0] + 1


def sample_locus(
    M: StateSpace,
    wmin: float = 1e-4,
    wmax: float = 1e4,
    n: int = 4000,
    refine_tol: float = 1e-8,
) -> LocusSummary:
    """Sample M(jw) on a log grid and refine near the decisive features.

    The base grid of n log-spaced points on [wmin, wmax] is augmented by
    w = 0 and adaptively refined: real-axis crossings are bisected to
    |Im| < 1e-9, and local extrema of Re, -Re, |M|, and a fixed set of
    Popov-slope probes Re - q*w*Im are polished by golden-section search
    on the continuous response.
    """
    if wmin <= 0 or wmax <= wmin or n < 2:
        raise DimensionError("need 0 < wmin < wmax and n >= 2")
    if M.ninputs != 1 or M.noutputs != 1 or np.any(M.D != 0):
        raise DimensionError("M must be SISO and strictly proper")
    if not is_hurwitz(M.A):
        raise UnstableFixedPartError(
            "M(s) is not asymptotically stable; the graphical criteria "
            "presume a stable fixed part"
        )
    ev = _evaluator(M)
    grid = np.logspace(math.log10(wmin), math.log10(wmax), n)
    locus = freq_response(M, grid)
    om = locus.omegas
    vals = locus.values

    extra_w: list[float] = []
    extra_v: list[complex] = []

    # w = 0 sample: real by construction for real matrices
    m0 = ev(0.0)
    extra_w.append(0.0)
    extra_v.append(complex(m0.real))

    # real-axis crossings
    crossings = [(0.0, m0.real)]
    im = vals.imag
    for i in range(om.size - 1):
        if im[i] == 0.0 and abs(im[i]) < 1e-300:
            continue
        if np.sign(im[i]) * np.sign(im[i + 1]) < 0:
            wc, value = _bisect_crossing(ev, om[i], om[i + 1])
            crossings.append((wc, value.real))
            extra_w.append(wc)
            extra_v.append(value)

    # extrema polishing: per-sample tracks come from the stored grid, the
    # polish itself runs on the continuous response
    functionals = [
        (vals.real, lambda w: ev(w).real),
        (-vals.real, lambda w: -ev(w).real),
        (np.abs(vals), lambda w: abs(ev(w))),
    ]
    for q in PROBE_SLOPES:
        functionals.append(
            (
                vals.real - q * om * vals.imag,
                lambda w, q=q: (lambda m: m.real - q * w * m.imag)(ev(w)),
            )
        )
    for track, g in functionals:
        for i in _local_max_indices(track):
            wstar, _ = golden_max(g, om[i - 1], om[i + 1], rel_tol=refine_tol * 1e-1)
            extra_w.append(wstar)
            extra_v.append(ev(wstar))

    all_w = np.concatenate([om, np.array(extra_w)])
    all_v = np.concatenate([vals, np.array(extra_v, dtype=complex)])
    order = np.argsort(all_w, kind="stable")
    all_w = all_w[order]
    all_v = all_v[order]
    keep = np.concatenate([[True], np.diff(all_w) > 0])
    all_w = all_w[keep]
    all_v = all_v[keep]

    return LocusSummary(
        omegas=all_w,
        values=all_v,
        popov_ordinate=all_w * all_v.imag,
        x_max=float(all_v.real.max()),
        x_min=float(all_v.real.min()),
        real_axis_crossings=tuple(sorted(crossings)),
        evaluator=ev,
        refine_tol=refine_tol,
    )


def _bisect_crossing(ev, wlo: float, whi: float):
    flo = ev(wlo).imag
    for _ in range(200):
        wm = 0.5 * (wlo + whi)
        vm = ev(wm)
        if abs(vm.imag) < CROSSING_IM_TOL:
            return wm, vm
        if np.sign(vm.imag) == np.sign(flo):
            wlo = wm
            flo = vm.imag
        else:
            whi = wm
    return wm, vm


def _bracket(omegas: np.ndarray, i: int):
    lo = omegas[i - 1] if i > 0 else omegas[i]
    hi = omegas[i + 1] if i + 1 < omegas.size else omegas[i]
    return lo, hi


def _polish_max(summary: LocusSummary, per_sample: np.ndarray, cont):
    """Max of a functional: sample argmax polished on the continuous curve."""
    i = int(np.argmax(per_sample))
    best = float(per_sample[i])
    lo, hi = _bracket(summary.omegas, i)
    if hi > lo:
        _, val = golden_max(cont, lo, hi, rel_tol=1e-10)
        best = max(best, float(val))
    return best


def small_gain_bounds(summary: LocusSummary) -> StabilityInterval:
    """Smallest origin-centered circle enclosing the locus of M(jw).

    The radius r_sg is the peak magnitude of M; the interval is the
    symmetric (-1/r_sg, +1/r_sg).
    """
    ev = summary.evaluator
    r_sg = _polish_max(summary, np.abs(summary.values), lambda w: abs(ev(w)))
    return StabilityInterval(
        lower=-1.0 / r_sg,
        upper=1.0 / r_sg,
        criterion="small_gain",
        witnesses={"r_sg": r_sg},
    )


def circle_bounds(summary: LocusSummary, center: str = "optimal") -> StabilityInterval:
    """Smallest locus-enclosing circle centered on the real axis.

    ``center="optimal"`` picks the real-axis center minimizing the radius
    (this reproduces the reference results); ``center="midpoint"`` uses
    the midpoint of the extreme real parts instead.
    """
    X = summary.values.real
    Y = summary.values.imag
    ev = summary.evaluator

    def radius_samples(xc: float) -> float:
        return float(np.sqrt((X - xc) ** 2 + Y ** 2).max())

    if center == "optimal":
        span = summary.x_max - summary.x_min
        x_c, _ = golden_min(
            radius_samples,
            summary.x_min - span,
            summary.x_max + span,
            rel_tol=1e-10,
        )
    elif center == "midpoint":
        x_c = 0.5 * (summary.x_max + summary.x_min)
    else:
        raise ValueError(f"unknown center mode {center!r}")

    def dist(w: float) -> float:
        mv = ev(w)
        return math.hypot(mv.real - x_c, mv.imag)

    r_c = _polish_max(summary, np.sqrt((X - x_c) ** 2 + Y ** 2), dist)
    return _interval_from_intercepts(
        pos=x_c + r_c,
        neg=x_c - r_c,
        criterion="circle",
        witnesses={"x_c": x_c, "r_c": r_c, "center_mode": center},
    )


def positive_real_bounds(summary: LocusSummary) -> StabilityInterval:
    """Vertical lines at the extreme real parts of the locus."""
    ev = summary.evaluator
    x_max = _polish_max(summary, summary.values.real, lambda w: ev(w).real)
    x_min = -_polish_max(summary, -summary.values.real, lambda w: -ev(w).real)
    return _interval_from_intercepts(
        pos=x_max,
        neg=x_min,
        criterion="positive_real",
        witnesses={"x_max": x_max, "x_min": x_min},
    )


def popov_bounds(summary: LocusSummary, slope_search: bool = True) -> StabilityInterval:
    """Popov lines on the plot of w*Im[M(jw)] vs Re[M(jw)].

    With f(q, w) = Re[M(jw)] - q*w*Im[M(jw)], the right line intercept is
    c+ = min_q sup_w f and the left line intercept is c- = max_q inf_w f.
    Both are optimized by a coarse log-spaced scan over q followed by
    golden-section refinement (the objectives are convex/concave in q).
    ``slope_search=False`` forces vertical lines, reproducing the
    positive real criterion.
    """
    if not slope_search:
        pr = positive_real_bounds(summary)
        return StabilityInterval(
            lower=pr.lower,
            upper=pr.upper,
            criterion="popov",
            witnesses={
                "q_plus": None,
                "c_plus": pr.witnesses["x_max"],
                "q_minus": None,
                "c_minus": pr.witnesses["x_min"],
                "vertical": True,
            },
            lower_unbounded=pr.lower_unbounded,
            upper_unbounded=pr.upper_unbounded,
        )

    ev = summary.evaluator
    q_plus, c_plus = _optimize_popov_line(summary, ev, side=+1)
    q_minus, c_minus = _optimize_popov_line(summary, ev, side=-1)
    return _interval_from_intercepts(
        pos=c_plus,
        neg=c_minus,
        criterion="popov",
        witnesses={
            "q_plus": q_plus,
            "c_plus": c_plus,
            "q_minus": q_minus,
            "c_minus": c_minus,
            "vertical": False,
        },
    )


def _optimize_popov_line(summary: LocusSummary, ev, side: int):
    """min_q of sup_w [Re - q*w*Im] for side=+1; max_q of inf_w for side=-1."""
    X = summary.values.real.copy()
    OY = summary.popov_ordinate.copy()
    omegas = summary.omegas.copy()

    def objective(q: float) -> float:
        # side=+1: sup of f; side=-1: -inf of f = sup of -f
        return float((side * (X - q * OY)).max())

    qgrid = np.concatenate(
        [-np.logspace(4, -4, 81), [0.0], np.logspace(-4, 4, 81)]
    )
    coarse = np.array([objective(q) for q in qgrid])
    i = int(np.argmin(coarse))
    a = qgrid[max(i - 1, 0)]
    b = qgrid[min(i + 1, qgrid.size - 1)]
    q_opt, c_opt = golden_min(objective, a, b, rel_tol=1e-6)

    # polish the binding frequency on the continuous response, add the
    # sample, and re-optimize until the intercept stops moving
    for _ in range(8):
        f = side * (X - q_opt * OY)
        j = int(np.argmax(f))
        lo = omegas[j - 1] if j > 0 else omegas[j]
        hi = omegas[j + 1] if j + 1 < omegas.size else omegas[j]

        def cont(w: float) -> float:
            mv = ev(w)
            return side * (mv.real - q_opt * w * mv.imag)

        improved = False
        if hi > lo:
            wstar, val = golden_max(cont, lo, hi, rel_tol=1e-10)
            if val > f[j] + 1e-12 * max(1.0, abs(f[j])):
                mv = ev(wstar)
                k = int(np.searchsorted(omegas, wstar))
                omegas = np.insert(omegas, k, wstar)
                X = np.insert(X, k, mv.real)
                OY = np.insert(OY, k, wstar * mv.imag)
                improved = True
        if improved:
            q_prev, c_prev = q_opt, c_opt
            q_opt, c_opt = golden_min(
                objective, q_opt - abs(q_opt) - 1e-3, q_opt + abs(q_opt) + 1e-3,
                rel_tol=1e-8,
            )
            if abs(c_opt - c_prev) <= 1e-9 * max(1.0, abs(c_prev)):
                break
        else:
            c_opt = objective(q_opt)
            break
    return q_opt, side * c_opt


def _interval_from_intercepts(pos, neg, criterion, witnesses):
    lower_unbounded = pos <= 0
    upper_unbounded = neg >= 0
    if lower_unbounded or upper_unbounded:
        warnings.warn(
            f"{criterion}: intercept of the wrong sign; side reported as "
            "unbounded",
            stacklevel=3,
        )
    return StabilityInterval(
        lower=-math.inf if lower_unbounded else -1.0 / pos,
        upper=math.inf if upper_unbounded else -1.0 / neg,
        criterion=criterion,
        witnesses=witnesses,
        lower_unbounded=lower_unbounded,
        upper_unbounded=upper_unbounded,
    )


# ---------------------------------------------------------------------------
# Exact analysis


def _max_real_part(model: MDeltaModel, delta: float) -> float:
    return float(np.linalg.eigvals(closed_loop_matrix(model, delta)).real.max())


def _bisect_boundary(model, stable: float, unstable: float, tol: float, margin: float):
    while abs(unstable - stable) > tol:
        mid = 0.5 * (stable + unstable)
        if _max_real_part(model, mid) < -margin:
            stable = mid
        else:
            unstable = mid
    return 0.5 * (stable + unstable)


def exact_bounds(
    model: MDeltaModel,
    summary: LocusSummary,
    delta_tol: float = 1e-6,
    search_limit: float = 1e4,
    margin: float = 0.0,
) -> StabilityInterval:
    """Maximal open interval of delta around 0 with stable H + delta*Qcal.

    Candidate boundaries come from the real-axis crossings of M(jw) via
    delta = -1/x; each candidate is certified and polished by bisection
    on the eigenvalue stability predicate.  A side with no destabilizing
    crossing is confirmed stable out to ``search_limit`` and flagged
    unbounded.
    """
    if _max_real_part(model, 0.0) >= -margin:
        raise UnstableFixedPartError("nominal closed loop is not stable")
    candidates = sorted(
        -1.0 / x for (_, x) in summary.real_axis_crossings if abs(x) > 1e-12
    )
    pos = [d for d in candidates if d > 0]
    neg = [d for d in reversed(candidates) if d < 0]
    crossing_map = {
        -1.0 / x: (w, x)
        for (w, x) in summary.real_axis_crossings
        if abs(x) > 1e-12
    }

    def polish(cands, sign):
        last_stable = 0.0
        for c in cands:
            probe = c * (1 + 1e-3)
            if _max_real_part(model, probe) >= -margin:
                return (
                    _bisect_boundary(model, last_stable, probe, delta_tol, margin),
                    crossing_map.get(c),
                    c,
                )
            last_stable = probe
        # no crossing destabilizes: confirm out to the search limit
        limit = sign * search_limit
        if _max_real_part(model, limit) >= -margin:
            return _bisect_boundary(model, last_stable, limit, delta_tol, margin), None, None
        return None, None, None

    upper, up_cross, up_raw = polish(pos, +1)
    lower, lo_cross, lo_raw = polish(neg, -1)
    witnesses = {
        "upper_crossing": up_cross,
        "upper_from_crossing": up_raw,
        "lower_crossing": lo_cross,
        "lower_from_crossing": lo_raw,
    }
    return StabilityInterval(
        lower=-math.inf if lower is None else lower,
        upper=math.inf if upper is None else upper,
        criterion="exact",
        witnesses=witnesses,
        lower_unbounded=lower is None,
        upper_unbounded=upper is None,
    )


def scan_exact_bounds(
    model: MDeltaModel,
    lo: float = -100.0,
    hi: float = 10.0,
    step: float = 0.01,
    delta_tol: float = 1e-6,
    margin: float = 0.0,
) -> StabilityInterval:
    """Exact interval by brute-force outward scan plus bisection.

    Independent of the frequency-domain locus; used as the second route
    that must agree with exact_bounds.
    """
    if _max_real_part(model, 0.0) >= -margin:
        raise UnstableFixedPartError("nominal closed loop is not stable")

    def march(limit, sign):
        d = 0.0
        while sign * d < sign * limit:
            nxt = d + sign * step
            if sign * nxt > sign * limit:
                nxt = limit
            if _max_real_part(model, nxt) >= -margin:
                return _bisect_boundary(model, d, nxt, delta_tol, margin)
            d = nxt
        return None

    upper = march(hi, +1)
    lower = march(lo, -1)
    return StabilityInterval(
        lower=-math.inf if lower is None else lower,
        upper=math.inf if upper is None else upper,
        criterion="exact",
        witnesses={"route": "scan", "step": step},
        lower_unbounded=lower is None,
        upper_unbounded=upper is None,
    )


def verify_interval(
    model: MDeltaModel,
    interval: StabilityInterval,
    n_samples: int,
    margin: float = 0.0,
) -> VerificationReport:
    """Audit an interval: interior deltas must keep H + delta*Qcal stable.

    For the exact interval the matrix must additionally be unstable just
    outside each finite bound (at bound +- 1e-3*|bound|).
    """
    if interval.lower_unbounded or interval.upper_unbounded:
        raise ValueError("verify_interval requires a finite interval")
    if n_samples == 0:
        warnings.warn(
            f"{interval.criterion}: n_samples = 0, verification is vacuous",
            stacklevel=2,
        )
        return VerificationReport(
            criterion=interval.criterion,
            passed=True,
            n_checked=0,
            failures=(),
            notes="vacuous (no samples)",
        )
    if interval.upper <= interval.lower:
        return VerificationReport(
            criterion=interval.criterion,
            passed=True,
            n_checked=0,
            failures=(),
            notes="degenerate interval",
        )
    deltas = np.linspace(interval.lower, interval.upper, n_samples + 2)[1:-1]
    failures = []
    for d in deltas:
        mr = _max_real_part(model, float(d))
        if mr >= -margin:
            failures.append((float(d), mr))
    notes = ""
    if interval.criterion == "exact":
        for bound in (interval.lower, interval.upper):
            outside = bound * (1 + 1e-3) if bound != 0 else 1e-3
            if _max_real_part(model, outside) < -margin:
                failures.append((outside, _max_real_part(model, outside)))
                notes = "expected instability just outside the exact bound"
    return VerificationReport(
        criterion=interval.criterion,
        passed=not failures,
        n_checked=len(deltas),
        failures=tuple(failures),
        notes=notes,
    )


def require_sound(report: VerificationReport) -> None:
    if not report.passed:
        d, mr = report.failures[0]
        raise SoundnessError(
            f"{report.criterion} interval failed verification at delta = {d} "
            f"(max eigenvalue real part {mr:.3e})"
        )
