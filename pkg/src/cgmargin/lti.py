"""Minimal continuous-time LTI algebra.

Transfer functions in zero/pole/gain form, state-space realizations,
series and unity-feedback interconnections, eigenvalues, and frequency
response.  Everything here is real-coefficient, continuous-time, and
immutable after construction.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionError,
    RealizationError,
    RepresentationError,
)

CONJUGATE_TOL = 1e-10


def _real_poly(roots) -> np.ndarray:
    """Monic real polynomial (descending coefficients) with the given roots.

    Built by incremental root multiplication; the imaginary residue left by
    a conjugate-closed root set is discarded.
    """
    coeffs = np.array([1.0 + 0.0j])
    for r in roots:
        coeffs = np.convolve(coeffs, np.array([1.0, -complex(r)]))
    return coeffs.real.copy()


def _check_conjugate_closed(roots, what: str) -> None:
    pool = [complex(r) for r in roots if abs(complex(r).imag) > CONJUGATE_TOL]
    while pool:
        r = pool.pop()
        scale = max(1.0, abs(r))
        for i, other in enumerate(pool):
            if abs(other - r.conjugate()) <= CONJUGATE_TOL * scale:
                pool.pop(i)
                break
        else:
            raise RepresentationError(
                f"{what} {r} has no conjugate partner; real-coefficient "
                "representation requires conjugate-closed root sets"
            )


@dataclass(frozen=True, eq=False)
class TransferFunction:
    """Rational SISO transfer function in zpk and coefficient form.

    ``num``/``den`` are real coefficient arrays in descending degree,
    derived from the zpk data.  The function is proper by construction.
    """

    zeros: tuple
    poles: tuple
    gain: float
    num: np.ndarray = field(repr=False)
    den: np.ndarray = field(repr=False)

    def __call__(self, s: complex) -> complex:
        """Evaluate from the zpk factors."""
        val = complex(self.gain)
        for z in self.zeros:
            val *= s - z
        for p in self.poles:
            val /= s - p
        return val

    def eval_coeffs(self, s: complex) -> complex:
        """Evaluate from the polynomial coefficient form."""
        return complex(np.polyval(self.num, s) / np.polyval(self.den, s))

    @property
    def order(self) -> int:
        return len(self.poles)


def tf_from_zpk(zeros, poles, gain: float) -> TransferFunction:
    """Build a proper real-coefficient transfer function from zpk data."""
    if not np.isfinite(gain):
        raise RepresentationError("gain must be finite")
    _check_conjugate_closed(zeros, "zero")
    _check_conjugate_closed(poles, "pole")
    if len(zeros) > len(poles):
        raise RepresentationError(
            f"improper transfer function: {len(zeros)} zeros exceed "
            f"{len(poles)} poles"
        )
    num = float(gain) * _real_poly(zeros)
    den = _real_poly(poles)
    return TransferFunction(
        zeros=tuple(complex(z) for z in zeros),
        poles=tuple(complex(p) for p in poles),
        gain=float(gain),
        num=num,
        den=den,
    )


@dataclass(frozen=True, eq=False)
class StateSpace:
    """State-space system (A, B, C, D) with optional signal labels."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    state_names: tuple = ()
    input_names: tuple = ()
    output_names: tuple = ()

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        B = np.atleast_2d(np.asarray(self.B, dtype=float))
        C = np.atleast_2d(np.asarray(self.C, dtype=float))
        D = np.atleast_2d(np.asarray(self.D, dtype=float))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)
        n = A.shape[0]
        if A.shape != (n, n):
            raise DimensionError(f"A must be square, got {A.shape}")
        if B.shape[0] != n:
            raise DimensionError(f"B has {B.shape[0]} rows, expected {n}")
        if C.shape[1] != n:
            raise DimensionError(f"C has {C.shape[1]} cols, expected {n}")
        if D.shape != (C.shape[0], B.shape[1]):
            raise DimensionError(
                f"D must be {C.shape[0]}x{B.shape[1]}, got {D.shape}"
            )

    @property
    def nstates(self) -> int:
        return self.A.shape[0]

    @property
    def ninputs(self) -> int:
        return self.B.shape[1]

    @property
    def noutputs(self) -> int:
        return self.C.shape[0]

    def evaluate(self, s: complex) -> np.ndarray:
        """Transfer matrix C (sI - A)^-1 B + D at one complex point."""
        n = self.nstates
        if n == 0:
            return self.D.astype(complex)
        x = np.linalg.solve(s * np.eye(n) - self.A, self.B)
        return self.C @ x + self.D


@dataclass(frozen=True, eq=False)
class FrequencyLocus:
    """Samples (omega, value) of a SISO frequency response, omega >= 0."""

    omegas: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        om = np.asarray(self.omegas, dtype=float)
        vals = np.asarray(self.values, dtype=complex)
        if om.ndim != 1 or om.shape != vals.shape:
            raise DimensionError("omegas and values must be matching 1-D arrays")
        if om.size and om[0] < 0:
            raise DimensionError("frequencies must be nonnegative")
        if np.any(np.diff(om) <= 0):
            raise DimensionError("frequencies must be strictly increasing")
        if not np.all(np.isfinite(vals)):
            raise DimensionError("locus contains non-finite samples")
        object.__setattr__(self, "omegas", om)
        object.__setattr__(self, "values", vals)


def ss_realize(tf: TransferFunction) -> StateSpace:
    """Controllable companion realization of a proper transfer function.

    Strictly proper input yields D = 0; a constant gain yields a
    zero-state system.
    """
    n = tf.order
    if len(tf.zeros) > n:
        raise RealizationError("cannot realize an improper transfer function")
    if n == 0:
        empty = np.zeros((0, 0))
        return StateSpace(
            empty, np.zeros((0, 1)), np.zeros((1, 0)), [[tf.gain]]
        )
    den = tf.den / tf.den[0]
    num = np.concatenate([np.zeros(n + 1 - len(tf.num)), tf.num / tf.den[0]])
    a = den[1:]
    b0 = num[0]
    A = np.zeros((n, n))
    A[0, :] = -a
    if n > 1:
        A[1:, :-1] = np.eye(n - 1)
    B = np.zeros((n, 1))
    B[0, 0] = 1.0
    C = (num[1:] - b0 * a).reshape(1, -1)
    D = np.array([[b0]])
    return StateSpace(A, B, C, D)


def series(first: StateSpace, second: StateSpace) -> StateSpace:
    """Series product ``first * second`` (signal flows second -> first).

    States are stacked [x_first; x_second]; the composite state matrix is
    the block upper-triangular [[A1, B1 C2], [0, A2]].
    """
    if first.ninputs != second.noutputs:
        raise DimensionError(
            f"cannot connect {second.noutputs} outputs to "
            f"{first.ninputs} inputs"
        )
    n1, n2 = first.nstates, second.nstates
    A = np.block(
        [
            [first.A, first.B @ second.C],
            [np.zeros((n2, n1)), second.A],
        ]
    )
    B = np.vstack([first.B @ second.D, second.B])
    C = np.hstack([first.C, first.D @ second.C])
    D = first.D @ second.D
    return StateSpace(A, B, C, D)


def feedback_unity(loop: StateSpace) -> StateSpace:
    """Close a strictly proper loop with unity negative feedback.

    Returns the system with state matrix A - BC; input/output maps are
    unchanged.  Only the D = 0 case is supported.
    """
    if np.any(loop.D != 0):
        raise DimensionError(
            "unity feedback requires a strictly proper loop (D = 0)"
        )
    H = loop.A - loop.B @ loop.C
    return StateSpace(H, loop.B, loop.C, loop.D)


def freq_response(sys: StateSpace, grid) -> FrequencyLocus:
    """Sample C (jwI - A)^-1 B + D of a SISO system over a frequency grid.

    Each sample is a dense linear solve.  A grid point that lands on an
    imaginary-axis pole is perturbed by one grid step times 1e-6, with a
    warning.
    """
    if sys.ninputs != 1 or sys.noutputs != 1:
        raise DimensionError("freq_response requires a SISO system")
    om = np.asarray(grid, dtype=float)
    if om.ndim != 1 or om.size == 0:
        raise DimensionError("grid must be a nonempty 1-D array")
    if np.any(om < 0) or np.any(np.diff(om) <= 0):
        raise DimensionError("grid must be nonnegative and strictly increasing")
    n = sys.nstates
    I = np.eye(n)
    omegas = []
    values = []
    for i, w in enumerate(om):
        try:
            val = _solve_sample(sys, I, w)
        except np.linalg.LinAlgError:
            step = om[min(i + 1, om.size - 1)] - om[max(i - 1, 0)]
            if step <= 0:
                step = max(abs(w), 1.0)
            w_shift = w + step * 1e-6
            warnings.warn(
                f"frequency {w} rad/s coincides with an imaginary-axis pole; "
                f"perturbed to {w_shift}",
                stacklevel=2,
            )
            w = w_shift
            val = _solve_sample(sys, I, w)
        omegas.append(w)
        values.append(val)
    return FrequencyLocus(np.array(omegas), np.array(values))


def _solve_sample(sys: StateSpace, I: np.ndarray, w: float) -> complex:
    if sys.nstates == 0:
        return complex(sys.D[0, 0])
    x = np.linalg.solve(1j * w * I - sys.A, sys.B)
    return complex((sys.C @ x + sys.D)[0, 0])


def tf_of_ss(sys: StateSpace, trim_tol: float = 1e-9) -> TransferFunction:
    """zpk form of a SISO state-space system.

    The denominator is the characteristic polynomial of A; numerator
    coefficients are recovered by evaluating den(s) * (C (sI-A)^-1 B + D)
    at probe points and solving the resulting Vandermonde system.
    Leading numerator coefficients below trim_tol (relative to the
    largest) are trimmed before rooting.
    """
    if sys.ninputs != 1 or sys.noutputs != 1:
        raise DimensionError("tf_of_ss requires a SISO system")
    n = sys.nstates
    if n == 0:
        return tf_from_zpk([], [], float(sys.D[0, 0]))
    den = np.poly(sys.A).real
    poles = eigenvalues(sys.A)
    radius = 1.0 + float(np.max(np.abs(poles)))
    pts = radius * np.exp(2j * np.pi * (np.arange(2 * n + 2) + 0.25) / (2 * n + 2))
    rhs = np.array(
        [sys.evaluate(s)[0, 0] * np.polyval(den, s) for s in pts]
    )
    vand = np.vander(pts, n + 1)
    num, *_ = np.linalg.lstsq(vand, rhs, rcond=None)
    num = num.real
    scale = np.max(np.abs(num))
    k = 0
    while k < n and abs(num[k]) < trim_tol * scale:
        k += 1
    num = num[k:]
    zeros = np.roots(num)
    _check_conjugate_closed(zeros, "zero")
    return tf_from_zpk(zeros, poles, float(num[0]))


def eigenvalues(A) -> np.ndarray:
    """Full spectrum of a square real matrix, sorted by (real, imag)."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[0] != A.shape[1]:
        raise DimensionError(f"matrix must be square, got {A.shape}")
    lam = np.linalg.eigvals(A)
    order = np.lexsort((lam.imag, lam.real))
    return lam[order]


def is_hurwitz(A, margin: float = 0.0) -> bool:
    """True iff every eigenvalue has real part < -margin."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[0] == 0:
        return True
    return bool(np.max(eigenvalues(A).real) < -margin)
