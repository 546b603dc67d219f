"""Two-level polarization states, observables, and weak-value algebra.

The weak value of an observable A for pre-selection |psi> and post-selection
|phi> is <phi|A|psi> / <phi|psi>.  Without post-selection the pointer reads
the plain expectation <psi|A|psi>; reading two couplings jointly yields the
sequential value <psi|B A|psi> with the first-coupled observable rightmost.
A joint reading is anomalous when its real part leaves the interval spanned
by all pairwise eigenvalue products of the two observables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OrthogonalPostselection

NORMALIZATION_TOL = 1e-12
HERMITICITY_TOL = 1e-12
ORTHOGONALITY_TOL = 1e-12
ANOMALY_MARGIN = 1e-12


@dataclass(frozen=True)
class QubitState:
    """Normalized two-component state in the {|H>, |V>} basis."""

    amp_h: complex
    amp_v: complex

    def __post_init__(self):
        object.__setattr__(self, "amp_h", complex(self.amp_h))
        object.__setattr__(self, "amp_v", complex(self.amp_v))
        total = abs(self.amp_h) ** 2 + abs(self.amp_v) ** 2
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"state must be normalized, got |psi|^2 = {total!r}")

    def vector(self) -> np.ndarray:
        return np.array([self.amp_h, self.amp_v])


@dataclass(frozen=True)
class Observable:
    """Hermitian 2x2 operator on the polarization qubit."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"observable must be 2x2, got shape {m.shape}")
        if not np.allclose(m, m.conj().T, rtol=0.0, atol=HERMITICITY_TOL):
            raise ValueError("observable must be Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def projector(cls, state: QubitState) -> "Observable":
        v = state.vector()
        return cls(np.outer(v, v.conj()))

    def eigenvalues(self) -> tuple[float, float]:
        """Real eigenvalues in ascending order."""
        lo, hi = np.linalg.eigvalsh(self.matrix)
        return float(lo), float(hi)

    def __array__(self, dtype=None, copy=None):
        if copy:
            return np.array(self.matrix, dtype=dtype if dtype is not None else complex)
        return self.matrix if dtype is None else self.matrix.astype(dtype)


@dataclass(frozen=True)
class WeakValueResult:
    """Sequential joint reading with its classical eigenvalue-product range."""

    value: complex
    interval: tuple[float, float]
    anomalous: bool


@dataclass(frozen=True)
class DecompositionTerm:
    """One post-selected branch: outcome probability and conditional weak value.

    ``weak_value`` is None when the branch has zero probability, where the
    conditional value is undefined.
    """

    probability: float
    weak_value: complex | None


def inner(a: QubitState, b: QubitState) -> complex:
    """Inner product <a|b>."""
    return complex(np.vdot(a.vector(), b.vector()))


def linear_polarization(angle_deg: float) -> QubitState:
    """Linear polarization at the given angle from horizontal."""
    rad = np.deg2rad(angle_deg)
    return QubitState(np.cos(rad), np.sin(rad))


HORIZONTAL = QubitState(1.0, 0.0)
VERTICAL = QubitState(0.0, 1.0)
PLUS_SIXTY = linear_polarization(60.0)
MINUS_SIXTY = linear_polarization(-60.0)


def waveplate_hwp(theta_deg: float) -> Observable:
    """Half-wave plate at fast-axis angle theta from horizontal.

    Returns [[cos 2t, sin 2t], [sin 2t, -cos 2t]]: Hermitian, unitary, and
    involutory, so it doubles as an observable with eigenvalues +-1.
    """
    two_theta = 2.0 * np.deg2rad(theta_deg)
    c, s = np.cos(two_theta), np.sin(two_theta)
    return Observable(np.array([[c, s], [s, -c]]))


def apply_unitary(u: Observable | np.ndarray, state: QubitState) -> QubitState:
    """Apply a 2x2 unitary to a state; rejects maps that break normalization."""
    vec = np.asarray(u, dtype=complex) @ state.vector()
    return QubitState(vec[0], vec[1])


def weak_value(pre: QubitState, post: QubitState, observable: Observable) -> complex:
    """Post-selected weak value <post|A|pre> / <post|pre>."""
    den = inner(post, pre)
    if abs(den) <= ORTHOGONALITY_TOL:
        raise OrthogonalPostselection(
            "post-selection is orthogonal to the pre-selected state"
        )
    num = np.vdot(post.vector(), observable.matrix @ pre.vector())
    return complex(num / den)


def expectation(pre: QubitState, observable: Observable) -> complex:
    """No-post-selection pointer reading <pre|A|pre>."""
    vec = pre.vector()
    return complex(np.vdot(vec, observable.matrix @ vec))


def product_eigen_range(first: Observable, second: Observable) -> tuple[float, float]:
    """Extreme products of one eigenvalue from each observable."""
    products = [x * y for x in first.eigenvalues() for y in second.eigenvalues()]
    return min(products), max(products)


def sequential_weak_value(
    pre: QubitState, first: Observable, second: Observable
) -> WeakValueResult:
    """Joint reading <pre|second . first|pre> of two sequential couplings.

    The first-coupled observable sits rightmost.  The reading is anomalous
    when its real part leaves the eigenvalue-product interval, which no
    classical mixture of outcomes can do.
    """
    vec = pre.vector()
    value = complex(np.vdot(vec, second.matrix @ (first.matrix @ vec)))
    lo, hi = product_eigen_range(first, second)
    anomalous = value.real < lo - ANOMALY_MARGIN or value.real > hi + ANOMALY_MARGIN
    return WeakValueResult(value=value, interval=(lo, hi), anomalous=anomalous)


def postselected_decomposition(
    pre: QubitState, observable: Observable, basis: tuple[QubitState, QubitState]
) -> list[DecompositionTerm]:
    """Split the expectation into post-selected branches over an orthonormal basis.

    The probability-weighted sum of branch weak values reproduces
    ``expectation(pre, observable)``; zero-probability branches are flagged
    with an undefined (None) weak value rather than NaN.
    """
    if abs(inner(basis[0], basis[1])) > ORTHOGONALITY_TOL:
        raise ValueError("decomposition basis must be orthonormal")
    terms = []
    for post in basis:
        amp = inner(post, pre)
        if abs(amp) <= ORTHOGONALITY_TOL:
            terms.append(DecompositionTerm(probability=0.0, weak_value=None))
            continue
        num = np.vdot(post.vector(), observable.matrix @ pre.vector())
        terms.append(
            DecompositionTerm(probability=abs(amp) ** 2, weak_value=complex(num / amp))
        )
    return terms
