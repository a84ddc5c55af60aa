"""Covariance-matrix representation of zero-mean multimode Gaussian states.

Conventions used throughout the package: quadrature ordering
(x1, p1, ..., xn, pn), x = a + a^dag, shot-noise units (vacuum
quadrature variance equals 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

SYMMETRY_RTOL = 1e-12
PHYSICALITY_TOL = 1e-9
SYMPLECTIC_TOL = 1e-10

# Below this computed minimum the fast eigensolver result is re-checked in
# high precision before physicality is judged (see _symplectic_spectrum).
_REFINE_TRIGGER = 1e-10

# Above this matrix scale double precision cannot deliver the absolute
# accuracy the near-unity symplectic eigenvalues need (the eigensolver's
# noise is ~eps * |sigma|, the entropy slope near nu = 1 is ~4 bits/unit),
# so spectra and heterodyne conditioning switch to high precision.
_HP_SCALE = 1e6

# Running audit of the smallest symplectic eigenvalue ever seen during
# CovMat validation, used by the verification suite to assert that every
# state constructed along the way respected the uncertainty principle.
_audit = {"min_nu": math.inf, "count": 0}


def reset_physicality_audit() -> None:
    _audit["min_nu"] = math.inf
    _audit["count"] = 0


def physicality_audit() -> tuple[float, int]:
    """Return (smallest symplectic eigenvalue seen, number of states checked)."""
    return _audit["min_nu"], _audit["count"]


def symplectic_form(n_modes: int) -> np.ndarray:
    """The 2n x 2n symplectic form, block-diagonal [[0, 1], [-1, 0]]."""
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        omega[2 * k, 2 * k + 1] = 1.0
        omega[2 * k + 1, 2 * k] = -1.0
    return omega


def _refined_spectrum(matrix: np.ndarray) -> np.ndarray:
    # High-precision fallback: near nu = 1 the double-precision eigensolver
    # carries absolute noise up to ~eps * ||matrix|| * (eigenvector
    # conditioning), which at large amplifier gains (entries ~1e10) swamps
    # the 1e-9 physicality margin even when the stored matrix is physical.
    n = matrix.shape[0] // 2
    with mpmath.mp.workdps(30):
        k = mpmath.matrix((symplectic_form(n) @ matrix).tolist())
        eigs = mpmath.eig(k, left=False, right=False)
    nus = sorted((abs(z) for z in eigs), reverse=True)
    return np.array([float(nus[2 * i]) for i in range(n)])


def _symplectic_spectrum(matrix: np.ndarray) -> np.ndarray:
    """Symplectic eigenvalues of a symmetric matrix, descending, one per mode."""
    if float(np.abs(matrix).max()) > _HP_SCALE:
        return _refined_spectrum(matrix)
    n = matrix.shape[0] // 2
    eigs = np.linalg.eigvals(symplectic_form(n) @ matrix)
    # |eigs| carries each nu twice (the +/- i*nu pair); sorting makes the
    # pairs adjacent so taking every second entry deduplicates them.
    nus = np.sort(np.abs(eigs))[::-1][::2].copy()
    if float(nus.min()) < 1.0 - _REFINE_TRIGGER:
        return _refined_spectrum(matrix)
    return nus


@dataclass(frozen=True, eq=False)
class CovMat:
    """A labeled covariance matrix of n modes.

    matrix: real symmetric 2n x 2n array in (x1, p1, ..., xn, pn) ordering.
    labels: n distinct mode identifiers, positionally aligned with the
        2x2 diagonal blocks.

    Construction validates symmetry and physicality (every symplectic
    eigenvalue >= 1 - 1e-9) and freezes the array.
    """

    matrix: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] % 2:
            raise ValueError(f"covariance matrix must be 2n x 2n, got shape {mat.shape}")
        n = mat.shape[0] // 2
        labels = tuple(str(lbl) for lbl in self.labels)
        if len(labels) != n:
            raise ValueError(f"expected {n} mode labels, got {len(labels)}")
        if len(set(labels)) != n:
            raise ValueError(f"mode labels must be unique, got {labels}")
        scale = max(float(np.abs(mat).max()), 1.0)
        if float(np.abs(mat - mat.T).max()) > SYMMETRY_RTOL * scale:
            raise ValueError("covariance matrix is not symmetric")
        mat = 0.5 * (mat + mat.T)
        nus = _symplectic_spectrum(mat)
        nu_min = float(nus.min())
        if nu_min < _audit["min_nu"]:
            _audit["min_nu"] = nu_min
        _audit["count"] += 1
        if nu_min < 1.0 - PHYSICALITY_TOL:
            raise ValueError(
                f"unphysical covariance matrix: smallest symplectic eigenvalue {nu_min:.12g}"
            )
        mat.flags.writeable = False
        nus.flags.writeable = False
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_nus", nus)

    @property
    def n_modes(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"unknown mode label {label!r}; state has {self.labels}") from None

    def block(self, label_row: str, label_col: str) -> np.ndarray:
        """The 2x2 block coupling two modes (a copy)."""
        i, j = 2 * self.index(label_row), 2 * self.index(label_col)
        return self.matrix[i : i + 2, j : j + 2].copy()


@dataclass(frozen=True)
class TwoModeStd:
    """Standard-form two-mode covariance entries: blocks diag(a,a), diag(b,b),
    diag(c_plus, c_minus)."""

    a: float
    b: float
    c_plus: float
    c_minus: float

    def to_covmat(self, labels: tuple[str, str] = ("m1", "m2")) -> CovMat:
        m = np.diag([self.a, self.a, self.b, self.b]).astype(float)
        m[0, 2] = m[2, 0] = self.c_plus
        m[1, 3] = m[3, 1] = self.c_minus
        return CovMat(m, labels)


@dataclass(frozen=True, eq=False)
class Symplectic:
    """A real symplectic matrix acting on `arity` modes (S Omega S^T = Omega)."""

    matrix: np.ndarray
    arity: int

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=float)
        if mat.shape != (2 * self.arity, 2 * self.arity):
            raise ValueError(
                f"symplectic on {self.arity} modes must be {2*self.arity}x{2*self.arity}, "
                f"got {mat.shape}"
            )
        omega = symplectic_form(self.arity)
        dev = float(np.abs(mat @ omega @ mat.T - omega).max())
        # S Omega S^T entries are products of two entries of S, so rounding
        # scales with |S|^2; the tolerance is relative to that scale.
        scale = max(1.0, float(np.abs(mat).max()) ** 2)
        if dev > SYMPLECTIC_TOL * scale:
            raise ValueError(f"matrix is not symplectic (S Omega S^T deviates by {dev:.3g})")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)


def _tmsv_entries(gamma: float) -> tuple[float, float]:
    """Standard-form (a, c) for a two-mode squeezed vacuum, physically rounded.

    The textbook entries rounded to doubles can land on a matrix whose exact
    smallest symplectic eigenvalue sits a few 1e-9 below 1; the per-ulp
    granularity of nu grows with the squeezing, so no choice of formula fixes
    this. c is lowered one ulp at a time until the stored pair satisfies
    (a - c)(a + c) >= 1 exactly, keeping the state on the physical side while
    moving the entries by at most a couple of ulps.
    """
    denom = 1.0 - gamma * gamma
    a = (1.0 + gamma * gamma) / denom
    c = 2.0 * gamma / denom
    exact_a = Fraction(a)
    for _ in range(64):
        if (exact_a - Fraction(c)) * (exact_a + Fraction(c)) >= 1:
            break
        c = math.nextafter(c, 0.0)
    return a, c


def tmsv(gamma: float, labels: tuple[str, str] = ("m1", "m2")) -> CovMat:
    """Two-mode squeezed vacuum with squeezing parameter gamma in [0, 1).

    Entries a = b = (1 + gamma^2)/(1 - gamma^2), c = 2 gamma/(1 - gamma^2)
    with sign pattern diag(c, -c) on the cross block.
    """
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"tmsv squeezing must lie in [0, 1), got {gamma}")
    a, c = _tmsv_entries(gamma)
    return TwoModeStd(a, a, c, -c).to_covmat(labels)


def thermal(variance: float, label: str = "m1") -> CovMat:
    """Single thermal mode diag(variance, variance); variance = 1 is vacuum."""
    if variance < 1.0:
        raise ValueError(f"thermal variance must be >= 1, got {variance}")
    return CovMat(np.diag([variance, variance]).astype(float), (label,))


def two_mode_squeezer(g: float) -> Symplectic:
    """Two-mode squeezer of gain g = cosh^2(r) >= 1.

    Diagonal blocks sqrt(g) I2, off-diagonal blocks diag(sqrt(g-1), -sqrt(g-1)).
    """
    if g < 1.0:
        raise ValueError(f"squeezer gain must be >= 1, got {g}")
    sg = math.sqrt(g)
    sgm = math.sqrt(g - 1.0)
    mat = np.array(
        [
            [sg, 0.0, sgm, 0.0],
            [0.0, sg, 0.0, -sgm],
            [sgm, 0.0, sg, 0.0],
            [0.0, -sgm, 0.0, sg],
        ]
    )
    return Symplectic(mat, 2)


def beam_splitter(t: float) -> Symplectic:
    """Beam splitter of transmissivity t in [0, 1].

    First output = sqrt(t) m1 - sqrt(1-t) m2, second = sqrt(1-t) m1 + sqrt(t) m2.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"beam splitter transmissivity must lie in [0, 1], got {t}")
    st = math.sqrt(t)
    sr = math.sqrt(1.0 - t)
    mat = np.array(
        [
            [st, 0.0, -sr, 0.0],
            [0.0, st, 0.0, -sr],
            [sr, 0.0, st, 0.0],
            [0.0, sr, 0.0, st],
        ]
    )
    return Symplectic(mat, 2)


def direct_sum(*states: CovMat) -> CovMat:
    """Combine independent states into one; labels are concatenated and must stay unique."""
    if not states:
        raise ValueError("direct_sum needs at least one state")
    mats = [s.matrix for s in states]
    labels: tuple[str, ...] = ()
    for s in states:
        labels = labels + s.labels
    n_total = sum(m.shape[0] for m in mats)
    out = np.zeros((n_total, n_total))
    offset = 0
    for m in mats:
        k = m.shape[0]
        out[offset : offset + k, offset : offset + k] = m
        offset += k
    return CovMat(out, labels)


def apply_symplectic(state: CovMat, s: Symplectic, target_labels: tuple[str, ...]) -> CovMat:
    """Apply a symplectic to the designated modes: sigma -> S sigma S^T with S
    embedded as identity on every other mode."""
    target = tuple(target_labels)
    if len(target) != s.arity:
        raise ValueError(f"symplectic acts on {s.arity} modes, got {len(target)} labels")
    idx = [state.index(lbl) for lbl in target]
    if len(set(idx)) != len(idx):
        raise ValueError(f"target labels must be distinct, got {target}")
    n = state.n_modes
    full = np.eye(2 * n)
    for a, ia in enumerate(idx):
        for b, ib in enumerate(idx):
            full[2 * ia : 2 * ia + 2, 2 * ib : 2 * ib + 2] = s.matrix[
                2 * a : 2 * a + 2, 2 * b : 2 * b + 2
            ]
    return CovMat(full @ state.matrix @ full.T, state.labels)


def partial_trace(state: CovMat, keep_labels: tuple[str, ...]) -> CovMat:
    """Restrict to the kept modes (principal submatrix), reordered to keep_labels."""
    keep = tuple(keep_labels)
    if not keep:
        raise ValueError("must keep at least one mode")
    idx = [state.index(lbl) for lbl in keep]
    if len(set(idx)) != len(idx):
        raise ValueError(f"keep labels must be distinct, got {keep}")
    rows = np.concatenate([[2 * i, 2 * i + 1] for i in idx])
    return CovMat(state.matrix[np.ix_(rows, rows)], keep)


def symplectic_eigenvalues(state: CovMat) -> np.ndarray:
    """Symplectic eigenvalues of the state, one per mode, descending."""
    return state._nus.copy()


def _entropy_term(nu: float) -> float:
    # (nu+1)/2 log2 (nu+1)/2 - (nu-1)/2 log2 (nu-1)/2, with the pure-state
    # 0 log 0 limit handled by an explicit branch.
    if nu <= 1.0 + 1e-12:
        return 0.0
    if nu > 1.0e4:
        # the direct form subtracts two ~nu log2 nu sized terms; at large nu
        # that cancellation costs more absolute accuracy than the result has
        return 0.5 * nu * math.log1p(2.0 / (nu - 1.0)) / math.log(2.0) + 0.5 * math.log2(
            0.25 * (nu - 1.0) * (nu + 1.0)
        )
    hi = 0.5 * (nu + 1.0)
    lo = 0.5 * (nu - 1.0)
    return hi * math.log2(hi) - lo * math.log2(lo)


def von_neumann_entropy(state: CovMat) -> float:
    """Von Neumann entropy in bits, summed over the symplectic eigenvalues."""
    return float(sum(_entropy_term(float(nu)) for nu in symplectic_eigenvalues(state)))


def _split_for_measurement(state: CovMat, measured_label: str):
    if state.n_modes < 2:
        raise ValueError("cannot condition away the only remaining mode")
    i = state.index(measured_label)
    rest = [j for j in range(state.n_modes) if j != i]
    rest_rows = np.concatenate([[2 * j, 2 * j + 1] for j in rest])
    meas_rows = np.array([2 * i, 2 * i + 1])
    a = state.matrix[np.ix_(rest_rows, rest_rows)]
    c = state.matrix[np.ix_(rest_rows, meas_rows)]
    b = state.matrix[np.ix_(meas_rows, meas_rows)]
    labels = tuple(state.labels[j] for j in rest)
    return a, c, b, labels


def _schur_heterodyne_hp(a: np.ndarray, c: np.ndarray, b: np.ndarray) -> np.ndarray:
    # The subtraction cancels ~|sigma| down to O(1) entries, so double
    # precision would leave absolute errors ~eps * |sigma| in the result.
    with mpmath.mp.workdps(40):
        am = mpmath.matrix(a.tolist())
        cm = mpmath.matrix(c.tolist())
        bm = mpmath.matrix(b.tolist())
        bm[0, 0] += 1
        bm[1, 1] += 1
        x = am - cm * (bm**-1) * cm.T
    return np.array([[float(x[i, j]) for j in range(x.cols)] for i in range(x.rows)])


def condition_heterodyne(state: CovMat, measured_label: str) -> CovMat:
    """Remaining covariance after an ideal heterodyne measurement of one mode.

    The conditional matrix sigma_rest - sigma_cross (sigma_meas + I)^-1
    sigma_cross^T does not depend on the measurement outcome.
    """
    a, c, b, labels = _split_for_measurement(state, measured_label)
    if float(np.abs(state.matrix).max()) > _HP_SCALE:
        cond = _schur_heterodyne_hp(a, c, b)
    else:
        cond = a - c @ np.linalg.inv(b + np.eye(2)) @ c.T
    return CovMat(cond, labels)


def condition_homodyne(state: CovMat, measured_label: str, quadrature: str = "x") -> CovMat:
    """Remaining covariance after an ideal homodyne measurement of one quadrature."""
    if quadrature not in ("x", "p"):
        raise ValueError(f"quadrature must be 'x' or 'p', got {quadrature!r}")
    a, c, b, labels = _split_for_measurement(state, measured_label)
    proj = np.diag([1.0, 0.0]) if quadrature == "x" else np.diag([0.0, 1.0])
    cond = a - c @ np.linalg.pinv(proj @ b @ proj) @ c.T
    return CovMat(cond, labels)


# Raw-array plumbing for the multimode pipelines. Intermediate states of a
# long interferometer are scratch arithmetic, not results; working on bare
# ndarrays here keeps CovMat construction (and its physicality audit) at the
# contract boundaries where a state is actually handed back.


def _embed_pair(s4: np.ndarray, n_modes: int, i: int, j: int) -> np.ndarray:
    """Embed a 4x4 two-mode matrix into 2n x 2n acting on mode slots (i, j)."""
    full = np.eye(2 * n_modes)
    idx = (i, j)
    for a in range(2):
        for b in range(2):
            full[2 * idx[a] : 2 * idx[a] + 2, 2 * idx[b] : 2 * idx[b] + 2] = s4[
                2 * a : 2 * a + 2, 2 * b : 2 * b + 2
            ]
    return full


def _channel_on_mode(mat: np.ndarray, i: int, tau: float, v: float) -> np.ndarray:
    """Apply a phase-insensitive channel (tau, v) to mode slot i of a raw matrix."""
    out = mat.copy()
    sl = slice(2 * i, 2 * i + 2)
    root = math.sqrt(tau)
    out[sl, :] *= root
    out[:, sl] *= root
    out[sl, sl] += v * np.eye(2)
    return out
