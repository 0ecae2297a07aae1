"""
Toeplitz and circulant operators.

Provides:
- dft: unnormalized forward / 1/n-normalized inverse transform of any length
- Toeplitz: first column + first row representation with FFT matvec
- CirculantOperator: circulant stored by its eigenvalues (DFT of first column)
- strang: Strang circulant approximation of a Toeplitz matrix
- gershgorin_check: eigenvalue-disc test for strang(W_beta)
- DenseLU / dense_lu_solve: partial-pivoting LU reference solver
- GsfInverse: Gohberg-Semencul inverse applied with four triangular products

Toeplitz matvec embeds the n x n matrix in a circulant of size 2^k >= 2n.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft
import scipy.linalg

from .errors import DimensionError, DomainError, GsfInapplicableError, SingularOperatorError

# |lambda| < CIRCULANT_SINGULAR_RTOL * max|lambda| counts as singular
CIRCULANT_SINGULAR_RTOL = 1e-14
# |xi_0| < GSF_SINGULAR_RTOL * ||x||_inf counts as singular
GSF_SINGULAR_RTOL = 1e-12
IMAG_RESIDUE_TOL = 1e-12


def dft(v, inverse: bool = False) -> np.ndarray:
    """
    Discrete Fourier transform of arbitrary length.

    Forward is unnormalized; inverse carries the 1/n factor.
    """
    v = np.asarray(v)
    if v.size == 0:
        raise DomainError("dft needs a sequence of length >= 1")
    return scipy.fft.ifft(v) if inverse else scipy.fft.fft(v)


def _next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


def _check_len(v: np.ndarray, n: int, what: str):
    if v.shape[0] != n:
        raise DimensionError(f"{what}: expected leading dimension {n}, got {v.shape[0]}")


def _drop_imag(z: np.ndarray) -> np.ndarray:
    scale = max(float(np.max(np.abs(z.real), initial=0.0)), np.finfo(float).tiny)
    residue = float(np.max(np.abs(z.imag), initial=0.0))
    if residue > IMAG_RESIDUE_TOL * scale:
        raise DomainError(f"imaginary residue {residue:.3e} exceeds {IMAG_RESIDUE_TOL:g} relative")
    return np.ascontiguousarray(z.real)


@dataclass(frozen=True, eq=False)
class Toeplitz:
    """
    Toeplitz matrix T[i, j] = col[i - j] for i >= j, row[j - i] otherwise.

    Supports +, -, scalar * and .T, so operator pairs can be assembled
    without ever forming a dense matrix.
    """

    col: np.ndarray
    row: np.ndarray

    # numpy scalars defer to __rmul__ instead of broadcasting over the object
    __array_ufunc__ = None

    def __post_init__(self):
        col = np.asarray(self.col, dtype=float).copy()
        row = np.asarray(self.row, dtype=float).copy()
        if col.ndim != 1 or row.ndim != 1 or col.size == 0:
            raise DimensionError("col and row must be non-empty 1-D sequences")
        if col.size != row.size:
            raise DimensionError(f"col has {col.size} entries, row has {row.size}")
        if col[0] != row[0]:
            raise DomainError(f"col[0] = {col[0]!r} differs from row[0] = {row[0]!r}")
        col.setflags(write=False)
        row.setflags(write=False)
        object.__setattr__(self, "col", col)
        object.__setattr__(self, "row", row)

    @classmethod
    def identity(cls, n: int) -> "Toeplitz":
        e = np.zeros(n)
        e[0] = 1.0
        return cls(e, e)

    @classmethod
    def lower(cls, col) -> "Toeplitz":
        """Lower-triangular Toeplitz with the given first column."""
        col = np.asarray(col, dtype=float)
        row = np.zeros_like(col)
        row[0] = col[0]
        return cls(col, row)

    @classmethod
    def upper(cls, row) -> "Toeplitz":
        """Upper-triangular Toeplitz with the given first row."""
        row = np.asarray(row, dtype=float)
        col = np.zeros_like(row)
        col[0] = row[0]
        return cls(col, row)

    @property
    def n(self) -> int:
        return self.col.size

    @property
    def T(self) -> "Toeplitz":
        return Toeplitz(self.row, self.col)

    def __add__(self, other: "Toeplitz") -> "Toeplitz":
        if not isinstance(other, Toeplitz):
            return NotImplemented
        if other.n != self.n:
            raise DimensionError(f"cannot add Toeplitz of sizes {self.n} and {other.n}")
        return Toeplitz(self.col + other.col, self.row + other.row)

    def __sub__(self, other: "Toeplitz") -> "Toeplitz":
        return self + (-1.0) * other

    def __mul__(self, scalar: float) -> "Toeplitz":
        if not np.isscalar(scalar):
            return NotImplemented
        return Toeplitz(scalar * self.col, scalar * self.row)

    __rmul__ = __mul__

    def __neg__(self) -> "Toeplitz":
        return (-1.0) * self

    def entry(self, i: int, j: int) -> float:
        return self.col[i - j] if i >= j else self.row[j - i]

    def dense(self) -> np.ndarray:
        return scipy.linalg.toeplitz(self.col, self.row)

    @cached_property
    def _embedding(self):
        """(size, rfft of the circulant embedding's first column)."""
        n = self.n
        size = _next_pow2(2 * n)
        c = np.zeros(size)
        c[:n] = self.col
        if n > 1:
            c[size - n + 1:] = self.row[1:][::-1]
        return size, scipy.fft.rfft(c)

    def matvec(self, v) -> np.ndarray:
        """T @ v via circulant embedding; v may be (n,) or (n, k)."""
        v = np.asarray(v, dtype=float)
        _check_len(v, self.n, "Toeplitz matvec")
        size, c_hat = self._embedding
        v_hat = scipy.fft.rfft(v, n=size, axis=0)
        if v.ndim == 2:
            c_hat = c_hat[:, None]
        return scipy.fft.irfft(c_hat * v_hat, n=size, axis=0)[: self.n]

    __matmul__ = matvec

    def as_linear_operator(self):
        from scipy.sparse.linalg import LinearOperator

        return LinearOperator((self.n, self.n), matvec=self.matvec, dtype=float)


def toeplitz_matvec(T: Toeplitz, v) -> np.ndarray:
    return T.matvec(v)


@dataclass(frozen=True, eq=False)
class CirculantOperator:
    """
    Circulant matrix C = F^* diag(eigs) F, stored as eigs = DFT(first column).

    Real circulants (conjugate-symmetric eigs) run through rfft/irfft and
    stay real; other spectra use complex transforms and drop the imaginary
    residue after checking it.
    """

    eigs: np.ndarray = field(repr=False)

    def __post_init__(self):
        eigs = np.asarray(self.eigs, dtype=complex).copy()
        if eigs.ndim != 1 or eigs.size == 0:
            raise DimensionError("eigs must be a non-empty 1-D sequence")
        eigs.setflags(write=False)
        object.__setattr__(self, "eigs", eigs)

    @classmethod
    def from_column(cls, c) -> "CirculantOperator":
        return cls(dft(np.asarray(c, dtype=float)))

    @property
    def n(self) -> int:
        return self.eigs.size

    @cached_property
    def is_real(self) -> bool:
        mirrored = np.conj(np.roll(self.eigs[::-1], 1))
        scale = max(float(np.max(np.abs(self.eigs))), np.finfo(float).tiny)
        return bool(np.max(np.abs(self.eigs - mirrored)) <= 1e-13 * scale)

    @property
    def first_column(self) -> np.ndarray:
        col = dft(self.eigs, inverse=True)
        return col.real if self.is_real else col

    def singular_index(self):
        """Index of the smallest |eigenvalue| if it is below threshold, else None."""
        mags = np.abs(self.eigs)
        k = int(np.argmin(mags))
        if mags[k] < CIRCULANT_SINGULAR_RTOL * mags.max() or mags.max() == 0.0:
            return k
        return None

    def _transform(self, v, weights: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        _check_len(v, self.n, "circulant")
        w = weights if v.ndim == 1 else weights[:, None]
        if self.is_real:
            half = w[: self.n // 2 + 1]
            return scipy.fft.irfft(half * scipy.fft.rfft(v, axis=0), n=self.n, axis=0)
        return _drop_imag(scipy.fft.ifft(w * scipy.fft.fft(v, axis=0), axis=0))

    def apply(self, v) -> np.ndarray:
        return self._transform(v, self.eigs)

    def solve(self, v) -> np.ndarray:
        k = self.singular_index()
        if k is not None:
            raise SingularOperatorError(
                f"circulant eigenvalue {k} is singular (|lambda| = {abs(self.eigs[k]):.3e})", index=k
            )
        return self._transform(v, 1.0 / self.eigs)

    def dense(self) -> np.ndarray:
        return scipy.linalg.circulant(self.first_column)


def circulant_apply(C: CirculantOperator, v) -> np.ndarray:
    return C.apply(v)


def circulant_solve(C: CirculantOperator, v) -> np.ndarray:
    return C.solve(v)


def strang_column(T: Toeplitz) -> np.ndarray:
    """First column of the Strang circulant: central band of T, midpoint from col."""
    n = T.n
    half = n // 2
    c = np.empty(n)
    c[: half + 1] = T.col[: half + 1]
    k = np.arange(half + 1, n)
    c[half + 1:] = T.row[n - k]
    return c


def strang(T: Toeplitz) -> CirculantOperator:
    if T.n < 2:
        raise DomainError("strang needs n >= 2")
    return CirculantOperator.from_column(strang_column(T))


def gershgorin_check(C: CirculantOperator) -> bool:
    """
    Disc check on the spectrum of strang(W_beta) or its transpose.

    True iff every eigenvalue has negative real part and modulus <= 2|omega_1|,
    where omega_1 is the circulant's diagonal (the mean of its eigenvalues).
    """
    eigs = C.eigs
    omega1 = float(np.mean(eigs).real)
    bound = 2.0 * abs(omega1) * (1.0 + 1e-12)
    return bool(np.all(eigs.real < 0.0) and np.all(np.abs(eigs) <= bound))


class DenseLU:
    """Partial-pivoting LU factorization, reusable across right-hand sides."""

    def __init__(self, A):
        A = np.asarray(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionError(f"LU needs a square matrix, got shape {A.shape}")
        self.n = A.shape[0]
        self.lu, self.piv = scipy.linalg.lu_factor(A, check_finite=True)
        zero = np.flatnonzero(np.diag(self.lu) == 0.0)
        if zero.size:
            raise SingularOperatorError(f"exact zero pivot in column {zero[0]}", index=int(zero[0]))

    def solve(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        _check_len(b, self.n, "LU solve")
        return scipy.linalg.lu_solve((self.lu, self.piv), b)


def dense_lu_solve(A, b) -> np.ndarray:
    return DenseLU(A).solve(b)


@dataclass(frozen=True, eq=False)
class GsfInverse:
    """
    A^{-1} = (L_p R_p - L_p0 R_p0) / xi_0 from A x = e_1, A y = e_n.

    L_p  lower, first column x
    R_p  upper, first row (y_{n-1}, ..., y_0)
    L_p0 lower, first column (0, y_0, ..., y_{n-2})
    R_p0 upper, first row (0, x_{n-1}, ..., x_1)
    """

    xi0: float
    Lp: Toeplitz = field(repr=False)
    Rp: Toeplitz = field(repr=False)
    Lp0: Toeplitz = field(repr=False)
    Rp0: Toeplitz = field(repr=False)

    @property
    def n(self) -> int:
        return self.Lp.n

    @classmethod
    def build(cls, A: Toeplitz, x, y) -> "GsfInverse":
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        n = A.n
        _check_len(x, n, "GSF x")
        _check_len(y, n, "GSF y")
        xi0 = float(x[0])
        if abs(xi0) < GSF_SINGULAR_RTOL * max(float(np.max(np.abs(x))), np.finfo(float).tiny):
            raise GsfInapplicableError(f"xi_0 = {xi0:.3e} is numerically zero", index=0)

        Lp = Toeplitz.lower(x)
        Rp = Toeplitz.upper(y[::-1])
        Lp0 = Toeplitz.lower(np.concatenate(([0.0], y[:-1])))
        Rp0 = Toeplitz.upper(np.concatenate(([0.0], x[:0:-1])))
        gsf = cls(xi0, Lp, Rp, Lp0, Rp0)
        for t in (Lp, Rp, Lp0, Rp0):
            t._embedding  # noqa: B018  warm the cached transforms
        return gsf

    def apply(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        _check_len(v, self.n, "GSF apply")
        z1 = self.Rp0.matvec(v)
        z2 = self.Rp.matvec(v)
        z3 = self.Lp0.matvec(z1)
        z4 = self.Lp.matvec(z2)
        return (z4 - z3) / self.xi0


def gsf_build(A: Toeplitz, x, y) -> GsfInverse:
    return GsfInverse.build(A, x, y)


def gsf_apply(G: GsfInverse, v) -> np.ndarray:
    return G.apply(v)
