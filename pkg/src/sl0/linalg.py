"""Dense linear-algebra kernel: minimum-norm solutions, affine feasible-set
projection, the unique-representation check, and the combinatorial constant
used by the error bounds.

The feasible set of an underdetermined system A·s = x (A of shape n×m with
n <= m and full row rank) is an affine subspace. Everything here is built on
one cached object, :class:`ProjectorFactor`, holding a Cholesky factorization
of A·Aᵀ so that the pseudoinverse action Aᵀ(A·Aᵀ)⁻¹ can be applied repeatedly
without refactoring.
"""

from __future__ import annotations

import math
from itertools import combinations
from pathlib import Path

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NotURP, ParseError, RankDeficient, TooLarge

# Pragmatic double-precision cutoff: beyond this A·Aᵀ is treated as singular.
CONDITION_CUTOFF = 1e12

# Subset enumeration guards for check_urp / compute_M.
MAX_COLUMNS_FOR_ENUMERATION = 20
MAX_SUBSET_COUNT = 10**6


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-D float64 array, rejecting empty or non-finite input."""
    out = np.asarray(a, dtype=float)
    if out.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got ndim={out.ndim}")
    if out.shape[0] < 1 or out.shape[1] < 1:
        raise DimensionMismatch(f"matrix must be at least 1x1, got {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ParseError("matrix contains NaN or Inf entries")
    return out


def as_vector(v) -> np.ndarray:
    """Coerce to a 1-D float64 array, rejecting non-finite input."""
    out = np.asarray(v, dtype=float)
    if out.ndim != 1:
        raise DimensionMismatch(f"expected a 1-D vector, got ndim={out.ndim}")
    if not np.all(np.isfinite(out)):
        raise ParseError("vector contains NaN or Inf entries")
    return out


class ProjectorFactor:
    """Cached factorization of A·Aᵀ for a full-row-rank wide matrix A.

    Supplies the two operations the solver iterates on: the pseudoinverse
    action ``apply(v) = Aᵀ(A·Aᵀ)⁻¹ v`` and the orthogonal projection of a
    point onto the affine set {s : A·s = x}. Immutable after construction;
    safe to share across concurrent solves.

    Raises ``RankDeficient`` when the 1-norm condition estimate of A·Aᵀ
    exceeds ``CONDITION_CUTOFF`` (or the Cholesky factorization fails
    outright), which also covers the n > m case.
    """

    def __init__(self, a) -> None:
        a = as_matrix(a).copy()
        n, m = a.shape
        if n > m:
            raise RankDeficient(f"matrix is {n}x{m}; need n <= m for an underdetermined system")
        gram = a @ a.T
        try:
            self._cho = scipy.linalg.cho_factor(gram, lower=True)
        except scipy.linalg.LinAlgError as exc:
            raise RankDeficient(f"A*A^T is not positive definite: {exc}") from None
        anorm = np.linalg.norm(gram, 1)
        rcond, info = scipy.linalg.lapack.dpocon(self._cho[0], anorm, uplo="L")
        if info != 0:
            raise RankDeficient(f"condition estimation failed (LAPACK info={info})")
        self.condition_estimate = float(1.0 / rcond) if rcond > 0 else math.inf
        if self.condition_estimate > CONDITION_CUTOFF:
            raise RankDeficient(
                f"A*A^T condition estimate {self.condition_estimate:.3e} exceeds {CONDITION_CUTOFF:.0e}"
            )
        self.matrix = a
        self.matrix.setflags(write=False)
        self.source_dims = (n, m)

    def solve_gram(self, v: np.ndarray) -> np.ndarray:
        """Apply (A·Aᵀ)⁻¹ to a vector of length n (or an n×T block)."""
        return scipy.linalg.cho_solve(self._cho, v)

    def apply(self, v: np.ndarray) -> np.ndarray:
        """Apply Aᵀ(A·Aᵀ)⁻¹ to ``v`` (the Moore-Penrose pseudoinverse of A)."""
        v = np.asarray(v, dtype=float)
        if v.shape[0] != self.source_dims[0]:
            raise DimensionMismatch(
                f"operand has leading dimension {v.shape[0]}, expected {self.source_dims[0]}"
            )
        return self.matrix.T @ self.solve_gram(v)

    def project(self, s: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Project ``s`` onto {s : A·s = x}; fixes points already feasible."""
        s = np.asarray(s, dtype=float)
        if s.shape[0] != self.source_dims[1]:
            raise DimensionMismatch(
                f"point has leading dimension {s.shape[0]}, expected {self.source_dims[1]}"
            )
        return s - self.apply(self.matrix @ s - x)

    def min_norm(self, x: np.ndarray) -> np.ndarray:
        """Minimum Euclidean-norm solution of A·s = x."""
        return self.apply(x)

    def pinv_frobenius_norm(self) -> float:
        """Frobenius norm of Aᵀ(A·Aᵀ)⁻¹, via ‖A⁺‖²_F = tr((A·Aᵀ)⁻¹)."""
        n = self.source_dims[0]
        gram_inv = self.solve_gram(np.eye(n))
        return float(math.sqrt(np.trace(gram_inv)))


def min_norm_solution(a, x) -> np.ndarray:
    """Minimum Euclidean-norm solution Aᵀ(A·Aᵀ)⁻¹x of the wide system A·s = x."""
    proj = ProjectorFactor(a)
    x = as_vector(x)
    if x.shape[0] != proj.source_dims[0]:
        raise DimensionMismatch(f"right-hand side has length {x.shape[0]}, expected {proj.source_dims[0]}")
    return proj.min_norm(x)


def project_feasible(p: ProjectorFactor, s, x) -> np.ndarray:
    """Project ``s`` onto the feasible set of A·s = x using a cached factor."""
    s = as_vector(s)
    x = as_vector(x)
    if x.shape[0] != p.source_dims[0]:
        raise DimensionMismatch(f"right-hand side has length {x.shape[0]}, expected {p.source_dims[0]}")
    return p.project(s, x)


def _enumeration_guard(n: int, m: int) -> None:
    if m > MAX_COLUMNS_FOR_ENUMERATION:
        raise TooLarge(f"subset enumeration limited to m <= {MAX_COLUMNS_FOR_ENUMERATION} columns, got m={m}")
    if math.comb(m, n) > MAX_SUBSET_COUNT:
        raise TooLarge(f"C({m},{n}) = {math.comb(m, n)} exceeds the {MAX_SUBSET_COUNT} enumeration cap")


def check_urp(a) -> bool:
    """True iff every n×n column submatrix of A is invertible.

    Determinants are taken after normalizing columns to unit length so the
    1e-10 magnitude threshold is scale-free.
    """
    a = as_matrix(a)
    n, m = a.shape
    if n > m:
        raise DimensionMismatch(f"need n <= m, got {a.shape}")
    _enumeration_guard(n, m)
    norms = np.linalg.norm(a, axis=0)
    if np.any(norms == 0.0):
        return False
    unit = a / norms
    for cols in combinations(range(m), n):
        if abs(np.linalg.det(unit[:, cols])) <= 1e-10:
            return False
    return True


def compute_M(a) -> float:
    """Largest Frobenius norm of a left inverse over all column subsets of
    size <= n.

    The left inverse of each (tall, full-rank) submatrix is fixed to its
    Moore-Penrose pseudoinverse. Requires the unique-representation property;
    guarded by the same enumeration caps as :func:`check_urp`.
    """
    a = as_matrix(a)
    n, m = a.shape
    if not check_urp(a):
        raise NotURP("matrix has a singular square column submatrix")
    worst = 0.0
    for size in range(1, n + 1):
        for cols in combinations(range(m), size):
            sub = a[:, cols]
            worst = max(worst, float(np.linalg.norm(np.linalg.pinv(sub))))
    return worst


# Text format: first line "rows cols", then whitespace-delimited rows. Values
# are written with 17 significant digits so doubles round-trip exactly.


def _format_row(row: np.ndarray) -> str:
    return " ".join(f"{v:.17g}" for v in row)


def save_matrix(path, a) -> None:
    a = as_matrix(a)
    rows, cols = a.shape
    lines = [f"{rows} {cols}"]
    lines.extend(_format_row(row) for row in a)
    Path(path).write_text("\n".join(lines) + "\n")


def load_matrix(path) -> np.ndarray:
    path = Path(path)
    text = path.read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParseError(f"{path}: empty file")
    header = lines[0].split()
    if len(header) != 2:
        raise ParseError(f"{path}: header must be 'rows cols', got {lines[0]!r}")
    try:
        rows, cols = int(header[0]), int(header[1])
    except ValueError:
        raise ParseError(f"{path}: non-integer header {lines[0]!r}") from None
    if rows < 1 or cols < 1:
        raise ParseError(f"{path}: dimensions must be positive, got {rows}x{cols}")
    if len(lines) - 1 != rows:
        raise ParseError(f"{path}: expected {rows} data rows, found {len(lines) - 1}")
    data = np.empty((rows, cols), dtype=float)
    for i, line in enumerate(lines[1:]):
        fields = line.split()
        if len(fields) != cols:
            raise ParseError(f"{path}: row {i + 1} has {len(fields)} entries, expected {cols}")
        try:
            data[i] = [float(f) for f in fields]
        except ValueError as exc:
            raise ParseError(f"{path}: row {i + 1}: {exc}") from None
    if not np.all(np.isfinite(data)):
        raise ParseError(f"{path}: non-finite entries")
    return data


def save_vector(path, v) -> None:
    save_matrix(path, as_vector(v)[:, None])


def load_vector(path) -> np.ndarray:
    a = load_matrix(path)
    if a.shape[1] != 1:
        raise ParseError(f"{path}: expected a single-column vector file, got {a.shape[1]} columns")
    return a[:, 0]
