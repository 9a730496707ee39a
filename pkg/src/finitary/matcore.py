"""Small dense complex linear algebra and the validation predicates machines rely on.

Matrices are plain ``numpy`` arrays of dtype ``complex128`` (or ``float64`` where a
value is known to be real). All machines in this package are at most a few dozen
states, so nothing here tries to be clever about sparsity or scale.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np

from .exceptions import ConvergenceError, DimensionError, MachineError, RecurrenceError

DEFAULT_TOL = 1e-9
#: Cutoff separating structural zeros from floating point round-off.
ZERO_TOL = 1e-12
MAX_POWER_ITERATIONS = 1_000_000


def _square(M: np.ndarray, name: str = "matrix") -> np.ndarray:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")
    return M


def decode_complex(value) -> complex:
    """Read a complex number from ``[re, im]`` or a bare real."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise MachineError(f"complex value must be [re, im], got {value!r}")
        re, im = value
        return complex(float(re), float(im))
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MachineError(f"not a number: {value!r}")
    return complex(float(value), 0.0)


def encode_complex(z: complex) -> list[float]:
    # adding 0.0 folds -0.0 into 0.0 so output re-parses identically
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def as_matrix(rows) -> np.ndarray:
    """Build a complex matrix from nested lists of numbers or ``[re, im]`` pairs."""
    if isinstance(rows, np.ndarray):
        M = rows.astype(complex)
    else:
        M = np.array([[decode_complex(v) for v in row] for row in rows], dtype=complex)
    if M.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise MachineError("matrix has non-finite entries")
    return M


def as_vector(values) -> np.ndarray:
    if isinstance(values, np.ndarray):
        v = values.astype(complex)
    else:
        v = np.array([decode_complex(x) for x in values], dtype=complex)
    if v.ndim != 1:
        raise DimensionError(f"expected a vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise MachineError("vector has non-finite entries")
    return v


def encode_matrix(M: np.ndarray) -> list[list[list[float]]]:
    return [[encode_complex(z) for z in row] for row in np.asarray(M, dtype=complex)]


def encode_vector(v: np.ndarray) -> list[list[float]]:
    return [encode_complex(z) for z in np.asarray(v, dtype=complex)]


def is_unitary(M: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    M = _square(M)
    residual = M @ M.conj().T - np.eye(M.shape[0])
    return bool(np.max(np.abs(residual), initial=0.0) <= tol)


def is_substochastic(M: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    M = _square(M)
    if np.any(np.abs(np.imag(M)) > tol):
        return False
    R = np.real(M)
    if np.any(R < -tol):
        return False
    return bool(np.all(R.sum(axis=1) <= 1.0 + tol))


def is_stochastic(M: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    if not is_substochastic(M, tol):
        return False
    return bool(np.all(np.abs(np.real(M).sum(axis=1) - 1.0) <= tol))


def is_doubly_stochastic(M: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    M = _square(M)
    return is_stochastic(M, tol) and is_stochastic(M.T, tol)


def unistochastic(U: np.ndarray) -> np.ndarray:
    """Entrywise squared magnitudes ``|U_ij|^2``."""
    return np.abs(np.asarray(U)) ** 2


def projector(indices: Iterable[int], n: int) -> np.ndarray:
    """Diagonal 0/1 projector onto the given basis indices."""
    P = np.zeros((n, n), dtype=complex)
    for i in indices:
        P[i, i] = 1.0
    return P


def is_projector_partition(P_set: Sequence[np.ndarray], tol: float = DEFAULT_TOL) -> bool:
    """True iff the projectors are diagonal 0/1, Hermitian, idempotent and sum to the identity."""
    if not P_set:
        return False
    mats = [_square(P, "projector") for P in P_set]
    n = mats[0].shape[0]
    if any(P.shape != (n, n) for P in mats):
        raise DimensionError("projectors have mismatched dimensions")
    total = np.zeros((n, n), dtype=complex)
    for P in mats:
        off = P - np.diag(np.diag(P))
        if np.max(np.abs(off), initial=0.0) > tol:
            return False
        d = np.diag(P)
        if np.any(np.minimum(np.abs(d), np.abs(d - 1.0)) > tol):
            return False
        if np.max(np.abs(P @ P - P)) > tol or np.max(np.abs(P.conj().T - P)) > tol:
            return False
        total += P
    return bool(np.max(np.abs(total - np.eye(n))) <= tol)


def reachability(adjacency: np.ndarray) -> np.ndarray:
    """Boolean matrix ``R[i, j]``: a path of one or more edges leads from i to j."""
    A = np.asarray(adjacency, dtype=bool)
    R = A.copy()
    # repeated squaring of the closure; log2(n) + 1 rounds suffice
    for _ in range(max(1, int(np.ceil(np.log2(max(len(A), 2)))) + 1)):
        nxt = R | ((R.astype(np.int64) @ R.astype(np.int64)) > 0)
        if np.array_equal(nxt, R):
            break
        R = nxt
    return R


def closed_classes(adjacency: np.ndarray) -> list[list[int]]:
    """Strongly connected classes with no edge leaving them, ordered by smallest member.

    These are the asymptotically recurrent classes of a state graph.
    """
    A = np.asarray(adjacency, dtype=bool)
    R = reachability(A)
    n = len(A)
    seen: set[int] = set()
    classes = []
    for i in range(n):
        if i in seen or not R[i, i]:
            continue
        members = [j for j in range(n) if j == i or (R[i, j] and R[j, i])]
        seen.update(members)
        # closed: everything reachable from i reaches back to i
        if all(R[j, i] for j in range(n) if R[i, j]):
            classes.append(members)
    return classes


def stationary_left_eigenvector(
    T: np.ndarray,
    tol: float = DEFAULT_TOL,
    max_iter: int = MAX_POWER_ITERATIONS,
) -> np.ndarray:
    """Stationary distribution ``pi = pi T`` of a stochastic matrix, by power iteration.

    Iteration starts from the uniform vector. Chains with several closed classes are
    rejected up front; periodic chains that never settle raise ``ConvergenceError``.
    """
    T = _square(T, "transition matrix")
    if not is_stochastic(T, tol):
        raise MachineError("stationary distribution requires a stochastic matrix")
    T = np.real(T).astype(float)
    classes = closed_classes(T > 0)
    if len(classes) != 1:
        raise RecurrenceError(f"expected one recurrent class, found {len(classes)}: {classes}")
    n = len(T)
    pi = np.full(n, 1.0 / n)
    target = max(tol * 1e-6, 4 * np.finfo(float).eps)
    for _ in range(max_iter):
        nxt = pi @ T
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - pi)) <= target:
            return nxt
        pi = nxt
    raise ConvergenceError(f"power iteration did not converge in {max_iter} steps")
