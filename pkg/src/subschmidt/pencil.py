"""Projective eigenvalues and Jordan structure of the pencil a0*R0 + a1*R1.

The pencil is first moved to a frame ``Phi0 = a R0 + b R1``,
``Phi1 = c R0 + d R1`` (ad - bc = 1) in which Phi1 is well conditioned; the
Jordan structure of ``M = Phi1^{-1} Phi0`` is then computed and its
eigenvalues are mapped back to homogeneous points (alpha0 : alpha1) of the
original plane, where ``alpha0 R0 + alpha1 R1`` loses rank.

Ranks of ``(M - lam)^k`` are computed with a nested null-space recursion
(``null(N^k) = null(P N)`` with ``P`` projecting out ``null(N^(k-1))``)
instead of explicit matrix powers, so that every rank decision is taken
at the scale of ``N = M - lam`` itself.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from .errors import (
    DEFAULT_TOL,
    NumericalError,
    QubitUnentangled,
    SingularPencilError,
    Tolerances,
)

# Integer (a, b, c, d) with ad - bc = 1 and pairwise distinct directions (c : d),
# tried in this order after the identity.
_LATTICE = (
    (1, 0, 1, 1), (0, -1, 1, 0), (1, 0, -1, 1), (1, 1, 1, 2),
    (1, 0, 2, 1), (0, -1, 1, -2), (-1, 0, 2, -1), (0, -1, 1, 3),
    (1, 0, 3, 1), (0, -1, 1, -3), (-1, 0, 3, -1), (1, 1, 2, 3),
    (2, 1, 3, 2), (1, -2, 2, -3), (1, -1, 3, -2), (0, -1, 1, 4),
)


@dataclass(frozen=True)
class MoebiusParams:
    """Coefficients of a change of plane basis, normalized to ad - bc = 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)))
        if abs(self.det - 1) > 1e-8:
            raise ValueError(f"Moebius parameters must have ad - bc = 1, got {self.det}")

    @classmethod
    def scaled(cls, a, b, c, d):
        """Rescale arbitrary coefficients with nonzero determinant to unit determinant."""
        det = complex(a) * complex(d) - complex(b) * complex(c)
        if det == 0:
            raise ValueError("singular Moebius parameters")
        s = np.sqrt(det)
        return cls(a / s, b / s, c / s, d / s)

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    @property
    def matrix(self):
        return np.array([[self.a, self.b], [self.c, self.d]])

    def combine(self, R0, R1):
        """Return ``(a R0 + b R1, c R0 + d R1)``."""
        return self.a * R0 + self.b * R1, self.c * R0 + self.d * R1

    def __call__(self, lam):
        """The map ``(a lam + b) / (c lam + d)``; ``inf`` is handled."""
        if np.isinf(lam):
            return self.a / self.c if self.c != 0 else complex(np.inf)
        den = self.c * lam + self.d
        return (self.a * lam + self.b) / den if den != 0 else complex(np.inf)

    def to_json(self):
        from .tensor_state import _complex_json

        return {k: _complex_json(getattr(self, k)) for k in "abcd"}


@dataclass(frozen=True)
class ProjectiveEigenvalue:
    """Homogeneous point (alpha0 : alpha1) where alpha0 R0 + alpha1 R1 drops rank.

    Stored with ``max(|alpha0|, |alpha1|) = 1`` and the first nonzero
    coordinate real positive. ``lam = -alpha1 / alpha0``.
    """

    alpha0: complex
    alpha1: complex

    @classmethod
    def from_coords(cls, alpha0, alpha1, zero_tol=1e-13):
        v = np.array([alpha0, alpha1], dtype=complex)
        m = np.abs(v).max()
        if m == 0:
            raise ValueError("(0 : 0) is not a projective point")
        v = v / m
        first = v[0] if abs(v[0]) > zero_tol else v[1]
        if abs(v[0]) <= zero_tol:
            v[0] = 0
        if abs(v[1]) <= zero_tol:
            v[1] = 0
        v = v * (abs(first) / first)
        return cls(complex(v[0]), complex(v[1]))

    @classmethod
    def from_lambda(cls, lam):
        if np.isinf(lam):
            return cls(0j, 1 + 0j)
        return cls.from_coords(1, -lam)

    @property
    def lam(self):
        return -self.alpha1 / self.alpha0 if self.alpha0 != 0 else complex(np.inf)

    @property
    def homogeneous(self):
        """``(p, q)`` with ``lam = p / q``."""
        return -self.alpha1, self.alpha0

    @property
    def coords(self):
        return np.array([self.alpha0, self.alpha1])

    def combination(self, R0, R1):
        return self.alpha0 * R0 + self.alpha1 * R1

    def distance(self, other):
        """Chordal distance on the projective line (0 for equal points, 1 for antipodes)."""
        u, v = self.coords, other.coords
        cross = abs(u[0] * v[1] - u[1] * v[0])
        return float(cross / (np.linalg.norm(u) * np.linalg.norm(v)))

    def to_json(self):
        from .tensor_state import _complex_json

        return {"alpha0": _complex_json(self.alpha0), "alpha1": _complex_json(self.alpha1)}


@dataclass(frozen=True)
class JordanBlockTower:
    """Jordan block sizes of one eigenvalue and its rank staircase.

    ``staircase[k-1] = rank((M - lam)^k)`` for k = 1, 2, ... up to the first
    power at which the rank stops decreasing.
    """

    blocks: Tuple[int, ...]
    staircase: Tuple[int, ...]
    n: int

    def __post_init__(self):
        blocks = tuple(sorted((int(b) for b in self.blocks), reverse=True))
        if not blocks or blocks[-1] < 1 or sum(blocks) > self.n:
            raise ValueError(f"invalid blocks {blocks} for n={self.n}")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "staircase", tuple(int(r) for r in self.staircase))
        if self.staircase != _staircase_of(blocks, self.n):
            raise ValueError(f"staircase {self.staircase} inconsistent with blocks {blocks}")

    @classmethod
    def from_blocks(cls, blocks, n):
        blocks = tuple(sorted(blocks, reverse=True))
        return cls(blocks, _staircase_of(blocks, n), n)

    @classmethod
    def from_nullities(cls, nullities, n):
        """Build from ``dim null((M - lam)^k)`` for k = 1, 2, ..."""
        d = [0] + list(nullities)
        at_least = [d[k] - d[k - 1] for k in range(1, len(d))]
        if any(x < 0 for x in at_least) or any(
            at_least[k] > at_least[k - 1] for k in range(1, len(at_least))
        ):
            raise NumericalError(f"nullity sequence {nullities} is not a valid staircase")
        at_least.append(0)
        blocks = []
        for s in range(1, len(at_least)):
            blocks += [s] * (at_least[s - 1] - at_least[s])
        return cls.from_blocks(blocks, n)

    @property
    def size(self):
        return sum(self.blocks)

    @property
    def first_rank(self):
        return self.n - len(self.blocks)


def _staircase_of(blocks, n):
    ranks = []
    for k in range(1, max(blocks) + 1):
        ranks.append(n - sum(min(b, k) for b in blocks))
    return tuple(ranks)


def _tower_key(blocks):
    return (-sum(blocks), tuple(-b for b in blocks))


@dataclass(frozen=True)
class JordanFamilySignature:
    """Multiset of Jordan block structures with the eigenvalues forgotten."""

    towers: Tuple[Tuple[int, ...], ...]
    n: int

    def __post_init__(self):
        towers = tuple(
            sorted((tuple(sorted(t, reverse=True)) for t in self.towers), key=_tower_key)
        )
        object.__setattr__(self, "towers", towers)
        if sum(sum(t) for t in towers) != self.n:
            raise ValueError(f"towers {towers} do not sum to n={self.n}")

    @property
    def is_identity(self):
        return len(self.towers) == 1 and all(b == 1 for b in self.towers[0])

    @property
    def first_ranks(self):
        return tuple(self.n - len(t) for t in self.towers)

    def staircases(self):
        return tuple(_staircase_of(t, self.n) for t in self.towers)

    def sort_key(self):
        return (len(self.towers), tuple(_tower_key(t) for t in self.towers))

    @property
    def name(self):
        return family_name(self)

    def to_json(self):
        return {"towers": [list(t) for t in self.towers], "n": self.n, "family_name": self.name}

    def __str__(self):
        return "{" + ", ".join(str(list(t)) for t in self.towers) + "}"


@dataclass(frozen=True, eq=False)
class PencilAnalysis:
    """Everything the classifier knows about one pencil.

    ``eigenvalues`` pairs each rank-drop point of the original (R0, R1)
    frame with its Jordan tower; ``frame_eigenvalues`` are the matching
    eigenvalues of ``Phi1^{-1} Phi0`` in the regularized frame.
    """

    n: int
    eigenvalues: List[Tuple[ProjectiveEigenvalue, JordanBlockTower]]
    signature: JordanFamilySignature
    regularization: MoebiusParams
    family_name: Optional[str]
    frame_eigenvalues: List[complex] = field(repr=False)
    R: Tuple[np.ndarray, np.ndarray] = field(repr=False)
    Phi: Tuple[np.ndarray, np.ndarray] = field(repr=False)

    @property
    def M(self):
        return np.linalg.solve(self.Phi[1], self.Phi[0])

    @property
    def points(self):
        return [p for p, _ in self.eigenvalues]

    @property
    def towers(self):
        return [t for _, t in self.eigenvalues]


# ---------------------------------------------------------------------------
# regularization
# ---------------------------------------------------------------------------


def _cond(X):
    s = np.linalg.svd(X, compute_uv=False)
    return float(s[0] / s[-1]) if s[-1] > 0 else np.inf


def lattice_candidates():
    """The fixed integer unimodular parameter sets tried after the identity."""
    return [MoebiusParams(*p) for p in _LATTICE]


def regularize(R0, R1, seed=0, kappa_identity=1e3, kappa_max=1e8, n_random=64):
    """Choose a plane basis in which the second matrix is well conditioned.

    The identity is kept when ``cond(R1) <= kappa_identity``. Otherwise the
    integer lattice is scanned and the candidate of smallest ``cond(Phi1)``
    is taken (first one on ties); seeded random complex parameters are only
    tried when every lattice candidate exceeds ``kappa_max``.

    Returns ``(Phi0, Phi1, params)``.
    """
    R0 = np.asarray(R0, dtype=complex)
    R1 = np.asarray(R1, dtype=complex)
    sv = np.linalg.svd(np.stack([R0.ravel(), R1.ravel()]), compute_uv=False)
    if sv[1] <= 1e-12 * sv[0]:
        raise QubitUnentangled("R0 and R1 are linearly dependent")
    ident = MoebiusParams.identity()
    if _cond(R1) <= kappa_identity:
        return R0, R1, ident
    best, best_k = ident, _cond(R1)
    for p in lattice_candidates():
        k = _cond(p.c * R0 + p.d * R1)
        if k < best_k:
            best, best_k = p, k
    if best_k > kappa_max:
        rng = np.random.default_rng(seed)
        for _ in range(n_random):
            z = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            if abs(z[0] * z[3] - z[1] * z[2]) < 1e-3:
                continue
            p = MoebiusParams.scaled(*z)
            k = _cond(p.c * R0 + p.d * R1)
            if k < best_k:
                best, best_k = p, k
    if not np.isfinite(best_k) or best_k > kappa_max:
        raise SingularPencilError(
            f"singular pencil: no tried combination is invertible (best condition number {best_k:.3g})"
        )
    Phi0, Phi1 = best.combine(R0, R1)
    return Phi0, Phi1, best


# ---------------------------------------------------------------------------
# Jordan structure
# ---------------------------------------------------------------------------


def nested_null_spaces(N, tol, kmax=None, dims=None):
    """Orthonormal bases of ``null(N^k)`` for k = 1, 2, ...

    With ``dims`` the dimension at each level is imposed (the smallest
    singular directions are taken); otherwise it is decided with the
    relative threshold ``tol * ||N||_2``. Stops when the dimension becomes
    stationary or after ``kmax`` levels.
    """
    n = N.shape[0]
    kmax = n if kmax is None else kmax
    if dims is not None:
        kmax = len(dims)
    normN = np.linalg.norm(N, 2)
    bases = []
    Q = np.zeros((n, 0), dtype=complex)
    for k in range(kmax):
        X = N - Q @ (Q.conj().T @ N)
        _, s, Vh = np.linalg.svd(X)
        if dims is not None:
            r = n - dims[k]
        elif normN == 0:
            r = 0
        else:
            r = int(np.sum(s > tol * normN))
        Qn = Vh[r:].conj().T
        if dims is None and bases and Qn.shape[1] == Q.shape[1]:
            break
        bases.append(Qn)
        Q = Qn
        if Q.shape[1] == n:
            break
    return bases


def _mst_split(points):
    """Split a point set in two by removing the longest edge of its minimum spanning tree.

    Returns ``(longest_edge, part_a, part_b)`` as index lists into ``points``.
    """
    m = len(points)
    D = np.abs(points[:, None] - points[None, :])
    in_tree = [0]
    parent = {}
    best = {j: (D[0, j], 0) for j in range(1, m)}
    edges = []
    while best:
        j = min(best, key=lambda x: (best[x][0], x))
        w, p = best.pop(j)
        edges.append((w, p, j))
        in_tree.append(j)
        for t in best:
            if D[j, t] < best[t][0]:
                best[t] = (D[j, t], j)
    w, p, j = max(edges, key=lambda e: e[0])
    adj = {i: [] for i in range(m)}
    for ww, u, v in edges:
        if (u, v) != (p, j):
            adj[u].append(v)
            adj[v].append(u)
    comp, stack = {p}, [p]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in comp:
                comp.add(v)
                stack.append(v)
    a = sorted(comp)
    b = sorted(set(range(m)) - comp)
    return w, a, b


def _generalized_nullity(M, lam, tol, kmax):
    N = M - lam * np.eye(M.shape[0])
    bases = nested_null_spaces(N, tol, kmax=kmax)
    return [b.shape[1] for b in bases]


def cluster_eigenvalues(M, eigvals, tol=DEFAULT_TOL):
    """Group computed eigenvalues that belong to the same exact eigenvalue.

    A defective eigenvalue of multiplicity m is returned by floating-point
    eigensolvers as a ring of radius ~ eps^(1/m), so a fixed merge radius is
    not enough. Starting from the whole spectrum, a group is accepted when
    its centroid has a generalized eigenspace of the group's size (or when
    its diameter is below the unconditional radius); otherwise it is split
    at the longest edge of its minimum spanning tree.
    """
    eigvals = np.asarray(eigvals, dtype=complex)
    radius = tol.cluster * max(np.linalg.norm(M), np.finfo(float).tiny)

    def accept(idx):
        pts = eigvals[idx]
        if len(idx) == 1:
            return True
        if np.abs(pts[:, None] - pts[None, :]).max() <= radius:
            return True
        null = _generalized_nullity(M, pts.mean(), tol.rank, len(idx))
        return bool(null) and null[-1] >= len(idx)

    out = []
    stack = [list(range(len(eigvals)))]
    while stack:
        idx = stack.pop()
        if accept(idx):
            out.append(idx)
            continue
        _, a, b = _mst_split(eigvals[idx])
        stack.append([idx[i] for i in b])
        stack.append([idx[i] for i in a])
    return [(complex(eigvals[idx].mean()), len(idx)) for idx in out]


def staircase_at(M, lam, tol=DEFAULT_TOL, multiplicity=None):
    """Jordan tower of ``M`` at ``lam`` from the nested null-space recursion."""
    n = M.shape[0]
    null = _generalized_nullity(M, lam, tol.rank, n)
    tower = JordanBlockTower.from_nullities(null, n)
    if multiplicity is not None and tower.size != multiplicity:
        raise NumericalError(
            f"eigenvalue {lam:.6g}: generalized eigenspace of dimension {tower.size} "
            f"but algebraic multiplicity {multiplicity}; the pencil is too ill-conditioned "
            f"for the rank tolerance {tol.rank:g}"
        )
    return tower


def eigen_structure(Phi0, Phi1, tol=DEFAULT_TOL):
    """Eigenvalues of ``Phi1^{-1} Phi0`` with their Jordan towers.

    Returns a list of ``(lam, JordanBlockTower)`` with distinct ``lam``.
    """
    Phi1 = np.asarray(Phi1, dtype=complex)
    M = np.linalg.solve(Phi1, np.asarray(Phi0, dtype=complex))
    try:
        ev = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"eigenvalue iteration did not converge (cond(Phi1) = {_cond(Phi1):.3g})"
        ) from exc
    out = []
    for lam, mult in cluster_eigenvalues(M, ev, tol):
        out.append((lam, staircase_at(M, lam, tol, multiplicity=mult)))
    return out


def to_original_frame(eigs, params):
    """Map eigenvalues of ``Phi1^{-1} Phi0`` to points of the (R0, R1) plane.

    ``Phi0 - mu Phi1 = (a - mu c) R0 + (b - mu d) R1``.
    """
    return [
        ProjectiveEigenvalue.from_coords(params.a - mu * params.c, params.b - mu * params.d)
        for mu in eigs
    ]


def _point_key(p):
    return (round(p.alpha0.real, 8), round(p.alpha0.imag, 8), round(p.alpha1.real, 8), round(p.alpha1.imag, 8))


def analyze_pencil(R0, R1, tol=DEFAULT_TOL, seed=0):
    """Full Jordan-family analysis of the pencil spanned by two n x n matrices."""
    R0 = np.asarray(R0, dtype=complex)
    R1 = np.asarray(R1, dtype=complex)
    n = R0.shape[0]
    Phi0, Phi1, params = regularize(R0, R1, seed=seed)
    eig = eigen_structure(Phi0, Phi1, tol)
    points = to_original_frame([lam for lam, _ in eig], params)
    rows = sorted(
        zip(points, [t for _, t in eig], [lam for lam, _ in eig]),
        key=lambda r: (_tower_key(r[1].blocks), _point_key(r[0])),
    )
    signature = JordanFamilySignature(tuple(t.blocks for _, t, _ in rows), n)
    if signature.is_identity:
        raise QubitUnentangled("R0 and R1 are proportional (identity Jordan family)")
    return PencilAnalysis(
        n=n,
        eigenvalues=[(p, t) for p, t, _ in rows],
        signature=signature,
        regularization=params,
        family_name=family_name(signature),
        frame_eigenvalues=[lam for _, _, lam in rows],
        R=(R0, R1),
        Phi=(Phi0, Phi1),
    )


def analyze(dec, tol=DEFAULT_TOL, seed=0):
    """Analyze the pencil of a :class:`RelativeDecomposition`."""
    return analyze_pencil(dec.R[0], dec.R[1], tol, seed)


def transposed_analyze(dec, tol=DEFAULT_TOL, seed=0):
    """Same analysis with subsystems a and b interchanged."""
    return analyze_pencil(dec.R[0].T, dec.R[1].T, tol, seed)


def jordan_basis(M, spectrum, tol=DEFAULT_TOL):
    """Jordan chain basis ``P`` with ``M P = P J``.

    ``spectrum`` lists ``(lam, blocks)``; chains are laid out eigenvalue by
    eigenvalue, longest first, with ones on the superdiagonal of ``J``.
    Returns ``(P, J)``.
    """
    n = M.shape[0]
    cols, jblocks = [], []
    for lam, blocks in spectrum:
        blocks = sorted(blocks, reverse=True)
        m = blocks[0]
        N = M - lam * np.eye(n)
        dims = [sum(min(b, k) for b in blocks) for k in range(1, m + 1)]
        K = [np.zeros((n, 0), dtype=complex)] + nested_null_spaces(N, tol.rank, dims=dims)
        tops = []  # (vector, chain length)
        for s in range(m, 0, -1):
            count = blocks.count(s)
            if count == 0:
                continue
            W = [K[s - 1]] + [
                np.linalg.matrix_power(N, length - s) @ t[:, None] for t, length in tops
            ]
            W = np.hstack(W)
            if W.shape[1]:
                Uw, sw, _ = np.linalg.svd(W, full_matrices=False)
                Qw = Uw[:, : W.shape[1]]
                Y = K[s] - Qw @ (Qw.conj().T @ K[s])
            else:
                Y = K[s]
            _, _, Vh = np.linalg.svd(Y)
            coeff = Vh[:count].conj().T
            for j in range(count):
                t = K[s] @ coeff[:, j]
                tops.append((t / np.linalg.norm(t), s))
        for t, length in tops:
            chain = [np.linalg.matrix_power(N, length - 1 - i) @ t for i in range(length)]
            cols.extend(chain)
            Jb = lam * np.eye(length, dtype=complex) + np.eye(length, k=1)
            jblocks.append(Jb)
    P = np.column_stack(cols)
    J = np.zeros((n, n), dtype=complex)
    i = 0
    for Jb in jblocks:
        L = Jb.shape[0]
        J[i : i + L, i : i + L] = Jb
        i += L
    return P, J


# ---------------------------------------------------------------------------
# family counting and naming
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def _partition_count(k):
    return len(_partitions(k))


def count_families(n):
    """Number of Jordan families of n x n pencils, the identity family excluded.

    Counts multisets of integer partitions with total size n (Euler
    transform of the partition numbers) and subtracts one.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    a = [1] + [0] * n
    c = [0] + [sum(d * _partition_count(d) for d in range(1, k + 1) if k % d == 0) for k in range(1, n + 1)]
    for m in range(1, n + 1):
        a[m] = sum(c[k] * a[m - k] for k in range(1, m + 1)) // m
    return a[n] - 1


@lru_cache(maxsize=None)
def _enumerate(n):
    objects = [p for k in range(n, 0, -1) for p in _partitions(k)]
    objects.sort(key=_tower_key)
    found = []

    def rec(start, remaining, chosen):
        if remaining == 0:
            found.append(tuple(chosen))
            return
        for i in range(start, len(objects)):
            if sum(objects[i]) <= remaining:
                rec(i, remaining - sum(objects[i]), chosen + [objects[i]])

    rec(0, n, [])
    sigs = [JordanFamilySignature(t, n) for t in found]
    sigs = [s for s in sigs if not s.is_identity]
    sigs.sort(key=JordanFamilySignature.sort_key)
    return tuple(sigs)


def enumerate_families(n):
    """All Jordan family signatures of size n in canonical order."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return list(_enumerate(n))


_NAMED = {
    2: {((2,),): "2x2x2-(a) / W", ((1,), (1,)): "2x2x2-(b) / GHZ"},
    3: {
        ((3,),): "3x3x2-(a)",
        ((2, 1),): "3x3x2-(b)",
        ((2,), (1,)): "3x3x2-(c)",
        ((1, 1), (1,)): "3x3x2-(d)",
        ((1,), (1,), (1,)): "3x3x2-(e)",
    },
    4: {
        ((1, 1), (1, 1)): "4x4x2-(a)",
        ((2, 2),): "4x4x2-(b)",
        ((3, 1),): "4x4x2-(c)",
        ((3,), (1,)): "4x4x2-(d)",
        ((2,), (2,)): "4x4x2-(e)",
        ((2, 1), (1,)): "4x4x2-(f)",
        ((2,), (1, 1)): "4x4x2-(g)",
        ((1,), (1,), (1,), (1,)): "4x4x2-(h)",
    },
}


def family_name(signature):
    """Display name of a family; unnamed ones get ``nxnx2-#k`` (canonical index k)."""
    named = _NAMED.get(signature.n, {})
    if signature.towers in named:
        return named[signature.towers]
    if signature.is_identity:
        return None
    k = enumerate_families(signature.n).index(signature) + 1
    return f"{signature.n}x{signature.n}x2-#{k}"
