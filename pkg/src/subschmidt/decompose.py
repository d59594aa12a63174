"""Sub-Schmidt decompositions built from low-rank states of the support plane.

Given two independent plane states phi_1, phi_2 the state is rewritten as
``|phi_1>|c_1> + |phi_2>|c_2>`` and each phi_j is expanded in its Schmidt
form, giving ``rank(phi_1) + rank(phi_2)`` product terms.
"""

import itertools
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .errors import DEFAULT_TOL, NumericalError, Tolerances
from .pencil import ProjectiveEigenvalue, analyze
from .tensor_state import (
    RelativeDecomposition,
    TripartiteState,
    _complex_json,
    fidelity,
    relative_decomposition,
)


@dataclass(frozen=True, eq=False)
class PlaneState:
    """A state ``alpha0 |r0> + alpha1 |r1>`` of the support plane.

    ``matrix`` is normalized to unit Frobenius norm; ``generic`` marks a
    full-rank partner chosen away from every degenerate point.
    """

    point: ProjectiveEigenvalue
    matrix: np.ndarray = field(repr=False)
    schmidt_rank: int
    generic: bool = False

    def to_json(self):
        return "generic" if self.generic else self.point.to_json()


@dataclass(frozen=True, eq=False)
class ProductTerm:
    weight: complex
    vec_a: np.ndarray
    vec_b: np.ndarray
    vec_c: np.ndarray

    def tensor(self):
        return self.weight * np.einsum("i,j,k->ijk", self.vec_a, self.vec_b, self.vec_c)

    def to_json(self):
        return {
            "weight": _complex_json(self.weight),
            "vec_a": [_complex_json(z) for z in self.vec_a],
            "vec_b": [_complex_json(z) for z in self.vec_b],
            "vec_c": [_complex_json(z) for z in self.vec_c],
        }


@dataclass(frozen=True, eq=False)
class SubSchmidtDecomposition:
    terms: List[ProductTerm]
    pair: Tuple[PlaneState, PlaneState]
    fidelity: float
    dims: tuple
    tolerances: Tolerances = DEFAULT_TOL

    @property
    def term_count(self):
        return len(self.terms)

    def tensor(self):
        return sum(t.tensor() for t in self.terms)

    def to_json(self):
        return {
            "term_count": self.term_count,
            "terms": [t.to_json() for t in self.terms],
            "pair": [p.to_json() for p in self.pair],
            "fidelity": float(f"{self.fidelity:.15g}"),
        }


def _rank(X, tol):
    s = np.linalg.svd(X, compute_uv=False)
    return int(np.sum(s > tol * s[0])) if s[0] > 0 else 0


def _plane_state(point, dec):
    X = point.combination(*dec.R)
    return X / np.linalg.norm(X)


def degenerate_states(analysis, dec, tol=DEFAULT_TOL):
    """One plane state per rank-drop point, with its Schmidt rank.

    The numerical rank must agree with the first rank of the point's Jordan
    tower; a disagreement means the tolerances cannot resolve this pencil.
    """
    out = []
    for point, tower in analysis.eigenvalues:
        X = _plane_state(point, dec)
        r = _rank(X, tol.rank)
        if r != tower.first_rank:
            raise NumericalError(
                f"plane state at {point} has numerical rank {r}, expected {tower.first_rank}"
            )
        out.append(PlaneState(point, X, r))
    return out


def _bloch(p):
    v = p.coords / np.linalg.norm(p.coords)
    x = 2 * (np.conj(v[0]) * v[1])
    return np.array([x.real, x.imag, abs(v[0]) ** 2 - abs(v[1]) ** 2])


def _from_bloch(r):
    theta = np.arccos(np.clip(r[2], -1, 1))
    phi = np.arctan2(r[1], r[0])
    return ProjectiveEigenvalue.from_coords(np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2))


def _fibonacci_sphere(m=256):
    i = np.arange(m) + 0.5
    z = 1 - 2 * i / m
    rho = np.sqrt(1 - z**2)
    phi = np.pi * (1 + 5**0.5) * i
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def generic_partner(points, dec, tol=DEFAULT_TOL):
    """Full-rank plane state farthest (Fubini-Study) from all degenerate points.

    Candidates are the antipodes of the degenerate points followed by a fixed
    Fibonacci lattice on the Bloch sphere; the first maximizer of the
    minimum angular distance wins.
    """
    n = dec.n
    deg = np.array([_bloch(p) for p in points])
    cands = np.vstack([-deg, _fibonacci_sphere()])
    score = np.min(np.arccos(np.clip(cands @ deg.T, -1, 1)), axis=1)
    for i in np.argsort(-score, kind="stable"):
        p = _from_bloch(cands[i])
        X = _plane_state(p, dec)
        if _rank(X, tol.rank) == n:
            return PlaneState(p, X, n, generic=True)
    raise NumericalError("no full-rank plane state found")


def _gauge(v):
    """Unit vector with first nonzero entry real positive, and the factor removed."""
    nrm = np.linalg.norm(v)
    v = v / nrm
    idx = int(np.argmax(np.abs(v) > 1e-12 * np.abs(v).max()))
    phase = v[idx] / abs(v[idx])
    return v / phase, nrm * phase


def decompose_pair(dec, first, second, tol=DEFAULT_TOL):
    """Product expansion of the decomposed state over two plane states."""
    # rows: coefficients of each normalized plane state over (R0, R1)
    T = np.array([ps.point.coords / np.linalg.norm(ps.point.combination(*dec.R)) for ps in (first, second)])
    sv = np.linalg.svd(T, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        raise NumericalError("plane states of the pair are linearly dependent")
    Tinv = np.linalg.inv(T)
    c = np.array(dec.c)
    Va, Vb, Vc = dec.support.isometries
    terms = []
    for j, ps in enumerate((first, second)):
        cof = dec.qubit_basis @ (c * Tinv[:, j])
        vec_c, wc = _gauge(Vc @ cof)
        U, s, Vh = np.linalg.svd(ps.matrix)
        for i in range(ps.schmidt_rank):
            vec_a, wa = _gauge(Va @ Vh[i])
            vec_b, wb = _gauge(Vb @ U[:, i])
            terms.append(ProductTerm(complex(s[i] * wa * wb * wc), vec_a, vec_b, vec_c))
    dims = tuple(V.shape[0] for V in (Va, Vb, Vc))
    rebuilt = sum(t.tensor() for t in terms)
    source = dec.lift(dec.compressed_tensor())
    fid = fidelity(rebuilt, source)
    if fid < 1 - tol.recon:
        raise NumericalError(f"decomposition reconstructs with infidelity {1 - fid:.3g}")
    return SubSchmidtDecomposition(terms, (first, second), fid, dims, tol)


def _prepare(state, tol, dec=None, analysis=None):
    if dec is None:
        if isinstance(state, RelativeDecomposition):
            dec = state
        else:
            dec = relative_decomposition(state, tol)
    if analysis is None:
        analysis = analyze(dec, tol)
    return dec, analysis


def _candidate_pairs(dec, analysis, tol, include_generic=True):
    deg = degenerate_states(analysis, dec, tol)
    pairs = list(itertools.combinations(deg, 2))
    if include_generic or len(deg) == 1:
        partner = generic_partner([p.point for p in deg], dec, tol)
        pairs += [(p, partner) for p in deg]
    return pairs


def _order(pairs):
    return sorted(pairs, key=lambda pr: pr[0].schmidt_rank + pr[1].schmidt_rank)


def min_decomposition(state, tol=DEFAULT_TOL, dec=None, analysis=None):
    """A decomposition with the fewest product terms reachable from plane states."""
    dec, analysis = _prepare(state, tol, dec, analysis)
    pairs = _order(_candidate_pairs(dec, analysis, tol, include_generic=False))
    return decompose_pair(dec, *pairs[0], tol)


def enumerate_decompositions(state, limit=None, tol=DEFAULT_TOL, include_generic=True, dec=None, analysis=None):
    """Decompositions from every pair of degenerate plane states and, with
    ``include_generic``, from each degenerate state paired with the generic
    partner; sorted by term count and truncated to ``limit``."""
    dec, analysis = _prepare(state, tol, dec, analysis)
    pairs = _order(_candidate_pairs(dec, analysis, tol, include_generic))
    if limit is not None:
        if limit < 1:
            raise ValueError("limit must be positive")
        pairs = pairs[:limit]
    return [decompose_pair(dec, a, b, tol) for a, b in pairs]


def reconstruct(decomp, dims=None):
    """Dense normalized state from a list of product terms."""
    dims = tuple(decomp.dims if dims is None else dims)
    for t in decomp.terms:
        if (len(t.vec_a), len(t.vec_b), len(t.vec_c)) != dims:
            raise ValueError(f"term vectors of lengths {(len(t.vec_a), len(t.vec_b), len(t.vec_c))} do not match dims {dims}")
    amp = np.zeros(dims, dtype=complex)
    for t in decomp.terms:
        amp += t.tensor()
    return TripartiteState(amp).normalized()
