"""SLOCC interconvertibility of (n, n, 2) states with explicit certificates.

Two states are compared in three stages: their Jordan family signatures
must agree, some tower-respecting labelling of the eigenvalues must admit a
Moebius change of plane basis, and the resulting local operators
``A (x) B (x) C`` must actually map one state onto the other.

Conventions: relative-state matrices transform as ``R -> B R A^T`` and the
Moebius parameters ``(a, b, c, d)`` act on the second state, giving
``Phi'_0 = a R'_0 + b R'_1`` and ``Phi'_1 = c R'_0 + d R'_1``. A certificate
satisfies ``Phi'_k = B R_k A^T`` for k = 0, 1.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import DEFAULT_TOL, CertificateError, NumericalError
from .pencil import MoebiusParams, analyze, jordan_basis
from .tensor_state import (
    TripartiteState,
    _complex_json,
    apply_local,
    fidelity,
    local_supports,
    relative_decomposition,
)

LABELLING_CAP = 10_000
NO_MOEBIUS = "no Möbius solution: distinct SLOCC classes within family"


@dataclass(frozen=True)
class Labelling:
    """Bijection ``i -> permutation[i]`` from the first eigenvalue list to the second."""

    permutation: Tuple[int, ...]

    def pairs(self):
        return list(enumerate(self.permutation))

    def to_json(self):
        return list(self.permutation)


@dataclass(frozen=True, eq=False)
class SloccCertificate:
    """Invertible local operators with ``A (x) B (x) C |psi> ~ |psi'>``.

    ``A``, ``B`` and ``C`` act on the compressed supports. ``ambient`` holds
    operators on the full input spaces when both states live in spaces of
    equal dimensions (the supports are completed by mapping complement onto
    complement).
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    moebius: MoebiusParams
    labelling: Labelling
    residual: float
    conditioning: dict = field(default_factory=dict)
    ambient: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray]] = None

    def to_json(self):
        doc = {
            "A": _matrix_json(self.A),
            "B": _matrix_json(self.B),
            "C": _matrix_json(self.C),
            "moebius": self.moebius.to_json(),
            "labelling": self.labelling.to_json(),
            "residual": float(f"{self.residual:.15g}"),
            "conditioning": {k: float(f"{v:.15g}") for k, v in self.conditioning.items()},
        }
        if self.ambient is not None:
            doc["ambient"] = dict(zip("ABC", (_matrix_json(X) for X in self.ambient)))
        return doc


@dataclass(frozen=True, eq=False)
class EquivalenceDecision:
    equivalent: bool
    reason: str
    certificate: Optional[SloccCertificate] = None
    labellings_tried: int = 0

    def __bool__(self):
        return self.equivalent

    def to_json(self):
        doc = {"equivalent": self.equivalent, "reason": self.reason}
        if self.certificate is not None:
            doc.update(self.certificate.to_json())
        return doc


def _matrix_json(X):
    return [[_complex_json(z) for z in row] for row in np.asarray(X)]


def _cond(X):
    s = np.linalg.svd(X, compute_uv=False)
    return float(s[0] / s[-1]) if s[-1] > 0 else math.inf


# ---------------------------------------------------------------------------
# labellings and the Moebius system
# ---------------------------------------------------------------------------


def signature_match(sa, sb, ea, eb, cap=LABELLING_CAP):
    """All tower-respecting bijections between two eigenvalue lists.

    ``ea`` and ``eb`` are lists of ``(point, tower)``. Returns an empty list
    when the signatures differ; otherwise labellings in lexicographic order
    of their permutation tuples.
    """
    if sa != sb:
        return []
    groups = {}
    for j, (_, tower) in enumerate(eb):
        groups.setdefault(tower.blocks, []).append(j)
    slots = {}
    for i, (_, tower) in enumerate(ea):
        slots.setdefault(tower.blocks, []).append(i)
    total = math.prod(math.factorial(len(v)) for v in slots.values())
    if total > cap:
        raise NumericalError(f"{total} candidate labellings exceed the search cap of {cap}")
    keys = list(slots)
    out = []
    for choice in itertools.product(*(itertools.permutations(groups[k]) for k in keys)):
        perm = [0] * len(ea)
        for k, targets in zip(keys, choice):
            for i, j in zip(slots[k], targets):
                perm[i] = j
        out.append(tuple(perm))
    return [Labelling(p) for p in sorted(out)]


def moebius_system(points_a, points_b, labelling):
    """Rows of the homogeneous linear system in ``(a, b, c, d)``.

    Point ``(x0 : x1)`` of the first pencil must map to its partner
    ``(y0 : y1)``: ``(x0 a + x1 c) y1 - (x0 b + x1 d) y0 = 0``. Rows are
    normalized to unit length.
    """
    rows = []
    for i, j in labelling.pairs():
        x0, x1 = points_a[i].coords
        y0, y1 = points_b[j].coords
        row = np.array([x0 * y1, -x0 * y0, x1 * y1, -x1 * y0])
        rows.append(row / np.linalg.norm(row))
    return np.array(rows).reshape(-1, 4)


def solve_moebius(points_a, points_b, labelling, tol=DEFAULT_TOL):
    """Moebius parameters realizing ``labelling``, or ``None``.

    The null space of the system is computed with the relative threshold
    ``tol.sys``. Among null vectors the one closest to the identity
    parameters is preferred; if that is singular, fixed combinations of the
    null basis are tried. The result is rescaled to ``ad - bc = 1``.
    """
    K = moebius_system(points_a, points_b, labelling)
    _, s, Vh = np.linalg.svd(np.vstack([K, np.zeros((4, 4))]))
    rank = int(np.sum(s > tol.sys * max(s[0], 1.0)))
    if rank >= 4:
        return None
    N = Vh[rank:].conj().T
    ident = np.array([1, 0, 0, 1], dtype=complex)
    candidates = [N @ (N.conj().T @ ident)]
    candidates += list(N.T)
    weights = np.arange(1, N.shape[1] + 1)
    candidates += [N @ weights, N @ (1j ** weights * weights)]
    for v in candidates:
        nrm = np.linalg.norm(v)
        if nrm < 1e-12:
            continue
        v = v / nrm
        if abs(v[0] * v[3] - v[1] * v[2]) > 1e-6:
            return MoebiusParams.scaled(*v)
    return None


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


def _refined_targets(Mp, spectrum):
    """Centroids of the eigenvalues of ``Mp`` nearest each expected eigenvalue."""
    ev = np.linalg.eigvals(Mp)
    out = []
    for lam, blocks in spectrum:
        m = sum(blocks)
        near = ev[np.argsort(np.abs(ev - lam), kind="stable")[:m]]
        out.append((complex(near.mean()), blocks))
    return out


def _complement(V):
    """Orthonormal basis of the orthogonal complement of the columns of ``V``."""
    d, r = V.shape
    if r == d:
        return np.zeros((d, 0), dtype=complex)
    U, _, _ = np.linalg.svd(V)
    return U[:, r:]


def _ambient(Vs, Vt, X):
    return Vt @ X @ Vs.conj().T + _complement(Vt) @ _complement(Vs).conj().T


def build_certificate(dec_a, dec_b, analysis_a, analysis_b, labelling, params, tol=DEFAULT_TOL):
    """Local operators mapping the first state onto the second.

    Both pencils are moved to the regularized frame of the first one. Jordan
    chain bases ``P``, ``P'`` of ``M = X1^{-1} X0`` and ``M' = Y1^{-1} Y0``
    give ``S = P P'^{-1}`` with ``M' = S^{-1} M S``, hence ``A = S^T`` and
    ``B = Y1 S^{-1} X1^{-1}``. ``C`` maps the qubit cofactors of the first
    state onto those of the second re-expanded over ``(Phi'_0, Phi'_1)``.

    Raises :class:`CertificateError` when the verification residual
    ``1 - fidelity`` exceeds ``tol.cert`` or an operator is singular.
    """
    R0, R1 = dec_a.R
    Phi0p, Phi1p = params.combine(*dec_b.R)
    H = analysis_a.regularization
    X0, X1 = H.combine(R0, R1)
    Y0, Y1 = H.combine(Phi0p, Phi1p)
    M = np.linalg.solve(X1, X0)
    try:
        Mp = np.linalg.solve(Y1, Y0)
    except np.linalg.LinAlgError as exc:
        raise CertificateError("certificate verification failed: transformed pencil is singular") from exc
    spectrum = [(lam, t.blocks) for lam, (_, t) in zip(analysis_a.frame_eigenvalues, analysis_a.eigenvalues)]
    P, _ = jordan_basis(M, spectrum, tol)
    Pp, _ = jordan_basis(Mp, _refined_targets(Mp, spectrum), tol)
    S = P @ np.linalg.inv(Pp)
    A = S.T
    B = Y1 @ np.linalg.inv(S) @ np.linalg.inv(X1)

    G_inv = np.linalg.inv(params.matrix)
    c, cp = np.array(dec_a.c), np.array(dec_b.c)
    F = dec_a.qubit_basis * c
    Fp = dec_b.qubit_basis @ (cp[:, None] * G_inv)
    C = Fp @ np.linalg.inv(F)

    for name, X in (("A", A), ("B", B), ("C", C)):
        s = np.linalg.svd(X, compute_uv=False)
        if not s[-1] > tol.rank * s[0]:
            raise CertificateError(f"certificate verification failed: {name} is singular")

    target = dec_b.compressed_tensor()
    residual = 1.0 - fidelity(apply_local(dec_a.compressed_tensor(), A, B, C), target)

    ambient = None
    Va, Vb, Vc = dec_a.support.isometries
    Wa, Wb, Wc = dec_b.support.isometries
    if all(V.shape[0] == W.shape[0] for V, W in zip((Va, Vb, Vc), (Wa, Wb, Wc))):
        ambient = (_ambient(Va, Wa, A), _ambient(Vb, Wb, B), _ambient(Vc, Wc, C))
        if dec_a.source is not None and dec_b.source is not None:
            image = apply_local(dec_a.source.amplitudes, *ambient)
            residual = max(residual, 1.0 - fidelity(image, dec_b.source.amplitudes))
    residual = max(residual, 0.0)
    if residual > tol.cert:
        raise CertificateError(f"certificate verification failed: residual {residual:.3g} > {tol.cert:g}")
    conditioning = {"P": _cond(P), "P_prime": _cond(Pp), "S": _cond(S)}
    return SloccCertificate(A, B, C, params, labelling, residual, conditioning, ambient)


# ---------------------------------------------------------------------------
# decision procedure
# ---------------------------------------------------------------------------


def equivalent(psi, psi_prime, tol=DEFAULT_TOL, cap=LABELLING_CAP, seed=0):
    """Decide whether two states are interconvertible by SLOCC.

    Local support ranks are compared first (they are SLOCC invariants);
    states of unsupported dimensionality raise the usual typed errors.
    Labellings are tried in lexicographic order and the first verified
    certificate is returned. :class:`CertificateError` is raised when
    Moebius solutions exist but no certificate verifies, which signals a
    tolerance problem rather than an answer.
    """
    psi = psi if isinstance(psi, TripartiteState) else TripartiteState(psi)
    psi_prime = psi_prime if isinstance(psi_prime, TripartiteState) else TripartiteState(psi_prime)
    ranks_a = local_supports(psi, tol.rank).ranks
    ranks_b = local_supports(psi_prime, tol.rank).ranks
    if ranks_a != ranks_b:
        # still raise for inputs outside the supported class
        relative_decomposition(psi, tol)
        relative_decomposition(psi_prime, tol)
        return EquivalenceDecision(False, "different dimensionality")
    dec_a = relative_decomposition(psi, tol)
    dec_b = relative_decomposition(psi_prime, tol)
    an_a = analyze(dec_a, tol, seed)
    an_b = analyze(dec_b, tol, seed)
    labellings = signature_match(an_a.signature, an_b.signature, an_a.eigenvalues, an_b.eigenvalues, cap)
    if not labellings:
        return EquivalenceDecision(False, "different Jordan family")
    failures = []
    solved = 0
    for count, lab in enumerate(labellings, start=1):
        params = solve_moebius(an_a.points, an_b.points, lab, tol)
        if params is None:
            continue
        solved += 1
        try:
            cert = build_certificate(dec_a, dec_b, an_a, an_b, lab, params, tol)
        except (CertificateError, np.linalg.LinAlgError) as exc:
            failures.append(str(exc))
            continue
        return EquivalenceDecision(True, "certificate verified", cert, count)
    if solved == 0:
        return EquivalenceDecision(False, NO_MOEBIUS, None, len(labellings))
    raise CertificateError(
        f"certificate verification failed for all {solved} labellings with Möbius solutions"
        + (f" (first: {failures[0]})" if failures else "")
    )
