"""Tripartite pure states, local supports and the qubit relative-state split.

A state is stored as a dense complex array ``psi[i, j, k]`` over subsystems
a, b and c, where c is the qubit. The relative-state decomposition writes

    |psi> = sum_k c_k |r_k>|k>

and represents each |r_k> by the matrix ``R_k[j, i] = <i j|r_k>`` (rows
indexed by subsystem b, columns by subsystem a), so that a local operator
A (x) B acts as ``R_k -> B @ R_k @ A.T``.
"""

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DEFAULT_TOL,
    DimensionalityError,
    QubitUnentangled,
    StateFormatError,
    Tolerances,
    UnsupportedDimensionality,
)

SUBSYSTEMS = ("a", "b", "c")


def _frozen(x):
    x = np.array(x, dtype=complex)
    x.setflags(write=False)
    return x


@dataclass(frozen=True, eq=False)
class TripartiteState:
    """Dense amplitude tensor over three subsystems.

    The constructor validates but does not normalize; use :meth:`normalized`.
    """

    amplitudes: np.ndarray
    label: Optional[str] = None

    def __post_init__(self):
        amp = np.asarray(self.amplitudes)
        if amp.ndim != 3 or min(amp.shape) < 1:
            raise StateFormatError(f"amplitude array must be rank 3 with positive dims, got {amp.shape}")
        amp = _frozen(amp)
        if not np.all(np.isfinite(amp)):
            raise StateFormatError("amplitudes must be finite")
        if not np.linalg.norm(amp) > 0:
            raise StateFormatError("zero tensor")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def dims(self):
        return tuple(int(d) for d in self.amplitudes.shape)

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self):
        return TripartiteState(self.amplitudes / self.norm, self.label)

    def with_label(self, label):
        return TripartiteState(self.amplitudes, label)

    def vector(self):
        return self.amplitudes.reshape(-1)

    def __repr__(self):
        name = f" {self.label!r}" if self.label else ""
        return f"<TripartiteState{name} dims={self.dims}>"


@dataclass(frozen=True, eq=False)
class LocalSupport:
    """Numerical ranks of the three reduced density matrices with
    column-orthonormal bases of their ranges."""

    ranks: tuple
    isometries: tuple
    tolerance_used: float
    spectra: tuple = field(default=(), repr=False)

    @property
    def is_full(self):
        return all(V.shape[0] == V.shape[1] for V in self.isometries)


@dataclass(frozen=True, eq=False)
class RelativeDecomposition:
    """Split of a compressed (n, n, 2) state along a qubit basis.

    ``c`` holds the slice norms, ``R`` the unit-Frobenius-norm slice matrices
    and ``qubit_basis`` the unitary whose columns are the basis vectors |k>
    in compressed qubit coordinates. ``support`` maps compressed coordinates
    back to the source state's ambient space.
    """

    c: tuple
    R: tuple
    qubit_basis: np.ndarray
    support: LocalSupport
    source: Optional[TripartiteState] = None

    @property
    def n(self):
        return self.R[0].shape[0]

    def compressed_tensor(self):
        """Rebuild ``sum_k c_k |r_k>|k>`` in compressed coordinates."""
        n = self.n
        out = np.zeros((n, n, 2), dtype=complex)
        for k in range(2):
            out += self.c[k] * np.einsum("ab,c->abc", self.R[k].T, self.qubit_basis[:, k])
        return out

    def lift(self, tensor):
        """Map a tensor in compressed coordinates to the ambient space."""
        Va, Vb, Vc = self.support.isometries
        return np.einsum("ia,jb,kc,abc->ijk", Va, Vb, Vc, tensor)


# ---------------------------------------------------------------------------
# construction and serialization
# ---------------------------------------------------------------------------


def from_entries(dims, entries, label=None, normalize=True):
    """Build a state from ``{(i, j, k): amplitude}`` or ``[(index, amp), ...]``."""
    dims = tuple(int(d) for d in dims)
    amp = np.zeros(dims, dtype=complex)
    items = entries.items() if isinstance(entries, dict) else entries
    for index, value in items:
        index = tuple(int(i) for i in index)
        if len(index) != len(dims) or any(not 0 <= i < d for i, d in zip(index, dims)):
            raise StateFormatError(f"index {list(index)} out of range for dims {list(dims)}")
        amp[index] += value
    state = TripartiteState(amp, label)
    return state.normalized() if normalize else state


def _parse_amplitudes(doc, ndim_expected, dims):
    entries = doc.get("amplitudes")
    if not isinstance(entries, list):
        raise StateFormatError("'amplitudes' must be a list")
    amp = np.zeros(dims, dtype=complex)
    seen = set()
    for e in entries:
        if not isinstance(e, dict) or "index" not in e:
            raise StateFormatError(f"malformed amplitude entry {e!r}")
        index = e["index"]
        if not isinstance(index, list) or len(index) != ndim_expected or not all(
            isinstance(i, int) and not isinstance(i, bool) for i in index
        ):
            raise StateFormatError(f"index must be a list of {ndim_expected} integers, got {index!r}")
        if any(not 0 <= i < d for i, d in zip(index, dims)):
            raise StateFormatError(f"index {index} out of range for dims {list(dims)}")
        key = tuple(index)
        if key in seen:
            raise StateFormatError(f"duplicate index {index}")
        seen.add(key)
        try:
            re = float(e.get("re", 0.0))
            im = float(e.get("im", 0.0))
        except (TypeError, ValueError) as exc:
            raise StateFormatError(f"non-numeric amplitude at {index}") from exc
        amp[key] = complex(re, im)
    if not np.all(np.isfinite(amp)):
        raise StateFormatError("amplitudes must be finite")
    if not np.linalg.norm(amp) > 0:
        raise StateFormatError("zero tensor")
    return amp


def _as_document(document):
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise StateFormatError(f"malformed document: {exc}") from exc
    if not isinstance(document, dict):
        raise StateFormatError("state document must be a JSON object")
    return document


def _parse_dims(value, name, length=None):
    if not isinstance(value, list) or not value or not all(
        isinstance(d, int) and not isinstance(d, bool) and d >= 1 for d in value
    ):
        raise StateFormatError(f"'{name}' must be a list of positive integers")
    if length is not None and len(value) != length:
        raise StateFormatError(f"'{name}' must have {length} entries")
    return tuple(value)


def load_state(document):
    """Parse a state document (JSON text or already-decoded dict).

    The returned state is normalized.
    """
    doc = _as_document(document)
    if "factor_dims" in doc:
        return load_multi_state(doc)
    dims = _parse_dims(doc.get("dims"), "dims", 3)
    amp = _parse_amplitudes(doc, 3, dims)
    label = doc.get("label")
    if label is not None and not isinstance(label, str):
        raise StateFormatError("'label' must be a string")
    return TripartiteState(amp, label).normalized()


def load_multi_state(document):
    """Parse the multi-factor document and group it into three subsystems."""
    doc = _as_document(document)
    factor_dims = _parse_dims(doc.get("factor_dims"), "factor_dims")
    amp = _parse_amplitudes(doc, len(factor_dims), factor_dims)
    groups = doc.get("groups")
    state = group_subsystems(amp, groups)
    label = doc.get("label")
    return state.with_label(label) if isinstance(label, str) else state


def _complex_json(z, digits=15):
    z = complex(z)
    # adding 0.0 turns -0.0 into 0.0 so output bytes do not depend on signed zeros
    return {"re": float(f"{z.real:.{digits}g}") + 0.0, "im": float(f"{z.imag:.{digits}g}") + 0.0}


def dump_state(state, digits=15):
    """Serialize to the state document format, listing nonzero entries only."""
    amps = []
    for index in zip(*np.nonzero(state.amplitudes)):
        entry = {"index": [int(i) for i in index]}
        entry.update(_complex_json(state.amplitudes[index], digits))
        amps.append(entry)
    doc = {"dims": list(state.dims), "amplitudes": amps}
    if state.label:
        doc["label"] = state.label
    return doc


# ---------------------------------------------------------------------------
# grouping, partial traces, supports
# ---------------------------------------------------------------------------


def group_subsystems(multi_state, groups, factor_dims=None, label=None):
    """Merge the factors of an m-partite tensor into three subsystems.

    ``groups`` is a partition of the 0-based factor positions into three
    ordered lists; members of a group are flattened in the listed order,
    the first member being the most significant digit.
    """
    amp = np.asarray(multi_state, dtype=complex)
    if factor_dims is not None:
        amp = amp.reshape(tuple(factor_dims))
    m = amp.ndim
    if not isinstance(groups, (list, tuple)) or len(groups) != 3:
        raise StateFormatError("groups must be three lists of factor indices")
    flat = []
    for g in groups:
        if not isinstance(g, (list, tuple)) or len(g) == 0:
            raise StateFormatError("empty group")
        for i in g:
            if not isinstance(i, (int, np.integer)) or isinstance(i, bool):
                raise StateFormatError(f"factor index {i!r} is not an integer")
        flat.extend(int(i) for i in g)
    if sorted(flat) != list(range(m)):
        raise StateFormatError(f"groups {groups} are not a partition of factors 0..{m - 1}")
    dims = [int(np.prod([amp.shape[i] for i in g])) for g in groups]
    out = np.transpose(amp, flat).reshape(dims)
    return TripartiteState(out, label).normalized()


def _unfold(amplitudes, subsystem):
    axis = SUBSYSTEMS.index(subsystem) if isinstance(subsystem, str) else int(subsystem)
    return np.moveaxis(amplitudes, axis, 0).reshape(amplitudes.shape[axis], -1)


def reduced_density(state, subsystem):
    """Reduced density matrix of one subsystem of the normalized state."""
    psi = state.amplitudes / state.norm
    M = _unfold(psi, subsystem)
    rho = M @ M.conj().T
    return (rho + rho.conj().T) / 2


def local_supports(state, tol=DEFAULT_TOL.rank):
    """Numerical ranks and range bases of the three reduced densities.

    A reduced-density eigenvalue counts as zero below ``tol`` times the
    largest one. When a support is the whole local space the identity is
    used as its basis so that compression leaves the coordinates untouched.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    psi = state.amplitudes / state.norm
    ranks, isos, spectra = [], [], []
    for s in SUBSYSTEMS:
        U, sv, _ = np.linalg.svd(_unfold(psi, s), full_matrices=False)
        ev = sv**2
        r = int(np.sum(ev > tol * ev[0]))
        d = U.shape[0]
        iso = np.eye(d, dtype=complex) if r == d else U[:, :r]
        ranks.append(r)
        isos.append(_frozen(iso))
        spectra.append(ev[:r])
    return LocalSupport(tuple(ranks), tuple(isos), tol, tuple(spectra))


def compress(state, support):
    """Express the state in the support bases; dims become the support ranks."""
    Va, Vb, Vc = support.isometries
    out = np.einsum("ia,jb,kc,ijk->abc", Va.conj(), Vb.conj(), Vc.conj(), state.amplitudes)
    return TripartiteState(out, state.label)


def check_dimensionality(ranks):
    """Raise the matching :class:`DimensionalityError` unless ranks are (n, n, 2)."""
    ra, rb, rc = ranks
    if max(ranks) == 1:
        raise QubitUnentangled("product state", ranks)
    if rc == 1:
        raise QubitUnentangled(ranks=ranks)
    if ra == 1 or rb == 1:
        raise DimensionalityError(f"bipartite state with support ranks {ranks}", "bipartite", ranks)
    if rc != 2 or ra != rb:
        raise UnsupportedDimensionality(f"unsupported dimensionality {ranks}", ranks)


def relative_decomposition(state, tol=DEFAULT_TOL, qubit_basis=None):
    """Relative-state split of ``state`` against the qubit.

    The state is compressed to its local supports first; the computational
    basis of the compressed qubit is used unless ``qubit_basis`` (a 2x2
    unitary whose columns are the basis kets) is given.
    """
    if not isinstance(tol, Tolerances):
        tol = DEFAULT_TOL.replace(rank=float(tol))
    support = local_supports(state, tol.rank)
    check_dimensionality(support.ranks)
    psi = compress(state.normalized(), support).amplitudes
    U = np.eye(2, dtype=complex) if qubit_basis is None else np.asarray(qubit_basis, dtype=complex)
    if U.shape != (2, 2) or not np.allclose(U.conj().T @ U, np.eye(2), atol=1e-10):
        raise ValueError("qubit_basis must be a 2x2 unitary")
    slices = np.einsum("abc,ck->kab", psi, U.conj())
    norms = np.linalg.norm(slices.reshape(2, -1), axis=1)
    if norms.min() <= tol.rank * norms.max():
        raise QubitUnentangled(ranks=support.ranks)
    R = tuple(_frozen(slices[k].T / norms[k]) for k in range(2))
    sv = np.linalg.svd(np.stack([R[0].ravel(), R[1].ravel()]), compute_uv=False)
    if sv[1] <= tol.rank * sv[0]:
        raise QubitUnentangled(ranks=support.ranks)
    return RelativeDecomposition(
        c=(complex(norms[0]), complex(norms[1])),
        R=R,
        qubit_basis=_frozen(U),
        support=support,
        source=state,
    )


# ---------------------------------------------------------------------------
# small utilities
# ---------------------------------------------------------------------------


def apply_local(amplitudes, A, B, C):
    """Apply ``A (x) B (x) C`` to a rank-3 amplitude array."""
    return np.einsum("ia,jb,kc,abc->ijk", A, B, C, amplitudes)


def fidelity(x, y):
    """``|<x|y>|^2 / (||x||^2 ||y||^2)`` for arrays of equal shape."""
    x = np.asarray(getattr(x, "amplitudes", x)).ravel()
    y = np.asarray(getattr(y, "amplitudes", y)).ravel()
    if x.shape != y.shape:
        return 0.0
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    return float(abs(np.vdot(x, y)) ** 2 / (nx * ny) ** 2)


def product_state(vectors: Sequence, label=None):
    """Tensor product of three local vectors."""
    a, b, c = (np.asarray(v, dtype=complex) for v in vectors)
    return TripartiteState(np.einsum("i,j,k->ijk", a, b, c), label).normalized()
