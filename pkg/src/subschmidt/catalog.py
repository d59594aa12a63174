"""Named example states, family representatives and random SLOCC images.

Two-digit kets ``|xy>`` on the (3,3,2) and (4,4,2) examples read as level x
of subsystem a and level y of subsystem b; ``|x1 x2, y1 y2>`` on the
five-qubit constructions reads as two-qubit labels, first qubit most
significant.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .pencil import JordanFamilySignature, enumerate_families, family_name
from .tensor_state import TripartiteState, apply_local, from_entries, group_subsystems

NAMES = (
    "ghz", "w", "psi_a", "psi_b", "psi_c3", "psi_d3", "psi_e3",
    "ghz_bell", "w_bell", "psi_c4", "psi_d4", "psi_e4", "psi_f4", "psi_g4", "psi_h4",
)


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    name: str
    state: TripartiteState
    expected_family: JordanFamilySignature
    expected_min_terms: int
    synthetic: bool = False
    param: Optional[complex] = None


def _ket(dims, kets, label):
    """``kets`` maps (a, b, c) level triples to amplitudes."""
    return from_entries(dims, kets, label=label)


def _sig(n, *towers):
    return JordanFamilySignature(tuple(towers), n)


def _qubits(bits):
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1
    return v


def ghz_state():
    return _ket((2, 2, 2), {(0, 0, 0): 1, (1, 1, 1): 1}, "ghz")


def w_state():
    return _ket((2, 2, 2), {(0, 0, 1): 1, (0, 1, 0): 1, (1, 0, 0): 1}, "w")


def _with_bell(three_qubit, label):
    """``|psi>_{123} (x) |phi+>_{45}`` grouped as a = (1,4), b = (2,5), c = (3)."""
    bell = (_qubits("00") + _qubits("11")) / np.sqrt(2)
    five = np.einsum("ijk,lm->ijklm", three_qubit.amplitudes, bell.reshape(2, 2))
    return group_subsystems(five, [[0, 3], [1, 4], [2]], label=label)


def _two_digit(ket_terms, dims, label, qubit_labels=False):
    """Build from ``[(ab_string, c, amp)]`` where ``ab_string`` is ``"xy"`` or ``"x1x2,y1y2"``."""
    entries = {}
    for ab, c, amp in ket_terms:
        if qubit_labels:
            a, b = (int(s, 2) for s in ab.split(","))
        else:
            a, b = int(ab[0]), int(ab[1])
        entries[(a, b, c)] = entries.get((a, b, c), 0) + amp
    return _ket(dims, entries, label)


def psi_h4(a):
    """Family (h) example; ``a`` must avoid 0 and +-1, where eigenvalues coincide."""
    a = complex(a)
    if a == 0 or abs(a - 1) < 1e-12 or abs(a + 1) < 1e-12:
        raise ValueError(f"psi_h4 requires a not in {{0, 1, -1}}, got {a}")
    terms = [("11", 0, 1), ("22", 0, a), ("33", 0, 1), ("00", 1, 1), ("11", 1, a), ("22", 1, 1)]
    return _two_digit(terms, (4, 4, 2), f"psi_h4(a={a:g})")


def named(name, param=None):
    """Catalog entry for one of the names in :data:`NAMES`."""
    one = 1
    table = {
        "ghz": lambda: (ghz_state(), _sig(2, (1,), (1,)), 2),
        "w": lambda: (w_state(), _sig(2, (2,)), 3),
        "psi_a": lambda: (
            _two_digit([("10", 0, one), ("21", 0, one), ("00", 1, one), ("11", 1, one), ("22", 1, one)], (3, 3, 2), "psi_a"),
            _sig(3, (3,)), 5),
        "psi_b": lambda: (
            _two_digit([("21", 0, one), ("00", 1, one), ("11", 1, one), ("22", 1, one)], (3, 3, 2), "psi_b"),
            _sig(3, (2, 1)), 4),
        "psi_c3": lambda: (
            _two_digit([("00", 0, one), ("21", 0, one), ("11", 1, one), ("22", 1, one)], (3, 3, 2), "psi_c3"),
            _sig(3, (2,), (1,)), 4),
        "psi_d3": lambda: (
            _two_digit([("00", 0, one), ("11", 1, one), ("22", 1, one)], (3, 3, 2), "psi_d3"),
            _sig(3, (1, 1), (1,)), 3),
        "psi_e3": lambda: (
            _two_digit([("00", 0, one), ("11", 0, one), ("11", 1, one), ("22", 1, one)], (3, 3, 2), "psi_e3"),
            _sig(3, (1,), (1,), (1,)), 4),
        "ghz_bell": lambda: (_with_bell(ghz_state(), "ghz_bell"), _sig(4, (1, 1), (1, 1)), 4),
        "w_bell": lambda: (_with_bell(w_state(), "w_bell"), _sig(4, (2, 2)), 6),
        "psi_c4": lambda: (
            _two_digit(
                [("10,01", 1, one), ("11,10", 1, one), ("00,00", 0, one), ("01,01", 0, one),
                 ("10,10", 0, one), ("11,11", 0, one)],
                (4, 4, 2), "psi_c4", qubit_labels=True),
            _sig(4, (3, 1)), 6),
        "psi_d4": lambda: (
            _two_digit([("11", 0, one), ("22", 0, one), ("33", 0, one), ("00", 1, one), ("21", 1, one), ("32", 1, one)], (4, 4, 2), "psi_d4"),
            _sig(4, (3,), (1,)), 6),
        "psi_e4": lambda: (
            _two_digit([("10", 0, one), ("22", 0, one), ("33", 0, one), ("00", 1, one), ("11", 1, one), ("32", 1, one)], (4, 4, 2), "psi_e4"),
            _sig(4, (2,), (2,)), 6),
        "psi_f4": lambda: (
            _two_digit([("11", 0, one), ("22", 0, one), ("33", 0, one), ("00", 1, one), ("23", 1, one)], (4, 4, 2), "psi_f4"),
            _sig(4, (2, 1), (1,)), 5),
        "psi_g4": lambda: (
            _two_digit([("22", 0, one), ("33", 0, one), ("10", 0, one), ("00", 1, one), ("11", 1, one)], (4, 4, 2), "psi_g4"),
            _sig(4, (2,), (1, 1)), 5),
    }
    if name == "psi_h4":
        if param is None:
            raise ValueError("psi_h4 requires the parameter a")
        return CatalogEntry(name, psi_h4(param), _sig(4, (1,), (1,), (1,), (1,)), 6, param=complex(param))
    if name not in table:
        raise KeyError(f"unknown catalog state {name!r}; known: {', '.join(NAMES)}")
    state, sig, terms = table[name]()
    return CatalogEntry(name, state, sig, terms)


def all_entries(h_param=2):
    return [named(n, h_param if n == "psi_h4" else None) for n in NAMES]


def expected_min_terms(signature):
    """Minimal product count implied by a signature."""
    ranks = sorted(signature.first_ranks)
    if len(ranks) >= 2:
        return ranks[0] + ranks[1]
    return ranks[0] + signature.n


def family_representative(signature, eigenvalues=None):
    """Synthetic state whose pencil is ``(J, I)`` with ``J`` in Jordan form.

    Distinct towers get eigenvalues 0, 1, 2, ... unless given.
    """
    n = signature.n
    if eigenvalues is None:
        eigenvalues = list(range(len(signature.towers)))
    J = np.zeros((n, n), dtype=complex)
    i = 0
    for lam, tower in zip(eigenvalues, signature.towers):
        for b in tower:
            J[i : i + b, i : i + b] = lam * np.eye(b) + np.eye(b, k=1)
            i += b
    amp = np.stack([J.T, np.eye(n).T], axis=-1)
    name = f"synthetic:{family_name(signature)}"
    state = TripartiteState(amp, name).normalized()
    return CatalogEntry(name, state, signature, expected_min_terms(signature), synthetic=True)


def family_representatives(n):
    return [family_representative(s) for s in enumerate_families(n)]


def general_ghz(n, coeffs, bases_a=None, bases_b=None, bases_c=None):
    """``sum_k d_k |a_k>|b_k>|c_k>`` over three sets of n independent vectors.

    Each ``bases_x`` is a sequence of n vectors (computational basis when omitted).
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape != (n,) or np.any(coeffs == 0):
        raise ValueError("coeffs must be n nonzero numbers")
    mats = []
    for basis in (bases_a, bases_b, bases_c):
        B = np.eye(n, dtype=complex) if basis is None else np.column_stack([np.asarray(v, dtype=complex) for v in basis])
        if B.shape[1] != n or np.linalg.matrix_rank(B) < n:
            raise ValueError("basis vectors are linearly dependent")
        mats.append(B)
    amp = np.einsum("k,ik,jk,lk->ijl", coeffs, *mats)
    return TripartiteState(amp, f"ghz{n}").normalized()


def random_invertible(d, rng, floor=0.05, attempts=100):
    """Complex Gaussian d x d matrix with ``s_min > floor * s_max``."""
    for _ in range(attempts):
        X = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        s = np.linalg.svd(X, compute_uv=False)
        if s[-1] > floor * s[0]:
            return X
    raise RuntimeError(f"no well-conditioned {d}x{d} sample in {attempts} attempts")


def random_local_operators(dims, seed, floor=0.05):
    rng = np.random.default_rng(seed)
    return tuple(random_invertible(d, rng, floor) for d in dims)


def random_in_class(entry, seed):
    """Image of the entry's state under seeded random invertible local operators."""
    state = entry.state if isinstance(entry, CatalogEntry) else entry
    A, B, C = random_local_operators(state.dims, seed)
    label = f"{state.label or 'state'}@seed{seed}"
    return TripartiteState(apply_local(state.amplitudes, A, B, C), label).normalized()


def random_state(n, seed, dc=2):
    """Gaussian random (n, n, dc) state; generically of dimensionality (n, n, 2)."""
    rng = np.random.default_rng(seed)
    amp = rng.standard_normal((n, n, dc)) + 1j * rng.standard_normal((n, n, dc))
    return TripartiteState(amp, f"random{n}@{seed}").normalized()
