"""Density matrices, l1/l2 coherence and their N-copy behaviour.

Coherence is measured in the storage basis of the matrix; no basis change
is ever applied.  ``kron_power`` materializes ``rho**(x)N`` so that the
N-copy formulas can be checked against brute force.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .combinatorics import binomial
from .errors import DomainError, InvalidArgumentError, SizeLimitError, ValidationError

__all__ = [
    "ATOL",
    "MAX_KRON_ROWS",
    "DensityMatrix",
    "CoherenceSummary",
    "l1_coherence",
    "l2_coherence",
    "purity",
    "summarize",
    "kron_power",
    "l1_n_copies_closed",
    "l2_n_copies_closed",
    "brute_force_coherence",
    "random_state",
    "qubit",
    "load_state",
    "save_state",
    "state_to_json",
    "state_from_json",
    "state_to_csv",
    "state_from_csv",
]

ATOL = 1e-10
MAX_KRON_ROWS = 4096
_BLOCK_ENTRIES = 1 << 18


class DensityMatrix:
    """Validated, read-only ``d x d`` complex matrix.

    Parameters
    ----------
    entries : array_like
        Matrix elements in the basis in which coherence is measured.
    strict : bool
        Also require positive semidefiniteness (min eigenvalue >= -ATOL).
    validate : bool
        Skip all checks when False; only for matrices that are valid by
        construction.
    """

    __slots__ = ("entries", "strict")

    def __init__(self, entries, *, strict: bool = False, validate: bool = True):
        m = np.array(entries, dtype=complex)
        m.setflags(write=False)
        self.entries = m
        self.strict = strict
        if validate:
            self._validate()

    def _validate(self):
        m = self.entries
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise ValidationError("shape", f"expected a square matrix with d >= 2, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValidationError("finite", "entries must be finite")
        herm_err = np.max(np.abs(m - m.conj().T))
        if herm_err > ATOL:
            raise ValidationError("hermitian", f"max |rho_ij - conj(rho_ji)| = {herm_err:.3e}")
        trace_err = abs(np.trace(m) - 1)
        if trace_err > ATOL:
            raise ValidationError("unit-trace", f"|Tr rho - 1| = {trace_err:.3e}")
        if self.strict:
            lowest = np.linalg.eigvalsh(m).min()
            if lowest < -ATOL:
                raise ValidationError("psd", f"minimum eigenvalue {lowest:.3e}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"

    def __eq__(self, other):
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    __hash__ = None


@dataclass(frozen=True)
class CoherenceSummary:
    c: float
    c2: float
    purity: float


def _as_state(rho) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)


def l1_coherence(rho) -> float:
    """Sum of the moduli of all off-diagonal entries.

    In strict mode also checks that this equals ``sum_ij |rho_ij| - 1``,
    which relies on a nonnegative unit-trace diagonal.
    """
    rho = _as_state(rho)
    m = rho.entries
    n = m.shape[0]
    # row blocks keep the temporary moduli small for large tensor powers
    step = max(1, _BLOCK_ENTRIES // n)
    c = 0.0
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        moduli = np.abs(m[lo:hi])
        moduli[np.arange(hi - lo), np.arange(lo, hi)] = 0.0
        c += float(moduli.sum())
    diagonal = float(np.abs(np.diagonal(m)).sum())
    if rho.strict and abs(diagonal - 1) > 1e-12 * max(1.0, c):
        raise ValidationError("psd", "diagonal is not a probability vector")
    return c


def _abs2_sum(m) -> float:
    v = np.ascontiguousarray(m).view(np.float64).ravel()
    return float(np.dot(v, v))


def l2_coherence(rho) -> float:
    """Sum of the squared moduli of all off-diagonal entries."""
    m = _as_state(rho).entries
    d = np.diagonal(m)
    return _abs2_sum(m) - float(np.sum(d.real**2 + d.imag**2))


def purity(rho) -> float:
    """``Tr rho**2``, computed as ``sum_ij |rho_ij|**2``."""
    return _abs2_sum(_as_state(rho).entries)


def summarize(rho) -> CoherenceSummary:
    rho = _as_state(rho)
    return CoherenceSummary(l1_coherence(rho), l2_coherence(rho), purity(rho))


def kron_power(rho, N: int, max_rows: int = MAX_KRON_ROWS) -> DensityMatrix:
    """``rho (x) rho (x) ... (x) rho`` with `N` factors.

    Row index ``i1 i2 ... iN`` is read as a big-endian base-``d`` number,
    the ordering of :func:`numpy.kron`.
    """
    rho = _as_state(rho)
    if isinstance(N, bool) or not isinstance(N, int) or N < 1:
        raise InvalidArgumentError(f"N must be a positive integer, got {N!r}")
    d = rho.dim
    if d**N > max_rows:
        raise SizeLimitError(f"d**N = {d}**{N} = {d**N} rows exceeds the cap of {max_rows}")
    out = _kron_pow(rho.entries, N)
    # products of valid states are valid; revalidating 4096 x 4096 is wasted work
    return DensityMatrix(out, strict=rho.strict, validate=False)


def _kron(x, y):
    r, q = x.shape[0], y.shape[0]
    return (x[:, None, :, None] * y[None, :, None, :]).reshape(r * q, r * q)


def _kron_pow(m, N):
    # square-and-multiply: only the last product has the full size
    if N == 1:
        return m
    half = _kron_pow(m, N // 2)
    out = _kron(half, half)
    return _kron(out, m) if N % 2 else out


def l1_n_copies_closed(c: float, N: int, form: str = "power") -> float:
    """``(1 + c)**N - 1``; ``form="binomial"`` sums ``C(N, k) c**k`` instead."""
    if c < 0 or N < 1:
        raise DomainError(f"need c >= 0 and N >= 1, got c={c}, N={N}")
    if N == 1:
        return c
    if form == "binomial":
        return math.fsum(binomial(N, k) * c**k for k in range(1, N + 1))
    # expm1/log1p keeps small c accurate
    return math.expm1(N * math.log1p(c))


def l2_n_copies_closed(c2: float, p: float, N: int) -> float:
    """``p**N - (p - c2)**N`` for purity `p` and l2 quantity `c2`."""
    slack = 1e-12
    if not (0 < p <= 1 + slack) or not (-slack <= p - c2 <= 1 + slack) or N < 1:
        raise DomainError(f"need 0 < p <= 1, 0 <= p - c2 <= 1, N >= 1; got c2={c2}, p={p}, N={N}")
    if N == 1:
        return c2
    return p**N - (p - c2) ** N


def brute_force_coherence(rho, N: int, norm: str = "l1", max_rows: int = MAX_KRON_ROWS) -> float:
    """Coherence of the explicitly built ``N``-fold tensor power."""
    if norm not in ("l1", "l2"):
        raise InvalidArgumentError(f"norm must be 'l1' or 'l2', got {norm!r}")
    big = kron_power(rho, N, max_rows)
    return l1_coherence(big) if norm == "l1" else l2_coherence(big)


def random_state(dim: int, kind: str = "mixed", rng_seed=None) -> DensityMatrix:
    """Random state from a seeded generator.

    ``"pure"``: projector onto a normalized complex Gaussian vector.
    ``"mixed"``: ``G G^dagger / Tr(G G^dagger)`` with ``G`` a square
    complex Ginibre matrix.
    """
    if dim < 2:
        raise InvalidArgumentError("dim must be >= 2")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    if kind == "pure":
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        v /= np.linalg.norm(v)
        m = np.outer(v, v.conj())
    elif kind == "mixed":
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        m = g @ g.conj().T
        m /= np.trace(m).real
    else:
        raise InvalidArgumentError(f"kind must be 'pure' or 'mixed', got {kind!r}")
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(m)


def qubit(a: float, b: complex) -> DensityMatrix:
    """``[[a, b], [conj(b), 1 - a]]``."""
    return DensityMatrix([[a, b], [np.conj(b), 1 - a]])


# -- file formats ----------------------------------------------------------

def state_to_json(rho) -> dict:
    m = _as_state(rho).entries
    return {
        "dim": int(m.shape[0]),
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def state_from_json(data: dict, strict: bool = False) -> DensityMatrix:
    try:
        dim = int(data["dim"])
        rows = [[complex(float(re), float(im)) for re, im in row] for row in data["entries"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"malformed state JSON: {exc}") from exc
    if len(rows) != dim or any(len(r) != dim for r in rows):
        raise InvalidArgumentError(f"entries are not {dim} x {dim}")
    return DensityMatrix(rows, strict=strict)


def state_to_csv(rho) -> str:
    """CSV text: a ``# dim=d`` header then one row per matrix row, ``re,im`` pairs."""
    m = _as_state(rho).entries
    buf = io.StringIO()
    buf.write(f"# dim={m.shape[0]}\n")
    writer = csv.writer(buf, lineterminator="\n")
    for row in m:
        writer.writerow([repr(float(x)) for z in row for x in (z.real, z.imag)])
    return buf.getvalue()


def state_from_csv(text: str, strict: bool = False) -> DensityMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].lstrip().startswith("#"):
        raise InvalidArgumentError("CSV state needs a '# dim=d' header")
    header = lines[0].lstrip("# ").strip()
    try:
        key, value = header.split("=")
        if key.strip() != "dim":
            raise ValueError(header)
        dim = int(value)
        rows = []
        for rec in csv.reader(lines[1:]):
            vals = [float(x) for x in rec]
            if len(vals) != 2 * dim:
                raise ValueError(f"expected {2 * dim} numbers per row, got {len(vals)}")
            rows.append([complex(vals[2 * i], vals[2 * i + 1]) for i in range(dim)])
    except ValueError as exc:
        raise InvalidArgumentError(f"malformed state CSV: {exc}") from exc
    if len(rows) != dim:
        raise InvalidArgumentError(f"expected {dim} rows, got {len(rows)}")
    return DensityMatrix(rows, strict=strict)


def load_state(path, strict: bool = False) -> DensityMatrix:
    """Read a state from ``.json`` or ``.csv`` (chosen by suffix)."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        return state_from_csv(text, strict)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"malformed state JSON: {exc}") from exc
    return state_from_json(data, strict)


def save_state(rho, path, fmt: str | None = None):
    path = Path(path)
    fmt = fmt or ("csv" if path.suffix.lower() == ".csv" else "json")
    if fmt == "csv":
        path.write_text(state_to_csv(rho))
    else:
        path.write_text(json.dumps(state_to_json(rho), indent=1) + "\n")
