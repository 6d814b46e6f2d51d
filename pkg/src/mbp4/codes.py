"""Quaternary check matrices, built-in code families and the check-matrix file format."""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from . import gf2
from .pauli import COMMUTE, PAULI_CHARS, X_BIT, Z_BIT, PauliString, as_pauli


class CodeFormatError(ValueError):
    """A check-matrix file could not be parsed."""


class CodeValidationError(ValueError):
    """A check matrix parsed fine but is not a valid stabilizer check matrix."""


@dataclass(frozen=True)
class TannerGraph:
    """Edge lists of the Tanner graph; edges are numbered check-major.

    ``check_ptr``/``var_ptr`` are CSR offsets into ``arange(E)`` and
    ``var_edges`` respectively, so the edges of check ``m`` are
    ``check_ptr[m]:check_ptr[m+1]`` and the edges of qubit ``n`` are
    ``var_edges[var_ptr[n]:var_ptr[n+1]]`` (ascending check index).
    """

    edge_check: np.ndarray
    edge_var: np.ndarray
    edge_pauli: np.ndarray
    check_ptr: np.ndarray
    var_ptr: np.ndarray
    var_edges: np.ndarray

    @property
    def n_edges(self) -> int:
        return int(self.edge_var.size)


class CheckMatrix:
    """M x N matrix over {I, X, Y, Z}; row ``m`` is the stabilizer S_m."""

    def __init__(self, paulis):
        if isinstance(paulis, CheckMatrix):
            arr = paulis.paulis
        elif len(paulis) and isinstance(paulis[0], (str, PauliString)):
            rows = [as_pauli(r) for r in paulis]
            if len({len(r) for r in rows}) != 1:
                raise CodeValidationError("rows have different lengths")
            arr = np.stack([r.codes for r in rows])
        else:
            arr = np.asarray(paulis)
        arr = np.array(arr, dtype=np.uint8, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise CodeValidationError("check matrix must be a nonempty 2-d array")
        if arr.max() > 3:
            raise CodeValidationError("check matrix entries must be Pauli codes 0..3")
        arr.setflags(write=False)
        self._paulis = arr

    @property
    def paulis(self) -> np.ndarray:
        return self._paulis

    @property
    def m(self) -> int:
        return self._paulis.shape[0]

    @property
    def n(self) -> int:
        return self._paulis.shape[1]

    def row(self, i: int) -> PauliString:
        return PauliString(self._paulis[i])

    @property
    def rows(self) -> list[PauliString]:
        return [self.row(i) for i in range(self.m)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CheckMatrix):
            return NotImplemented
        return self._paulis.shape == other._paulis.shape and bool(np.array_equal(self._paulis, other._paulis))

    def __hash__(self) -> int:
        return hash((self._paulis.shape, self._paulis.tobytes()))

    def __repr__(self) -> str:
        return f"CheckMatrix(M={self.m}, N={self.n})"

    @cached_property
    def symplectic(self) -> np.ndarray:
        """(M, 2N) binary matrix [x | z]."""
        return np.hstack([X_BIT[self._paulis], Z_BIT[self._paulis]])

    @cached_property
    def echelon(self) -> gf2.Echelon:
        return gf2.echelon(self.symplectic)

    @property
    def rank(self) -> int:
        return self.echelon.rank

    @cached_property
    def tanner(self) -> TannerGraph:
        checks, vars_ = np.nonzero(self._paulis)
        paulis = self._paulis[checks, vars_]
        check_ptr = np.zeros(self.m + 1, dtype=np.int64)
        np.cumsum(np.bincount(checks, minlength=self.m), out=check_ptr[1:])
        order = np.lexsort((checks, vars_))
        var_ptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(vars_, minlength=self.n), out=var_ptr[1:])
        return TannerGraph(
            edge_check=checks.astype(np.int64),
            edge_var=vars_.astype(np.int64),
            edge_pauli=paulis.astype(np.int64),
            check_ptr=check_ptr,
            var_ptr=var_ptr,
            var_edges=order.astype(np.int64),
        )

    def check_support(self, m: int) -> np.ndarray:
        """N(m): qubits touched by check m."""
        return np.flatnonzero(self._paulis[m])

    def qubit_checks(self, n: int) -> np.ndarray:
        """M(n): checks touching qubit n."""
        return np.flatnonzero(self._paulis[:, n])

    @property
    def row_weights(self) -> np.ndarray:
        return np.count_nonzero(self._paulis, axis=1)

    @property
    def column_weights(self) -> np.ndarray:
        return np.count_nonzero(self._paulis, axis=0)

    def syndrome(self, error: PauliString | np.ndarray) -> np.ndarray:
        codes = error.codes if isinstance(error, PauliString) else np.asarray(error, dtype=np.uint8)
        if codes.shape != (self.n,):
            raise ValueError(f"error has length {codes.size}, check matrix has N={self.n}")
        t = self.tanner
        flips = COMMUTE[t.edge_pauli, codes[t.edge_var]]
        return (np.bincount(t.edge_check, weights=flips, minlength=self.m).astype(np.int64) & 1).astype(np.uint8)

    def anticommuting_pairs(self) -> list[tuple[int, int]]:
        sx = sp.csr_matrix(X_BIT[self._paulis].astype(np.int64))
        sz = sp.csr_matrix(Z_BIT[self._paulis].astype(np.int64))
        form = (sx @ sz.T + sz @ sx.T).tocoo()
        return sorted({(int(i), int(j)) for i, j, v in zip(form.row, form.col, form.data) if v % 2 and i < j})


def syndrome(error: PauliString, checks: CheckMatrix) -> np.ndarray:
    return checks.syndrome(error)


@dataclass(frozen=True, eq=False)
class Code:
    """A stabilizer code: check matrix plus derived parameters.

    ``logicals`` may be supplied (e.g. from a file); otherwise they are
    computed lazily from the check matrix.
    """

    checks: CheckMatrix
    name: str = "code"
    d: int | None = None
    logicals: tuple[tuple[PauliString, PauliString], ...] | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.checks.n

    @property
    def m(self) -> int:
        return self.checks.m

    @property
    def rank(self) -> int:
        return self.checks.rank

    @property
    def k(self) -> int:
        return self.checks.n - self.checks.rank

    @cached_property
    def logical_pairs(self) -> tuple[tuple[PauliString, PauliString], ...]:
        if self.logicals is not None:
            return self.logicals
        return compute_logicals(self.checks)

    def syndrome(self, error: PauliString) -> np.ndarray:
        return self.checks.syndrome(error)

    def describe(self) -> dict:
        rw = self.checks.row_weights
        cw = self.checks.column_weights
        return {
            "name": self.name,
            "N": self.n,
            "K": self.k,
            "D": self.d,
            "M": self.m,
            "rank": self.rank,
            "row_weight": {"min": int(rw.min()), "max": int(rw.max()), "mean": float(rw.mean())},
            "column_weight": {"min": int(cw.min()), "max": int(cw.max()), "mean": float(cw.mean())},
        }


def _validated(checks: CheckMatrix) -> CheckMatrix:
    bad = checks.anticommuting_pairs()
    if bad:
        i, j = bad[0]
        raise CodeValidationError(f"rows anticommute: rows {i + 1} and {j + 1} ({len(bad)} pair(s) total)")
    return checks


# ---------------------------------------------------------------------------
# logical operators


def _symplectic_form(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """<a_i, b_j> for 0/1 arrays of (x|z) rows; returns an int matrix."""
    ax, az = a[:, :n].astype(np.int64), a[:, n:].astype(np.int64)
    bx, bz = b[:, :n].astype(np.int64), b[:, n:].astype(np.int64)
    return (ax @ bz.T + az @ bx.T) & 1


def compute_logicals(checks: CheckMatrix) -> tuple[tuple[PauliString, PauliString], ...]:
    """Symplectic pairs (X_k, Z_k) spanning N(S) modulo S.

    Normalizer basis from the null space of the symplectic form, reduced
    modulo the stabilizer row space, then paired up by symplectic
    Gram-Schmidt.
    """
    n = checks.n
    sym = checks.symplectic
    # v commutes with every row  <=>  [S_z | S_x] v = 0
    normalizer = gf2.nullspace(np.hstack([sym[:, n:], sym[:, :n]]))
    ech = checks.echelon
    complement = gf2.echelon(gf2.unpack(ech.reduce(gf2.pack(normalizer)), 2 * n))
    # packed rows; ``swapped`` holds (z|x) so that <a, b> = parity(popcount(a & swapped(b)))
    pool = complement.rows.copy()
    swapped = gf2.pack(np.roll(gf2.unpack(pool, 2 * n), n, axis=1)) if pool.shape[0] else pool

    def form(rows: np.ndarray, sw: np.ndarray) -> np.ndarray:
        return (np.bitwise_count(rows & sw[None, :]).sum(axis=1) & 1).astype(bool)

    pairs = []
    while pool.shape[0]:
        first, first_sw = pool[0], swapped[0]
        partners = np.flatnonzero(form(pool[1:], first_sw))
        if partners.size == 0:
            raise CodeValidationError("degenerate symplectic complement; check matrix is inconsistent")
        j = int(partners[0]) + 1
        second, second_sw = pool[j].copy(), swapped[j].copy()
        keep = np.ones(pool.shape[0], dtype=bool)
        keep[[0, j]] = False
        rest, rest_sw = pool[keep], swapped[keep]
        if rest.shape[0]:
            with_second = form(rest, second_sw)
            with_first = form(rest, first_sw)
            rest[with_second] ^= first
            rest_sw[with_second] ^= first_sw
            rest[with_first] ^= second
            rest_sw[with_first] ^= second_sw
        bits = gf2.unpack(np.vstack([first, second]), 2 * n)
        pairs.append(
            (
                PauliString.from_symplectic(bits[0, :n], bits[0, n:]),
                PauliString.from_symplectic(bits[1, :n], bits[1, n:]),
            )
        )
        pool, swapped = rest, rest_sw
    return tuple(pairs)


def brute_force_distance(code: Code, max_weight: int | None = None) -> int | None:
    """Minimum weight of N(S) minus S by enumeration over increasing weight.

    Returns ``None`` if nothing is found up to ``max_weight`` (default N).
    Only sensible for small codes.
    """
    n = code.n
    ech = code.checks.echelon
    sym = code.checks.symplectic
    limit = n if max_weight is None else max_weight
    for w in range(1, limit + 1):
        supports = np.array(list(itertools.combinations(range(n), w)), dtype=np.int64)
        patterns = np.array(list(itertools.product((1, 2, 3), repeat=w)), dtype=np.uint8)
        for chunk in np.array_split(supports, max(1, supports.shape[0] // 4096)):
            cand = np.zeros((chunk.shape[0] * patterns.shape[0], n), dtype=np.uint8)
            rows = np.repeat(np.arange(cand.shape[0]), w)
            cols = np.repeat(chunk, patterns.shape[0], axis=0).reshape(-1)
            cand[rows, cols] = np.tile(patterns, (chunk.shape[0], 1)).reshape(-1)
            cand_sym = np.hstack([X_BIT[cand], Z_BIT[cand]])
            undetected = ~_symplectic_form(cand_sym, sym, n).any(axis=1)
            if not undetected.any():
                continue
            harmful = ~ech.contains(cand_sym[undetected])
            if harmful.any():
                return w
    return None


# ---------------------------------------------------------------------------
# built-in families


FIVE_QUBIT_ROWS = ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")


def gen_five_qubit() -> Code:
    return Code(_validated(CheckMatrix(list(FIVE_QUBIT_ROWS))), name="513", d=3)


def _stabilizer_row(n: int, qubits, pauli: int) -> np.ndarray:
    row = np.zeros(n, dtype=np.uint8)
    row[list(qubits)] = pauli
    return row


def gen_surface(L: int) -> Code:
    """Rotated [[L^2, 1, L]] surface code, qubits numbered row-major.

    Plaquette (r, c) on qubits (r, c), (r, c+1), (r+1, c), (r+1, c+1) is
    Z-type when r + c is even. X-type weight-2 checks sit on the top and
    bottom edges, Z-type ones on the left and right edges.
    """
    if not isinstance(L, (int, np.integer)) or L < 3 or L % 2 == 0:
        raise ValueError(f"surface code needs odd L >= 3, got {L!r}")
    n = L * L
    q = lambda r, c: r * L + c  # noqa: E731
    X, Z = 1, 3
    stabs: list[tuple[int, np.ndarray]] = []
    for r in range(L - 1):
        for c in range(L - 1):
            kind = Z if (r + c) % 2 == 0 else X
            stabs.append((q(r, c), _stabilizer_row(n, (q(r, c), q(r, c + 1), q(r + 1, c), q(r + 1, c + 1)), kind)))
    for c in range(0, L - 1, 2):
        stabs.append((q(0, c), _stabilizer_row(n, (q(0, c), q(0, c + 1)), X)))
    for c in range(1, L - 1, 2):
        stabs.append((q(L - 1, c), _stabilizer_row(n, (q(L - 1, c), q(L - 1, c + 1)), X)))
    for r in range(1, L - 1, 2):
        stabs.append((q(r, 0), _stabilizer_row(n, (q(r, 0), q(r + 1, 0)), Z)))
    for r in range(0, L - 1, 2):
        stabs.append((q(r, L - 1), _stabilizer_row(n, (q(r, L - 1), q(r + 1, L - 1)), Z)))
    stabs.sort(key=lambda item: (item[0], tuple(np.flatnonzero(item[1]))))
    return Code(CheckMatrix(np.stack([row for _, row in stabs])), name=f"surface:{L}", d=L)


def gen_toric(L: int) -> Code:
    """Rotated [[L^2, 2, L]] toric code on an L x L torus (L even).

    All L^2 plaquettes are measured, so the check matrix carries two
    redundant rows and is 4-regular in both directions.
    """
    if not isinstance(L, (int, np.integer)) or L < 4 or L % 2:
        raise ValueError(f"toric code needs even L >= 4, got {L!r}")
    n = L * L
    q = lambda r, c: (r % L) * L + (c % L)  # noqa: E731
    rows = []
    for r in range(L):
        for c in range(L):
            kind = 3 if (r + c) % 2 == 0 else 1
            rows.append(_stabilizer_row(n, (q(r, c), q(r, c + 1), q(r + 1, c), q(r + 1, c + 1)), kind))
    return Code(CheckMatrix(np.stack(rows)), name=f"toric:{L}", d=L)


def block_groups(L: int, block: int = 2) -> list[list[int]]:
    """Qubit groups of block x block squares on an L x L row-major lattice.

    For L=4 this gives {1,2,5,6}, {3,4,7,8}, {9,10,13,14}, {11,12,15,16}
    (0-based in the return value). Edge blocks are truncated for odd L.
    """
    groups = []
    for r0 in range(0, L, block):
        for c0 in range(0, L, block):
            groups.append(
                [r * L + c for r in range(r0, min(r0 + block, L)) for c in range(c0, min(c0 + block, L))]
            )
    return groups


def gen_bicycle(n: int, k_logical: int, row_weight: int, seed: int = 0) -> Code:
    """MacKay-style bicycle code.

    A random ``n/2``-circulant C with row weight ``row_weight/2`` gives
    H = [C, C^T]; rows are deleted greedily (most column weight first, ties
    broken by the seeded RNG) until (n - k_logical)/2 remain. H is used both
    as the X-type and the Z-type half of the check matrix.
    """
    if n % 2 or row_weight % 2 or row_weight < 2:
        raise ValueError("bicycle code needs even N and even row weight >= 2")
    half = n // 2
    if row_weight > half:
        raise ValueError(f"row weight {row_weight} exceeds N/2 = {half}")
    if not 0 <= k_logical < n or (n - k_logical) % 2:
        raise ValueError("need 0 <= K < N with N - K even")
    keep = (n - k_logical) // 2
    if keep < 1 or keep > half:
        raise ValueError(f"cannot keep {keep} of {half} circulant rows")

    rng = np.random.default_rng(seed)
    first = np.sort(rng.choice(half, size=row_weight // 2, replace=False))
    shifts = np.arange(half)[:, None]
    c_support = (first[None, :] + shifts) % half  # C[i, j] = 1 for j in c_support[i]
    ct_support = (shifts - first[None, :]) % half  # C^T[i, j] = C[j, i]
    support = np.hstack([c_support, ct_support + half])

    alive = np.ones(half, dtype=bool)
    col_weight = np.bincount(support.reshape(-1), minlength=n).astype(np.int64)
    for _ in range(half - keep):
        scores = np.where(alive, col_weight[support].sum(axis=1), -1)
        best = np.flatnonzero(scores == scores.max())
        drop = int(rng.choice(best))
        alive[drop] = False
        col_weight[support[drop]] -= 1

    h = np.zeros((keep, n), dtype=np.uint8)
    kept = support[alive]
    h[np.repeat(np.arange(keep), row_weight), kept.reshape(-1)] = 1
    paulis = np.vstack([h * 1, h * 3]).astype(np.uint8)
    return Code(CheckMatrix(paulis), name=f"bicycle:{n},{k_logical},{row_weight},{seed}")


# ---------------------------------------------------------------------------
# file format


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_check_matrix(text: str, name: str = "code") -> Code:
    """Parse the quaternary check-matrix text format.

    Dense form: a header ``M N`` followed by M rows of N characters over
    IXYZ (whitespace inside a row is ignored). Sparse form: the header is
    followed by a ``SPARSE`` line and ``m n W`` triples (1-based indices).
    Either form may end with ``LOGICALS K`` and 2K dense rows
    X_1, Z_1, X_2, ...
    """
    lines = [s for s in (_strip(raw) for raw in text.splitlines()) if s]
    if not lines:
        raise CodeFormatError("empty check-matrix file")
    header = lines[0].split()
    if len(header) != 2 or not all(tok.isdigit() for tok in header):
        raise CodeFormatError(f"expected header 'M N', got {lines[0]!r}")
    m, n = int(header[0]), int(header[1])
    if m < 1 or n < 1:
        raise CodeFormatError("M and N must be positive")

    body = lines[1:]
    split = next((i for i, s in enumerate(body) if s.upper().startswith("LOGICALS")), len(body))
    matrix_lines, logical_lines = body[:split], body[split:]

    paulis = np.zeros((m, n), dtype=np.uint8)
    if matrix_lines and matrix_lines[0].upper() == "SPARSE":
        for s in matrix_lines[1:]:
            parts = s.split()
            if len(parts) != 3 or not parts[0].isdigit() or not parts[1].isdigit():
                raise CodeFormatError(f"bad sparse entry {s!r}; expected 'm n W'")
            i, j, w = int(parts[0]), int(parts[1]), parts[2].upper()
            if not (1 <= i <= m and 1 <= j <= n):
                raise CodeValidationError(f"sparse entry {s!r} outside {m}x{n}")
            if w not in PAULI_CHARS:
                raise CodeFormatError(f"bad Pauli symbol {parts[2]!r}")
            paulis[i - 1, j - 1] = PAULI_CHARS.index(w)
    else:
        if len(matrix_lines) != m:
            raise CodeValidationError(f"header says M={m} rows, found {len(matrix_lines)}")
        for i, s in enumerate(matrix_lines):
            row = "".join(s.split()).upper()
            if len(row) != n:
                raise CodeValidationError(f"row {i + 1} has {len(row)} entries, expected N={n}")
            if set(row) - set(PAULI_CHARS):
                raise CodeFormatError(f"row {i + 1} has characters outside IXYZ: {s!r}")
            paulis[i] = [PAULI_CHARS.index(ch) for ch in row]
    if not paulis.any(axis=1).all():
        raise CodeValidationError("check matrix contains an all-identity row")

    checks = _validated(CheckMatrix(paulis))
    logicals = None
    if logical_lines:
        parts = logical_lines[0].split()
        if len(parts) != 2 or not parts[1].isdigit():
            raise CodeFormatError(f"expected 'LOGICALS K', got {logical_lines[0]!r}")
        k = int(parts[1])
        rows = ["".join(s.split()).upper() for s in logical_lines[1:]]
        if len(rows) != 2 * k:
            raise CodeValidationError(f"LOGICALS {k} needs {2 * k} rows, found {len(rows)}")
        try:
            ops = [PauliString(r) for r in rows]
        except ValueError as exc:
            raise CodeFormatError(str(exc)) from None
        if any(len(op) != n for op in ops):
            raise CodeValidationError("logical operator length differs from N")
        logicals = tuple((ops[2 * i], ops[2 * i + 1]) for i in range(k))
        _check_logicals(checks, logicals)
    return Code(checks, name=name, logicals=logicals)


def _check_logicals(checks: CheckMatrix, logicals) -> None:
    k = checks.n - checks.rank
    if len(logicals) != k:
        raise CodeValidationError(f"file lists {len(logicals)} logical pairs but K = {k}")
    ops = [op for pair in logicals for op in pair]
    if not ops:
        return
    sym = np.stack([op.symplectic() for op in ops])
    if _symplectic_form(sym, checks.symplectic, checks.n).any():
        raise CodeValidationError("a logical operator anticommutes with a check")
    gram = _symplectic_form(sym, sym, checks.n)
    expected = np.kron(np.eye(k, dtype=np.int64), np.array([[0, 1], [1, 0]]))
    if not np.array_equal(gram, expected):
        raise CodeValidationError("logical operators are not symplectic pairs")


def load_check_matrix(path: str | os.PathLike) -> Code:
    path = Path(path)
    return parse_check_matrix(path.read_text(), name=path.stem)


def format_check_matrix(code: Code, include_logicals: bool = True, sparse: bool = False) -> str:
    out = [f"# {code.name}: N={code.n} K={code.k}" + (f" D={code.d}" if code.d else ""), f"{code.m} {code.n}"]
    if sparse:
        out.append("SPARSE")
        rows, cols = np.nonzero(code.checks.paulis)
        out += [f"{i + 1} {j + 1} {PAULI_CHARS[code.checks.paulis[i, j]]}" for i, j in zip(rows, cols)]
    else:
        out += [str(r) for r in code.checks.rows]
    if include_logicals:
        pairs = code.logical_pairs
        out.append(f"LOGICALS {len(pairs)}")
        for xl, zl in pairs:
            out += [str(xl), str(zl)]
    return "\n".join(out) + "\n"


def save_check_matrix(code: Code, path: str | os.PathLike, **kwargs) -> None:
    Path(path).write_text(format_check_matrix(code, **kwargs))


def code_from_spec(spec: str) -> Code:
    """Resolve ``513``, ``surface:L``, ``toric:L``, ``bicycle:N,K,k[,seed]`` or a file path."""
    s = spec.strip()
    if s == "513":
        return gen_five_qubit()
    family, _, args = s.partition(":")
    family = family.lower()
    if family in {"surface", "toric", "bicycle"} and args:
        try:
            nums = [int(a) for a in args.split(",")]
        except ValueError:
            raise ValueError(f"bad code alias {spec!r}") from None
        if family == "surface" and len(nums) == 1:
            return gen_surface(nums[0])
        if family == "toric" and len(nums) == 1:
            return gen_toric(nums[0])
        if family == "bicycle" and len(nums) in (3, 4):
            return gen_bicycle(*nums)
        raise ValueError(f"bad code alias {spec!r}")
    return load_check_matrix(s)


def bdd_radius(d: int, r: float = 1.0) -> int:
    """Correction radius floor((r*D - 1)/2) of r x BDD."""
    return int(math.floor((r * d - 1) / 2))
