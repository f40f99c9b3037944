"""Matrix storage model, bit-exact file I/O, and bordering.

Matrices are kept as split real/imaginary planes of binary64 values in
column-major (Fortran) order, which keeps every column contiguous for the
column-oriented kernels.  Files hold the raw little-endian planes, real plane
first; a UTF-8 text sidecar carries the dimensions and the field.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import FileFormatError


def _fortran_f8(a, rows, cols):
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape((rows, cols), order="F")
    if arr.shape != (rows, cols):
        raise ValueError("plane shape %r does not match (%d, %d)" % (arr.shape, rows, cols))
    return np.asfortranarray(arr)


@dataclass
class MatrixPlanePair:
    """A real or complex matrix stored as separate column-major planes."""

    rows: int
    cols: int
    re: np.ndarray
    im: Optional[np.ndarray] = None
    is_complex: bool = False

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("matrix dimensions must be at least 1x1")
        self.re = _fortran_f8(self.re, self.rows, self.cols)
        if self.is_complex:
            if self.im is None:
                raise ValueError("complex matrix needs an imaginary plane")
            self.im = _fortran_f8(self.im, self.rows, self.cols)
        elif self.im is not None:
            raise ValueError("real matrix must not carry an imaginary plane")

    @classmethod
    def from_dense(cls, a):
        a = np.asarray(a)
        if np.iscomplexobj(a):
            return cls(a.shape[0], a.shape[1],
                       np.asfortranarray(a.real.astype(np.float64)),
                       np.asfortranarray(a.imag.astype(np.float64)), True)
        return cls(a.shape[0], a.shape[1],
                   np.asfortranarray(a.astype(np.float64)), None, False)

    def to_dense(self):
        if self.is_complex:
            return self.re + 1j * self.im
        return self.re.copy()

    def copy(self):
        return MatrixPlanePair(self.rows, self.cols, self.re.copy(order="F"),
                               self.im.copy(order="F") if self.is_complex else None,
                               self.is_complex)

    @property
    def field(self):
        return "complex" if self.is_complex else "real"


@dataclass
class ProblemPair:
    """A matrix pair (F, G) with the pre-bordering dimensions on record."""

    F: MatrixPlanePair
    G: MatrixPlanePair
    original_n: int = 0
    original_mF: int = 0
    original_mG: int = 0

    def __post_init__(self):
        if self.F.cols != self.G.cols:
            raise ValueError("F and G must have the same number of columns")
        if self.F.is_complex != self.G.is_complex:
            raise ValueError("F and G must live in the same field")
        if min(self.F.rows, self.G.rows) < self.F.cols:
            raise ValueError("need min(m_F, m_G) >= n")
        if self.original_n == 0:
            self.original_n = self.F.cols
        if self.original_mF == 0:
            self.original_mF = self.F.rows
        if self.original_mG == 0:
            self.original_mG = self.G.rows

    @property
    def n(self):
        return self.F.cols

    @property
    def is_complex(self):
        return self.F.is_complex


@dataclass
class GsvdResult:
    """Decomposition F Z = U Sigma_F, G Z = V Sigma_G with Sigma_F^2 + Sigma_G^2 = I."""

    U: MatrixPlanePair
    V: MatrixPlanePair
    Z: MatrixPlanePair
    sigmaF: np.ndarray
    sigmaG: np.ndarray
    sigma: np.ndarray
    sweeps: int
    total_transforms: int
    big_transforms: int
    converged: bool = True
    workers: int = 1


# ---------------------------------------------------------------------------
# file I/O
# ---------------------------------------------------------------------------

def _parse_sidecar(header):
    fields = {}
    try:
        with open(header, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                key, _, val = line.partition("=")
                fields[key.strip()] = val.strip()
        rows = int(fields["rows"])
        cols = int(fields["cols"])
        kind = fields["field"]
    except (OSError, KeyError, ValueError) as exc:
        raise FileFormatError("unreadable or malformed sidecar %s: %s" % (header, exc))
    if kind not in ("real", "complex"):
        raise FileFormatError("sidecar %s: field must be real or complex" % header)
    if rows < 1 or cols < 1:
        raise FileFormatError("sidecar %s: dimensions must be positive" % header)
    return rows, cols, kind


def read_matrix(path, header):
    """Read a raw little-endian binary64 matrix described by a text sidecar."""
    rows, cols, kind = _parse_sidecar(header)
    planes = 2 if kind == "complex" else 1
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise FileFormatError("unreadable matrix file %s: %s" % (path, exc))
    expected = rows * cols * 8 * planes
    if len(raw) != expected:
        raise FileFormatError(
            "size mismatch for %s: sidecar promises %d bytes, file has %d"
            % (path, expected, len(raw)))
    flat = np.frombuffer(raw, dtype="<f8")
    re = flat[: rows * cols].reshape((rows, cols), order="F")
    if kind == "complex":
        im = flat[rows * cols:].reshape((rows, cols), order="F")
        return MatrixPlanePair(rows, cols, re.copy(order="F"), im.copy(order="F"), True)
    return MatrixPlanePair(rows, cols, re.copy(order="F"), None, False)


def write_matrix(m, path):
    """Write the exact byte layout read_matrix expects; also emits the sidecar
    at ``path + '.hdr'``."""
    buf = m.re.flatten(order="F").astype("<f8").tobytes()
    if m.is_complex:
        buf += m.im.flatten(order="F").astype("<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(buf)
    with open(str(path) + ".hdr", "w", encoding="utf-8") as fh:
        fh.write("rows=%d\ncols=%d\nfield=%s\n" % (m.rows, m.cols, m.field))


# ---------------------------------------------------------------------------
# bordering
# ---------------------------------------------------------------------------

def _border_one(m, pad_cols, row_multiple):
    """Append pad_cols unit-diagonal columns (with matching rows), then pad
    rows with zeros up to the row multiple."""
    rows_mid = m.rows + pad_cols
    rows_new = -(-rows_mid // row_multiple) * row_multiple
    cols_new = m.cols + pad_cols
    re = np.zeros((rows_new, cols_new), order="F")
    re[: m.rows, : m.cols] = m.re
    for k in range(pad_cols):
        re[m.rows + k, m.cols + k] = 1.0
    if m.is_complex:
        im = np.zeros((rows_new, cols_new), order="F")
        im[: m.rows, : m.cols] = m.im
        return MatrixPlanePair(rows_new, cols_new, re, im, True)
    return MatrixPlanePair(rows_new, cols_new, re, None, False)


def border_pair(p, col_multiple, row_multiple):
    """Pad (F, G) to block-size multiples without changing the nontrivial part
    of the decomposition.

    Appended columns carry a single unit element on an extended diagonal, so
    they stay decoupled from the original columns and contribute generalized
    singular value 1 each; appended rows are zero.
    """
    n = p.n
    pad_cols = (-n) % col_multiple
    if pad_cols == 0 and p.F.rows % row_multiple == 0 and p.G.rows % row_multiple == 0:
        return ProblemPair(p.F.copy(), p.G.copy(), p.original_n,
                           p.original_mF, p.original_mG)
    F = _border_one(p.F, pad_cols, row_multiple)
    G = _border_one(p.G, pad_cols, row_multiple)
    return ProblemPair(F, G, p.original_n, p.original_mF, p.original_mG)
