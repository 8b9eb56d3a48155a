"""Test signals, noise injection and file formats.

Signal CSV files carry the header ``index,re,im`` with one row per sample.
Systems are exchanged as three Matrix Market files (``A``, ``c``, ``x0``),
coordinate or array layout, real or complex field.
"""

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ident import Realization, simulate_lti
from .noise import sample_noise

__all__ = [
    "NmrParameters",
    "nmr_signal",
    "random_modal_system",
    "add_noise",
    "save_signal_csv",
    "load_signal_csv",
    "read_matrix_market",
    "write_matrix_market",
    "load_system_matrix_market",
    "save_system_matrix_market",
    "SignalFormatError",
]

NMR_AMPLITUDES = (75, 150, 75, 150, 150, 150, 150, 150, 1400, 60, 500)
NMR_FREQUENCIES = (-86, -70, -54, 152, 168, 292, 308, 360, 440, 490, 530)
NMR_DAMPINGS = (50, 50, 50, 50, 50, 50, 50, 25, 285.7, 25, 200)


class SignalFormatError(ValueError):
    pass


@dataclass(frozen=True)
class NmrParameters:
    """Eleven-peak magnetic resonance benchmark (frequencies in Hz, dampings in 1/s)."""

    amplitudes: tuple = NMR_AMPLITUDES
    frequencies: tuple = NMR_FREQUENCIES
    dampings: tuple = NMR_DAMPINGS
    phase: float = 135 * math.pi / 180
    delta: float = 1e-3 / 3
    n: int = 256


def nmr_signal(p=None):
    """``y_j = sum_k a_k e^{i phase} e^{(2 pi i f_k - d_k) j delta}``."""
    p = NmrParameters() if p is None else p
    a = np.asarray(p.amplitudes, dtype=float)
    f = np.asarray(p.frequencies, dtype=float)
    d = np.asarray(p.dampings, dtype=float)
    if not a.shape == f.shape == d.shape:
        raise ValueError(
            f"parameter length mismatch: {a.size} amplitudes, {f.size} frequencies, "
            f"{d.size} dampings"
        )
    if p.n < 1:
        raise ValueError("n must be positive")
    t = np.arange(p.n)[:, None] * p.delta
    with np.errstate(under="ignore"):
        modes = np.exp((2j * np.pi * f - d) * t)
    return np.exp(1j * p.phase) * (modes @ a)


def random_modal_system(q, radius=0.95, seed=0):
    """Diagonal system with ``q`` distinct poles in the annulus ``[radius**2, radius]``.

    ``c`` and ``x0`` have unit-modulus entries with random phases.
    """
    if q < 1:
        raise ValueError("q must be positive")
    if not 0 < radius < 1:
        raise ValueError(f"radius must lie in (0, 1), got {radius}")
    rng = np.random.default_rng(seed)
    lo2, hi2 = radius**4, radius**2

    def draw(size):
        r = np.sqrt(rng.uniform(lo2, hi2, size))
        return r * np.exp(2j * np.pi * rng.uniform(size=size))

    poles = draw(q)
    while True:
        gaps = np.abs(poles[:, None] - poles[None, :])
        np.fill_diagonal(gaps, np.inf)
        close = np.any(gaps < 1e-6, axis=1)
        if not close.any():
            break
        # resample the later member of each close pair
        bad = np.flatnonzero(np.triu(gaps < 1e-6).any(axis=0))
        poles[bad] = draw(bad.size)
    c = np.exp(2j * np.pi * rng.uniform(size=q))
    x0 = np.exp(2j * np.pi * rng.uniform(size=q))
    return Realization(np.diag(poles), c, x0)


def add_noise(y, eps, model, gen):
    """``y + eps * g`` with ``g`` drawn from ``model`` at unit scale."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    y = np.asarray(y, dtype=complex).ravel()
    return y + eps * sample_noise(model, y.size, gen)


# ---------------------------------------------------------------------------
# CSV


def save_signal_csv(path, y):
    y = np.asarray(y, dtype=complex).ravel()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        write_signal_csv(fh, y)


def write_signal_csv(fh, y):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["index", "re", "im"])
    for i, v in enumerate(np.asarray(y, dtype=complex).ravel()):
        w.writerow([i, repr(float(v.real)), repr(float(v.imag))])


def load_signal_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return read_signal_csv(fh, name=str(path))


def read_signal_csv(fh, name="<signal>"):
    reader = csv.reader(fh)
    rows = [(reader.line_num, row) for row in reader]
    rows = [(ln, row) for ln, row in rows if row and any(cell.strip() for cell in row)]
    if not rows:
        raise SignalFormatError(f"{name}: empty file (missing header 'index,re,im')")
    ln, header = rows[0]
    if [h.strip().lower() for h in header] != ["index", "re", "im"]:
        raise SignalFormatError(f"{name}:{ln}: expected header 'index,re,im', got {header}")
    if len(rows) == 1:
        raise SignalFormatError(f"{name}: empty signal")
    values = {}
    for ln, row in rows[1:]:
        if len(row) != 3:
            raise SignalFormatError(f"{name}:{ln}: expected 3 columns, got {len(row)}")
        try:
            idx = int(row[0])
            re, im = float(row[1]), float(row[2])
        except ValueError:
            raise SignalFormatError(f"{name}:{ln}: non-numeric field in {row}") from None
        if not (math.isfinite(re) and math.isfinite(im)):
            raise SignalFormatError(f"{name}:{ln}: non-finite value")
        if idx in values:
            raise SignalFormatError(f"{name}:{ln}: duplicate index {idx}")
        if idx != len(values):
            raise SignalFormatError(
                f"{name}:{ln}: index {idx} out of order or missing (expected {len(values)})"
            )
        values[idx] = complex(re, im)
    return np.array([values[i] for i in range(len(values))], dtype=complex)


# ---------------------------------------------------------------------------
# Matrix Market


def _mm_error(name, ln, msg):
    return SignalFormatError(f"{name}:{ln}: {msg}")


def read_matrix_market(path):
    """Dense complex array from a Matrix Market file (coordinate or array)."""
    name = str(path)
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or not lines[0].lower().startswith("%%matrixmarket"):
        raise _mm_error(name, 1, "missing '%%MatrixMarket' banner")
    banner = lines[0].split()
    if len(banner) != 5 or banner[1].lower() != "matrix":
        raise _mm_error(name, 1, f"unsupported banner {lines[0]!r}")
    layout, fld, symmetry = (b.lower() for b in banner[2:])
    if layout not in ("coordinate", "array"):
        raise _mm_error(name, 1, f"unknown layout {layout!r}")
    if fld not in ("real", "complex", "integer", "double"):
        raise _mm_error(name, 1, f"unsupported field {fld!r}")
    if symmetry not in ("general", "symmetric", "hermitian", "skew-symmetric"):
        raise _mm_error(name, 1, f"unsupported symmetry {symmetry!r}")
    per_value = 2 if fld == "complex" else 1

    body = [(i + 1, ln.split()) for i, ln in enumerate(lines[1:], start=1)
            if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise _mm_error(name, len(lines), "missing size line")
    ln, size = body[0]
    try:
        dims = [int(t) for t in size]
    except ValueError:
        raise _mm_error(name, ln, f"bad size line {size}") from None
    entries = body[1:]

    def number(tokens, ln):
        try:
            vals = [float(t) for t in tokens]
        except ValueError:
            raise _mm_error(name, ln, f"non-numeric value {tokens}") from None
        return complex(vals[0], vals[1]) if per_value == 2 else complex(vals[0])

    if layout == "coordinate":
        if len(dims) != 3:
            raise _mm_error(name, ln, "coordinate size line needs 'rows cols nnz'")
        rows, cols, nnz = dims
        if len(entries) != nnz:
            raise _mm_error(name, ln, f"declared {nnz} entries, found {len(entries)}")
        M = np.zeros((rows, cols), dtype=complex)
        for ln, tok in entries:
            if len(tok) != 2 + per_value:
                raise _mm_error(name, ln, f"expected {2 + per_value} fields, got {len(tok)}")
            try:
                i, j = int(tok[0]) - 1, int(tok[1]) - 1
            except ValueError:
                raise _mm_error(name, ln, f"bad index in {tok}") from None
            if not (0 <= i < rows and 0 <= j < cols):
                raise _mm_error(name, ln, f"index ({i + 1}, {j + 1}) outside {rows}x{cols}")
            M[i, j] = number(tok[2:], ln)
            if i != j:
                if symmetry == "symmetric":
                    M[j, i] = M[i, j]
                elif symmetry == "hermitian":
                    M[j, i] = M[i, j].conjugate()
                elif symmetry == "skew-symmetric":
                    M[j, i] = -M[i, j]
    else:
        if len(dims) != 2:
            raise _mm_error(name, ln, "array size line needs 'rows cols'")
        rows, cols = dims
        if symmetry != "general":
            if rows != cols:
                raise _mm_error(name, ln, "symmetric array storage needs a square matrix")
            slots = [(i, j) for j in range(cols) for i in range(j, rows)]
            if symmetry == "skew-symmetric":
                slots = [(i, j) for i, j in slots if i != j]
        else:
            slots = [(i, j) for j in range(cols) for i in range(rows)]
        if len(entries) != len(slots):
            raise _mm_error(name, ln, f"expected {len(slots)} values, found {len(entries)}")
        M = np.zeros((rows, cols), dtype=complex)
        for (i, j), (ln, tok) in zip(slots, entries):
            if len(tok) != per_value:
                raise _mm_error(name, ln, f"expected {per_value} fields, got {len(tok)}")
            M[i, j] = number(tok, ln)
            if i != j:
                if symmetry == "symmetric":
                    M[j, i] = M[i, j]
                elif symmetry == "hermitian":
                    M[j, i] = M[i, j].conjugate()
                elif symmetry == "skew-symmetric":
                    M[j, i] = -M[i, j]
    return M


def write_matrix_market(path, M, layout="array"):
    """Write a dense matrix (or vector, as a column) at 17 significant digits."""
    M = np.asarray(M)
    if M.ndim == 1:
        M = M[:, None]
    is_complex = np.iscomplexobj(M) and np.any(M.imag != 0)
    fld = "complex" if is_complex else "real"

    def fmt(v):
        if is_complex:
            return f"{v.real:.17g} {v.imag:.17g}"
        return f"{complex(v).real:.17g}"

    out = io.StringIO()
    out.write(f"%%MatrixMarket matrix {layout} {fld} general\n")
    rows, cols = M.shape
    if layout == "array":
        out.write(f"{rows} {cols}\n")
        for j in range(cols):
            for i in range(rows):
                out.write(fmt(M[i, j]) + "\n")
    elif layout == "coordinate":
        nz = [(i, j) for j in range(cols) for i in range(rows) if M[i, j] != 0]
        out.write(f"{rows} {cols} {len(nz)}\n")
        for i, j in nz:
            out.write(f"{i + 1} {j + 1} {fmt(M[i, j])}\n")
    else:
        raise ValueError(f"unknown layout {layout!r}")
    Path(path).write_text(out.getvalue(), encoding="utf-8")


def _as_vector(M, what, path):
    if M.ndim == 2 and 1 in M.shape:
        return M.ravel()
    raise SignalFormatError(f"{path}: {what} must be a vector, got shape {M.shape}")


def load_system_matrix_market(path_A, path_c, path_x0):
    """Discrete-time system ``(A, c, x0)`` from three Matrix Market files."""
    A = read_matrix_market(path_A)
    if A.shape[0] != A.shape[1]:
        raise SignalFormatError(f"{path_A}: A must be square, got {A.shape}")
    c = _as_vector(read_matrix_market(path_c), "c", path_c)
    x0 = _as_vector(read_matrix_market(path_x0), "x0", path_x0)
    if not (c.size == x0.size == A.shape[0]):
        raise SignalFormatError(
            f"dimension mismatch: A is {A.shape[0]}x{A.shape[1]}, c has {c.size}, "
            f"x0 has {x0.size}"
        )
    return Realization(A, c, x0)


def save_system_matrix_market(r, path_A, path_c, path_x0, layout="array"):
    write_matrix_market(path_A, r.A, layout)
    write_matrix_market(path_c, r.c, layout)
    write_matrix_market(path_x0, r.x0, layout)
