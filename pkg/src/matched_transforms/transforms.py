"""Orthogonal/unitary transform kernels tied to index symmetries.

Each builder returns the dense matrix matched to one family of invariant
covariances: DFT for cyclic shifts, Walsh-Hadamard for XOR translations,
DCT-II for the reflection-extended cyclic family, Haar for binary-tree
block swaps, and a recursive construction for general wreath branchings.
Integer counterparts (Reed-Muller triangle, fixed-polarity variants, the
arithmetic-transform inverse pair) live here too, plus the generic
eigenbasis synthesizer that works from samples of any multiplicity-free
action.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegeneracyMismatchError,
    DegenerateSampleError,
    DimensionError,
    InputError,
    NotMultiplicityFreeError,
    NumericError,
    StructuralMismatchError,
    UnsupportedGroupError,
)
from .groups import GroupAction, _branching_name, _normalize_branching
from .numkernel import as_cmatrix, herm_eig, random_psd
from .rng import _splitmix64

UNITARITY_TOL = 1e-10
MAX_SIZE = 4096


@dataclass(frozen=True)
class UnitaryTransform:
    """A unitary matrix whose columns are labeled analysis directions."""

    matrix: np.ndarray
    group_name: str
    column_labels: tuple

    def __post_init__(self):
        mat = as_cmatrix(self.matrix, square=True)
        gram_err = float(np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0]))))
        if gram_err > UNITARITY_TOL:
            raise NumericError(f"columns are not orthonormal: error {gram_err:.3e}")
        labels = tuple(str(l) for l in self.column_labels)
        if len(labels) != mat.shape[0]:
            raise DimensionError("need exactly one label per column")
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "column_labels", labels)

    @property
    def degree(self) -> int:
        return self.matrix.shape[0]


def _bareiss_det(matrix: np.ndarray) -> int:
    """Exact integer determinant by fraction-free elimination."""
    a = np.array([[int(x) for x in row] for row in matrix], dtype=object)
    n = a.shape[0]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k, k] == 0:
            nz = np.nonzero(a[k + 1 :, k])[0]
            if nz.size == 0:
                return 0
            r = k + 1 + int(nz[0])
            a[[k, r]] = a[[r, k]]
            sign = -sign
        pivot = a[k, k]
        for i in range(k + 1, n):
            a[i, k + 1 :] = (a[i, k + 1 :] * pivot - a[i, k] * a[k, k + 1 :]) // prev
            a[i, k] = 0
        prev = pivot
    return sign * int(a[n - 1, n - 1])


@dataclass(frozen=True)
class IntTransform:
    """An integer transform matrix, unimodular over the integers.

    modulus is None for transforms over Z and 2 for GF(2) self-inverse
    kernels.  The |det| = 1 invariant is verified at construction up to
    size 64; call det_exact() for larger explicit checks.
    """

    matrix: np.ndarray
    modulus: int | None
    name: str

    def __post_init__(self):
        mat = np.asarray(self.matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
            raise DimensionError(f"expected a square matrix, got shape {mat.shape}")
        if not np.issubdtype(mat.dtype, np.integer):
            raise InputError("entries must be integers")
        if self.modulus not in (None, 2):
            raise InputError("modulus must be None or 2")
        if self.modulus == 2 and not np.all((mat == 0) | (mat == 1)):
            raise InputError("mod-2 transforms must have 0/1 entries")
        mat = mat.astype(np.int64).copy()
        if mat.shape[0] <= 64 and abs(_bareiss_det(mat)) != 1:
            raise NumericError("transform matrix is not unimodular")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    @property
    def degree(self) -> int:
        return self.matrix.shape[0]

    def det_exact(self) -> int:
        """Exact determinant over the integers."""
        return _bareiss_det(self.matrix)


def _check_size(m: int, lo: int = 1):
    if m < lo or m > MAX_SIZE:
        raise DimensionError(f"size {m} outside {lo}..{MAX_SIZE}")


# ---------------------------------------------------------------------------
# closed-form kernels

def dft_matrix(m: int) -> UnitaryTransform:
    """Discrete Fourier kernel (U)_{jk} = exp(2 pi i j k / m) / sqrt(m)."""
    _check_size(m)
    j = np.arange(m)
    mat = np.exp(2j * np.pi * np.outer(j, j) / m) / np.sqrt(m)
    return UnitaryTransform(mat, f"cyclic:{m}", tuple(f"freq={k}" for k in range(m)))


def hartley_matrix(m: int) -> UnitaryTransform:
    """Real cas kernel (cos + sin)(2 pi j k / m) / sqrt(m)."""
    _check_size(m)
    j = np.arange(m)
    angles = 2.0 * np.pi * np.outer(j, j) / m
    mat = (np.cos(angles) + np.sin(angles)) / np.sqrt(m)
    return UnitaryTransform(mat, f"cyclic:{m}", tuple(f"cas={k}" for k in range(m)))


def dct2_matrix(m: int) -> UnitaryTransform:
    """Orthonormal DCT-II: sqrt(2/m) w_k cos(pi (2j+1) k / (2m)), w_0 = 1/sqrt(2)."""
    _check_size(m)
    j = np.arange(m)[:, None]
    k = np.arange(m)[None, :]
    mat = np.sqrt(2.0 / m) * np.cos(np.pi * (2 * j + 1) * k / (2 * m))
    mat[:, 0] /= np.sqrt(2.0)
    return UnitaryTransform(mat, f"dihedral:{m}", tuple(f"k={t}" for t in range(m)))


def _xor_parity_signs(n: int) -> np.ndarray:
    """(-1)^{<j,k>} over n-bit indices."""
    m = 1 << n
    j = np.arange(m)
    masks = np.bitwise_and.outer(j, j)
    parity = np.zeros_like(masks)
    for b in range(n):
        parity ^= (masks >> b) & 1
    return 1.0 - 2.0 * parity


def wht_matrix(n: int) -> UnitaryTransform:
    """Walsh-Hadamard kernel (Hadamard order): (-1)^{<j,k>} / 2^{n/2}."""
    if n < 1:
        raise DimensionError("need n >= 1")
    _check_size(1 << n)
    mat = _xor_parity_signs(n) / 2.0 ** (n / 2.0)
    return UnitaryTransform(
        mat, f"boolean:{n}", tuple(f"mask={k}" for k in range(1 << n))
    )


def haar_matrix(levels: int) -> UnitaryTransform:
    """Orthonormal Haar wavelet matrix on 2^levels points.

    Column 0 is the scaling vector 2^{-L/2}; the wavelet at scale s
    (1 = coarsest) and position p has support [a, a + 2h) with
    a = p * 2^{L-s+1}, h = 2^{L-s}, value +2^{(s-L-1)/2} on the first half
    and the negative on the second.  Columns are ordered scale-major, then
    position.
    """
    if levels < 1:
        raise DimensionError("need levels >= 1")
    m = 1 << levels
    _check_size(m)
    mat = np.zeros((m, m))
    mat[:, 0] = 2.0 ** (-levels / 2.0)
    labels = ["scaling"]
    col = 1
    for s in range(1, levels + 1):
        h = 1 << (levels - s)
        amp = 2.0 ** ((s - levels - 1) / 2.0)
        for p in range(1 << (s - 1)):
            a = p * 2 * h
            mat[a : a + h, col] = amp
            mat[a + h : a + 2 * h, col] = -amp
            labels.append(f"scale={s},pos={p}")
            col += 1
    return UnitaryTransform(mat, f"dyadic-wreath:{levels}", tuple(labels))


# ---------------------------------------------------------------------------
# integer transforms

_RM_LOWER = np.array([[1, 0], [1, 1]], dtype=np.int64)
_RM_UPPER = np.array([[1, 1], [0, 1]], dtype=np.int64)
_ARITH = np.array([[1, 0], [-1, 1]], dtype=np.int64)


def _int_tensor_power(block: np.ndarray, n: int) -> np.ndarray:
    out = np.array([[1]], dtype=np.int64)
    for _ in range(n):
        out = np.kron(out, block)
    return out


def _check_bits(n: int):
    if n < 1 or (1 << n) > MAX_SIZE:
        raise DimensionError(f"variable count {n} outside 1..{MAX_SIZE.bit_length() - 1}")


def rm_matrix(n: int) -> IntTransform:
    """Reed-Muller triangle R_n = R_1^{tensor n}: entry (S, T) = [T subset S].
    Self-inverse mod 2."""
    _check_bits(n)
    return IntTransform(_int_tensor_power(_RM_LOWER, n), 2, f"reed-muller:{n}")


def fp_rm_matrix(polarity) -> IntTransform:
    """Fixed-polarity Reed-Muller matrix: variable l (bit n-1-l of the index)
    uses the lower-triangular factor when polarity[l] = 0 and the
    upper-triangular one when polarity[l] = 1.  Self-inverse mod 2."""
    bits = tuple(int(b) for b in polarity)
    if not bits or any(b not in (0, 1) for b in bits):
        raise InputError("polarity must be a nonempty 0/1 sequence")
    _check_bits(len(bits))
    out = np.array([[1]], dtype=np.int64)
    for b in bits:
        out = np.kron(out, _RM_UPPER if b else _RM_LOWER)
    name = "fixed-polarity-rm:" + "".join(str(b) for b in bits)
    return IntTransform(out, 2, name)


def arithmetic_matrix(n: int) -> IntTransform:
    """Arithmetic-transform kernel A_n = A_1^{tensor n}; A_n R_n = I over Z."""
    _check_bits(n)
    return IntTransform(_int_tensor_power(_ARITH, n), None, f"arithmetic:{n}")


def anf_coefficients(truth_table, polarity=None) -> np.ndarray:
    """Mod-2 coefficient vector of a Boolean function's polynomial form.

    Equals fp_rm_matrix(polarity).matrix @ truth_table mod 2, evaluated by
    the per-variable two-point recurrence so large n stays feasible.
    polarity defaults to all zeros (positive-polarity form).
    """
    f = np.asarray(truth_table)
    if f.ndim != 1 or f.size < 2 or (f.size & (f.size - 1)):
        raise InputError("truth table length must be a power of two, >= 2")
    n = f.size.bit_length() - 1
    bits = (0,) * n if polarity is None else tuple(int(b) for b in polarity)
    if len(bits) != n or any(b not in (0, 1) for b in bits):
        raise InputError(f"polarity must be {n} bits of 0/1")
    t = (f.astype(np.int64) % 2).reshape((2,) * n)
    for axis, b in enumerate(bits):
        lo = np.take(t, 0, axis=axis)
        hi = np.take(t, 1, axis=axis)
        mixed = (lo + hi) % 2
        if b == 0:
            t = np.stack([lo, mixed], axis=axis)
        else:
            t = np.stack([mixed, hi], axis=axis)
    return t.reshape(-1)


def best_polarity(truth_table) -> tuple:
    """Exhaustive fixed-polarity search minimizing coefficient weight.

    Returns (polarity bits, coefficients, weight); ties go to the smallest
    polarity read as an integer (bits left to right = binary expansion).
    """
    f = np.asarray(truth_table)
    if f.ndim != 1 or f.size < 2 or (f.size & (f.size - 1)):
        raise InputError("truth table length must be a power of two, >= 2")
    n = f.size.bit_length() - 1
    best = None
    for v in range(1 << n):
        bits = tuple((v >> (n - 1 - l)) & 1 for l in range(n))
        coeffs = anf_coefficients(f, bits)
        weight = int(coeffs.sum())
        if best is None or weight < best[2]:
            best = (bits, coeffs, weight)
    return best


# ---------------------------------------------------------------------------
# composition and structured constructions

def compose_direct(u: UnitaryTransform, v: UnitaryTransform) -> UnitaryTransform:
    """Kronecker product transform for the direct-product action on a grid."""
    mat = np.kron(u.matrix, v.matrix)
    labels = tuple(
        f"{a}*{b}" for a in u.column_labels for b in v.column_labels
    )
    return UnitaryTransform(mat, f"product:({u.group_name},{v.group_name})", labels)


def even_extension_isometry(m: int) -> np.ndarray:
    """2m x m isometry S with columns (e_j + e_{2m-1-j}) / sqrt(2)."""
    _check_size(m)
    s = np.zeros((2 * m, m), dtype=np.complex128)
    j = np.arange(m)
    s[j, j] = 1.0 / np.sqrt(2.0)
    s[2 * m - 1 - j, j] = 1.0 / np.sqrt(2.0)
    return s


def semidirect_dct_cascade(m: int) -> UnitaryTransform:
    """Two-stage real basis on 2m points: DFT over the 2m-cycle, then the
    2x2 Hadamard inside each conjugate-frequency pair, giving cosine/sine
    columns (sine columns are phase-normalized to be real).  Restricting the
    cosine block to the even-extension subspace reproduces the DCT-II
    columns up to per-column sign.  Column order: dc, cos/sin per frequency,
    then the alternating Nyquist column.
    """
    _check_size(m, lo=2)
    n = 2 * m
    j = np.arange(n)
    cols = [np.full(n, 1.0 / np.sqrt(n))]
    labels = ["dc"]
    for k in range(1, m):
        angles = 2.0 * np.pi * j * k / n
        cols.append(np.sqrt(2.0 / n) * np.cos(angles))
        cols.append(np.sqrt(2.0 / n) * np.sin(angles))
        labels.extend([f"cos={k}", f"sin={k}"])
    cols.append(np.where(j % 2 == 0, 1.0, -1.0) / np.sqrt(n))
    labels.append("nyquist")
    return UnitaryTransform(np.column_stack(cols), f"dihedral:{m}", tuple(labels))


def wreath_matrix(branching) -> UnitaryTransform:
    """Matched basis for a root-first wreath branching (same list layout as
    make_wreath).

    Built by recursion on the tree: the inner transform is applied in every
    child block, and the node's base transform (DFT for cyclic nodes, the
    Helmert difference basis for symmetric nodes) mixes the K block-constant
    directions.  Columns come out scale-major: scale 0 is the global
    constant, scale 1 the root's non-trivial block mixes, scale s+1 the
    per-block copies of inner scale-s columns, blocks left to right.
    """
    branching = _normalize_branching(branching)
    degree = 1
    for k, _ in branching:
        degree *= k
    _check_size(degree)
    mat, scales = _wreath_recurse(branching)
    counters: dict = {}
    labels = []
    for s in scales:
        idx = counters.get(s, 0)
        counters[s] = idx + 1
        labels.append(f"scale={s},pos={idx}")
    return UnitaryTransform(mat, _branching_name(branching), tuple(labels))


def _node_base(k: int, kind: str) -> np.ndarray:
    if kind == "cyclic":
        j = np.arange(k)
        return np.exp(2j * np.pi * np.outer(j, j) / k) / np.sqrt(k)
    base = np.zeros((k, k), dtype=np.complex128)
    base[:, 0] = 1.0 / np.sqrt(k)
    for col in range(1, k):
        base[:col, col] = 1.0
        base[col, col] = -col
        base[:, col] /= np.sqrt(col * (col + 1))
    return base


def _wreath_recurse(branching) -> tuple:
    k, kind = branching[0]
    base = _node_base(k, kind)
    if len(branching) == 1:
        return base.copy(), [0] + [1] * (k - 1)
    inner, inner_scales = _wreath_recurse(branching[1:])
    w = inner.shape[0]
    m = k * w
    out = np.zeros((m, m), dtype=np.complex128)
    scales = []
    col = 0
    # block-constant subspace: the node base rides on the inner DC column
    for t in range(k):
        out[:, col] = np.kron(base[:, t], inner[:, 0])
        scales.append(0 if t == 0 else 1)
        col += 1
    # deeper scales: per-block copies of the inner non-constant columns
    max_scale = max(inner_scales)
    for s in range(1, max_scale + 1):
        members = [i for i, sc in enumerate(inner_scales) if sc == s]
        for b in range(k):
            for i in members:
                out[b * w : (b + 1) * w, col] = inner[:, i]
                scales.append(s + 1)
                col += 1
    return out, scales


# ---------------------------------------------------------------------------
# sampled synthesis and the central-projection route

@dataclass(frozen=True)
class SynthesizedBasis:
    """A matched basis recovered from seeded invariant samples.

    degeneracy_pattern lists eigenvalue-cluster sizes sorted ascending;
    data_dependent marks the trivial-action fallback (plain KLT of the
    sample, no seed-independence guarantee).
    """

    transform: UnitaryTransform
    degeneracy_pattern: tuple
    data_dependent: bool


def _derived_seed(seed: int, index: int) -> int:
    # deterministic sub-seed: the (index+1)-th splitmix64 output of seed
    return int(_splitmix64(seed, index + 1)[-1])


def synthesize_matched(action: GroupAction, seed: int) -> SynthesizedBasis:
    """Eigenbasis of a seeded invariant covariance sample, certified
    data-independent against a second seed.

    For a multiplicity-free action the eigenvector clusters of any generic
    invariant sample span the same fixed subspaces, so a second sample must
    reproduce them (subspace match >= 1 - 1e-8); accidental eigenvalue
    merges trigger a resample, at most 5 attempts.  The trivial action is
    special-cased: there is no fixed basis, so the sample's own KLT is
    returned flagged data_dependent.
    """
    from . import diagnostics  # deferred: diagnostics imports this module

    if all(g.is_identity() for g in action.generators):
        eig = herm_eig(random_psd(action.degree, seed))
        transform = UnitaryTransform(
            eig.vectors, action.name,
            tuple(f"klt={k}" for k in range(action.degree)),
        )
        return SynthesizedBasis(transform, (1,) * action.degree, True)

    probe_pair = (_derived_seed(seed, 100), _derived_seed(seed, 101))
    if not diagnostics.multiplicity_free_probe(action, probe_pair):
        raise NotMultiplicityFreeError(
            f"action {action.name} has a non-commutative commutant"
        )

    for attempt in range(5):
        s1 = _derived_seed(seed, 2 * attempt)
        s2 = _derived_seed(seed, 2 * attempt + 1)
        r1 = diagnostics.sample_invariant_cov(action, s1)
        r2 = diagnostics.sample_invariant_cov(action, s2)
        eig = herm_eig(r1)
        clusters = diagnostics.eigen_clusters(eig.values, rel_tol=1e-6)
        labels = []
        for c_idx, (_, cols) in enumerate(clusters.clusters):
            labels.extend(f"cluster={c_idx},col={i}" for i in range(len(cols)))
        transform = UnitaryTransform(eig.vectors, action.name, tuple(labels))
        try:
            report = diagnostics.subspace_match(r2, transform, rel_tol=1e-6)
        except (StructuralMismatchError, DegeneracyMismatchError):
            continue
        if report.min_match >= 1.0 - 1e-8:
            pattern = tuple(sorted(len(cols) for _, cols in clusters.clusters))
            return SynthesizedBasis(transform, pattern, False)
    raise DegenerateSampleError(
        f"could not certify a stable cluster structure for {action.name} after 5 samples"
    )


def central_projection_basis(action: GroupAction, characters=None) -> UnitaryTransform:
    """Character-projected basis for the built-in regular abelian actions.

    Column k is the normalized projection of e_0 by character k:
    (1/sqrt(|G|)) sum_g conj(chi_k(g)) e_{g.0}.  Built-in tables cover
    cyclic:M (chi_k(g) = exp(2 pi i g k / M), giving the conjugate of the
    DFT columns) and boolean:n (parity characters, giving Walsh-Hadamard
    exactly).  An explicit `characters` table (|G| x |G|, chi[k, g]) may
    override the built-in one for these actions.
    """
    head, _, tail = action.name.partition(":")
    m = action.degree
    if head == "cyclic":
        g = np.arange(m)
        table = np.exp(2j * np.pi * np.outer(g, g) / m)
    elif head == "boolean":
        table = _xor_parity_signs(int(tail)).astype(np.complex128)
    else:
        raise UnsupportedGroupError(
            f"central projection covers cyclic/boolean catalog actions, not {action.name}"
        )
    if characters is not None:
        table = as_cmatrix(characters, square=True)
        if table.shape[0] != m:
            raise DimensionError("character table must be |G| x |G|")
    # rows are indexed by g.0 = g for these regular actions, so the column
    # for character k is conj(chi_k(.)) placed at positions g
    mat = table.conj().T / np.sqrt(m)
    return UnitaryTransform(
        mat, action.name, tuple(f"char={k}" for k in range(m))
    )
