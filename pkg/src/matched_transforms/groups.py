"""Finite permutation actions on signal index sets.

A GroupAction is a generating set of permutations of {0..M-1}; everything
downstream (invariant averaging, matched transforms, discovery) consumes
actions through the two primitives here: the partition of ordered index
pairs into orbits, and breadth-first closure enumeration.  Orbit averaging
is what keeps large groups tractable: projecting a covariance onto the
invariant algebra never enumerates group elements.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import InputError

MAX_DEGREE = 4096  # dense-matrix scale ceiling for the whole toolkit


def _pick_dtype(degree: int):
    if degree <= 256:
        return np.uint8
    if degree <= 65536:
        return np.uint16
    return np.int64


class Permutation:
    """A bijection of {0..n-1}, stored as the tuple of images."""

    __slots__ = ("_images", "_array")

    def __init__(self, images):
        imgs = tuple(int(i) for i in images)
        n = len(imgs)
        if n == 0:
            raise InputError("empty permutation")
        if sorted(imgs) != list(range(n)):
            raise InputError(f"images are not a bijection of 0..{n - 1}: {imgs}")
        self._images = imgs
        self._array = np.array(imgs, dtype=np.int64)
        self._array.flags.writeable = False

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(range(degree))

    @classmethod
    def _from_trusted(cls, array: np.ndarray) -> "Permutation":
        # internal fast path: array already known to be a bijection
        p = object.__new__(cls)
        p._images = tuple(int(i) for i in array)
        p._array = np.asarray(array, dtype=np.int64).copy()
        p._array.flags.writeable = False
        return p

    @property
    def images(self) -> tuple:
        return self._images

    @property
    def degree(self) -> int:
        return len(self._images)

    def as_array(self) -> np.ndarray:
        return self._array

    def __call__(self, i: int) -> int:
        return self._images[i]

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: (self * other)(i) = self(other(i))."""
        if other.degree != self.degree:
            raise InputError("composing permutations of different degrees")
        return Permutation._from_trusted(self._array[other._array])

    __mul__ = compose

    def inverse(self) -> "Permutation":
        inv = np.empty(self.degree, dtype=np.int64)
        inv[self._array] = np.arange(self.degree)
        return Permutation._from_trusted(inv)

    def is_identity(self) -> bool:
        return self._images == tuple(range(self.degree))

    def to_matrix(self) -> np.ndarray:
        """Permutation matrix P with P[images[j], j] = 1 (P e_j = e_{p(j)})."""
        m = np.zeros((self.degree, self.degree), dtype=np.complex128)
        m[self._array, np.arange(self.degree)] = 1.0
        return m

    def cycle_string(self) -> str:
        """Disjoint-cycle notation; fixed points omitted; identity is '()'."""
        seen = [False] * self.degree
        parts = []
        for start in range(self.degree):
            if seen[start] or self._images[start] == start:
                seen[start] = True
                continue
            cyc = [start]
            seen[start] = True
            j = self._images[start]
            while j != start:
                cyc.append(j)
                seen[j] = True
                j = self._images[j]
            parts.append("(" + " ".join(str(x) for x in cyc) + ")")
        return "".join(parts) if parts else "()"

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self._images == other._images

    def __hash__(self) -> int:
        return hash(self._images)

    def __repr__(self) -> str:
        return f"Permutation({self.cycle_string()}, degree={self.degree})"


def parse_permutation(text: str, degree: int | None = None) -> Permutation:
    """Parse '(0 1 2)(4 5)' cycle notation (degree required) or an image list."""
    text = text.strip()
    if "(" in text:
        if degree is None:
            raise InputError("cycle notation needs an explicit degree")
        images = list(range(degree))
        body = text.replace(")", ")\x00").split("\x00")
        for chunk in body:
            chunk = chunk.strip()
            if not chunk:
                continue
            if not (chunk.startswith("(") and chunk.endswith(")")):
                raise InputError(f"malformed cycle chunk: {chunk!r}")
            entries = chunk[1:-1].replace(",", " ").split()
            cyc = [int(e) for e in entries]
            if any(not 0 <= c < degree for c in cyc):
                raise InputError(f"cycle entry out of range 0..{degree - 1}: {chunk}")
            if len(set(cyc)) != len(cyc):
                raise InputError(f"repeated entry in cycle: {chunk}")
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                images[a] = b
        return Permutation(images)
    entries = text.replace(",", " ").split()
    if not entries:
        raise InputError("empty permutation text")
    images = [int(e) for e in entries]
    if degree is not None and len(images) != degree:
        raise InputError(f"expected {degree} images, got {len(images)}")
    return Permutation(images)


@dataclass(frozen=True)
class GroupAction:
    """A named generating set of permutations acting on {0..degree-1}."""

    name: str
    degree: int
    generators: tuple = field()

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise InputError("an action needs at least one generator")
        for g in gens:
            if g.degree != self.degree:
                raise InputError("generator degree does not match the action")
        object.__setattr__(self, "generators", gens)


@dataclass(frozen=True)
class PairOrbitPartition:
    """Orbits of the diagonal action on ordered index pairs.

    orbit_id[i, j] is the orbit label of (i, j); labels run 0..orbit_count-1
    in order of first appearance under a row-major scan.
    """

    degree: int
    orbit_id: np.ndarray
    orbit_count: int


@dataclass(frozen=True)
class ClosureResult:
    """Closure enumeration outcome; elements is None when the cap overflowed."""

    elements: list | None
    count: int
    overflowed: bool


# ---------------------------------------------------------------------------
# constructors

def _check_degree(degree: int):
    if degree < 1 or degree > MAX_DEGREE:
        raise InputError(f"degree {degree} outside 1..{MAX_DEGREE}")


def make_trivial(degree: int) -> GroupAction:
    """The trivial action: single identity generator."""
    _check_degree(degree)
    return GroupAction(f"trivial:{degree}", degree, (Permutation.identity(degree),))


def make_cyclic(m: int) -> GroupAction:
    """Z_m acting by index shift j -> j+1 (mod m)."""
    _check_degree(m)
    shift = Permutation([(j + 1) % m for j in range(m)])
    return GroupAction(f"cyclic:{m}", m, (shift,))


def make_dihedral(m: int, degree_m: bool = False) -> GroupAction:
    """Dihedral action: default on 2m points (shift + reflection j -> 2m-1-j,
    closure order 4m); with degree_m=True, on m points (closure order 2m)."""
    if degree_m:
        _check_degree(m)
        if m < 2:
            raise InputError("degree-m dihedral needs m >= 2")
        rot = Permutation([(j + 1) % m for j in range(m)])
        refl = Permutation([(m - 1 - j) % m for j in range(m)])
        return GroupAction(f"dihedralM:{m}", m, (rot, refl))
    n = 2 * m
    _check_degree(n)
    rot = Permutation([(j + 1) % n for j in range(n)])
    refl = Permutation([n - 1 - j for j in range(n)])
    return GroupAction(f"dihedral:{m}", n, (rot, refl))


def make_boolean(n: int) -> GroupAction:
    """(Z_2)^n acting on 2^n points by XOR; generator l is j -> j XOR 2^l."""
    if n < 1:
        raise InputError("boolean action needs n >= 1")
    m = 1 << n
    _check_degree(m)
    gens = tuple(
        Permutation([j ^ (1 << l) for j in range(m)]) for l in range(n)
    )
    return GroupAction(f"boolean:{n}", m, gens)


_NODE_KINDS = ("cyclic", "symmetric")


def _normalize_branching(branching) -> tuple:
    out = []
    for entry in branching:
        k, kind = entry
        k = int(k)
        if k < 2:
            raise InputError("every branching factor must be >= 2")
        kind = str(kind)
        if kind not in _NODE_KINDS:
            raise InputError(f"unknown node kind {kind!r} (want cyclic|symmetric)")
        out.append((k, kind))
    if not out:
        raise InputError("empty branching list")
    return tuple(out)


def _branching_name(branching) -> str:
    return "wreath:" + ",".join(f"{k}{kind[0]}" for k, kind in branching)


def make_wreath(branching) -> GroupAction:
    """Iterated wreath action on a rooted tree of uniform branching.

    branching is root-first: entry 0 = (child count, node kind) at the root
    (level 1), the last entry is the level adjacent to the leaves.  A cyclic
    node contributes one rotation of its child blocks; a symmetric node
    contributes the adjacent block transpositions.  Generators are emitted
    level by level from the root, nodes left to right.
    """
    branching = _normalize_branching(branching)
    degree = 1
    for k, _ in branching:
        degree *= k
    _check_degree(degree)
    gens = []
    span = degree  # leaf span of a node at the current level
    node_count = 1
    for k, kind in branching:
        width = span // k  # leaf span of each child block
        for node in range(node_count):
            a = node * span
            if kind == "cyclic":
                images = np.arange(degree)
                for c in range(k):
                    dest = a + ((c + 1) % k) * width
                    images[a + c * width : a + (c + 1) * width] = np.arange(dest, dest + width)
                gens.append(Permutation(images))
            else:
                for c in range(k - 1):
                    images = np.arange(degree)
                    lo, hi = a + c * width, a + (c + 1) * width
                    images[lo : lo + width] = np.arange(hi, hi + width)
                    images[hi : hi + width] = np.arange(lo, lo + width)
                    gens.append(Permutation(images))
        node_count *= k
        span = width
    return GroupAction(_branching_name(branching), degree, tuple(gens))


def make_dyadic_wreath(levels: int) -> GroupAction:
    """Binary-tree action on 2^levels leaves: one left/right subtree swap per
    internal node (root = level 1), 2^levels - 1 generators in all."""
    if levels < 1:
        raise InputError("need levels >= 1")
    base = make_wreath([(2, "cyclic")] * levels)
    return GroupAction(f"dyadic-wreath:{levels}", base.degree, base.generators)


def make_hybrid(w: int, k: int) -> GroupAction:
    """K blocks of W samples: cyclic shift inside block 0 only, the (0 1)
    block transposition, and the block K-cycle.  Closure is the full wreath
    of Z_W by S_K (order W^K * K!)."""
    if w < 2 or k < 2:
        raise InputError("hybrid needs W >= 2 and K >= 2")
    degree = w * k
    _check_degree(degree)
    shift0 = np.arange(degree)
    shift0[:w] = (np.arange(w) + 1) % w
    swap01 = np.arange(degree)
    swap01[:w] = np.arange(w, 2 * w)
    swap01[w : 2 * w] = np.arange(w)
    cycle = np.empty(degree, dtype=np.int64)
    for b in range(k):
        dest = ((b + 1) % k) * w
        cycle[b * w : (b + 1) * w] = np.arange(dest, dest + w)
    gens = (Permutation(shift0), Permutation(swap01), Permutation(cycle))
    return GroupAction(f"hybrid:{w},{k}", degree, gens)


def make_product(left: GroupAction, right: GroupAction) -> GroupAction:
    """Direct product acting on the index grid (i, j) -> i*n + j."""
    m, n = left.degree, right.degree
    degree = m * n
    _check_degree(degree)
    grid = np.arange(degree).reshape(m, n)
    gens = []
    for g in left.generators:
        gens.append(Permutation(grid[g.as_array(), :].ravel()))
    for h in right.generators:
        gens.append(Permutation(grid[:, h.as_array()].ravel()))
    return GroupAction(f"product:({left.name},{right.name})", degree, tuple(gens))


def from_generators(perms, name: str) -> GroupAction:
    """Wrap an explicit generating set as a named action."""
    perms = tuple(perms)
    if not perms:
        raise InputError("need at least one generator")
    return GroupAction(name, perms[0].degree, perms)


# ---------------------------------------------------------------------------
# orbit machinery

def pair_orbits(action: GroupAction) -> PairOrbitPartition:
    """Partition ordered index pairs into orbits of the diagonal action."""
    m = action.degree
    n = m * m
    srcs, dsts = [], []
    idx = np.arange(n, dtype=np.int64)
    for g in action.generators:
        img = g.as_array()
        dst = (img[:, None] * m + img[None, :]).ravel()
        moved = dst != idx
        srcs.append(idx[moved])
        dsts.append(dst[moved])
    if srcs and sum(s.size for s in srcs):
        src = np.concatenate(srcs)
        dst = np.concatenate(dsts)
        graph = coo_matrix(
            (np.ones(src.size, dtype=np.int8), (src, dst)), shape=(n, n)
        )
        _, labels = connected_components(graph, directed=True, connection="weak")
    else:
        labels = idx.copy()
    # canonical labels: order of first appearance in a row-major scan
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first, kind="stable")
    remap = np.empty(order.size, dtype=np.int64)
    remap[order] = np.arange(order.size)
    canon = remap[labels].reshape(m, m)
    return PairOrbitPartition(m, canon, int(order.size))


def reynolds_project(r: np.ndarray, action: GroupAction) -> np.ndarray:
    """Average a matrix over the group: replace each entry by its pair-orbit
    mean.  Equals the explicit average over all group elements, but never
    enumerates the group."""
    r = np.asarray(r, dtype=np.complex128)
    m = action.degree
    if r.shape != (m, m):
        raise InputError(f"matrix shape {r.shape} does not match degree {m}")
    if not np.all(np.isfinite(r)):
        raise InputError("matrix has non-finite entries")
    po = pair_orbits(action)
    ids = po.orbit_id.ravel()
    counts = np.bincount(ids, minlength=po.orbit_count)
    sums = np.bincount(ids, weights=r.real.ravel(), minlength=po.orbit_count)
    sums = sums + 1j * np.bincount(ids, weights=r.imag.ravel(), minlength=po.orbit_count)
    means = sums / counts
    return means[ids].reshape(m, m)


def _generator_residual(r: np.ndarray, g: Permutation, r_norm: float) -> float:
    # ||P R - R P||_F / (||P||_F ||R||_F) without forming P
    p = g.as_array()
    pinv = g.inverse().as_array()
    comm = r[pinv, :] - r[:, p]
    return float(np.linalg.norm(comm) / (np.sqrt(g.degree) * r_norm))


def is_invariant(r: np.ndarray, action: GroupAction, tol: float = 1e-12) -> bool:
    """True iff every generator's normalized commutation residual is <= tol."""
    r = np.asarray(r, dtype=np.complex128)
    if r.shape != (action.degree, action.degree):
        raise InputError("matrix shape does not match the action degree")
    r_norm = float(np.linalg.norm(r))
    if r_norm == 0.0:
        return True
    return all(_generator_residual(r, g, r_norm) <= tol for g in action.generators)


def closure_enumerate(action: GroupAction, cap: int = 10**6) -> ClosureResult:
    """Breadth-first closure of the generators.

    Returns every group element (identity first, then BFS order) when the
    group has at most `cap` elements; otherwise stops at the first count
    exceeding the cap and reports overflow.
    """
    if cap < 1:
        raise InputError("cap must be >= 1")
    m = action.degree
    dtype = _pick_dtype(m)
    gens = [g.as_array().astype(dtype) for g in action.generators]
    ident = np.arange(m, dtype=dtype)
    seen = {ident.tobytes()}
    batches = [ident[None, :]]
    frontier = ident[None, :]
    count = 1
    if count > cap:
        return ClosureResult(None, count, True)
    while frontier.size:
        fresh = []
        for g in gens:
            products = frontier[:, g]
            for row in products:
                key = row.tobytes()
                if key not in seen:
                    seen.add(key)
                    count += 1
                    if count > cap:
                        return ClosureResult(None, count, True)
                    fresh.append(row)
        if not fresh:
            break
        frontier = np.stack(fresh)
        batches.append(frontier)
    rows = np.concatenate(batches, axis=0)
    elements = [Permutation._from_trusted(row) for row in rows]
    return ClosureResult(elements, count, False)


# ---------------------------------------------------------------------------
# group spec mini-language

def _split_top_level(text: str) -> list:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise InputError(f"unbalanced parentheses in {text!r}")
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise InputError(f"unbalanced parentheses in {text!r}")
    parts.append("".join(cur))
    return parts


def parse_group_spec(spec: str) -> GroupAction:
    """Build an action from a compact spec string.

    Forms: trivial:M, cyclic:M, dihedral:M (acts on 2M points),
    dihedralM:M, boolean:n, dyadic-wreath:L, wreath:K1c,K2s,...,
    hybrid:W,K, product:(spec,spec), perms:<path> (one image list per line).
    """
    spec = spec.strip()
    head, sep, rest = spec.partition(":")
    head = head.strip()
    rest = rest.strip()
    if not sep or not rest:
        raise InputError(f"malformed group spec {spec!r}")
    try:
        if head == "trivial":
            return make_trivial(int(rest))
        if head == "cyclic":
            return make_cyclic(int(rest))
        if head == "dihedral":
            return make_dihedral(int(rest))
        if head == "dihedralM":
            return make_dihedral(int(rest), degree_m=True)
        if head == "boolean":
            return make_boolean(int(rest))
        if head == "dyadic-wreath":
            return make_dyadic_wreath(int(rest))
        if head == "wreath":
            branching = []
            for item in rest.split(","):
                item = item.strip()
                if len(item) < 2 or item[-1] not in ("c", "s"):
                    raise InputError(f"bad wreath level {item!r} (want e.g. 2c or 3s)")
                branching.append(
                    (int(item[:-1]), "cyclic" if item[-1] == "c" else "symmetric")
                )
            return make_wreath(branching)
        if head == "hybrid":
            w_text, k_text = (x.strip() for x in rest.split(","))
            return make_hybrid(int(w_text), int(k_text))
        if head == "product":
            if not (rest.startswith("(") and rest.endswith(")")):
                raise InputError(f"product spec needs parentheses: {spec!r}")
            inner = _split_top_level(rest[1:-1])
            if len(inner) != 2:
                raise InputError(f"product takes exactly two factor specs: {spec!r}")
            return make_product(parse_group_spec(inner[0]), parse_group_spec(inner[1]))
        if head == "perms":
            path = rest
            if not os.path.exists(path):
                raise InputError(f"permutation file not found: {path}")
            with open(path, "r", encoding="utf-8") as fh:
                lines = [ln.strip() for ln in fh if ln.strip()]
            if not lines:
                raise InputError(f"no permutations in {path}")
            perms = [parse_permutation(ln) for ln in lines]
            return from_generators(perms, f"perms:{path}")
    except (ValueError, TypeError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed group spec {spec!r}: {exc}") from exc
    raise InputError(f"unknown group spec head {head!r}")
