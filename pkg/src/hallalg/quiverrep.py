"""Brute-force representation theory of quivers over prime fields.

Enumerates and classifies representations (including nilpotent
representations of cyclic quivers and of the one-loop Jordan backend),
counts submodules, automorphisms, and Hom spaces. All counts are exact
integers; numpy is used only to batch mod-p linear algebra in the big
enumerations.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .exactnum import BudgetError, ConsistencyError, gauss_binomial, is_prime
from .partitions import Partition, as_partition, dominance_key

Mat = Tuple[Tuple[int, ...], ...]

DEFAULT_BUDGET = 2 ** 24


# ---------------------------------------------------------------------------
# quivers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Quiver:
    """Finite quiver. Loops are forbidden in the arrow list; the Jordan
    backend (nilpotent k[t]-modules) is the `jordan` flag on a one-vertex
    quiver and behaves as an implicit loop."""

    vertices: Tuple[str, ...]
    arrows: Tuple[Tuple[str, str], ...] = ()
    nilpotent: bool = False
    jordan: bool = False

    def __post_init__(self):
        if not self.vertices:
            raise ValueError("quiver needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex names")
        for s, t in self.arrows:
            if s not in self.vertices or t not in self.vertices:
                raise ValueError(f"arrow ({s},{t}) references unknown vertex")
            if s == t:
                raise ValueError("loops are not allowed; use the jordan flag")
        if self.jordan:
            if len(self.vertices) != 1 or self.arrows:
                raise ValueError("jordan backend is a single vertex with no arrows")
            if not self.nilpotent:
                object.__setattr__(self, "nilpotent", True)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def vertex_index(self, v: str) -> int:
        try:
            return self.vertices.index(v)
        except ValueError:
            raise ValueError(f"unknown vertex {v!r}")

    def effective_arrows(self) -> Tuple[Tuple[int, int], ...]:
        """Arrow list as vertex-index pairs; the jordan flag adds the loop."""
        out = tuple(
            (self.vertices.index(s), self.vertices.index(t)) for s, t in self.arrows
        )
        if self.jordan:
            out = out + ((0, 0),)
        return out

    def is_single_cycle(self) -> bool:
        """True for the cyclic quiver: arrows form one directed cycle through
        every vertex, one arrow out of and into each vertex."""
        if self.jordan or self.n < 2 or len(self.arrows) != self.n:
            return False
        outgoing = {}
        for s, t in self.arrows:
            if s in outgoing:
                return False
            outgoing[s] = t
        if set(outgoing) != set(self.vertices):
            return False
        seen = []
        v = self.vertices[0]
        for _ in range(self.n):
            seen.append(v)
            v = outgoing[v]
        return v == self.vertices[0] and len(set(seen)) == self.n

    # -- constructors for the standard desks

    @classmethod
    def a2(cls) -> "Quiver":
        return cls(("1", "2"), (("1", "2"),))

    @classmethod
    def kronecker(cls) -> "Quiver":
        return cls(("1", "2"), (("1", "2"), ("1", "2")))

    @classmethod
    def cyclic(cls, n: int) -> "Quiver":
        if n < 2:
            raise ValueError("cyclic quiver needs n >= 2 (n = 1 is the jordan flag)")
        vs = tuple(str(i) for i in range(n))
        arrows = tuple((str(i), str((i + 1) % n)) for i in range(n))
        return cls(vs, arrows, nilpotent=True)

    @classmethod
    def jordan_quiver(cls) -> "Quiver":
        return cls(("1",), (), nilpotent=True, jordan=True)

    # -- serialization

    def to_json(self) -> dict:
        data = {
            "vertices": list(self.vertices),
            "arrows": [{"source": s, "target": t} for s, t in self.arrows],
            "nilpotent": self.nilpotent,
        }
        if self.jordan:
            data["jordan"] = True
        return data

    @classmethod
    def from_json(cls, data: dict) -> "Quiver":
        try:
            return cls(
                tuple(str(v) for v in data["vertices"]),
                tuple(
                    (str(a["source"]), str(a["target"]))
                    for a in data.get("arrows", ())
                ),
                bool(data.get("nilpotent", False)),
                bool(data.get("jordan", False)),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(
                'quiver JSON needs {"vertices": [...], "arrows": '
                '[{"source": ..., "target": ...}, ...]}'
            ) from exc

    @classmethod
    def load(cls, path: str) -> "Quiver":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def quiver_has_cycle(Q: Quiver) -> bool:
    """True when some directed cycle exists (the jordan loop counts)."""
    if Q.jordan:
        return True
    adj: Dict[int, List[int]] = {v: [] for v in range(Q.n)}
    for s, t in Q.effective_arrows():
        adj[s].append(t)
    state = [0] * Q.n  # 0 new, 1 on stack, 2 done
    for root in range(Q.n):
        if state[root]:
            continue
        stack = [(root, iter(adj[root]))]
        state[root] = 1
        while stack:
            v, it = stack[-1]
            advanced = False
            for w in it:
                if state[w] == 1:
                    return True
                if state[w] == 0:
                    state[w] = 1
                    stack.append((w, iter(adj[w])))
                    advanced = True
                    break
            if not advanced:
                state[v] = 2
                stack.pop()
    return False


def euler_form_add(Q: Quiver, alpha: Sequence[int], beta: Sequence[int]) -> int:
    """Additive Euler form <alpha, beta> = sum a_i b_i - sum over arrows
    a_{s(h)} b_{t(h)}; the jordan flag's implicit loop is included, which
    makes the form identically zero on that backend."""
    alpha, beta = tuple(alpha), tuple(beta)
    if len(alpha) != Q.n or len(beta) != Q.n:
        raise ValueError("dimension vectors must be indexed by the quiver vertices")
    total = sum(a * b for a, b in zip(alpha, beta))
    for s, t in Q.effective_arrows():
        total -= alpha[s] * beta[t]
    return total


def sym_form_add(Q: Quiver, alpha: Sequence[int], beta: Sequence[int]) -> int:
    return euler_form_add(Q, alpha, beta) + euler_form_add(Q, beta, alpha)


# ---------------------------------------------------------------------------
# mod-p matrices as nested tuples
# ---------------------------------------------------------------------------


def _matmul(A: Mat, B: Mat, p: int) -> Mat:
    if not A:
        return ()
    inner = len(A[0])
    if inner == 0:
        # cols of B unknowable from B itself; only valid target is zero cols
        return tuple(() for _ in A)
    cols = len(B[0]) if B else 0
    return tuple(
        tuple(sum(A[i][k] * B[k][j] for k in range(inner)) % p for j in range(cols))
        for i in range(len(A))
    )


def _mat_vec(A: Mat, v: Tuple[int, ...], p: int) -> Tuple[int, ...]:
    return tuple(sum(row[k] * v[k] for k in range(len(v))) % p for row in A)


def _identity(n: int) -> Mat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def _rref(rows: Sequence[Sequence[int]], ncols: int, p: int) -> Tuple[Mat, Tuple[int, ...]]:
    """Reduced row echelon form over F_p; returns (nonzero rows, pivot cols)."""
    work = [list(r) for r in rows]
    pivots: List[int] = []
    rank = 0
    for col in range(ncols):
        pivot_row = None
        for r in range(rank, len(work)):
            if work[r][col] % p != 0:
                pivot_row = r
                break
        if pivot_row is None:
            continue
        work[rank], work[pivot_row] = work[pivot_row], work[rank]
        inv = pow(work[rank][col], p - 2, p) if p > 2 else work[rank][col]
        work[rank] = [(x * inv) % p for x in work[rank]]
        for r in range(len(work)):
            if r != rank and work[r][col] % p != 0:
                f = work[r][col] % p
                work[r] = [(a - f * b) % p for a, b in zip(work[r], work[rank])]
        pivots.append(col)
        rank += 1
        if rank == len(work):
            break
    return tuple(tuple(r) for r in work[:rank]), tuple(pivots)


def _rank(rows: Sequence[Sequence[int]], ncols: int, p: int) -> int:
    return len(_rref(rows, ncols, p)[0])


def _nullspace(rows: Sequence[Sequence[int]], ncols: int, p: int) -> List[Tuple[int, ...]]:
    red, pivots = _rref(rows, ncols, p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [0] * ncols
        v[fcol] = 1
        for i, pcol in enumerate(pivots):
            v[pcol] = (-red[i][fcol]) % p
        basis.append(tuple(v))
    return basis


def _reduce_against(v: Tuple[int, ...], rows: Mat, pivots: Tuple[int, ...], p: int) -> Tuple[int, ...]:
    w = list(v)
    for row, c in zip(rows, pivots):
        f = w[c] % p
        if f:
            for j in range(len(w)):
                w[j] = (w[j] - f * row[j]) % p
    return tuple(w)


def _coords_in_rref(v: Tuple[int, ...], rows: Mat, pivots: Tuple[int, ...], p: int) -> Tuple[int, ...]:
    """Coordinates of v in the RREF row basis; raises if v is outside."""
    coords = tuple(v[c] % p for c in pivots)
    if any(_reduce_against(v, rows, pivots, p)):
        raise ValueError("vector not inside the subspace")
    return coords


def _subspaces(d: int, k: int, p: int) -> Iterator[Tuple[Mat, Tuple[int, ...]]]:
    """All k-dimensional subspaces of F_p^d as RREF row bases, deterministic."""
    if k == 0:
        yield ((), ())
        return
    for pivots in itertools.combinations(range(d), k):
        free_pos = [
            (i, j)
            for i in range(k)
            for j in range(d)
            if j > pivots[i] and j not in pivots
        ]
        for vals in itertools.product(range(p), repeat=len(free_pos)):
            rows = [[0] * d for _ in range(k)]
            for i in range(k):
                rows[i][pivots[i]] = 1
            for (i, j), val in zip(free_pos, vals):
                rows[i][j] = val
            yield tuple(tuple(r) for r in rows), tuple(pivots)


def subspace_count(d: int, k: int, p: int) -> int:
    v = gauss_binomial(d, k).evaluate(p)
    return int(v)


# ---------------------------------------------------------------------------
# representations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuiverRep:
    """Representation of a quiver over F_q: dims per vertex, one matrix per
    effective arrow with shape dim(target) x dim(source), entries mod q."""

    quiver: Quiver
    q: int
    dims: Tuple[int, ...]
    mats: Tuple[Mat, ...]

    def __post_init__(self):
        if not is_prime(self.q):
            raise ValueError(f"q must be prime, got {self.q}")
        if len(self.dims) != self.quiver.n or any(d < 0 for d in self.dims):
            raise ValueError("bad dimension vector")
        eff = self.quiver.effective_arrows()
        if len(self.mats) != len(eff):
            raise ValueError("need one matrix per effective arrow")
        for (s, t), m in zip(eff, self.mats):
            if len(m) != self.dims[t]:
                raise ValueError("matrix row count must match target dimension")
            for row in m:
                if len(row) != self.dims[s]:
                    raise ValueError("matrix col count must match source dimension")
                if any(not (0 <= x < self.q) for x in row):
                    raise ValueError("entries must be reduced mod q")
        if self.quiver.nilpotent and not self._is_nilpotent():
            raise ValueError("representation is not nilpotent but the quiver requires it")

    def _is_nilpotent(self) -> bool:
        """Iterated graded image must shrink to zero. Exact for any quiver."""
        p = self.q
        eff = self.quiver.effective_arrows()
        # current graded subspace as RREF rows per vertex; start = everything
        cur = [tuple(tuple(r) for r in _identity(d)) for d in self.dims]
        cur_dims = list(self.dims)
        for _ in range(sum(self.dims) + 1):
            if all(x == 0 for x in cur_dims):
                return True
            imgs: List[List[Tuple[int, ...]]] = [[] for _ in self.dims]
            for (s, t), m in zip(eff, self.mats):
                for basis_vec in cur[s]:
                    imgs[t].append(_mat_vec(m, basis_vec, p))
            nxt = []
            nxt_dims = []
            for v, vecs in enumerate(imgs):
                red, _ = _rref(vecs, self.dims[v], p)
                nxt.append(red)
                nxt_dims.append(len(red))
            if nxt_dims == cur_dims and all(n == c for n, c in zip(nxt, cur)):
                return False  # stabilized above zero
            cur, cur_dims = nxt, nxt_dims
        return all(x == 0 for x in cur_dims)

    def total_dim(self) -> int:
        return sum(self.dims)


def zero_rep(Q: Quiver, q: int) -> QuiverRep:
    dims = (0,) * Q.n
    mats = tuple(() for _ in Q.effective_arrows())
    return QuiverRep(Q, q, dims, mats)


def simple_rep(Q: Quiver, q: int, vertex: int) -> QuiverRep:
    dims = tuple(1 if i == vertex else 0 for i in range(Q.n))
    mats = []
    for s, t in Q.effective_arrows():
        rows = dims[t]
        cols = dims[s]
        mats.append(tuple(tuple(0 for _ in range(cols)) for _ in range(rows)))
    return QuiverRep(Q, q, dims, tuple(mats))


def direct_sum(a: QuiverRep, b: QuiverRep) -> QuiverRep:
    if a.quiver != b.quiver or a.q != b.q:
        raise ValueError("direct sum needs matching quiver and q")
    dims = tuple(x + y for x, y in zip(a.dims, b.dims))
    mats = []
    for (s, t), ma, mb in zip(a.quiver.effective_arrows(), a.mats, b.mats):
        rows = []
        for i in range(a.dims[t]):
            rows.append(tuple(ma[i]) + (0,) * b.dims[s])
        for i in range(b.dims[t]):
            rows.append((0,) * a.dims[s] + tuple(mb[i]))
        mats.append(tuple(rows))
    return QuiverRep(a.quiver, a.q, dims, tuple(mats))


def jordan_rep(la: Partition, q: int) -> QuiverRep:
    """Nilpotent single matrix with Jordan type la (ones on the subdiagonal
    of each block)."""
    la = as_partition(la)
    n = sum(la)
    mat = [[0] * n for _ in range(n)]
    off = 0
    for part in la:
        for i in range(part - 1):
            mat[off + i + 1][off + i] = 1 % q
        off += part
    return QuiverRep(Quiver.jordan_quiver(), q, (n,), (tuple(tuple(r) for r in mat),))


def cyclic_chain_rep(Q: Quiver, q: int, start: int, length: int) -> QuiverRep:
    """Indecomposable nilpotent chain of the cyclic quiver: basis slots at
    vertices start, start+1, ..., start+length-1 (mod n), each arrow sending
    slot c to slot c+1."""
    if not Q.is_single_cycle():
        raise ValueError("chain reps live on the cyclic quiver")
    n = Q.n
    slots = [(start + c) % n for c in range(length)]
    dims = [0] * n
    index: List[List[int]] = [[] for _ in range(n)]  # slot ids per vertex
    for sid, v in enumerate(slots):
        index[v].append(sid)
        dims[v] += 1
    pos_in_vertex = {}
    for v in range(n):
        for k, sid in enumerate(index[v]):
            pos_in_vertex[sid] = k
    mats = []
    for (s, t) in Q.effective_arrows():
        m = [[0] * dims[s] for _ in range(dims[t])]
        for sid, v in enumerate(slots):
            if v == s and sid + 1 < length and slots[sid + 1] == t:
                m[pos_in_vertex[sid + 1]][pos_in_vertex[sid]] = 1 % q
        mats.append(tuple(tuple(r) for r in m))
    return QuiverRep(Q, q, tuple(dims), tuple(mats))


def rep_from_cyclic_label(Q: Quiver, q: int, label: Tuple[Partition, ...]) -> QuiverRep:
    out = zero_rep(Q, q)
    for start, la in enumerate(label):
        for part in la:
            out = direct_sum(out, cyclic_chain_rep(Q, q, start, part))
    return out


# ---------------------------------------------------------------------------
# Hom spaces, automorphisms, isomorphism testing
# ---------------------------------------------------------------------------


def hom_basis(M: QuiverRep, N: QuiverRep) -> List[Tuple[Mat, ...]]:
    """Basis of the intertwiner space Hom(M, N): tuples of per-vertex
    matrices f_v (shape dimN_v x dimM_v) with f_t x^M_h = x^N_h f_s."""
    if M.quiver != N.quiver or M.q != N.q:
        raise ValueError("hom needs matching quiver and q")
    p = M.q
    Q = M.quiver
    eff = Q.effective_arrows()
    # unknown layout: row-major f_v blocks in vertex order
    offs = []
    total = 0
    for v in range(Q.n):
        offs.append(total)
        total += N.dims[v] * M.dims[v]

    def upos(v: int, i: int, j: int) -> int:
        return offs[v] + i * M.dims[v] + j

    rows: List[List[int]] = []
    for (s, t), xm, xn in zip(eff, M.mats, N.mats):
        for i in range(N.dims[t]):
            for j in range(M.dims[s]):
                row = [0] * total
                for k in range(M.dims[t]):
                    row[upos(t, i, k)] = (row[upos(t, i, k)] + xm[k][j]) % p
                for k in range(N.dims[s]):
                    row[upos(s, k, j)] = (row[upos(s, k, j)] - xn[i][k]) % p
                if any(row):
                    rows.append(row)
    sols = _nullspace(rows, total, p) if total else []
    basis = []
    for v_flat in sols:
        blocks = []
        for v in range(Q.n):
            b = tuple(
                tuple(v_flat[upos(v, i, j)] for j in range(M.dims[v]))
                for i in range(N.dims[v])
            )
            blocks.append(b)
        basis.append(tuple(blocks))
    return basis


def hom_dim(M: QuiverRep, N: QuiverRep) -> int:
    return len(hom_basis(M, N))


def _perm_signs(n: int) -> List[Tuple[Tuple[int, ...], int]]:
    out = []
    for perm in itertools.permutations(range(n)):
        inv = sum(
            1
            for a in range(n)
            for b in range(a + 1, n)
            if perm[a] > perm[b]
        )
        out.append((perm, -1 if inv % 2 else 1))
    return out


def _batch_dets_mod(arr: np.ndarray, p: int) -> np.ndarray:
    """Determinants mod p of a batch of small square matrices (n <= 6)."""
    n = arr.shape[1]
    if n == 0:
        return np.ones(arr.shape[0], dtype=np.int64)
    if n == 4:
        # Laplace along the first two rows; entries < p <= 5 keep everything
        # inside int32 comfortably
        a = arr.astype(np.int32)
        pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        comp = {(0, 1): (2, 3), (0, 2): (1, 3), (0, 3): (1, 2),
                (1, 2): (0, 3), (1, 3): (0, 2), (2, 3): (0, 1)}
        sign = {(0, 1): 1, (0, 2): -1, (0, 3): 1,
                (1, 2): 1, (1, 3): -1, (2, 3): 1}
        top = {
            ij: a[:, 0, ij[0]] * a[:, 1, ij[1]] - a[:, 0, ij[1]] * a[:, 1, ij[0]]
            for ij in pairs
        }
        bot = {
            ij: a[:, 2, ij[0]] * a[:, 3, ij[1]] - a[:, 2, ij[1]] * a[:, 3, ij[0]]
            for ij in pairs
        }
        total32 = np.zeros(arr.shape[0], dtype=np.int64)
        for ij in pairs:
            total32 += sign[ij] * top[ij].astype(np.int64) * bot[comp[ij]]
        return total32 % p
    if n > 6:  # pragma: no cover
        raise BudgetError("batched determinants limited to blocks of size <= 6")
    total = np.zeros(arr.shape[0], dtype=np.int64)
    for perm, sign in _perm_signs(n):
        term = np.ones(arr.shape[0], dtype=np.int64)
        for i, j in enumerate(perm):
            term = (term * arr[:, i, j]) % p
        total = (total + sign * term) % p
    return total % p


_CHUNK = 1 << 17


def _coeff_digit_block(start: int, stop: int, nslots: int, p: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((stop - start, nslots), dtype=np.int64)
    for pos in range(nslots):
        out[:, nslots - 1 - pos] = idx % p
        idx = idx // p
    return out


def _count_vertexwise_invertible(
    basis: List[Tuple[Mat, ...]],
    dims: Tuple[int, ...],
    p: int,
    budget: int,
    find_one: bool = False,
):
    """Scan all F_p-combinations of the basis; count those whose every vertex
    block is invertible (or return early whether one exists)."""
    nb = len(basis)
    space = p ** nb
    if space > budget:
        raise BudgetError(
            f"endomorphism scan needs {space} points, budget is {budget}"
        )
    # flat (nb, d*d) basis stacks; int16 is safe: sums stay below nb*(p-1)^2
    flats = []
    for v, d in enumerate(dims):
        if d == 0:
            flats.append(None)
            continue
        flats.append(
            np.array([[x for row in b[v] for x in row] for b in basis], dtype=np.int16)
            if nb
            else np.zeros((0, d * d), dtype=np.int16)
        )
    count = 0
    for start in range(0, space, _CHUNK):
        stop = min(start + _CHUNK, space)
        digits = (
            _coeff_digit_block(start, stop, nb, p).astype(np.int16)
            if nb
            else np.zeros((stop - start, 0), dtype=np.int16)
        )
        mask = np.ones(stop - start, dtype=bool)
        for v, d in enumerate(dims):
            if d == 0 or not mask.any():
                continue
            cand = (digits @ flats[v]) % p
            cand = cand.reshape(-1, d, d)
            if not mask.all():
                cand = cand[mask]
            dets = _batch_dets_mod(cand, p)
            if mask.all():
                mask = dets != 0
            else:
                mask[np.nonzero(mask)[0][dets == 0]] = False
        if find_one and mask.any():
            return True
        count += int(mask.sum())
    return (count > 0) if find_one else count


_AUT_CACHE: Dict[QuiverRep, int] = {}


def aut_count(M: QuiverRep, budget: Optional[int] = None) -> int:
    """Number of invertible intertwiners M -> M, by exhaustive scan of the
    endomorphism space."""
    if M in _AUT_CACHE:
        return _AUT_CACHE[M]
    budget = DEFAULT_BUDGET if budget is None else budget
    if M.total_dim() == 0:
        return 1
    basis = hom_basis(M, M)
    out = _count_vertexwise_invertible(basis, M.dims, M.q, budget)
    _AUT_CACHE[M] = out
    return out


def is_isomorphic(M: QuiverRep, N: QuiverRep, budget: Optional[int] = None) -> bool:
    if M.quiver != N.quiver or M.q != N.q:
        raise ValueError("comparing representations of different quivers or fields")
    if M.dims != N.dims:
        return False
    if M.mats == N.mats:
        return True
    p = M.q
    for xm, xn in zip(M.mats, N.mats):
        cols = len(xm[0]) if xm else 0
        if _rank(xm, cols, p) != _rank(xn, cols, p):
            return False
    budget = DEFAULT_BUDGET if budget is None else budget
    basis = hom_basis(M, N)
    if not basis:
        return False
    return bool(
        _count_vertexwise_invertible(basis, M.dims, p, budget, find_one=True)
    )


def gl_order(n: int, q: int) -> int:
    out = 1
    for i in range(n):
        out *= q ** n - q ** i
    return out


def gl_order_vec(dims: Sequence[int], q: int) -> int:
    out = 1
    for d in dims:
        out *= gl_order(d, q)
    return out


# ---------------------------------------------------------------------------
# classification and enumeration of isomorphism classes
# ---------------------------------------------------------------------------


def jordan_type(M: QuiverRep) -> Partition:
    """Partition label from ranks of powers of the loop matrix."""
    if not M.quiver.jordan:
        raise ValueError("jordan_type needs the jordan backend")
    p = M.q
    d = M.dims[0]
    x = M.mats[0]
    ranks = [d]
    power = _identity(d)
    while ranks[-1] > 0:
        power = _matmul(x, power, p)
        ranks.append(_rank(power, d, p))
    conj = []
    for k in range(1, len(ranks)):
        drop = ranks[k - 1] - ranks[k]
        if drop:
            conj.append(drop)
    if sorted(conj, reverse=True) != conj:  # pragma: no cover
        raise ConsistencyError("rank drops of a nilpotent matrix must decrease")
    # conj is the conjugate partition; transpose back
    la = []
    for i in range(1, (conj[0] + 1) if conj else 1):
        cnt = sum(1 for c in conj if c >= i)
        if cnt:
            la.append(cnt)
    out = tuple(sorted(la, reverse=True))
    if sum(out) != d:  # pragma: no cover
        raise ConsistencyError("jordan type does not account for the dimension")
    return out


def cyclic_type(M: QuiverRep) -> Tuple[Partition, ...]:
    """Tuple-of-partitions label for a nilpotent rep of the cyclic quiver,
    from ranks of the composite path maps (no orbit search)."""
    Q = M.quiver
    if not Q.is_single_cycle():
        raise ValueError("cyclic_type needs the cyclic quiver")
    n = Q.n
    p = M.q
    D = M.total_dim()
    eff = Q.effective_arrows()
    arrow_from = {s: idx for idx, (s, t) in enumerate(eff)}
    # r[i][l] = rank of the length-l path composite starting at vertex i
    r = [[0] * (D + 3) for _ in range(n)]
    for i in range(n):
        comp = _identity(M.dims[i])
        r[i][0] = M.dims[i]
        v = i
        for l in range(1, D + 3):
            comp = _matmul(M.mats[arrow_from[v]], comp, p)
            v = (v + 1) % n
            if not comp or not comp[0]:
                r[i][l] = 0
            else:
                r[i][l] = _rank(comp, len(comp[0]), p)

    def T(i: int, l: int) -> int:
        return r[i % n][l - 1] - r[i % n][l]

    mult: List[Dict[int, int]] = [dict() for _ in range(n)]
    for j in range(n):
        for l in range(1, D + 1):
            m = T(j, l) - T((j - 1) % n, l + 1)
            if m < 0:  # pragma: no cover
                raise ConsistencyError("negative chain multiplicity")
            if m:
                mult[j][l] = m
    label = tuple(
        tuple(sorted((l for l, m in mult[j].items() for _ in range(m)), reverse=True))
        for j in range(n)
    )
    if sum(sum(la) for la in label) != D:  # pragma: no cover
        raise ConsistencyError("cyclic type does not account for the dimension")
    return label


def cyclic_labels_for_dim(Q: Quiver, d: Tuple[int, ...]) -> List[Tuple[Partition, ...]]:
    """All tuple-of-partitions labels with the given dimension vector."""
    n = Q.n
    total = sum(d)

    def chain_dim(start: int, length: int) -> Tuple[int, ...]:
        out = [0] * n
        for c in range(length):
            out[(start + c) % n] += 1
        return tuple(out)

    from .partitions import all_partitions

    labels = []
    # partition sizes per start vertex summing to total
    def compositions(k: int, rem: int):
        if k == 1:
            yield (rem,)
            return
        for first in range(rem + 1):
            for rest in compositions(k - 1, rem - first):
                yield (first,) + rest

    for sizes in compositions(n, total):
        for las in itertools.product(*(all_partitions(s) for s in sizes)):
            dims = [0] * n
            for start, la in enumerate(las):
                for part in la:
                    cd = chain_dim(start, part)
                    dims = [a + b for a, b in zip(dims, cd)]
            if tuple(dims) == tuple(d):
                labels.append(tuple(las))
    return sorted(labels)


def _space_size(Q: Quiver, q: int, d: Tuple[int, ...]) -> int:
    total = 1
    for s, t in Q.effective_arrows():
        total *= q ** (d[t] * d[s])
    return total


def _gl_generators(n: int, p: int) -> List[Mat]:
    """Transvections and a primitive-root dilation generate GL(n, p)."""
    gens: List[Mat] = []
    if n == 0:
        return gens
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            m = [list(r) for r in _identity(n)]
            m[i][j] = 1 % p
            gens.append(tuple(tuple(r) for r in m))
            m2 = [list(r) for r in _identity(n)]
            m2[i][j] = (-1) % p
            gens.append(tuple(tuple(r) for r in m2))
    if p > 2:
        root = _primitive_root(p)
        for r in (root, pow(root, p - 2, p)):
            m = [list(row) for row in _identity(n)]
            m[0][0] = r
            gens.append(tuple(tuple(row) for row in m))
    seen = set()
    out = []
    for g in gens:
        if g not in seen:
            seen.add(g)
            out.append(g)
    return out


def _primitive_root(p: int) -> int:
    for g in range(2, p):
        seen = set()
        x = 1
        for _ in range(p - 1):
            x = (x * g) % p
            seen.add(x)
        if len(seen) == p - 1:
            return g
    raise ConsistencyError(f"no primitive root mod {p}")  # pragma: no cover


def _enumerate_points(
    Q: Quiver, q: int, d: Tuple[int, ...], nilpotent: bool, budget: int
) -> List[Tuple[Mat, ...]]:
    """All matrix tuples (optionally nilpotent only), lexicographic order."""
    eff = Q.effective_arrows()
    shapes = [(d[t], d[s]) for s, t in eff]
    nslots = sum(r * c for r, c in shapes)
    space = q ** nslots
    if space > budget:
        raise BudgetError(f"matrix space has {space} points, budget is {budget}")
    D = sum(d)
    offsets = []
    pos = 0
    for r, c in shapes:
        offsets.append(pos)
        pos += r * c

    use_fast_nilpotent = nilpotent and (Q.jordan or Q.is_single_cycle()) and D > 0
    vert_off = [sum(d[:v]) for v in range(Q.n)]

    points: List[Tuple[Mat, ...]] = []
    for start in range(0, space, _CHUNK):
        stop = min(start + _CHUNK, space)
        digits = _coeff_digit_block(start, stop, nslots, q)
        rows_sel = None
        if use_fast_nilpotent:
            # single path structure per (i,j,k): the block-matrix power test
            # is exact for the jordan loop and the single cycle
            big = np.zeros((stop - start, D, D), dtype=np.int64)
            for (srcdst, (rr, cc), off) in zip(eff, shapes, offsets):
                s, t = srcdst
                blk = digits[:, off : off + rr * cc].reshape(stop - start, rr, cc)
                big[:, vert_off[t] : vert_off[t] + rr, vert_off[s] : vert_off[s] + cc] = blk
            power = big
            steps = max(1, int(np.ceil(np.log2(max(D, 2)))))
            for _ in range(steps):
                power = np.matmul(power, power) % q
            rows_sel = ~power.any(axis=(1, 2))
        idxs = range(stop - start) if rows_sel is None else np.nonzero(rows_sel)[0]
        for row_i in idxs:
            row = digits[int(row_i)]
            mats = []
            for (rr, cc), off in zip(shapes, offsets):
                flat = row[off : off + rr * cc]
                mats.append(
                    tuple(
                        tuple(int(flat[i * cc + j]) for j in range(cc))
                        for i in range(rr)
                    )
                )
            points.append(tuple(mats))
    if nilpotent and not use_fast_nilpotent and D > 0 and quiver_has_cycle(Q):
        points = [
            pt for pt in points if _unvalidated_rep(Q, q, d, pt)._is_nilpotent()
        ]
    return points


def _unvalidated_rep(Q: Quiver, q: int, d: Tuple[int, ...], mats: Tuple[Mat, ...]) -> QuiverRep:
    """Internal constructor that skips the nilpotency validation (used while
    filtering candidate points, where non-nilpotent tuples are expected)."""
    rep = object.__new__(QuiverRep)
    object.__setattr__(rep, "quiver", Q)
    object.__setattr__(rep, "q", q)
    object.__setattr__(rep, "dims", d)
    object.__setattr__(rep, "mats", mats)
    return rep


def _act(
    point: Tuple[Mat, ...],
    vertex: int,
    g: Mat,
    g_inv: Mat,
    eff: Tuple[Tuple[int, int], ...],
    p: int,
) -> Tuple[Mat, ...]:
    out = []
    for (s, t), m in zip(eff, point):
        nm = m
        if t == vertex:
            nm = _matmul(g, nm, p)
        if s == vertex:
            nm = _matmul(nm, g_inv, p)
        out.append(nm)
    return tuple(out)


IsoClass = Tuple[object, QuiverRep, int]  # (label, representative, orbit size)

_ISO_CACHE: Dict[Tuple, List[IsoClass]] = {}


def enumerate_iso_classes(
    Q: Quiver,
    q: int,
    d,
    nilpotent: Optional[bool] = None,
    budget: Optional[int] = None,
    force_generic: bool = False,
) -> List[IsoClass]:
    """Isomorphism classes of representations with dimension vector d.

    Returns (label, representative, orbit_size) triples, deterministically
    ordered. The Jordan and cyclic backends use closed-form classifications
    (labels are partitions / tuples of partitions); force_generic bypasses
    them for cross-checking against the orbit enumeration.
    """
    if isinstance(d, int):
        d = (d,)
    d = tuple(int(x) for x in d)
    if len(d) != Q.n or any(x < 0 for x in d):
        raise ValueError("bad dimension vector")
    if not is_prime(q):
        raise ValueError(f"q must be prime, got {q}")
    if nilpotent is None:
        nilpotent = Q.nilpotent
    if Q.jordan:
        nilpotent = True
    budget_val = DEFAULT_BUDGET if budget is None else budget
    key = (Q, q, d, nilpotent, force_generic)
    if key in _ISO_CACHE:
        return _ISO_CACHE[key]

    out: List[IsoClass]
    if Q.jordan and not force_generic:
        from .partitions import all_partitions, aut_poly

        out = []
        for la in sorted(all_partitions(d[0]), key=dominance_key):
            rep = jordan_rep(la, q)
            a = int(aut_poly(la).evaluate(q))
            total = gl_order(d[0], q)
            if total % a:  # pragma: no cover
                raise ConsistencyError("orbit-stabilizer division failed")
            out.append((la, rep, total // a))
    elif Q.is_single_cycle() and nilpotent and not force_generic:
        out = []
        for label in cyclic_labels_for_dim(Q, d):
            rep = rep_from_cyclic_label(Q, q, label)
            a = aut_count(rep, budget=budget_val)
            total = gl_order_vec(d, q)
            if total % a:  # pragma: no cover
                raise ConsistencyError("orbit-stabilizer division failed")
            out.append((label, rep, total // a))
    else:
        points = _enumerate_points(Q, q, d, nilpotent, budget_val)
        eff = Q.effective_arrows()
        gens = []
        for v in range(Q.n):
            for g in _gl_generators(d[v], q):
                g_inv = _invert_mat(g, q)
                gens.append((v, g, g_inv))
        visited: Dict[Tuple[Mat, ...], int] = {}
        out = []
        for seed in points:
            if seed in visited:
                continue
            orbit_id = len(out)
            frontier = [seed]
            visited[seed] = orbit_id
            size = 1
            while frontier:
                cur = frontier.pop()
                for v, g, g_inv in gens:
                    nxt = _act(cur, v, g, g_inv, eff, q)
                    if nxt not in visited:
                        visited[nxt] = orbit_id
                        frontier.append(nxt)
                        size += 1
            rep = QuiverRep(Q, q, d, seed)
            out.append(((d, seed), rep, size))
    _ISO_CACHE[key] = out
    return out


def _invert_mat(m: Mat, p: int) -> Mat:
    n = len(m)
    aug = [list(m[i]) + [1 if j == i else 0 for j in range(n)] for i in range(n)]
    red, pivots = _rref(aug, 2 * n, p)
    if pivots[:n] != tuple(range(n)):
        raise ValueError("matrix is singular")
    return tuple(tuple(row[n:]) for row in red)


_CLASSIFY_CACHE: Dict[QuiverRep, object] = {}


def classify_rep(M: QuiverRep, budget: Optional[int] = None):
    """Canonical IsoLabel of a representation: partition (Jordan), tuple of
    partitions (cyclic nilpotent), else the lex-least orbit representative."""
    if M in _CLASSIFY_CACHE:
        return _CLASSIFY_CACHE[M]
    if M.quiver.jordan:
        label: object = jordan_type(M)
    elif M.quiver.is_single_cycle() and M.quiver.nilpotent:
        label = cyclic_type(M)
    else:
        classes = enumerate_iso_classes(
            M.quiver, M.q, M.dims, nilpotent=M.quiver.nilpotent, budget=budget
        )
        label = None
        for lab, rep, _ in classes:
            if is_isomorphic(M, rep, budget=budget):
                label = lab
                break
        if label is None:  # pragma: no cover
            raise ConsistencyError("representation matches no enumerated class")
    _CLASSIFY_CACHE[M] = label
    return label


def label_dim(Q: Quiver, label) -> Tuple[int, ...]:
    """Dimension vector of an IsoLabel."""
    if Q.jordan:
        return (sum(label),)
    if Q.is_single_cycle() and Q.nilpotent:
        dims = [0] * Q.n
        for start, la in enumerate(label):
            for part in la:
                for c in range(part):
                    dims[(start + c) % Q.n] += 1
        return tuple(dims)
    # generic label: (dims, mats)
    return tuple(label[0])


def rep_from_label(Q: Quiver, q: int, label) -> QuiverRep:
    if Q.jordan:
        return jordan_rep(label, q)
    if Q.is_single_cycle() and Q.nilpotent:
        return rep_from_cyclic_label(Q, q, label)
    dims, mats = label
    return QuiverRep(Q, q, tuple(dims), mats)


# ---------------------------------------------------------------------------
# submodule counting
# ---------------------------------------------------------------------------


def _sub_and_quotient(
    R: QuiverRep,
    selection: Tuple[Tuple[Mat, Tuple[int, ...]], ...],
) -> Optional[Tuple[QuiverRep, QuiverRep]]:
    """For a vertex-wise subspace selection, return (sub rep, quotient rep)
    if the selection is arrow-stable, else None."""
    p = R.q
    Q = R.quiver
    eff = Q.effective_arrows()
    sub_dims = tuple(len(rows) for rows, _ in selection)
    quo_dims = tuple(d - k for d, k in zip(R.dims, sub_dims))
    nonpivots = []
    for v in range(Q.n):
        _, pivots = selection[v]
        nonpivots.append([j for j in range(R.dims[v]) if j not in pivots])
    sub_mats = []
    quo_mats = []
    for (s, t), x in zip(eff, R.mats):
        rows_s, piv_s = selection[s]
        rows_t, piv_t = selection[t]
        # stability and sub matrix
        sm = [[0] * sub_dims[s] for _ in range(sub_dims[t])]
        for j, basis_vec in enumerate(rows_s):
            img = _mat_vec(x, basis_vec, p)
            resid = _reduce_against(img, rows_t, piv_t, p)
            if any(resid):
                return None
            for i, c in enumerate(piv_t):
                sm[i][j] = img[c] % p
        sub_mats.append(tuple(tuple(r) for r in sm))
        # quotient matrix on non-pivot coordinates
        qm = [[0] * quo_dims[s] for _ in range(quo_dims[t])]
        for j, col in enumerate(nonpivots[s]):
            e = tuple(1 if k == col else 0 for k in range(R.dims[s]))
            img = _mat_vec(x, e, p)
            resid = _reduce_against(img, rows_t, piv_t, p)
            for i, c in enumerate(nonpivots[t]):
                qm[i][j] = resid[c] % p
        quo_mats.append(tuple(tuple(r) for r in qm))
    sub = _unvalidated_rep(Q, p, sub_dims, tuple(sub_mats))
    quo = _unvalidated_rep(Q, p, quo_dims, tuple(quo_mats))
    return sub, quo


_SUBMODULE_TABLE_CACHE: Dict[QuiverRep, Dict[Tuple[object, object], int]] = {}


def submodule_type_table(
    R: QuiverRep, budget: Optional[int] = None
) -> Dict[Tuple[object, object], int]:
    """Counts of stable subspaces of R bucketed by (quotient label, sub
    label); one enumeration serves every (M, N) query against this R."""
    if R in _SUBMODULE_TABLE_CACHE:
        return _SUBMODULE_TABLE_CACHE[R]
    budget_val = DEFAULT_BUDGET if budget is None else budget
    p = R.q
    total_tuples = 1
    per_vertex: List[List[Tuple[Mat, Tuple[int, ...]]]] = []
    for d in R.dims:
        opts = []
        for k in range(d + 1):
            opts.extend(_subspaces(d, k, p))
        per_vertex.append(opts)
        total_tuples *= len(opts)
    if total_tuples > budget_val:
        raise BudgetError(
            f"submodule enumeration needs {total_tuples} subspace tuples, budget is {budget_val}"
        )
    table: Dict[Tuple[object, object], int] = {}
    for selection in itertools.product(*per_vertex):
        sq = _sub_and_quotient(R, selection)
        if sq is None:
            continue
        sub, quo = sq
        key = (classify_rep(quo, budget=budget_val), classify_rep(sub, budget=budget_val))
        table[key] = table.get(key, 0) + 1
    _SUBMODULE_TABLE_CACHE[R] = table
    return table


def count_submodules(
    R: QuiverRep, M_label, N_label, budget: Optional[int] = None
) -> int:
    """Number of subrepresentations L of R with L of type N_label and R/L of
    type M_label."""
    Q = R.quiver
    dm = label_dim(Q, M_label)
    dn = label_dim(Q, N_label)
    if tuple(a + b for a, b in zip(dm, dn)) != R.dims:
        raise ValueError("dimension vectors of M and N must sum to that of R")
    return submodule_type_table(R, budget=budget).get((M_label, N_label), 0)
