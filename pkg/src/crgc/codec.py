"""Functional regenerating-code engine over a prime field.

A file ``M`` is a ``B x L`` matrix (``B`` packets of ``L`` symbols).  Node
``i`` holds a ``B x alpha`` generator ``G_i`` and the payload
``G_i^T M`` (``alpha`` packets).  The code is MDS when every ``k``
generators stack to rank ``B = k * alpha``.

Repair and upgrade share one mechanism: each helper ``w`` ships ``h_w``
random combinations of its packets (``G_w P_w``) to an engine, which
mixes everything it received through a random ``Z`` per newcomer.  The
result is checked for the MDS property and redrawn on failure, so all
operations are deterministic for a given seed.
"""

from __future__ import annotations

import hashlib
import itertools
import logging
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .bounds import CodeParams, core_ms_bound, is_feasible_download, min_upgrade_bandwidth
from .gf import DEFAULT_PRIME, PrimeField
from .matrix import GfMatrix, batch_nonsingular, matmul_mod, random_array, row_reduce

log = logging.getLogger(__name__)

MAX_ATTEMPTS = 32
EXHAUSTIVE_LIMIT = 100_000
MDS_SAMPLES = 10_000
_BATCH = 4096


class CodecError(Exception):
    pass


class ConstructionError(CodecError):
    """Random generators failed the MDS check on every attempt."""


class ImpossibleRepairError(CodecError):
    pass


class ReconstructionError(CodecError):
    pass


@dataclass
class CodedNode:
    id: int
    gen: GfMatrix
    payload: GfMatrix | None = None

    @property
    def alpha(self) -> int:
        return self.gen.cols


@dataclass(frozen=True)
class TransferReport:
    """Traffic for one repair or upgrade."""

    kind: str
    new_ids: tuple[int, ...]
    helpers: tuple[int, ...]
    per_helper: tuple[int, ...]
    engine_to_newcomers: int
    attempts: int

    @property
    def helper_to_engine(self) -> int:
        return sum(self.per_helper)

    @property
    def links(self) -> int:
        return len(self.helpers)


@dataclass(frozen=True)
class MdsReport:
    passed: bool
    checked: int
    exhaustive: bool
    witness: tuple[int, ...] | None = None

    def __bool__(self):
        return self.passed


@dataclass(frozen=True)
class StrongMdsSweep:
    total: int
    passed: int
    failures: list[tuple[int, ...]] = dc_field(default_factory=list)

    @property
    def pass_rate(self) -> float:
        return self.passed / self.total if self.total else 1.0


class Cluster:
    """Live nodes of one coded file plus the field and code geometry."""

    def __init__(self, field: PrimeField, k: int, alpha: int, nodes=(), source: GfMatrix | None = None):
        self.field = field
        self.k = k
        self.alpha = alpha
        self.nodes: dict[int, CodedNode] = {}
        self.source = source
        for node in nodes:
            self.add(node)

    @property
    def B(self) -> int:
        return self.k * self.alpha

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def ids(self) -> list[int]:
        return sorted(self.nodes)

    def add(self, node: CodedNode):
        if node.gen.shape != (self.B, self.alpha):
            raise ValueError(f"node {node.id}: generator shape {node.gen.shape}, "
                             f"expected {(self.B, self.alpha)}")
        self.nodes[node.id] = node

    def remove(self, ids):
        for i in ids:
            del self.nodes[i]

    def next_id(self) -> int:
        return max(self.nodes, default=0) + 1

    def generators(self, ids=None) -> np.ndarray:
        """``(len(ids), B, alpha)`` stack of generator arrays."""
        ids = self.ids if ids is None else list(ids)
        return np.stack([self.nodes[i].gen.data for i in ids])

    def copy(self) -> Cluster:
        c = Cluster(self.field, self.k, self.alpha, source=self.source)
        c.nodes = dict(self.nodes)
        return c

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.field.p}:{self.k}:{self.alpha}".encode())
        for i in self.ids:
            node = self.nodes[i]
            h.update(str(i).encode())
            h.update(node.gen.data.tobytes())
            if node.payload is not None:
                h.update(node.payload.data.tobytes())
        return h.hexdigest()


# -- MDS checks ---------------------------------------------------------------

def _subsets_nonsingular(gens: np.ndarray, subsets: np.ndarray, p: int) -> np.ndarray:
    # gens: (N, B, alpha); subsets: (C, k) indices into gens
    C, k = subsets.shape
    N, B, alpha = gens.shape
    ok = np.empty(C, dtype=bool)
    for start in range(0, C, _BATCH):
        chunk = subsets[start:start + _BATCH]
        # (c, k, B, alpha) -> (c, B, k * alpha)
        stack = gens[chunk].transpose(0, 2, 1, 3).reshape(len(chunk), B, k * alpha)
        ok[start:start + len(chunk)] = batch_nonsingular(stack, p)
    return ok


def check_mds(cluster: Cluster, ids=None, exhaustive_limit: int = EXHAUSTIVE_LIMIT,
              samples: int = MDS_SAMPLES, seed=0) -> MdsReport:
    """Every ``k``-subset of generators has rank ``k * alpha``.

    Exhaustive when there are at most ``exhaustive_limit`` subsets,
    otherwise ``samples`` subsets drawn uniformly.
    """
    ids = cluster.ids if ids is None else sorted(ids)
    k = cluster.k
    if len(ids) < k:
        raise ValueError(f"need at least k={k} nodes, have {len(ids)}")
    gens = cluster.generators(ids)
    total = math.comb(len(ids), k)
    if total <= exhaustive_limit:
        subsets = np.array(list(itertools.combinations(range(len(ids)), k)), dtype=np.intp)
        exhaustive = True
    else:
        rng = np.random.default_rng(seed)
        subsets = np.sort(np.argsort(rng.random((samples, len(ids))), axis=1)[:, :k], axis=1)
        exhaustive = False
        log.info("check_mds: sampling %d of %d subsets", samples, total)
    ok = _subsets_nonsingular(gens, subsets, cluster.field.p)
    if ok.all():
        return MdsReport(True, len(subsets), exhaustive)
    bad = subsets[int(np.argmin(ok))]
    return MdsReport(False, len(subsets), exhaustive, tuple(ids[j] for j in bad))


def _download_columns(cluster: Cluster, h, ids) -> np.ndarray:
    return np.concatenate([cluster.nodes[i].gen.data[:, :hi] for i, hi in zip(ids, h)], axis=1)


def _check_download_vector(cluster: Cluster, h, ids):
    if len(h) != len(ids):
        raise ValueError(f"download vector has {len(h)} entries for {len(ids)} nodes")
    if any(hi < 0 or hi > cluster.alpha for hi in h):
        raise ValueError(f"every entry must be in [0, {cluster.alpha}], got {list(h)}")


def check_strong_mds(cluster: Cluster, h, ids=None) -> bool:
    """Do the first ``h[i]`` packets of each node span the file?

    ``h`` lines up with ``ids`` (default: all nodes in id order).  A vector
    summing to less than ``B`` can never pass.
    """
    ids = cluster.ids if ids is None else list(ids)
    h = [int(x) for x in h]
    _check_download_vector(cluster, h, ids)
    if sum(h) != cluster.B:
        return False
    cols = _download_columns(cluster, h, ids)
    return bool(batch_nonsingular(cols[None], cluster.field.p)[0])


def download_vectors(n: int, total: int, cap: int):
    """All length-``n`` vectors with entries in ``[0, cap]`` summing to ``total``."""
    if n == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(cap, total) + 1):
        if total - first <= (n - 1) * cap:
            for rest in download_vectors(n - 1, total - first, cap):
                yield (first,) + rest


def strong_mds_sweep(cluster: Cluster, ids=None) -> StrongMdsSweep:
    """Check every download vector summing to ``B``."""
    ids = cluster.ids if ids is None else list(ids)
    vectors = list(download_vectors(len(ids), cluster.B, cluster.alpha))
    stack = np.stack([_download_columns(cluster, h, ids) for h in vectors])
    ok = batch_nonsingular(stack, cluster.field.p)
    failures = [v for v, good in zip(vectors, ok) if not good]
    return StrongMdsSweep(len(vectors), int(ok.sum()), failures)


# -- distribution and reconstruction -----------------------------------------

def distribute(file: GfMatrix | None, params: CodeParams, field=DEFAULT_PRIME, seed=0,
               max_attempts: int = MAX_ATTEMPTS) -> Cluster:
    """Encode ``file`` onto ``params.n`` nodes storing ``d - k + t`` packets each.

    ``file`` may be ``None`` for a generators-only cluster.
    """
    field = field if isinstance(field, PrimeField) else PrimeField(int(field))
    alpha = params.d - params.k + params.t
    B = params.k * alpha
    if params.B != B:
        raise ValueError(f"B must equal k(d - k + t) = {B}, got {params.B}")
    if file is not None and (file.rows != B or file.field != field):
        raise ValueError(f"file must be a {B} x L matrix over {field!r}")
    rng = np.random.default_rng(seed)
    for attempt in range(1, max_attempts + 1):
        gens = random_array(rng, (params.n, B, alpha), field.p)
        nodes = []
        for i in range(params.n):
            g = GfMatrix._wrap(gens[i], field)
            payload = None
            if file is not None:
                payload = GfMatrix._wrap(matmul_mod(gens[i].T, file.data, field.p), field)
            nodes.append(CodedNode(i + 1, g, payload))
        cluster = Cluster(field, params.k, alpha, nodes, source=file)
        if check_mds(cluster):
            log.debug("distribute: MDS after %d attempt(s)", attempt)
            return cluster
    raise ConstructionError(f"no MDS code after {max_attempts} attempts over {field!r}")


def decode(gen_cols: np.ndarray, packets: np.ndarray | None, p: int, B: int) -> np.ndarray | None:
    """Solve ``gen_cols^T M = packets`` for ``M``; ``None`` if rank < ``B``."""
    A = gen_cols.T
    if packets is None:
        packets = np.zeros((A.shape[0], 0), dtype=np.int64)
    red, pivots, _ = row_reduce(np.hstack([A, packets]), p)
    if pivots[:B] != list(range(B)):
        return None
    return red[:B, B:]


def reconstruct(nodes, cluster: Cluster) -> GfMatrix:
    """Recover the file from the given nodes (normally ``k`` of them)."""
    nodes = list(nodes)
    ids = tuple(n.id for n in nodes)
    if any(n.payload is None for n in nodes):
        raise ReconstructionError(f"nodes {ids} carry no payload")
    gens = np.concatenate([n.gen.data for n in nodes], axis=1)
    packets = np.concatenate([n.payload.data for n in nodes], axis=0)
    M = decode(gens, packets, cluster.field.p, cluster.B)
    if M is None:
        raise ReconstructionError(f"nodes {ids} do not span the file (rank < {cluster.B})")
    return GfMatrix._wrap(M, cluster.field)


def reconstruct_packets(cluster: Cluster, h, ids=None) -> GfMatrix:
    """Recover the file from the first ``h[i]`` packets of each node."""
    ids = cluster.ids if ids is None else list(ids)
    h = [int(x) for x in h]
    _check_download_vector(cluster, h, ids)
    gens = _download_columns(cluster, h, ids)
    if any(cluster.nodes[i].payload is None for i, hi in zip(ids, h) if hi):
        raise ReconstructionError("selected nodes carry no payload")
    packets = np.concatenate([cluster.nodes[i].payload.data[:hi] for i, hi in zip(ids, h)], axis=0)
    M = decode(gens, packets, cluster.field.p, cluster.B)
    if M is None:
        raise ReconstructionError(f"download vector {h} does not span the file")
    return GfMatrix._wrap(M, cluster.field)


# -- regeneration -------------------------------------------------------------

def _regenerate(cluster: Cluster, helpers, h, new_ids, rng, p: int) -> list[CodedNode]:
    alpha = cluster.alpha
    received_gen, received_pay = [], []
    for w, hw in zip(helpers, h):
        node = cluster.nodes[w]
        P = random_array(rng, (alpha, hw), p)
        received_gen.append(matmul_mod(node.gen.data, P, p))
        if node.payload is not None:
            received_pay.append(matmul_mod(P.T, node.payload.data, p))
    D = np.concatenate(received_gen, axis=1)
    Y = np.concatenate(received_pay, axis=0) if len(received_pay) == len(received_gen) else None
    out = []
    for nid in new_ids:
        Z = random_array(rng, (D.shape[1], alpha), p)
        gen = GfMatrix._wrap(matmul_mod(D, Z, p), cluster.field)
        payload = None if Y is None else GfMatrix._wrap(matmul_mod(Z.T, Y, p), cluster.field)
        out.append(CodedNode(nid, gen, payload))
    return out


def _install(cluster: Cluster, helpers, h, new_ids, remove, seed, max_attempts, kind) -> tuple[list[CodedNode], TransferReport]:
    rng = np.random.default_rng(seed)
    p = cluster.field.p
    for attempt in range(1, max_attempts + 1):
        new_nodes = _regenerate(cluster, helpers, h, new_ids, rng, p)
        trial = cluster.copy()
        trial.remove([i for i in remove if i in trial.nodes])
        for node in new_nodes:
            trial.add(node)
        if check_mds(trial):
            cluster.remove([i for i in remove if i in cluster.nodes])
            for node in new_nodes:
                cluster.add(node)
            report = TransferReport(kind, tuple(new_ids), tuple(helpers), tuple(h),
                                    len(new_ids) * cluster.alpha, attempt)
            return new_nodes, report
    raise ConstructionError(
        f"{kind}: MDS not restored after {max_attempts} attempts over F_{p}; try a larger field")


def repair_download(cluster: Cluster, t: int, d: int) -> int:
    """Packets each of ``d`` helpers must send to regenerate ``t`` nodes."""
    if d < cluster.k:
        raise ImpossibleRepairError(f"only {d} helpers available, need at least k={cluster.k}")
    beta = core_ms_bound(cluster.B, cluster.k, d, t) / d
    if beta.denominator != 1:
        raise ValueError(f"per-helper download {beta} is not a whole number of packets "
                         f"for t={t}, d={d}, alpha={cluster.alpha}")
    return int(beta)


def concurrent_repair(cluster: Cluster, failed, helpers, seed=0,
                      max_attempts: int = MAX_ATTEMPTS) -> tuple[list[CodedNode], TransferReport]:
    """Regenerate the ``failed`` nodes from ``helpers``.

    Failed ids may still be present in ``cluster`` (their contents are never
    read) or already removed; the replacements take over the same ids.
    """
    failed, helpers = list(failed), list(helpers)
    if not failed:
        raise ValueError("nothing to repair")
    if set(failed) & set(helpers):
        raise ValueError(f"helpers {sorted(set(failed) & set(helpers))} are also failed")
    for i in helpers:
        if i not in cluster.nodes:
            raise ValueError(f"helper {i} is not a live node")
    if len(set(helpers)) != len(helpers):
        raise ValueError("duplicate helper ids")
    beta = repair_download(cluster, len(failed), len(helpers))
    if beta > cluster.alpha:
        raise ValueError(f"helpers would need to send {beta} > alpha={cluster.alpha} packets")
    return _install(cluster, helpers, [beta] * len(helpers), failed, failed, seed,
                    max_attempts, "repair")


def upgrade(cluster: Cluster, s: int, helpers, h, seed=0,
            max_attempts: int = MAX_ATTEMPTS) -> tuple[list[CodedNode], TransferReport]:
    """Grow the code from ``(n, k)`` to ``(n + s, k)``.

    Helper ``helpers[i]`` contributes ``h[i]`` packets.  When
    ``alpha = d_s - k + 1`` the vector must total
    ``s(d_s - s + 1)B / (k(d_s - k + 1))``; otherwise it only has to pass
    the cut condition of :func:`crgc.bounds.is_feasible_download`.
    """
    helpers, h = list(helpers), [int(x) for x in h]
    k, alpha = cluster.k, cluster.alpha
    d_s = len(helpers)
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    if len(h) != d_s:
        raise ValueError(f"h has {len(h)} entries for {d_s} helpers")
    if not k <= d_s <= cluster.n:
        raise ValueError(f"need k <= d_s <= n, got d_s={d_s} (k={k}, n={cluster.n})")
    if len(set(helpers)) != d_s or any(i not in cluster.nodes for i in helpers):
        raise ValueError(f"helpers must be distinct live node ids, got {helpers}")
    if any(not 0 < x <= min(s, alpha) for x in h):
        raise ValueError(f"each h_i must be in (0, {min(s, alpha)}], got {h}")
    if alpha == d_s - k + 1 and s <= k:
        total, _ = min_upgrade_bandwidth(cluster.B, k, d_s, s)
        if sum(h) != total:
            raise ValueError(f"h must sum to {total}, got {sum(h)}")
    if not is_feasible_download(h, alpha, k, s):
        raise ValueError(f"download vector {h} cannot support {s} new nodes with alpha={alpha}")
    first = cluster.next_id()
    new_ids = list(range(first, first + s))
    return _install(cluster, helpers, h, new_ids, [], seed, max_attempts, "upgrade")


def uniform_download(total: int, d: int, cap: int) -> list[int]:
    """Spread ``total`` packets over ``d`` helpers, larger shares first."""
    q, r = divmod(total, d)
    h = [q + 1] * r + [q] * (d - r)
    if h[0] > cap or h[-1] < 1:
        raise ValueError(f"cannot split {total} packets over {d} helpers with cap {cap}")
    return h


def upgrade_helper_count(d_r: int, t: int) -> int:
    """Upgrade helper count sharing ``alpha`` with ``t``-node repair from ``d_r``."""
    return d_r + t - 1


def min_repair_bandwidth(params: CodeParams) -> Fraction:
    return core_ms_bound(params.B, params.k, params.d, params.t)
