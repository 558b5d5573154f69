"""Shared builders and independent oracles for the test suite.

Everything here deliberately avoids the library's own computation paths:
channels and designs are built with plain numpy, and the oracles
(direct-sum conditional MI, GF(2) rank) use different algorithms than the
code under test.
"""

from __future__ import annotations

import math

import numpy as np

from nncbound.infocalc import CodingDistribution, JointDistribution
from nncbound.netmodel import DmNetwork, NodeSet


def rand_channel(rng: np.random.Generator, x_sizes, y_sizes) -> np.ndarray:
    """Random strictly-positive channel tensor, normalized over all output
    axes jointly (one row per input combination)."""
    shape = tuple(x_sizes) + tuple(y_sizes)
    a = rng.random(shape) + 0.05
    y_axes = tuple(range(len(x_sizes), len(shape)))
    return a / a.sum(axis=y_axes, keepdims=True)


def rand_dm_network(rng, x_sizes, y_sizes, dests) -> DmNetwork:
    x_sizes = tuple(x_sizes)
    y_sizes = tuple(y_sizes)
    return DmNetwork(x_sizes, y_sizes, rand_channel(rng, x_sizes, y_sizes), dests)


def rand_rows(rng: np.random.Generator, shape) -> np.ndarray:
    """Random stochastic array: the last axis sums to 1."""
    a = rng.random(shape) + 0.05
    return a / a.sum(axis=-1, keepdims=True)


def rand_design(
    rng, net: DmNetwork, nq: int = 1, yhat_sizes=None
) -> CodingDistribution:
    """Random plain code design for ``net``."""
    if yhat_sizes is None:
        yhat_sizes = net.y_sizes
    q = rand_rows(rng, (nq,)) if nq > 1 else np.ones(1)
    inputs = tuple(rand_rows(rng, (nq, sz)) for sz in net.x_sizes)
    comps = tuple(
        rand_rows(rng, (nq, yk, xk, yh))
        for xk, yk, yh in zip(net.x_sizes, net.y_sizes, yhat_sizes)
    )
    return CodingDistribution(q, inputs, comps)


def dests_tuple(n: int, *node_lists) -> tuple[NodeSet, ...]:
    """Destination sets from per-node lists: dests_tuple(3, [3], [], [])."""
    assert len(node_lists) == n
    return tuple(NodeSet.from_nodes(n, nodes) for nodes in node_lists)


def cmi_oracle(joint: JointDistribution, a, b, c=()) -> float:
    """I(A;B|C) by direct summation of p log p(abc)p(c)/(p(ac)p(bc)).

    Independent of the four-entropy identity used by the library.
    """
    labs = list(joint.labels)
    probs = joint.probs

    def marg(groups):
        keep = sorted(labs.index(l) for grp in groups for l in grp)
        drop = tuple(i for i in range(probs.ndim) if i not in keep)
        return probs.sum(axis=drop), keep

    pabc, k_abc = marg([a, b, c])
    pac, k_ac = marg([a, c])
    pbc, k_bc = marg([b, c])
    pc, k_c = marg([c])
    total = 0.0
    for idx in np.ndindex(*pabc.shape):
        p = float(pabc[idx])
        if p <= 0.0:
            continue
        pos = dict(zip(k_abc, idx))
        num = p * (float(pc[tuple(pos[i] for i in k_c)]) if k_c else 1.0)
        den = float(pac[tuple(pos[i] for i in k_ac)]) * float(
            pbc[tuple(pos[i] for i in k_bc)]
        )
        total += p * math.log2(num / den)
    return total


def entropy_oracle(joint: JointDistribution, labels) -> float:
    """Plain -sum p log2 p over the marginal, skipping zeros explicitly."""
    keep = sorted(joint.axis(l) for l in labels)
    drop = tuple(i for i in range(joint.probs.ndim) if i not in keep)
    m = joint.probs.sum(axis=drop).ravel()
    m = m[m > 0]
    return float(-(m * np.log2(m)).sum())


def gf2_rank(matrix: np.ndarray) -> int:
    """Rank over GF(2) by Gaussian elimination on bit rows."""
    m = (np.asarray(matrix) % 2).astype(np.int64)
    rows = [int("".join(str(b) for b in row), 2) if row.size else 0 for row in m]
    rank = 0
    for col in range(m.shape[1] - 1, -1, -1) if m.size else []:
        bit = 1 << col
        pivot = next((i for i in range(rank, len(rows)) if rows[i] & bit), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i] & bit:
                rows[i] ^= rows[rank]
        rank += 1
    return rank


def h2(p: float) -> float:
    """Binary entropy in bits."""
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)
