"""Original GFMM online learning: expand, test for overlap, contract.

The overlap test and contraction work on one pair of boxes.  Both are
written as plain scalar code; :func:`overlap_mask` is the vectorised
screen used by the trainers to find candidate pairs quickly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    UNLABELED,
    BoxStore,
    DimensionError,
    Hyperbox,
    ModelParams,
    Pattern,
    TrainedModel,
    stack_patterns,
)
from .membership import memberships

NONE = -1


@dataclass(frozen=True)
class OverlapReport:
    """Smallest overlap width ``delta`` found on dimension ``dim``."""

    delta: float
    dim: int
    case_id: int

    @property
    def overlaps(self) -> bool:
        return self.dim != NONE


NO_OVERLAP = OverlapReport(0.0, NONE, 0)


def expandable(b: Hyperbox, x: Pattern, theta: float) -> bool:
    """True if covering ``x`` keeps every edge of ``b`` within ``theta``."""
    if b.v.size != x.lower.size:
        raise DimensionError("box and pattern dimensionality differ")
    span = np.maximum(b.w, x.upper) - np.minimum(b.v, x.lower)
    return bool(np.all(span <= theta))


def expand(b: Hyperbox, x: Pattern) -> Hyperbox:
    """Return ``b`` grown to cover ``x``, with one more absorbed sample."""
    label = x.label if b.label == UNLABELED and x.label != UNLABELED else b.label
    return Hyperbox(
        np.minimum(b.v, x.lower),
        np.maximum(b.w, x.upper),
        label,
        b.cardinality + 1,
    )


def _dim_case(vi, wi, vk, wk) -> tuple[int, float]:
    # (case id, overlap width) on one dimension, (0, 0.0) when they do not overlap
    if not (
        max(vi, vk) < min(wi, wk)
        or (vk == wk and vi < vk < wi)
        or (vi == wi and vk < vi < wk)
    ):
        return 0, 0.0
    if vi < vk < wi < wk:
        return 1, wi - vk
    if vk < vi < wk < wi:
        return 2, wk - vi
    if vi <= vk and wk <= wi:
        return 3, min(wk - vi, wi - vk)
    return 4, min(wi - vk, wk - vi)


def overlap_test(bi: Hyperbox, bk: Hyperbox) -> OverlapReport:
    """Locate the dimension of minimal overlap between two boxes.

    Per dimension the intervals overlap when their intersection has positive
    width, or when one is a single point strictly inside the other.  Boxes
    that only touch do not overlap.  The overlap is classified as

    1. ``vi < vk < wi < wk``  (i sticks out below k)
    2. ``vk < vi < wk < wi``  (k sticks out below i)
    3. ``vi <= vk, wk <= wi`` (k inside i)
    4. ``vk <= vi, wi <= wk`` (i inside k)

    Returns :data:`NO_OVERLAP` as soon as some dimension does not overlap.
    Otherwise ``dim`` is the last dimension on which the running minimum
    width strictly decreased (the first dimension attaining the minimum).
    """
    if bi.v.size != bk.v.size:
        raise DimensionError("boxes differ in dimensionality")
    return _overlap_test(bi.v, bi.w, bk.v, bk.w)


def _overlap_test(vi, wi, vk, wk) -> OverlapReport:
    delta_old = 1.0
    dim, case_id = NONE, 0
    for j in range(vi.size):
        case, width = _dim_case(vi[j], wi[j], vk[j], wk[j])
        if case == 0:
            return NO_OVERLAP
        delta_new = min(width, delta_old)
        if delta_new < delta_old:
            dim, case_id, delta_old = j, case, delta_new
    if dim == NONE:
        return NO_OVERLAP
    return OverlapReport(float(delta_old), dim, case_id)


def overlap_mask(v, w, V, W) -> np.ndarray:
    """Which boxes (rows of ``V``/``W``) overlap the box ``[v, w]``.

    Same geometry as :func:`overlap_test`.
    """
    if V.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    dim_hit = (
        (np.maximum(v, V) < np.minimum(w, W))
        | ((V == W) & (v < V) & (V < w))
        | ((v == w) & (V < v) & (v < W))
    )
    return dim_hit.all(axis=1)


def contract(bi: Hyperbox, bk: Hyperbox, report: OverlapReport) -> tuple[Hyperbox, Hyperbox]:
    """Shrink the pair on ``report.dim`` so they no longer overlap there."""
    if report.dim == NONE:
        raise ValueError("contract called without an overlapping dimension")
    bi, bk = bi.copy(), bk.copy()
    _contract_inplace(bi.v, bi.w, bk.v, bk.w, report.dim, report.case_id)
    return bi, bk


def _contract_inplace(vi, wi, vk, wk, d: int, case_id: int) -> None:
    if case_id == 1:
        vk[d] = wi[d] = (wi[d] + vk[d]) / 2
    elif case_id == 2:
        vi[d] = wk[d] = (wk[d] + vi[d]) / 2
    elif case_id == 3:
        if wk[d] - vi[d] < wi[d] - vk[d]:
            vi[d] = wk[d]
        else:
            wi[d] = vk[d]
    elif case_id == 4:
        if wk[d] - vi[d] < wi[d] - vk[d]:
            wk[d] = vi[d]
        else:
            vk[d] = wi[d]
    else:
        raise ValueError(f"unknown overlap case {case_id}")


# -- shared training machinery ---------------------------------------------


def count_sample(store: BoxStore, i: int) -> None:
    """Credit one training sample to box ``i``.

    Used for expansion and for absorption of a fully contained pattern alike,
    so cardinalities always sum to the number of processed patterns.
    """
    store.counts[i] += 1


def candidate_order(store: BoxStore, lo, hi, label: int, gamma) -> tuple[np.ndarray, np.ndarray]:
    """Candidate box indexes sorted by descending membership, and those memberships.

    Candidates share the pattern's label or are unlabelled; an unlabelled
    pattern may join any box.  Equal memberships keep creation order.
    """
    labels = store.labels
    if label == UNLABELED:
        cand = np.arange(store.size)
    else:
        cand = np.flatnonzero((labels == label) | (labels == UNLABELED))
    if cand.size == 0:
        return cand, np.empty(0)
    mem = memberships(lo, hi, store.V[cand], store.W[cand], gamma)
    order = np.argsort(-mem, kind="stable")
    return cand[order], mem[order]


def rival_mask(store: BoxStore, i: int, label: int) -> np.ndarray:
    """Boxes an (expanded) box ``i`` carrying ``label`` must not overlap."""
    labels = store.labels
    if label == UNLABELED:
        mask = np.ones(store.size, dtype=bool)
    else:
        mask = (labels != label) & (labels != UNLABELED)
    mask[i] = False
    return mask


def adopted_label(box_label: int, pattern_label: int) -> int:
    if box_label == UNLABELED and pattern_label != UNLABELED:
        return pattern_label
    return box_label


def check_ordering(store: BoxStore) -> None:
    if np.any(store.V > store.W):
        bad = np.flatnonzero((store.V > store.W).any(axis=1))
        raise AssertionError(f"boxes {bad.tolist()} have min > max")


def validate_training_data(data: Sequence[Pattern], params: ModelParams):
    lo, hi, y = stack_patterns(data)
    if lo.shape[1] != params.gamma.size:
        raise DimensionError(
            f"patterns have {lo.shape[1]} features but gamma has {params.gamma.size}"
        )
    return lo, hi, y


# -- trainer -----------------------------------------------------------------

# contraction always strictly shrinks an interval; this is only a backstop
_MAX_CONTRACTIONS = 10_000


def online_step(store: BoxStore, lo, hi, label: int, params: ModelParams, trace=None) -> None:
    """Present one pattern to the original online learner."""
    if store.size == 0:
        i = store.append(lo, hi, label)
        if trace is not None:
            trace.append(("create", i, lo.copy(), hi.copy(), label))
        return

    cand, mem = candidate_order(store, lo, hi, label, params.gamma)
    if cand.size and mem[0] == 1.0:
        count_sample(store, cand[0])
        if trace is not None:
            trace.append(("absorb", int(cand[0])))
        return

    if cand.size:
        span = np.maximum(store.W[cand], hi) - np.minimum(store.V[cand], lo)
        fits = np.flatnonzero((span <= params.theta).all(axis=1))
    else:
        fits = cand
    if fits.size == 0:
        i = store.append(lo, hi, label)
        if trace is not None:
            trace.append(("create", i, lo.copy(), hi.copy(), label))
        return

    i = int(cand[fits[0]])
    V, W, labels = store.V, store.W, store.labels
    np.minimum(V[i], lo, out=V[i])
    np.maximum(W[i], hi, out=W[i])
    labels[i] = adopted_label(int(labels[i]), label)
    count_sample(store, i)
    if trace is not None:
        trace.append(("expand", i, V[i].copy(), W[i].copy(), int(labels[i])))

    rivals = np.flatnonzero(rival_mask(store, i, int(labels[i])))
    for _ in range(_MAX_CONTRACTIONS):
        hit = overlap_mask(V[i], W[i], V[rivals], W[rivals])
        if not hit.any():
            return
        k = int(rivals[np.argmax(hit)])
        report = _overlap_test(V[i], W[i], V[k], W[k])
        _contract_inplace(V[i], W[i], V[k], W[k], report.dim, report.case_id)
        if trace is not None:
            trace.append(("contract", i, k, report.dim, report.case_id))
    raise RuntimeError("contraction did not converge")


def train_online(
    data: Sequence[Pattern],
    params: ModelParams,
    *,
    scaler=None,
    trace: list | None = None,
    debug: bool = False,
) -> TrainedModel:
    """Single pass of the original GFMM online learning algorithm.

    ``data`` must already lie in the unit cube.  When ``trace`` is a list,
    every create/absorb/expand/contract event is appended to it.
    """
    lo, hi, y = validate_training_data(data, params)
    store = BoxStore(lo.shape[1])
    for t in range(lo.shape[0]):
        online_step(store, lo[t], hi[t], int(y[t]), params, trace)
        if debug:
            check_ordering(store)
    catalog = {int(c) for c in y if c != UNLABELED}
    return TrainedModel.from_store(store, params, scaler, catalog)
