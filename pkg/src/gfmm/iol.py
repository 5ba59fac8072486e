"""Improved online learning (IOL-GFMM): overlap prevention instead of contraction.

A candidate box is expanded only when its grown extent overlaps no box of
another class.  Boxes are never shrunk.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .core import UNLABELED, BoxStore, Hyperbox, ModelParams, Pattern, TrainedModel
from .onln import (
    adopted_label,
    candidate_order,
    check_ordering,
    count_sample,
    overlap_mask,
    rival_mask,
    validate_training_data,
)


def would_overlap(v_t, w_t, others: Sequence[Hyperbox]) -> bool:
    """True if the tentative box ``[v_t, w_t]`` overlaps any box in ``others``."""
    if not others:
        return False
    V = np.stack([b.v for b in others])
    W = np.stack([b.w for b in others])
    return bool(overlap_mask(np.asarray(v_t, float), np.asarray(w_t, float), V, W).any())


def iol_step(store: BoxStore, lo, hi, label: int, params: ModelParams, trace=None) -> None:
    """Present one pattern to the improved online learner."""
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

    V, W, labels = store.V, store.W, store.labels
    if cand.size:
        vt_all = np.minimum(V[cand], lo)
        wt_all = np.maximum(W[cand], hi)
        fits = np.flatnonzero(((wt_all - vt_all) <= params.theta).all(axis=1))
    else:
        fits = cand

    # a labelled box's rivals depend only on its label, never on the box itself
    rivals_by_label = {}
    for pos in fits:
        i = int(cand[pos])
        new_label = adopted_label(int(labels[i]), label)
        if new_label == UNLABELED:
            rivals = rival_mask(store, i, new_label)
        else:
            rivals = rivals_by_label.get(new_label)
            if rivals is None:
                rivals = rivals_by_label[new_label] = rival_mask(store, i, new_label)
        vt, wt = vt_all[pos], wt_all[pos]
        if overlap_mask(vt, wt, V[rivals], W[rivals]).any():
            continue
        V[i] = vt
        W[i] = wt
        labels[i] = new_label
        count_sample(store, i)
        if trace is not None:
            trace.append(("expand", i, vt.copy(), wt.copy(), new_label))
        return

    # hyperbox-shaped inputs may overlap rivals here; they are added unchecked
    i = store.append(lo, hi, label)
    if trace is not None:
        trace.append(("create", i, lo.copy(), hi.copy(), label))


def train_iol(
    data: Sequence[Pattern],
    params: ModelParams,
    *,
    scaler=None,
    trace: list | None = None,
    debug: bool = False,
) -> TrainedModel:
    """Single pass of the improved online learning algorithm.

    ``data`` must already lie in the unit cube.  With ``trace`` given, the
    create/absorb/expand events are appended so training can be replayed.
    """
    lo, hi, y = validate_training_data(data, params)
    store = BoxStore(lo.shape[1])
    for t in range(lo.shape[0]):
        iol_step(store, lo[t], hi[t], int(y[t]), params, trace)
        if debug:
            check_ordering(store)
    catalog = {int(c) for c in y if c != UNLABELED}
    return TrainedModel.from_store(store, params, scaler, catalog)
