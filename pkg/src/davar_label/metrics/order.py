"""Kendall tau-a between two reading orders."""

from __future__ import annotations

from typing import Sequence

from ..errors import LengthMismatch, NotAPermutation


def _check_ranks(order: Sequence[int], name: str) -> None:
    if any(isinstance(v, bool) or not isinstance(v, int) for v in order):
        raise NotAPermutation(f"{name} must contain integers")
    if len(set(order)) != len(order):
        raise NotAPermutation(f"{name} has repeated ranks")


def _count_inversions(seq: list[int]) -> int:
    if len(seq) < 2:
        return 0
    mid = len(seq) // 2
    left, right = seq[:mid], seq[mid:]
    inv = _count_inversions(left) + _count_inversions(right)
    left.sort()
    right.sort()
    j = 0
    for x in left:
        while j < len(right) and right[j] < x:
            j += 1
        inv += j
    return inv


def reading_order_tau(pred_order: Sequence[int], gt_order: Sequence[int]) -> float:
    """Tau-a over all instance pairs, computed by inversion counting.

    Orders are per-instance ranks (distinct integers). Fewer than two
    instances give 1.0.
    """
    if len(pred_order) != len(gt_order):
        raise LengthMismatch(f"orders have lengths {len(pred_order)} and {len(gt_order)}")
    _check_ranks(pred_order, "pred_order")
    _check_ranks(gt_order, "gt_order")
    n = len(gt_order)
    if n < 2:
        return 1.0
    by_gt = sorted(range(n), key=lambda i: gt_order[i])
    discordant = _count_inversions([pred_order[i] for i in by_gt])
    pairs = n * (n - 1) // 2
    return (pairs - 2 * discordant) / pairs
