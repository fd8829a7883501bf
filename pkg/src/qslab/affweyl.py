"""Level-l affine Weyl group: dot-action reflections and alcove reduction.

Everything here is exact integer arithmetic on fundamental-weight
coordinates.  The dot action is w . lam = w(lam + rho) - rho at level
l = level + h; a weight whose rho-shift lands on a reflection wall has
vanishing quantum dimension, which the reducer reports as ``on_wall``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .qnum import LevelContext
from .rootsys import RootSystem, Weight

_REDUCE_GUARD = 1_000_000


@dataclass(frozen=True)
class AffineReduction:
    result_kind: str  # "dominant" | "on_wall"
    dominant_weight: Weight | None
    sign: int
    word_length: int


def si_dot(rs: RootSystem, node: int, weight: Sequence[int]) -> Weight:
    """Dot reflection in the simple root alpha_node (an involution)."""
    if not 1 <= node <= rs.rank:
        raise ValueError(f"node {node} out of range")
    c = weight[node - 1] + 1
    alpha = rs.simple_root_as_weight(node)
    return tuple(w - c * a for w, a in zip(weight, alpha))


def s0_dot(weight: Sequence[int], ctx: LevelContext) -> Weight:
    """Dot action of the affine generator: s_theta(lam+rho) + l*theta - rho."""
    rs = ctx.root_system
    pair = sum(a * (w + 1) for a, w in zip(rs.marks, weight))
    c = ctx.shifted_level - pair
    theta = rs.theta_weight
    return tuple(w + c * t for w, t in zip(weight, theta))


def reflection_dot(rs: RootSystem, root_index: int, weight: Sequence[int]) -> Weight:
    """Dot reflection in an arbitrary positive root (parity -1)."""
    beta_w = rs.root_as_weight(root_index)
    pair = rs.pairing(tuple(w + 1 for w in weight), root_index)
    return tuple(w - pair * b for w, b in zip(weight, beta_w))


def translate_by_root(
    rs: RootSystem, root_index: int, multiple: int, weight: Sequence[int]
) -> Weight:
    """Translation by multiple*beta; commutes with the rho shift (parity +1)."""
    beta_w = rs.root_as_weight(root_index)
    return tuple(w + multiple * b for w, b in zip(weight, beta_w))


def apply_word(word: Iterable[int], weight: Sequence[int], ctx: LevelContext) -> tuple[Weight, int]:
    """Apply a generator word (0 = affine generator) right-to-left.

    Returns the image together with (-1)**len(word), which equals the parity
    of the group element however it is expressed.
    """
    w = tuple(weight)
    letters = list(word)
    for g in reversed(letters):
        w = s0_dot(w, ctx) if g == 0 else si_dot(ctx.root_system, g, w)
    return w, -1 if len(letters) % 2 else 1


def reduce_to_dominant(weight: Sequence[int], ctx: LevelContext) -> AffineReduction:
    """Greedy reduction of a weight into the fundamental alcove.

    Applies the simple reflection at the smallest node whose rho-shifted
    coordinate is negative, or the affine generator when the marks-weighted
    sum exceeds l, until lam+rho lies in the closed alcove.  Landing on a
    wall (a zero coordinate, or sum exactly l) is reported as on_wall.
    """
    rs = ctx.root_system
    l = ctx.shifted_level
    lam = tuple(int(c) for c in weight)
    sign = 1
    steps = 0
    while True:
        shifted = tuple(c + 1 for c in lam)
        if any(c == 0 for c in shifted):
            return AffineReduction("on_wall", None, sign, steps)
        node = next((i + 1 for i, c in enumerate(shifted) if c < 0), None)
        if node is not None:
            lam = si_dot(rs, node, lam)
        else:
            total = sum(a * c for a, c in zip(rs.marks, shifted))
            if total == l:
                return AffineReduction("on_wall", None, sign, steps)
            if total < l:
                return AffineReduction("dominant", lam, sign, steps)
            lam = s0_dot(lam, ctx)
        sign = -sign
        steps += 1
        if steps > _REDUCE_GUARD:
            raise RuntimeError("alcove reduction failed to terminate")


def in_alcove(rs: RootSystem, weight: Sequence[int], level: int) -> bool:
    """Membership in the closed fundamental alcove at the given level."""
    if level < 0:
        raise ValueError("level must be nonnegative")
    return (
        all(c >= 0 for c in weight)
        and sum(a * c for a, c in zip(rs.marks, weight)) <= level
    )


def enumerate_alcove(rs: RootSystem, level: int) -> list[Weight]:
    """All dominant weights in the fundamental alcove (level capped at 12)."""
    if level < 0:
        raise ValueError("level must be nonnegative")
    if level > 12:
        raise ValueError("alcove enumeration is guarded at level 12")
    out: list[Weight] = []

    def rec(prefix: list[int], budget: int, pos: int) -> None:
        if pos == rs.rank:
            out.append(tuple(prefix))
            return
        a = rs.marks[pos]
        for c in range(budget // a + 1):
            prefix.append(c)
            rec(prefix, budget - a * c, pos + 1)
            prefix.pop()

    rec([], level, 0)
    return out
