"""Restriction of an automaton to a subgroup containing its memory set, and
induction back up.  Both operations relabel the memory through the subgroup's
embed/recognize maps and keep the blocks untouched, so they are exact inverses
of each other on normalized rules.  Induction is only defined along the
certified-injective embeddings produced by ``subgroup_generated``."""

from __future__ import annotations

from .ca import CAError, LinearCA
from .groups import Subgroup


class TransferError(CAError):
    """Memory not inside the subgroup, or mismatched groups."""


def restrict(automaton: LinearCA, subgroup: Subgroup) -> LinearCA:
    """The same local rule viewed over the subgroup.

    Every memory element must be recognized by the subgroup; blocks are
    reused unchanged."""
    if subgroup.parent != automaton.group:
        raise TransferError("subgroup does not belong to the automaton's group")
    new_memory = []
    for m in automaton.memory:
        h = subgroup.recognize(m)
        if h is None:
            raise TransferError(f"memory element {m!r} is outside the subgroup")
        new_memory.append(h)
    return LinearCA(
        subgroup.group, automaton.p, automaton.dim_v, new_memory, automaton.blocks
    )


def induce(automaton: LinearCA, subgroup: Subgroup) -> LinearCA:
    """The same local rule viewed over the ambient group, memory embedded."""
    if subgroup.group != automaton.group:
        raise TransferError("automaton is not defined over the subgroup")
    new_memory = [subgroup.embed(m) for m in automaton.memory]
    return LinearCA(
        subgroup.parent, automaton.p, automaton.dim_v, new_memory, automaton.blocks
    )
