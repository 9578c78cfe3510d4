"""Multi-query visual similarity ranking over combined descriptors."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Mapping

import numpy as np

from .errors import EmptyQuerySet, UnknownId
from .features import SEARCH_PROFILE, Descriptor, WeightProfile, combine_all


@dataclass(frozen=True)
class QuerySet:
    """Query image ids plus the candidate scope they rank against.

    Queries need not be inside the scope; they always join the ranking.
    Both id tuples are deduplicated preserving order.
    """

    query_ids: tuple[str, ...]
    scope_ids: tuple[str, ...] = ()
    profile: WeightProfile = SEARCH_PROFILE

    def __post_init__(self):
        deduped = tuple(dict.fromkeys(self.query_ids))
        if not deduped:
            raise EmptyQuerySet("a query set needs at least one image id")
        object.__setattr__(self, "query_ids", deduped)
        object.__setattr__(self, "scope_ids", tuple(dict.fromkeys(self.scope_ids)))


def iterate(
    previous: QuerySet,
    add_ids: Iterable[str] = (),
    remove_ids: Iterable[str] = (),
) -> QuerySet:
    """Edit a query set: append new ids, drop removed ones; scope/profile stay."""
    removed = set(remove_ids)
    ids = [q for q in previous.query_ids if q not in removed]
    for q in add_ids:
        if q not in removed and q not in ids:
            ids.append(q)
    if not ids:
        raise EmptyQuerySet("edit would remove every query image")
    return replace(previous, query_ids=tuple(ids))


def split_resolved(
    queries: QuerySet, descriptors: Mapping[str, Descriptor]
) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Partition query ids into (resolvable, unresolved) against a corpus."""
    resolved = tuple(q for q in queries.query_ids if q in descriptors)
    unresolved = tuple(q for q in queries.query_ids if q not in descriptors)
    return resolved, unresolved


def rank(queries: QuerySet, descriptors: Mapping[str, Descriptor]) -> list[tuple[str, float]]:
    """Rank candidates ascending by their smallest distance to any query.

    Candidates are the scope ids plus the query ids themselves. Ties break
    on id, so the order is a total one independent of input ordering. Every
    involved id must resolve to a descriptor.
    """
    candidate_ids = tuple(dict.fromkeys((*queries.scope_ids, *queries.query_ids)))
    for image_id in candidate_ids:
        if image_id not in descriptors:
            raise UnknownId(image_id)

    matrix = combine_all((descriptors[i] for i in candidate_ids), queries.profile)
    index_of = {image_id: i for i, image_id in enumerate(candidate_ids)}
    per_query = np.stack(
        [
            np.linalg.norm(matrix - matrix[index_of[q]], axis=1)
            for q in queries.query_ids
        ]
    )
    scores = per_query.min(axis=0)
    order = sorted(range(len(candidate_ids)), key=lambda i: (scores[i], candidate_ids[i]))
    return [(candidate_ids[i], float(scores[i])) for i in order]
