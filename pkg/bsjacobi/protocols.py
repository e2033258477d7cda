#!/usr/bin/env python3
"""
protocols.py

Protocol definitions for the bsjacobi engine.
"""

from typing import Callable, Iterable, Iterator, Protocol, TypeVar

T = TypeVar("T")
U = TypeVar("U")


class GridExecutor(Protocol):
    """Protocol for the executor that evaluates phase-space grids.

    Anything with an order-preserving map (concurrent.futures executors,
    or the builtin-map wrapper in tests) can be injected.
    """

    def map(self, fn: Callable[[T], U], *iterables: Iterable[T]) -> Iterator[U]:
        """Apply fn to every item, yielding results in input order.

        Args:
            fn: Function evaluated per work item
            iterables: Work items

        Returns:
            Iterator[U]: Results in the order of the inputs
        """
        ...
