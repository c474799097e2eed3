"""
Group index registry
Swappable measures of how fragmented an effective graph is, keyed by name
"""
from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence


@dataclass(frozen=True)
class GroupIndex:
    """
    A graph fragmentation measure computed from component sizes

    Registered indices must not decrease when edges are added to a graph;
    the solver's energy-saving tie-break and the case table rely on it.
    """
    name: str
    from_sizes: Callable[[int, Sequence[int]], float]
    description: str = ""

    def __call__(self, n: int, sizes: Sequence[int]) -> float:
        return self.from_sizes(n, sizes)


def agent_group_index_from_sizes(n: int, sizes: Sequence[int]) -> int:
    """Sum of squared group sizes minus n squared (0 iff connected)"""
    return int(sum(s * s for s in sizes) - n * n)


# Registry of available indices
_index_registry: Dict[str, GroupIndex] = {}


def register_index(index: GroupIndex):
    """Register a group index"""
    _index_registry[index.name] = index


def get_index(name: str) -> GroupIndex:
    """
    Get a group index by name

    Raises:
        KeyError: If no index is registered under that name
    """
    try:
        return _index_registry[name]
    except KeyError:
        raise KeyError(
            f"Unknown group index '{name}'. Available: {', '.join(get_available_indices())}"
        ) from None


def get_available_indices() -> List[str]:
    """Get list of registered index names"""
    return sorted(_index_registry.keys())


DEFAULT_INDEX = "agent_group"

register_index(GroupIndex(
    name=DEFAULT_INDEX,
    from_sizes=agent_group_index_from_sizes,
    description="sum of squared group sizes minus the squared agent count"
))
