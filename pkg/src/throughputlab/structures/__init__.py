from .mcs import MCSLock, MCSNode
from .treiber import EMPTY, TreiberStack
from .skiplist import FatNodeSkipListSet

__all__ = ["MCSLock", "MCSNode", "EMPTY", "TreiberStack", "FatNodeSkipListSet"]
