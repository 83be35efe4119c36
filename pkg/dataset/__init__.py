from .tuples import DatasetTuple, Encoding, build_tuple
from .assembler import DatasetSplits, assemble
from .tokens import TokenStats, token_stats
from .storage import read_dataset, write_dataset

__all__ = [
    "DatasetTuple",
    "Encoding",
    "build_tuple",
    "DatasetSplits",
    "assemble",
    "TokenStats",
    "token_stats",
    "read_dataset",
    "write_dataset",
]
