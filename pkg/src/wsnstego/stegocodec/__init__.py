"""F5, nsF5 and LSB-replacement embedders with their extractors."""

from .codes import (
    HammingCode,
    Unsolvable,
    WetPaperSystem,
    f5_lsb,
    hamming_embed,
    wet_paper_solve,
)
from .common import (
    CapacityExceeded,
    EmbeddingFailed,
    EmbedReport,
    attack_map,
    bits_from_bytes,
    bytes_from_bits,
)
from .f5 import f5_embed, f5_embed_auto, f5_extract
from .lsb import lsb_extract, lsb_replace_embed
from .nsf5 import nsf5_capacity, nsf5_embed, nsf5_extract

__all__ = [
    "CapacityExceeded",
    "EmbedReport",
    "EmbeddingFailed",
    "HammingCode",
    "Unsolvable",
    "WetPaperSystem",
    "attack_map",
    "bits_from_bytes",
    "bytes_from_bits",
    "f5_embed",
    "f5_embed_auto",
    "f5_extract",
    "f5_lsb",
    "hamming_embed",
    "lsb_extract",
    "lsb_replace_embed",
    "nsf5_capacity",
    "nsf5_embed",
    "nsf5_extract",
    "wet_paper_solve",
]
