"""Directory engine for USSD and offline phone clients."""

from ._ekichabi import (
    Catalog,
    Gateway,
    LogError,
    SnapshotError,
    build_report,
    decode_batch,
    encode_batch,
    normalize_msisdn,
    run_bench,
)

__all__ = [
    "Catalog",
    "Gateway",
    "LogError",
    "SnapshotError",
    "build_report",
    "decode_batch",
    "encode_batch",
    "normalize_msisdn",
    "run_bench",
]
