from glasspass.ledger.encoding import canonical_json
from glasspass.ledger.gas import GasSchedule, ether_cost
from glasspass.ledger.contracts import (
    AccessContract,
    AccessLogEntry,
    ConsentVote,
    Contract,
    CONTRACT_KINDS,
    ErasureRecord,
    LogContract,
    LogEntry,
    OPERATIONS,
    PolicyContract,
    PurposeRecord,
    VerificationContract,
)
from glasspass.ledger.chain import (
    GENESIS_PREV_HASH,
    Ledger,
    LedgerBlock,
    Transaction,
    block_hash_of,
)

__all__ = [
    "AccessContract",
    "AccessLogEntry",
    "CONTRACT_KINDS",
    "ConsentVote",
    "Contract",
    "ErasureRecord",
    "GENESIS_PREV_HASH",
    "GasSchedule",
    "Ledger",
    "LedgerBlock",
    "LogContract",
    "LogEntry",
    "OPERATIONS",
    "PolicyContract",
    "PurposeRecord",
    "Transaction",
    "VerificationContract",
    "block_hash_of",
    "canonical_json",
    "ether_cost",
]
