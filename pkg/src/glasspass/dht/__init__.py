from glasspass.dht.nodeid import NodeId, bucket_index, node_id_from_nonce, xor_distance
from glasspass.dht.routing import BUCKET_COUNT, Contact, RoutingTable
from glasspass.dht.network import (
    DEFAULT_ALPHA,
    DEFAULT_K,
    LookupResult,
    Network,
    SimConfig,
)

__all__ = [
    "BUCKET_COUNT",
    "Contact",
    "DEFAULT_ALPHA",
    "DEFAULT_K",
    "LookupResult",
    "Network",
    "NodeId",
    "RoutingTable",
    "SimConfig",
    "bucket_index",
    "node_id_from_nonce",
    "xor_distance",
]
