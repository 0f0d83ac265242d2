"""Privacy-preserving vaccine passport platform.

Desk-scale implementation of a passport registry combining a
content-addressed block store, a simulated Kademlia DHT, an append-only
contract ledger with gas accounting, and a GDPR compliance engine with
consent verification and right-to-be-forgotten auditing.
"""

__version__ = "0.1.0"
