"""Fixed-size chunking of resources into storable blocks."""

from __future__ import annotations

from glasspass.errors import InvalidArgument

# 256 KiB, the conventional block size for content-addressed storage.
DEFAULT_BLOCK_SIZE = 256 * 1024


def chunk(resource: bytes, block_size: int = DEFAULT_BLOCK_SIZE) -> list[bytes]:
    """Split a resource into consecutive blocks of at most block_size bytes.

    The concatenation of the returned chunks is the input; every chunk
    except possibly the last has exactly block_size bytes. An empty
    resource yields an empty list.
    """
    if block_size <= 0:
        raise InvalidArgument(f"block_size must be positive, got {block_size}")
    return [resource[i : i + block_size] for i in range(0, len(resource), block_size)]
