import concurrent.futures
import logging

from tqdm import tqdm

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_SIZE = 4096


def split_range(nbr_items, chunk_size=DEFAULT_CHUNK_SIZE):
    """
    Split range(nbr_items) into consecutive sub-ranges.

    :param int nbr_items: Number of items to sweep
    :param int chunk_size: Maximum items per chunk
    :return list chunks: List of range objects covering range(nbr_items)
    """
    assert chunk_size > 0, "Chunk size must be positive, not {}".format(
        chunk_size,
    )
    return [range(start, min(start + chunk_size, nbr_items))
            for start in range(0, nbr_items, chunk_size)]


def first_failure(check, nbr_items, nbr_workers=None,
                  chunk_size=DEFAULT_CHUNK_SIZE):
    """
    Find the least position in range(nbr_items) where check fails.
    Chunks are checked concurrently; since executor.map returns results in
    submission order, the first chunk reporting a failure holds the
    least witness regardless of scheduling.

    :param callable check: Takes a position, returns True if it passes
    :param int nbr_items: Number of positions
    :param int/None nbr_workers: Thread pool size
    :param int chunk_size: Positions per task
    :return int/None position: Least failing position, None if all pass
    """
    def first_in_chunk(chunk):
        for position in chunk:
            if not check(position):
                return position
        return None

    chunks = split_range(nbr_items, chunk_size)
    if len(chunks) <= 1:
        return first_in_chunk(range(nbr_items))
    with concurrent.futures.ThreadPoolExecutor(nbr_workers) as executor:
        pool_result = executor.map(first_in_chunk, chunks)
    for position in pool_result:
        if position is not None:
            return position
    return None


def count_passing(check, nbr_items, nbr_workers=None,
                  chunk_size=DEFAULT_CHUNK_SIZE, progress=False, desc=None):
    """
    Count positions in range(nbr_items) where check passes.

    :param callable check: Takes a position, returns bool
    :param int nbr_items: Number of positions
    :param int/None nbr_workers: Thread pool size
    :param int chunk_size: Positions per task
    :param bool progress: Show a progress bar over chunks
    :param str desc: Progress bar label
    :return int count: Number of passing positions
    """
    def count_chunk(chunk):
        return sum(1 for position in chunk if check(position))

    chunks = split_range(nbr_items, chunk_size)
    logger.debug("Sweeping %d positions in %d chunks", nbr_items, len(chunks))
    with concurrent.futures.ThreadPoolExecutor(nbr_workers) as executor:
        pool_result = executor.map(count_chunk, chunks)
        counts = list(tqdm(pool_result,
                           total=len(chunks),
                           desc=desc,
                           disable=not progress))
    return sum(counts)
