from joblib import Parallel, delayed
import numpy as np

MAX_WORKERS = 16


def set_max_workers(max_workers):
    global MAX_WORKERS
    if max_workers is None:
        return MAX_WORKERS
    if int(max_workers) < 1:
        raise ValueError(f'The number of workers specified \'{max_workers}\' is not supported.')
    MAX_WORKERS = int(max_workers)
    return MAX_WORKERS


def execute_parallel(list_of_funcs_and_args, verbose=0):
    """
    Runs every (func, args) pair on a thread pool and returns the results in input order.
    """
    list_of_funcs_and_args = list(list_of_funcs_and_args)
    if len(list_of_funcs_and_args) <= 1 or MAX_WORKERS == 1:
        return [func(*args) for func, args in list_of_funcs_and_args]
    parallel = Parallel(
        n_jobs=min(MAX_WORKERS, len(list_of_funcs_and_args)),
        prefer='threads',
        verbose=verbose,
    )
    return parallel(delayed(func)(*args) for func, args in list_of_funcs_and_args)


def evaluate_in_blocks(func, points, block_size):
    """
    Evaluates a vectorized function over fixed-size row blocks of points. Blocks run
    concurrently and are concatenated in block order, so the output never depends on
    scheduling. Functions returning tuples of arrays (or None) are concatenated
    component-wise.
    """
    total = len(points)
    if total <= block_size:
        return func(points)
    starts = range(0, total, block_size)
    results = execute_parallel([
        (func, (points[start:min(start + block_size, total)],)) for start in starts
    ])
    if isinstance(results[0], tuple):
        return tuple(
            None if results[0][i] is None else np.concatenate([r[i] for r in results], axis=0)
            for i in range(len(results[0]))
        )
    return np.concatenate(results, axis=0)
