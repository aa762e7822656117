import logging
import time

logger = logging.getLogger(__name__)


class timer(object):
    """
    with timer('quadrature.build_rule', tags={ 'kind': 'spherical' }):
        function()
    """

    def __init__(self, metric, tags=None, verbose=True):
        self.metric = metric
        self.start = None
        self.tags = tags or {}
        self.verbose = verbose
        self.elapsed_ms = None

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, type, value, traceback):
        self.elapsed_ms = int((time.perf_counter() - self.start) * 1000)
        if self.verbose:
            logger.debug(f'[time] metric: {self.metric}, value: {self.elapsed_ms}ms, tags: {self.tags}')


class VerboseFunctionExec:
    def __init__(self, message, verbose=True):
        self.message = message
        self.verbose = verbose

    def __enter__(self):
        if self.verbose:
            print(f'{self.message}...', end='', flush=True)

    def __exit__(self, exc_type, exc_value, exc_tb):
        if self.verbose:
            if exc_type is None:
                print('DONE')
            else:
                print('FAILED')
