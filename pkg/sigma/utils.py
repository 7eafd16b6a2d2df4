import os
import sys
import time
import random
import logging
import threading

from multiprocessing.dummy import Pool as ThreadPool

DEFAULT_SEED = 0


def fail(message, code=2):
    logging.fatal(message)
    sys.exit(code)


def make_rng(seed=None):
    """
    Creates the seeded random source used by every randomized path.
    :param seed: Integer seed (None falls back to DEFAULT_SEED so runs stay reproducible)
    :return: A private random.Random instance
    """
    return random.Random(DEFAULT_SEED if seed is None else seed)


def secs_to_hours(secs):
    hours, remainder = divmod(secs, 3600)
    minutes, seconds = divmod(remainder, 60)
    return '%02d:%02d:%02d' % (hours, minutes, seconds)


def log_progress(it, total=None, interval=60.0, step=None, entity='ray', file=sys.stderr):
    """
    Passes through the items of it and writes a progress line every interval seconds
    (or every step items) plus a final one.
    """
    if total is None and hasattr(it, '__len__'):
        total = len(it)
    start = last = time.time()
    done = since_last = 0

    def report(now):
        rate = since_last / max(now - last, 0.001)
        line = ' {} {}s (elapsed: {}, {:.2f} {}s/s'.format(done, entity, secs_to_hours(now - start), rate, entity)
        if total:
            remaining = (total - done) / rate if rate > 0 else 0
            line += ', {:6.2f}% of {}, ETA: {}'.format(done * 100.0 / total, total, secs_to_hours(remaining))
        print(line + ')', file=file, flush=True)

    for obj in it:
        yield obj
        done += 1
        since_last += 1
        now = time.time()
        if (step is not None and since_last >= step) or (step is None and now - last > interval):
            report(now)
            last, since_last = now, 0
    if since_last > 0:
        report(time.time())


class LimitingPool:
    """Thread pool whose map yields results in submission order and keeps at most
    processes * limit_factor items in flight ahead of the consumer."""
    def __init__(self, processes=None, limit_factor=2):
        self.processes = os.cpu_count() if processes is None else processes
        self.pool = ThreadPool(processes=self.processes)
        self.max_ahead = self.processes * limit_factor
        self.slots = threading.BoundedSemaphore(self.max_ahead)

    def __enter__(self):
        return self

    def limit(self, it):
        for obj in it:
            self.slots.acquire()
            yield obj

    def map(self, fun, it):
        for obj in self.pool.imap(fun, self.limit(it)):
            self.slots.release()
            yield obj

    def __exit__(self, exc_type, exc_value, traceback):
        self.pool.close()
