import functools


class cache:  # noqa
    """Memoize a pure function on its positional arguments.

    The table is dropped wholesale once it holds ``maxsize`` entries.
    Unhashable arguments bypass the table.
    """

    def __init__(self, maxsize=8192):
        self.cache = {}
        self.maxsize = maxsize
        self.hits = 0
        self.misses = 0

    def __call__(self, func):
        @functools.wraps(func)
        def _memoized(*args):
            try:
                value = self.cache[args]
                self.hits += 1
                return value

            except KeyError:
                value = func(*args)
                if len(self.cache) >= self.maxsize:
                    self.cache.clear()
                self.cache[args] = value
                self.misses += 1
                return value

            except TypeError:
                return func(*args)

        _memoized.cache = self
        return _memoized
