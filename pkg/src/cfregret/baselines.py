"""Reference recommenders: uniform random and latent-state omniscient."""

import numpy as np


class RandomRecommender:
    """Fresh items every step. A never-issued item is a uniform type draw, so
    this is the random baseline over an unbounded catalog."""

    def __init__(self, n_users, seed=0):
        self.n = n_users
        self.last_labels = None

    def step(self, t, view, source):
        return source.fresh(self.n)

    def observe(self, t, values):
        pass


class OmniscientRecommender:
    """Reads latent types through the oracle view and only serves liked items.
    Draw budget per user per step is capped; a user whose type likes nothing
    gets the last fresh draw anyway (counted in .fallbacks)."""

    def __init__(self, n_users, oracle, max_rounds=None):
        self.n = n_users
        self.oracle = oracle
        self.max_rounds = max_rounds if max_rounds is not None else oracle.n_item_types
        self.fallbacks = 0
        self.last_labels = None

    def step(self, t, view, source):
        out = np.empty(self.n, dtype=np.int64)
        need = np.arange(self.n, dtype=np.int64)
        for _ in range(self.max_rounds):
            cand = source.fresh(len(need))
            ok = self.oracle.likes(need, cand)
            out[need] = cand
            need = need[~ok]
            if len(need) == 0:
                break
        else:
            self.fallbacks += len(need)
        return out

    def observe(self, t, values):
        pass
