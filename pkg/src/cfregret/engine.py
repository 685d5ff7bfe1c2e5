"""Online loop: one recommendation per user per step, feedback at step end,
an item reaches a given user at most once per trial."""

from dataclasses import dataclass
import numpy as np

EXPLORE, EXPLOIT, UNKNOWN = 0, 1, -1


class RepeatRecommendation(Exception):
    def __init__(self, user, item, t):
        super().__init__(f"item {item} re-recommended to user {user} at step {t}")
        self.user = user
        self.item = item
        self.t = t


class ItemSource:
    """Mints never-before-issued item ids; the only model access recommenders get."""

    def __init__(self, model):
        self._model = model

    def fresh(self, n):
        return self._model.fresh_block(n)

    def fresh_one(self):
        return self._model.fresh_item()


class History:
    def __init__(self, n_users):
        self.n_users = n_users
        self.items = []
        self.values = []
        self.t = 0

    def append(self, items, values):
        self.items.append(items)
        self.values.append(values)
        self.t += 1


class HistoryView:
    """Read-only queries over the visible history. Recommenders keep their own
    running state; these scans serve verifiers and tests."""

    def __init__(self, hist):
        self._h = hist

    @property
    def t(self):
        return self._h.t

    @property
    def n_users(self):
        return self._h.n_users

    def user_history(self, u):
        h = self._h
        its = np.array([s[u] for s in h.items], dtype=np.int64)
        vals = np.array([s[u] for s in h.values], dtype=np.int8)
        return its, vals

    def rated(self, u):
        return set(int(s[u]) for s in self._h.items)

    def raters(self, i):
        out = set()
        for s in self._h.items:
            for u in np.nonzero(s == i)[0]:
                out.add(int(u))
        return out

    def step_row(self, t):
        return self._h.items[t - 1], self._h.values[t - 1]


@dataclass
class TrialResult:
    horizon: int
    n_users: int
    disliked: np.ndarray
    explored: np.ndarray
    exploited: np.ndarray
    disliked_exploit: np.ndarray
    history: History
    recommender: object

    def cum_regret(self):
        # per-user cumulative dislike count, Monte Carlo integrand of the regret curve
        return np.cumsum(self.disliked) / self.n_users


def run_trial(model, recommender, horizon):
    N = model.params.n_users
    hist = History(N)
    view = HistoryView(hist)
    src = ItemSource(model)
    setup = getattr(recommender, "setup", None)
    if setup is not None:
        setup(src)
    uids = np.arange(N, dtype=np.int64)
    # per-user bitmap over item ids: exact at-most-once check, grown on demand
    width = 1 << 14
    seen = np.zeros((N, width), dtype=np.uint8)
    disliked = np.zeros(horizon, dtype=np.int32)
    explored = np.zeros(horizon, dtype=np.int32)
    exploited = np.zeros(horizon, dtype=np.int32)
    dis_exploit = np.zeros(horizon, dtype=np.int32)
    for t in range(1, horizon + 1):
        items = np.asarray(recommender.step(t, view, src), dtype=np.int64)
        if items.shape != (N,):
            raise ValueError(f"recommender returned shape {items.shape}, wanted ({N},)")
        if (items < 1).any():
            raise ValueError("item ids must be positive")
        byte = items >> 3
        top = int(byte.max())
        if top >= width:
            while width <= top:
                width *= 2
            if N * width > 2_000_000_000:
                raise ValueError("item id too large for at-most-once tracking")
            grown = np.zeros((N, width), dtype=np.uint8)
            grown[:, :seen.shape[1]] = seen
            seen = grown
        bit = (np.uint8(1) << (items & 7).astype(np.uint8))
        prior = seen[uids, byte] & bit
        if prior.any():
            u = int(np.nonzero(prior)[0][0])
            raise RepeatRecommendation(u, int(items[u]), t)
        seen[uids, byte] |= bit
        vals = model.rate_many(items)
        hist.append(items, vals)
        neg = vals < 0
        disliked[t - 1] = int(neg.sum())
        lab = getattr(recommender, "last_labels", None)
        if lab is not None:
            xp = lab == EXPLOIT
            explored[t - 1] = int((lab == EXPLORE).sum())
            exploited[t - 1] = int(xp.sum())
            dis_exploit[t - 1] = int((neg & xp).sum())
        recommender.observe(t, vals)
    return TrialResult(horizon, N, disliked, explored, exploited, dis_exploit, hist, recommender)
