"""User-based CF: broadcast exploration, partition users by rating agreement,
then share liked discoveries within each group. The noisy variant thresholds
pairwise agreement and demands a clean clique structure before trusting it."""

from dataclasses import dataclass
import numpy as np

from .engine import EXPLORE, EXPLOIT


def phase1_length(n_users, n_user_types):
    # ceil(2 log2(qU^2 / eps)) with eps = 1/N
    return int(np.ceil(2.0 * np.log2(float(n_user_types) ** 2 * n_users)))


def noisy_phase1_length(n_users, gamma):
    # ceil(4/(1-2g)^2 log2(N^2 / (2 eps))) with eps = 1/N
    return int(np.ceil(4.0 / (1.0 - 2.0 * gamma) ** 2 * np.log2(float(n_users) ** 3 / 2.0)))


@dataclass
class UserUserParams:
    horizon: int
    n_users: int
    n_user_types: int
    seed: int = 0
    r: int = None

    def __post_init__(self):
        self.epsilon = 1.0 / self.n_users
        if self.r is None:
            self.r = phase1_length(self.n_users, self.n_user_types)


@dataclass
class NoisyPartitionParams:
    gamma: float
    lambda_: float
    r: int
    epsilon: float

    @classmethod
    def for_run(cls, gamma, n_users, r=None):
        lam = (2.0 / 3.0) * (1.0 - 2.0 * gamma) ** 2
        if r is None:
            r = noisy_phase1_length(n_users, gamma)
        return cls(gamma=gamma, lambda_=lam, r=r, epsilon=1.0 / n_users)


@dataclass
class UserPartition:
    labels: np.ndarray
    groups: list

    @property
    def n_groups(self):
        return len(self.groups)


def partition_by_equality(vectors):
    """Fewest groups such that each group agrees on every column: exact
    equality classes, labeled in first-seen order."""
    v = np.ascontiguousarray(np.asarray(vectors, dtype=np.int8))
    seen = {}
    labels = np.empty(v.shape[0], dtype=np.int64)
    for u in range(v.shape[0]):
        labels[u] = seen.setdefault(v[u].tobytes(), len(seen))
    groups = [np.nonzero(labels == k)[0] for k in range(len(seen))]
    return UserPartition(labels, groups)


def clique_partition_check(adj):
    """Component partition iff the graph is a disjoint union of cliques,
    else None."""
    a = np.asarray(adj, dtype=bool)
    n = a.shape[0]
    labels = np.full(n, -1, dtype=np.int64)
    nlab = 0
    for s in range(n):
        if labels[s] >= 0:
            continue
        comp = a[s].copy()
        comp[s] = True
        while True:
            grown = comp | a[comp].any(axis=0)
            if (grown == comp).all():
                break
            comp = grown
        idx = np.nonzero(comp)[0]
        k = len(idx)
        if k > 1 and int(a[np.ix_(idx, idx)].sum()) != k * (k - 1):
            return None
        labels[idx] = nlab
        nlab += 1
    groups = [np.nonzero(labels == g)[0] for g in range(nlab)]
    return UserPartition(labels, groups)


def same_partition(labels_a, labels_b):
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if a.shape != b.shape:
        return False

    def canon(x):
        m = {}
        return np.array([m.setdefault(v, len(m)) for v in x.tolist()], dtype=np.int64)

    return bool((canon(a) == canon(b)).all())


class UserUser:
    """Phase 1: r broadcast items. Phase 2: exploit the group queue, else explore
    fresh; liked explorations feed the queue."""

    def __init__(self, params):
        self.p = params
        self.N = params.n_users
        self.r = params.r
        self._votes = np.empty((self.N, self.r), dtype=np.int8)
        self._uids = np.arange(self.N, dtype=np.int64)
        self.partition = None
        self.flag_excess_groups = False
        self.last_labels = None
        self._last_items = None
        self._explore_mask = None

    def step(self, t, view, source):
        if t <= self.r:
            i = source.fresh_one()
            self.last_labels = np.full(self.N, EXPLORE, dtype=np.int8)
            self._explore_mask = None
            self._last_items = np.full(self.N, i, dtype=np.int64)
            return self._last_items
        return self._exploit_step(source)

    def observe(self, t, values):
        if t <= self.r:
            self._votes[:, t - 1] = values
            if t == self.r:
                self._build_groups()
            return
        if self._explore_mask is None:
            return
        liked = self._explore_mask & (values > 0)
        if liked.any():
            lens = self._len
            lu = np.nonzero(liked)[0]
            ks = self.partition.labels[lu]
            order = np.argsort(ks, kind="stable")
            lu, ks = lu[order], ks[order]
            uniq, counts = np.unique(ks, return_counts=True)
            while (lens[uniq] + counts).max() > self._buf.shape[1]:
                self._grow()
            # rank of each entry within its group's run
            runpos = np.arange(len(ks)) - np.repeat(np.cumsum(counts) - counts, counts)
            pos = lens[ks] + runpos
            self._buf[ks, pos] = self._last_items[lu]
            self._owner[ks, pos] = lu
            lens[uniq] += counts

    def _partition_votes(self):
        return partition_by_equality(self._votes)

    def _build_groups(self):
        part = self._partition_votes()
        self.partition = part
        self.flag_excess_groups = part.n_groups > self.p.n_user_types
        cap = 64
        self._buf = np.zeros((part.n_groups, cap), dtype=np.int64)
        self._owner = np.full((part.n_groups, cap), -1, dtype=np.int64)
        self._len = np.zeros(part.n_groups, dtype=np.int64)
        self._cur = np.zeros(self.N, dtype=np.int64)

    def _grow(self):
        cap = self._buf.shape[1]
        nb = np.zeros((self._buf.shape[0], cap * 2), dtype=np.int64)
        nb[:, :cap] = self._buf
        no = np.full((self._buf.shape[0], cap * 2), -1, dtype=np.int64)
        no[:, :cap] = self._owner
        self._buf, self._owner = nb, no
        return nb, no

    def _exploit_step(self, source):
        g = self.partition.labels
        cur = self._cur
        while True:
            has = cur < self._len[g]
            pos = np.where(has, cur, 0)
            own = has & (self._owner[g, pos] == self._uids)
            if not own.any():
                break
            cur[own] += 1
        items = np.where(has, self._buf[g, pos], np.int64(0))
        fresh_mask = ~has
        n_fresh = int(fresh_mask.sum())
        if n_fresh:
            items[fresh_mask] = source.fresh(n_fresh)
        cur[has] += 1
        self.last_labels = np.where(has, EXPLOIT, EXPLORE).astype(np.int8)
        self._explore_mask = fresh_mask
        self._last_items = items
        return items


class NoisyUserUser(UserUser):
    def __init__(self, params, noisy):
        params.r = noisy.r
        super().__init__(params)
        self.noisy = noisy
        self.partition_clean = None

    def _partition_votes(self):
        v = self._votes.astype(np.float32)
        agree = v @ v.T >= self.noisy.lambda_ * self.r
        np.fill_diagonal(agree, False)
        part = clique_partition_check(agree)
        self.partition_clean = part is not None
        if part is None:
            labels = np.zeros(self.N, dtype=np.int64)
            part = UserPartition(labels, [self._uids.copy()])
        return part


def user_user(params):
    return UserUser(params)


def noisy_user_user(params, noisy):
    return NoisyUserUser(params, noisy)
