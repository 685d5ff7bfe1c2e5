"""Item-based CF: a pre-rated item pool is classified against representative
items by rater agreement, then each user exploits the clusters whose
representative it liked."""

from dataclasses import dataclass
import numpy as np

from .engine import EXPLORE, EXPLOIT


@dataclass
class ItemItemParams:
    horizon: int
    n_users: int
    n_item_types: int
    seed: int = 0
    r: int = None
    ell: int = None
    m_pool: int = None
    c_log: float = 18.0
    c_sqrt: float = 330.0
    c_pool: float = 64.0

    def __post_init__(self):
        T, N, qi = self.horizon, self.n_users, self.n_item_types
        self.epsilon = 1.0 / (2.0 * qi * N)
        if self.r is None:
            self.r = int(np.ceil(2.0 * np.log2(qi / self.epsilon)))
        if self.ell is None:
            raw = self.c_log * np.log2(T) + np.sqrt(self.c_sqrt * qi * self.r * T / N)
            self.ell = max(1, min(int(np.ceil(raw)), qi))
        if self.m_pool is None:
            self.m_pool = int(np.ceil(self.c_pool * qi * T / self.ell))


@dataclass
class Schedule:
    perms: np.ndarray
    rows_needed: int
    redraws: int
    fallback_copies: int


def block_raters(perms, n_users, r, k):
    p = np.arange(k * r, (k + 1) * r)
    return perms[p // n_users, p % n_users]


def build_rater_schedule(n_items, r, n_users, rng, max_rows=None):
    """One permutation row per step; item k takes stream positions
    [k*r, (k+1)*r). A block spanning a row seam must not repeat a user: the
    seam row is re-drawn a bounded number of times, then falls back to reusing
    the previous row (consecutive windows of one permutation are always
    duplicate-free)."""
    total = n_items * r
    rows_needed = -(-total // n_users)
    rows = rows_needed if max_rows is None else min(rows_needed, max_rows)
    perms = np.empty((rows, n_users), dtype=np.int64)
    redraws = 0
    fallback_copies = 0
    for c in range(rows):
        perm = rng.permutation(n_users)
        if c > 0 and r < n_users:
            k0 = (c * n_users) // r
            head_len = (k0 + 1) * r - c * n_users
            if 0 < head_len < r and k0 < n_items:
                tail = set(perms[c - 1, k0 * r - (c - 1) * n_users:].tolist())
                ok = False
                for _ in range(32):
                    if tail.isdisjoint(perm[:head_len].tolist()):
                        ok = True
                        break
                    redraws += 1
                    perm = rng.permutation(n_users)
                if not ok:
                    perm = perms[c - 1].copy()
                    fallback_copies += 1
        perms[c] = perm
    return Schedule(perms, rows_needed, redraws, fallback_copies)


class ItemItem:
    """Three phases: scheduled pool pre-rating, representative clustering,
    then per-user exploitation of liked clusters."""

    def __init__(self, params):
        self.p = params
        self.N = params.n_users
        self.rng = np.random.default_rng(params.seed)
        self.phase = "explore"
        self.reps = []
        self.s1_sets = []
        self.s2_sets = []
        self.pool_exhausted_at = None
        self.t0 = None
        self.seam_redraws = 0
        self.seam_fallbacks = 0
        self.last_labels = None
        self.last_witness = None
        self._pending_rep = None
        self._liked_rows = []
        self._ucols = np.arange(self.N, dtype=np.int64)

    def setup(self, source):
        p = self.p
        M = p.m_pool
        self.pool = source.fresh(2 * M)
        sched = build_rater_schedule(2 * M, p.r, self.N, self.rng, max_rows=p.horizon)
        self.perms = sched.perms
        self.seam_redraws = sched.redraws
        self.seam_fallbacks = sched.fallback_copies
        self.rows_needed = sched.rows_needed
        self.n_explore = min(sched.rows_needed, p.horizon)
        self.cluster_reachable = sched.rows_needed < p.horizon
        self.alive1 = np.ones(M, dtype=bool)
        self.alive2 = np.ones(M, dtype=bool)
        if self.cluster_reachable:
            pos = np.arange(2 * M * p.r, dtype=np.int64)
            self.raters = self.perms[pos // self.N, pos % self.N].reshape(2 * M, p.r).astype(np.int32)
            self.vals = np.zeros((2 * M, p.r), dtype=np.int8)
        else:
            self.raters = None
            self.vals = None

    def step(self, t, view, source):
        p = self.p
        if t <= self.n_explore:
            return self._explore_step(t - 1, source)
        if self.phase == "explore":
            self.phase = "cluster"
        if self.phase == "cluster":
            if len(self.reps) >= p.ell or not self.alive2.any():
                if not self.alive2.any() and len(self.reps) < p.ell:
                    self.pool_exhausted_at = len(self.reps)
                self._build_exploit(t)
                self.phase = "exploit"
            else:
                return self._cluster_step(source)
        return self._exploit_step(source)

    def observe(self, t, values):
        if t <= self.n_explore:
            if self.cluster_reachable:
                idx, slot, row, inpool = self._scatter
                self.vals[idx[inpool], slot[inpool]] = values[row[inpool]]
            return
        if self._pending_rep is not None:
            self._absorb(values)

    def _explore_step(self, c, source):
        p = self.p
        row = self.perms[c]
        pos = c * self.N + self._ucols
        idx = pos // p.r
        slot = pos - idx * p.r
        inpool = idx < len(self.pool)
        by_col = np.where(inpool, self.pool[np.minimum(idx, len(self.pool) - 1)], np.int64(0))
        spare = ~inpool
        n_spare = int(spare.sum())
        if n_spare:
            by_col[spare] = source.fresh(n_spare)
        out = np.empty(self.N, dtype=np.int64)
        out[row] = by_col
        self._scatter = (idx, slot, row, inpool)
        self.last_labels = np.full(self.N, EXPLORE, dtype=np.int8)
        self.last_witness = None
        return out

    def _cluster_step(self, source):
        M = self.p.m_pool
        alive_ids = self.pool[M:][self.alive2]
        rep = int(alive_ids[self.rng.integers(len(alive_ids))])
        rep_idx = int(rep - self.pool[0])
        rr = self.raters[rep_idx]
        items = np.full(self.N, rep, dtype=np.int64)
        items[rr] = source.fresh(len(rr))
        self._pending_rep = (rep, rep_idx, rr)
        self.last_labels = np.full(self.N, EXPLORE, dtype=np.int8)
        self.last_witness = None
        return items

    def _absorb(self, values):
        rep, rep_idx, rr = self._pending_rep
        self._pending_rep = None
        M = self.p.m_pool
        rep_vals = values.astype(np.int8).copy()
        rep_vals[rr] = self.vals[rep_idx]
        for alive, base, sink in ((self.alive1, 0, self.s1_sets), (self.alive2, M, self.s2_sets)):
            rows = np.nonzero(alive)[0]
            if len(rows):
                gidx = rows + base
                agree = (self.vals[gidx] == rep_vals[self.raters[gidx]]).all(axis=1)
                hit = rows[agree]
                sink.append(self.pool[hit + base].copy())
                alive[hit] = False
            else:
                sink.append(np.empty(0, dtype=np.int64))
        self.reps.append(rep)
        self._liked_rows.append(rep_vals > 0)

    def _build_exploit(self, t):
        self.t0 = t - 1
        p = self.p
        M = p.m_pool
        J = len(self.reps)
        liked = (np.stack(self._liked_rows) if J else np.zeros((0, self.N), dtype=bool))
        # who rated which first-pool item during the schedule, grouped by user
        flat_users = self.raters[:M].ravel()
        flat_items = np.repeat(self.pool[:M], p.r)
        order = np.argsort(flat_users, kind="stable")
        su, si = flat_users[order], flat_items[order]
        starts = np.searchsorted(su, np.arange(self.N))
        ends = np.searchsorted(su, np.arange(self.N) + 1)
        vals, wits, offs = [], [], [0]
        for u in range(self.N):
            js = np.nonzero(liked[:, u])[0]
            if len(js):
                cand = np.concatenate([self.s1_sets[j] for j in js])
                wit = np.concatenate([np.full(len(self.s1_sets[j]), j, dtype=np.int32) for j in js])
                keep = ~np.isin(cand, si[starts[u]:ends[u]])
                cand, wit = cand[keep], wit[keep]
                o = np.argsort(cand)
                cand, wit = cand[o], wit[o]
            else:
                cand = np.empty(0, dtype=np.int64)
                wit = np.empty(0, dtype=np.int32)
            vals.append(cand)
            wits.append(wit)
            offs.append(offs[-1] + len(cand))
        self.r_all = np.concatenate(vals)
        self.w_all = np.concatenate(wits)
        self.r_off = np.array(offs[:-1], dtype=np.int64)
        self.r_len = np.diff(offs).astype(np.int64)
        self.cur = np.zeros(self.N, dtype=np.int64)

    def _exploit_step(self, source):
        has = self.cur < self.r_len
        pos = self.r_off + np.where(has, self.cur, 0)
        if self.r_all.size:
            cand = self.r_all[np.minimum(pos, len(self.r_all) - 1)]
            wits = self.w_all[np.minimum(pos, len(self.w_all) - 1)]
        else:
            cand = np.zeros(self.N, dtype=np.int64)
            wits = np.zeros(self.N, dtype=np.int32)
        items = np.where(has, cand, np.int64(0))
        fresh = ~has
        nf = int(fresh.sum())
        if nf:
            items[fresh] = source.fresh(nf)
        self.cur[has] += 1
        self.last_labels = np.where(has, EXPLOIT, EXPLORE).astype(np.int8)
        self.last_witness = np.where(has, wits, np.int32(-1))
        return items


def item_item(params):
    return ItemItem(params)
