"""Latent preference world: user types, item types, sign matrix, noisy feedback."""

import warnings
from dataclasses import dataclass

import numpy as np

GENERIC = "Generic"
USER_STRUCTURE = "UserStructureOnly"
ITEM_STRUCTURE = "ItemStructureOnly"
MODES = (GENERIC, USER_STRUCTURE, ITEM_STRUCTURE)

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GOLD = np.uint64(0x9E3779B97F4A7C15)
_TAG_ITEM = 0x69746D7479706573
_TAG_Z = 0x7A666C6970736565


def _mix64(x):
    # splitmix64 finalizer; operates on uint64 arrays, wraps mod 2**64
    x = np.asarray(x, dtype=np.uint64).copy()
    x ^= x >> np.uint64(30)
    x *= _M1
    x ^= x >> np.uint64(27)
    x *= _M2
    x ^= x >> np.uint64(31)
    return x


@dataclass
class ModelParams:
    n_users: int
    n_user_types: int = None
    n_item_types: int = None
    noise: float = 0.0
    mode: str = GENERIC
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.n_users < 1:
            raise ValueError("n_users must be >= 1")
        if not (0.0 <= self.noise < 0.5):
            raise ValueError("noise must lie in [0, 1/2)")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.mode == USER_STRUCTURE:
            if self.n_user_types is None:
                raise ValueError("UserStructureOnly requires n_user_types")
            full = 2 ** self.n_user_types
            if self.n_item_types is None:
                self.n_item_types = full
            elif self.n_item_types != full:
                raise ValueError("UserStructureOnly forces n_item_types = 2**n_user_types")
        elif self.mode == ITEM_STRUCTURE:
            if self.n_user_types is None:
                self.n_user_types = self.n_users
            elif self.n_user_types != self.n_users:
                raise ValueError("ItemStructureOnly forces n_user_types = n_users")
            if self.n_item_types is None:
                raise ValueError("ItemStructureOnly requires n_item_types")
        else:
            if self.n_user_types is None or self.n_item_types is None:
                raise ValueError("Generic mode requires n_user_types and n_item_types")
        if self.n_user_types < 1 or self.n_item_types < 1:
            raise ValueError("type counts must be >= 1")


@dataclass
class Feedback:
    value: int
    noisy_flip: bool


class PreferenceModel:
    """Serves like/dislike feedback for (user, item) pairs.

    User types are drawn at construction. Item types and noise flips are pure
    hashes of (seed, id), so an item's type is assigned once and every repeat
    query agrees; the catalog is unbounded. Draw order at construction (sign
    matrix, then user types) is pinned: replaying a seed replays the world.
    """

    def __init__(self, params):
        p = params
        self.params = p
        if p.mode == GENERIC and p.n_user_types > p.n_users:
            warnings.warn("n_user_types exceeds n_users; some types go unused")
        rng = np.random.default_rng(p.seed)
        if p.mode == USER_STRUCTURE:
            self._xi = None
            self.user_types = rng.integers(0, p.n_user_types, p.n_users, dtype=np.int64)
        elif p.mode == ITEM_STRUCTURE:
            self._xi = (rng.integers(0, 2, (p.n_user_types, p.n_item_types), dtype=np.int8) * 2 - 1)
            self.user_types = np.arange(p.n_users, dtype=np.int64)
        else:
            self._xi = (rng.integers(0, 2, (p.n_user_types, p.n_item_types), dtype=np.int8) * 2 - 1)
            self.user_types = rng.integers(0, p.n_user_types, p.n_users, dtype=np.int64)
        seed = np.uint64(p.seed)
        self._k_item = _mix64(seed ^ np.uint64(_TAG_ITEM))
        self._k_z = _mix64(seed ^ np.uint64(_TAG_Z))
        self._type_scale = p.n_item_types / 2.0 ** 53
        self._noise_thresh = p.noise * 2.0 ** 53
        self._all_users = np.arange(p.n_users, dtype=np.int64)
        self._next_item = 1

    def item_types(self, items):
        h = _mix64(np.asarray(items, dtype=np.int64).astype(np.uint64) + self._k_item)
        return ((h >> np.uint64(11)).astype(np.float64) * self._type_scale).astype(np.int64)

    def _z_flips(self, users, items):
        hu = _mix64(np.asarray(users, dtype=np.int64).astype(np.uint64) + self._k_z)
        h = _mix64(hu ^ (np.asarray(items, dtype=np.int64).astype(np.uint64) * _GOLD))
        return (h >> np.uint64(11)).astype(np.float64) < self._noise_thresh

    def _xi_values(self, user_types, item_types):
        if self._xi is None:
            # type index t encodes the preference pattern: bit k of t is type-k's vote
            return (((item_types >> user_types) & 1) * 2 - 1).astype(np.int8)
        return self._xi[user_types, item_types]

    def rate_many(self, items, users=None):
        uu = self._all_users if users is None else np.asarray(users, dtype=np.int64)
        it = np.asarray(items, dtype=np.int64)
        vals = self._xi_values(self.user_types[uu], self.item_types(it))
        if self.params.noise > 0.0:
            vals = np.where(self._z_flips(uu, it), -vals, vals).astype(np.int8)
        return vals

    def rate(self, user, item):
        u = np.asarray([user])
        i = np.asarray([item])
        base = int(self._xi_values(self.user_types[u], self.item_types(i))[0])
        flip = bool(self._z_flips(u, i)[0]) if self.params.noise > 0.0 else False
        return Feedback(value=-base if flip else base, noisy_flip=flip)

    def fresh_item(self):
        i = self._next_item
        self._next_item += 1
        return i

    def fresh_block(self, n):
        out = np.arange(self._next_item, self._next_item + n, dtype=np.int64)
        self._next_item += n
        return out


class OracleView:
    """Read access to latent state, for baselines and verifiers only."""

    def __init__(self, model):
        self._m = model

    @property
    def n_item_types(self):
        return self._m.params.n_item_types

    @property
    def user_types(self):
        return self._m.user_types

    def user_type(self, u):
        return int(self._m.user_types[u])

    def item_types(self, items):
        return self._m.item_types(items)

    def likes(self, users, items):
        # noiseless preference, xi == +1
        m = self._m
        ut = m.user_types[np.asarray(users, dtype=np.int64)]
        return m._xi_values(ut, m.item_types(items)) > 0

    def xi_matrix(self):
        m = self._m
        if m._xi is not None:
            return m._xi
        q = m.params.n_user_types
        if q > 20:
            raise ValueError("pattern matrix too large to materialize")
        cols = np.arange(2 ** q, dtype=np.int64)
        return ((((cols[None, :] >> np.arange(q, dtype=np.int64)[:, None]) & 1) * 2 - 1).astype(np.int8))


def new_model(params):
    return PreferenceModel(params)


def oracle_view(model):
    return OracleView(model)
