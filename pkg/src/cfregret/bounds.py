"""Closed-form regret envelopes. All logs are base 2; values are evaluated on
an integer step grid and clamped at zero, with the unclamped series kept as a
side channel. Flags carry hypothesis and vacuity diagnostics without altering
the numbers."""

from dataclasses import dataclass, field
import numpy as np

USER_UPPER = "UserUpper"
USER_UPPER_NOISY = "UserUpperNoisy"
USER_LOWER = "UserLower"
ITEM_UPPER = "ItemUpper"
ITEM_LOWER = "ItemLower"

DEFAULT_DELTA = 0.01


@dataclass
class BoundCurve:
    kind: str
    ts: np.ndarray
    values: np.ndarray
    raw: np.ndarray
    flags: dict = field(default_factory=dict)

    def column_name(self):
        return "bound_" + self.kind


def _grid(ts):
    if np.isscalar(ts):
        return np.arange(1, int(ts) + 1, dtype=np.int64)
    ts = np.asarray(ts, dtype=np.int64)
    if ts.ndim != 1 or len(ts) == 0 or (ts < 1).any():
        raise ValueError("step grid must be a nonempty array of steps >= 1")
    return ts


def _curve(kind, ts, raw, flags):
    raw = np.asarray(raw, dtype=np.float64)
    return BoundCurve(kind, ts, np.maximum(raw, 0.0), raw, flags)


def user_upper(ts, n_users, n_user_types, n_item_types=None):
    ts = _grid(ts)
    n, qu = n_users, n_user_types
    r = int(np.ceil(2.0 * np.log2(n * qu * qu)))
    slope = (2.0 * qu + 2.0) / n
    t = ts.astype(np.float64)
    raw = np.where(ts <= r, t / 2.0, r / 2.0 + slope * t + 2.0)
    flags = {"r": r, "slope": slope, "vacuous": bool(slope >= 0.5)}
    if n_item_types is not None:
        flags["hypothesis_ok"] = bool(n_item_types > 18 * r)
    return _curve(USER_UPPER, ts, raw, flags)


def user_upper_noisy(ts, n_users, n_user_types, gamma, n_item_types=None):
    ts = _grid(ts)
    n, qu = n_users, n_user_types
    r = int(np.ceil(12.0 / (1.0 - 2.0 * gamma) ** 2 * np.log2(n)))
    slope = (5.0 * qu + 2.0) / n + gamma
    t = ts.astype(np.float64)
    raw = np.where(ts <= r, t / 2.0, r / 2.0 + slope * t + 5.0)
    flags = {"r": r, "slope": slope, "vacuous": bool(slope >= 0.5)}
    if n_item_types is not None:
        flags["hypothesis_ok"] = bool(n_item_types > 432.0 * np.log2(n))
    return _curve(USER_UPPER_NOISY, ts, raw, flags)


def user_lower(ts, n_users, n_user_types, delta=DEFAULT_DELTA):
    ts = _grid(ts)
    n, qu = n_users, n_user_types
    lg_qu = np.log2(qu) if qu > 1 else 0.0
    r_user = None
    if qu > 1:
        r_user = int(np.floor(np.log2(qu) - np.log2(16.0 * lg_qu * np.log2(n / delta))))
    t = ts.astype(np.float64)
    steady = (1.0 - np.exp(-n / qu)) * (qu / (2.0 * n)) * t
    raw = steady.copy()
    branch1_active = r_user is not None and r_user >= 1
    if branch1_active:
        early = (0.5 - delta) * t - 4.0
        raw = np.where(ts <= r_user, np.maximum(early, steady), steady)
    flags = {"r_user": r_user, "branch1_active": bool(branch1_active), "delta": delta}
    return _curve(USER_LOWER, ts, raw, flags)


def item_upper(ts, n_users, n_item_types, n_user_types=None):
    ts = _grid(ts)
    n, qi = n_users, n_item_types
    r = int(np.ceil(2.0 * np.log2(2.0 * n * qi * qi)))
    t = ts.astype(np.float64)
    y = 4.0 + np.maximum.reduce([
        52.0 * np.log2(t),
        48.0 * np.sqrt(qi * r * t / n),
        270.0 * (r / n) * t,
    ])
    raw = np.minimum(y, t / 2.0)
    flags = {"r": r, "hypothesis_items_ok": bool(qi > 13.0 * np.log2(n))}
    if n_user_types is not None:
        flags["hypothesis_users_ok"] = bool(n_user_types > 4 * r)
    return _curve(ITEM_UPPER, ts, raw, flags)


def item_lower_regimes(n_users, n_item_types):
    """Boundaries of the phase function, left-closed right-open intervals."""
    n, qi = n_users, n_item_types
    b1 = 2.0 * np.sqrt(qi) / (3.0 * n)
    b2 = 4.0 * qi * np.log2(qi) / n if qi > 1 else b1
    b3 = 16.0 * qi * np.log2(qi) ** 2 / n if qi > 1 else b1
    return float(b1), float(b2), float(b3)


def item_lower_phase(ts, n_users, n_item_types):
    ts = _grid(ts)
    n, qi = n_users, n_item_types
    t = ts.astype(np.float64)
    b1, b2, b3 = item_lower_regimes(n, qi)
    if qi <= 1:
        return np.where(t < b1, t / 2.0, 0.0)
    lg = np.log2(qi)
    with np.errstate(divide="ignore", invalid="ignore"):
        shaved = (t / (5.0 * lg)) * (np.log2(8.0 * qi * lg) - np.log2(n * t))
    return np.select(
        [t < b1, t < b2, t < b3],
        [t / 2.0, shaved, t / (8.0 * lg)],
        default=0.5 * np.sqrt(t * qi / n),
    )


def item_lower(ts, n_users, n_item_types):
    ts = _grid(ts)
    n, qi = n_users, n_item_types
    t = ts.astype(np.float64)
    eta = 1.0 / np.log2(n)
    lglg = np.log2(np.log2(n))
    r_item = int(np.floor(0.8 * np.log2(qi) - 4.0 * lglg)) if qi > 1 else 0
    z = item_lower_phase(ts, n, qi)
    core = np.maximum.reduce([np.ones_like(t), z / 2.0, (r_item / n) * t])
    raw = ((1.0 - 3.0 * eta) / 2.0) * core - t / n
    flags = {
        "eta": float(eta),
        "r_item": r_item,
        "size_ok": bool(n > 32),
        "boundaries": item_lower_regimes(n, qi),
    }
    return _curve(ITEM_LOWER, ts, raw, flags)


def evaluate_bound(kind, ts, n_users, n_user_types=None, n_item_types=None,
                   gamma=0.0, delta=DEFAULT_DELTA):
    if kind == USER_UPPER:
        return user_upper(ts, n_users, n_user_types, n_item_types)
    if kind == USER_UPPER_NOISY:
        return user_upper_noisy(ts, n_users, n_user_types, gamma, n_item_types)
    if kind == USER_LOWER:
        return user_lower(ts, n_users, n_user_types, delta)
    if kind == ITEM_UPPER:
        return item_upper(ts, n_users, n_item_types, n_user_types)
    if kind == ITEM_LOWER:
        return item_lower(ts, n_users, n_item_types)
    raise ValueError(f"unknown bound kind: {kind!r}")


BOUND_KINDS = (USER_UPPER, USER_UPPER_NOISY, USER_LOWER, ITEM_UPPER, ITEM_LOWER)
