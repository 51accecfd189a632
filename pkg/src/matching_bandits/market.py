"""Ground-truth market model: preference profiles, matchings, stability.

Players and arms are identified by dense integer indices (players in
``[0, n_players)``, arms in ``[0, n_arms)``).  Mean rewards are strict on
both sides; generated profiles use rank-valued means (most preferred arm
has mean ``n_arms``, least preferred has mean 1, gap 1 between
consecutive ranks), so being matched always beats being unmatched
(reward 0).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Sequence

import numpy as np

# Size guard for exhaustive stable-matching enumeration (factorial blowup).
ENUMERATION_LIMIT = 6


@dataclass(frozen=True)
class PreferenceProfile:
    """True mean rewards for both market sides.

    ``player_means[i][j]`` is player i's mean reward for arm j;
    ``arm_means[j][i]`` is arm j's mean reward for player i.  Rows must
    have pairwise-distinct entries (strict preferences) and there must be
    at least as many arms as players.
    """

    player_means: np.ndarray
    arm_means: np.ndarray

    def __post_init__(self) -> None:
        pm = np.asarray(self.player_means, dtype=float)
        am = np.asarray(self.arm_means, dtype=float)
        if pm.ndim != 2 or am.ndim != 2:
            raise ValueError("mean matrices must be 2-dimensional")
        n, k = pm.shape
        if am.shape != (k, n):
            raise ValueError(
                f"arm_means shape {am.shape} does not match player_means {pm.shape}"
            )
        if n < 1 or n > k:
            raise ValueError(f"need 1 <= n_players <= n_arms, got N={n}, K={k}")
        for name, mat in (("player_means", pm), ("arm_means", am)):
            for r, row in enumerate(mat):
                if len(set(row.tolist())) != len(row):
                    raise ValueError(f"{name} row {r} has tied entries")
        pm.setflags(write=False)
        am.setflags(write=False)
        object.__setattr__(self, "player_means", pm)
        object.__setattr__(self, "arm_means", am)

    @property
    def n_players(self) -> int:
        return self.player_means.shape[0]

    @property
    def n_arms(self) -> int:
        return self.player_means.shape[1]

    def to_json_dict(self) -> dict:
        """Row-major JSON document (golden tests and replay)."""
        return {
            "n_players": self.n_players,
            "n_arms": self.n_arms,
            "player_means": [float(x) for x in self.player_means.ravel()],
            "arm_means": [float(x) for x in self.arm_means.ravel()],
        }

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "PreferenceProfile":
        n, k = int(doc["n_players"]), int(doc["n_arms"])
        pm = np.asarray(doc["player_means"], dtype=float).reshape(n, k)
        am = np.asarray(doc["arm_means"], dtype=float).reshape(k, n)
        return cls(pm, am)

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json(cls, text: str) -> "PreferenceProfile":
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class Matching:
    """Assignment of players to arms; unmatched players are simply absent.

    No arm may be assigned to two players.
    """

    assignment: Mapping[int, int]

    def __post_init__(self) -> None:
        arms = list(self.assignment.values())
        if len(set(arms)) != len(arms):
            raise ValueError("matching assigns one arm to multiple players")
        object.__setattr__(self, "assignment", dict(self.assignment))

    def arm_of(self, player: int) -> Optional[int]:
        return self.assignment.get(player)

    def arm_holders(self) -> dict[int, int]:
        """Inverse view: matched arm -> holding player."""
        return {a: p for p, a in self.assignment.items()}

    def as_pairs(self) -> tuple[tuple[int, int], ...]:
        """Canonical hashable form, sorted by player."""
        return tuple(sorted(self.assignment.items()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matching):
            return NotImplemented
        return dict(self.assignment) == dict(other.assignment)

    def __hash__(self) -> int:
        return hash(self.as_pairs())


@dataclass(frozen=True)
class Conflict:
    """One contested arm in a round: two or more requesters, one winner."""

    arm: int
    requesters: tuple[int, ...]
    winner: int


@dataclass(frozen=True)
class RoundOutcome:
    """Published result of one round.

    ``attempts`` records every player's attempted arm; ``matching`` the
    accepted pulls.  Rejected or non-attempting agents have reward
    exactly 0.
    """

    round: int
    attempts: Mapping[int, int]
    matching: Matching
    conflicts: tuple[Conflict, ...]
    player_rewards: Mapping[int, float]
    arm_rewards: Mapping[int, float]


def _check_id(idx: int, size: int, what: str) -> None:
    if not 0 <= idx < size:
        raise ValueError(f"{what} index {idx} out of range [0, {size})")


def prefers(
    profile: PreferenceProfile,
    side: str,
    self_id: int,
    a: int,
    b: Optional[int],
) -> bool:
    """True iff agent ``self_id`` on ``side`` strictly prefers partner a over b.

    ``b = None`` stands for being unmatched, which every agent ranks last
    (all generated means are >= 1, unmatched reward is 0).
    """
    if side == "player":
        means = profile.player_means
        n_self, n_other = profile.n_players, profile.n_arms
    elif side == "arm":
        means = profile.arm_means
        n_self, n_other = profile.n_arms, profile.n_players
    else:
        raise ValueError(f"side must be 'player' or 'arm', got {side!r}")
    _check_id(self_id, n_self, "self")
    _check_id(a, n_other, "partner")
    if b is None:
        return True
    _check_id(b, n_other, "partner")
    return bool(means[self_id, a] > means[self_id, b])


def gale_shapley(profile: PreferenceProfile, proposers: str = "players") -> Matching:
    """Deferred acceptance with the given proposing side.

    Returns the proposer-optimal stable matching.  With arms proposing
    this is the player-pessimal stable matching, the regret baseline.
    All players end up matched (N <= K and matched-beats-unmatched).
    """
    if proposers == "players":
        prop_means, recv_means = profile.player_means, profile.arm_means
    elif proposers == "arms":
        prop_means, recv_means = profile.arm_means, profile.player_means
    else:
        raise ValueError(f"proposers must be 'players' or 'arms', got {proposers!r}")

    n_prop = prop_means.shape[0]
    # Each proposer walks its preference list from best to worst.
    pref_order = [list(np.argsort(-prop_means[p])) for p in range(n_prop)]
    next_choice = [0] * n_prop
    held: dict[int, int] = {}  # receiver -> proposer
    free = list(range(n_prop - 1, -1, -1))

    while free:
        p = free.pop()
        if next_choice[p] >= len(pref_order[p]):
            continue  # exhausted list; stays unmatched
        r = int(pref_order[p][next_choice[p]])
        next_choice[p] += 1
        incumbent = held.get(r)
        if incumbent is None:
            held[r] = p
        elif recv_means[r, p] > recv_means[r, incumbent]:
            held[r] = p
            free.append(incumbent)
        else:
            free.append(p)

    if proposers == "players":
        return Matching({p: r for r, p in held.items()})
    return Matching({r: p for r, p in held.items()})


def blocking_pairs(profile: PreferenceProfile, m: Matching) -> list[tuple[int, int]]:
    """All (player, arm) pairs that would jointly deviate from ``m``.

    Unmatched counts as the worst partner on both sides; the returned
    list is empty exactly when ``m`` is stable.
    """
    holders = m.arm_holders()
    pairs = []
    pm, am = profile.player_means, profile.arm_means
    for p in range(profile.n_players):
        current = m.arm_of(p)
        for a in range(profile.n_arms):
            if a == current:
                continue
            if current is not None and pm[p, a] <= pm[p, current]:
                continue
            holder = holders.get(a)
            if holder is not None and am[a, p] <= am[a, holder]:
                continue
            pairs.append((p, a))
    return pairs


def max_player_regret(
    profile: PreferenceProfile,
    m: Matching,
    pessimal: Optional[Matching] = None,
) -> float:
    """Worst shortfall of true mean reward relative to the player-pessimal match.

    Negative when every player does at least as well under ``m`` as in the
    pessimal stable matching.  ``pessimal`` may be passed in to avoid
    recomputing it (it depends only on the profile).
    """
    if pessimal is None:
        pessimal = gale_shapley(profile, proposers="arms")
    pm = profile.player_means
    worst = -float("inf")
    for p in range(profile.n_players):
        baseline = float(pm[p, pessimal.arm_of(p)])
        a = m.arm_of(p)
        current = float(pm[p, a]) if a is not None else 0.0
        worst = max(worst, baseline - current)
    return worst


def enumerate_stable_matchings(profile: PreferenceProfile) -> list[Matching]:
    """Brute-force oracle: all stable matchings of a small instance.

    Only matchings covering every player are considered; with N <= K any
    stable matching must match all players (an unmatched player and an
    unmatched or worse-off arm would block).  Guarded to N <= 6.
    """
    n, k = profile.n_players, profile.n_arms
    if n > ENUMERATION_LIMIT:
        raise ValueError(f"enumeration limited to N <= {ENUMERATION_LIMIT}, got N={n}")
    stable = []
    for arms in itertools.permutations(range(k), n):
        m = Matching(dict(enumerate(arms)))
        if not blocking_pairs(profile, m):
            stable.append(m)
    return stable
