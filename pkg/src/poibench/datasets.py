"""Check-in dataset loading, validation, statistics and user grouping.

A dataset lives in ``<dataDirectory>/<Name>/`` as plain text files:

    <Name>_data_size.txt         "userCount poiCount"
    <Name>_train.txt             "userId poiId frequency [unixTimestamp]"
    <Name>_test.txt              same layout
    <Name>_tune.txt              same layout
    <Name>_social_relations.txt  "userId1 userId2"          (optional)
    <Name>_poi_coos.txt          "poiId latitude longitude"
    <Name>_poi_categories.txt    "poiId categoryId"          (optional)

Ids are zero-based integers, columns separated by spaces or tabs.
"""

import os
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .errors import (
    ConfigurationError,
    DatasetIncompleteError,
    DatasetParseError,
    DatasetValidationError,
)


class CheckInMatrix:
    """Sparse user x POI visit-frequency matrix for one split.

    Entries are kept in file order so that check-in sequences can fall back
    to line order when no timestamp column is present.
    """

    def __init__(self, n_users, n_pois, user_ids, poi_ids, freqs, timestamps=None):
        self.n_users = int(n_users)
        self.n_pois = int(n_pois)
        self.user_ids = np.asarray(user_ids, dtype=np.int64)
        self.poi_ids = np.asarray(poi_ids, dtype=np.int64)
        self.freqs = np.asarray(freqs, dtype=np.int64)
        self.timestamps = None if timestamps is None else np.asarray(timestamps, dtype=np.int64)
        self._csr = None
        self._csr_binary = None
        self._sequences = None
        self._validate()

    def _validate(self):
        if self.user_ids.size:
            if self.user_ids.min() < 0 or self.user_ids.max() >= self.n_users:
                raise DatasetValidationError(
                    f"user id out of range [0, {self.n_users}): "
                    f"found {self.user_ids.min()}..{self.user_ids.max()}"
                )
            if self.poi_ids.min() < 0 or self.poi_ids.max() >= self.n_pois:
                raise DatasetValidationError(
                    f"poi id out of range [0, {self.n_pois}): "
                    f"found {self.poi_ids.min()}..{self.poi_ids.max()}"
                )
            if self.freqs.min() < 1:
                raise DatasetValidationError("check-in frequencies must be >= 1")
            keys = self.user_ids * self.n_pois + self.poi_ids
            if np.unique(keys).size != keys.size:
                raise DatasetValidationError("duplicate (user, poi) entry")

    @property
    def entry_count(self):
        return int(self.user_ids.size)

    @property
    def density(self):
        cells = self.n_users * self.n_pois
        return self.entry_count / cells if cells else 0.0

    def entries(self):
        """Dict (user, poi) -> frequency. For tests and round-tripping."""
        return {
            (int(u), int(p)): int(f)
            for u, p, f in zip(self.user_ids, self.poi_ids, self.freqs)
        }

    def to_csr(self):
        if self._csr is None:
            self._csr = sparse.csr_matrix(
                (self.freqs.astype(np.float64), (self.user_ids, self.poi_ids)),
                shape=(self.n_users, self.n_pois),
            )
        return self._csr

    def to_csr_binary(self):
        if self._csr_binary is None:
            m = self.to_csr().copy()
            m.data = np.ones_like(m.data)
            self._csr_binary = m
        return self._csr_binary

    def user_pois(self, user):
        """POI ids visited by ``user`` (unordered, ascending)."""
        m = self.to_csr()
        return m.indices[m.indptr[user]:m.indptr[user + 1]].astype(np.int64)

    def user_sequence(self, user):
        """POIs of ``user`` ordered by timestamp (or line order), ties by poi id."""
        if self._sequences is None:
            order = (
                self.timestamps
                if self.timestamps is not None
                else np.arange(self.user_ids.size, dtype=np.int64)
            )
            seqs = {}
            idx = np.lexsort((self.poi_ids, order, self.user_ids))
            for i in idx:
                seqs.setdefault(int(self.user_ids[i]), []).append(int(self.poi_ids[i]))
            self._sequences = {u: np.asarray(s, dtype=np.int64) for u, s in seqs.items()}
        return self._sequences.get(user, np.empty(0, dtype=np.int64))


class SocialGraph:
    """Undirected friendship graph over user ids."""

    def __init__(self, n_users, edges):
        self.n_users = int(n_users)
        norm = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise DatasetValidationError(f"self-loop on user {u}")
            if not (0 <= u < self.n_users and 0 <= v < self.n_users):
                raise DatasetValidationError(f"social edge ({u}, {v}) out of user range")
            norm.add((min(u, v), max(u, v)))
        self.edges = frozenset(norm)
        adj = {}
        for u, v in self.edges:
            adj.setdefault(u, []).append(v)
            adj.setdefault(v, []).append(u)
        self._adj = {u: np.asarray(sorted(vs), dtype=np.int64) for u, vs in adj.items()}

    @property
    def edge_count(self):
        return len(self.edges)

    @property
    def empty(self):
        return not self.edges

    def friends(self, user):
        return self._adj.get(int(user), np.empty(0, dtype=np.int64))

    def adjacency_csr(self):
        if not self.edges:
            return sparse.csr_matrix((self.n_users, self.n_users))
        rows, cols = [], []
        for u, v in self.edges:
            rows += [u, v]
            cols += [v, u]
        data = np.ones(len(rows))
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.n_users, self.n_users))


class GeoIndex:
    """POI id -> (latitude, longitude) in degrees."""

    def __init__(self, n_pois, coords):
        self.n_pois = int(n_pois)
        self.lat = np.full(self.n_pois, np.nan)
        self.lon = np.full(self.n_pois, np.nan)
        for p, (la, lo) in coords.items():
            p = int(p)
            if not 0 <= p < self.n_pois:
                raise DatasetValidationError(f"poi id {p} out of range in coordinates")
            if not (-90.0 <= la <= 90.0 and -180.0 <= lo <= 180.0):
                raise DatasetValidationError(f"coordinates out of range for poi {p}")
            self.lat[p] = la
            self.lon[p] = lo

    def has(self, poi):
        return not np.isnan(self.lat[poi])

    def coords(self, poi):
        return float(self.lat[poi]), float(self.lon[poi])

    def present(self):
        return np.flatnonzero(~np.isnan(self.lat))


class CategoryIndex:
    """POI id -> set of category ids; may be empty for category-less datasets."""

    def __init__(self, n_pois, pairs, n_categories=None):
        self.n_pois = int(n_pois)
        cats = {}
        max_cat = -1
        for p, c in pairs:
            p, c = int(p), int(c)
            if not 0 <= p < self.n_pois:
                raise DatasetValidationError(f"poi id {p} out of range in categories")
            if c < 0:
                raise DatasetValidationError(f"negative category id {c}")
            cats.setdefault(p, set()).add(c)
            max_cat = max(max_cat, c)
        self.n_categories = int(n_categories) if n_categories is not None else max_cat + 1
        self._cats = {p: frozenset(cs) for p, cs in cats.items()}

    @property
    def empty(self):
        return self.n_categories == 0

    def categories(self, poi):
        return self._cats.get(int(poi), frozenset())

    def pairs(self):
        out = []
        for p in sorted(self._cats):
            for c in sorted(self._cats[p]):
                out.append((p, c))
        return out

    def poi_category_csr(self):
        pairs = self.pairs()
        if not pairs:
            return sparse.csr_matrix((self.n_pois, max(self.n_categories, 1)))
        rows = [p for p, _ in pairs]
        cols = [c for _, c in pairs]
        return sparse.csr_matrix(
            (np.ones(len(pairs)), (rows, cols)), shape=(self.n_pois, self.n_categories)
        )


@dataclass
class DatasetBundle:
    """One named dataset: three splits plus side information."""

    name: str
    train: CheckInMatrix
    test: CheckInMatrix
    tune: CheckInMatrix
    social: SocialGraph
    geo: GeoIndex
    cats: CategoryIndex

    @property
    def n_users(self):
        return self.train.n_users

    @property
    def n_pois(self):
        return self.train.n_pois

    def validate(self):
        for split in (self.test, self.tune):
            if (split.n_users, split.n_pois) != (self.train.n_users, self.train.n_pois):
                raise DatasetValidationError("splits disagree on user/poi counts")
        train_keys = set(zip(self.train.user_ids.tolist(), self.train.poi_ids.tolist()))
        test_keys = set(zip(self.test.user_ids.tolist(), self.test.poi_ids.tolist()))
        overlap = train_keys & test_keys
        if overlap:
            raise DatasetValidationError(
                f"{len(overlap)} (user, poi) entries shared between train and test"
            )
        seen = set()
        for m in (self.train, self.test, self.tune):
            seen.update(np.unique(m.poi_ids).tolist())
        for p in sorted(seen):
            if not self.geo.has(p):
                raise DatasetValidationError(f"poi {p} has check-ins but no coordinates")
        return self

    def test_truth(self, user):
        """The user's test-split POI set (ground truth for accuracy metrics)."""
        return set(self.test.user_pois(user).tolist())

    def tune_truth(self, user):
        return set(self.tune.user_pois(user).tolist())


@dataclass
class UserGroups:
    """Active/inactive partition of users by train check-in volume."""

    active: frozenset
    inactive: frozenset
    percentage: float

    def group_of(self, user):
        return "active" if user in self.active else "inactive"


@dataclass
class DatasetStats:
    users: int
    pois: int
    checkins: int
    social_edges: int
    categories: int
    density: float


# ---------------------------------------------------------------------------
# file parsing


def _dataset_file(directory, name, suffix):
    return os.path.join(directory, name, f"{name}_{suffix}.txt")


def _parse_lines(path, n_fields_options, cast):
    """Parse whitespace-separated rows; raises with file/line context."""
    rows = []
    with open(path, encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) not in n_fields_options:
                raise DatasetParseError(
                    f"{path}:{lineno}: expected {sorted(n_fields_options)} fields, "
                    f"got {len(parts)}"
                )
            try:
                rows.append(cast(parts))
            except ValueError as exc:
                raise DatasetParseError(f"{path}:{lineno}: {exc}") from None
    return rows


def _load_checkins(path, n_users, n_pois, user_limit):
    rows = _parse_lines(
        path,
        {3, 4},
        lambda p: (int(p[0]), int(p[1]), int(p[2]), int(p[3]) if len(p) == 4 else None),
    )
    has_ts = bool(rows) and rows[0][3] is not None
    for u, p, f, ts in rows:
        if (ts is not None) != has_ts:
            raise DatasetParseError(f"{path}: inconsistent timestamp column")
    if user_limit is not None:
        rows = [r for r in rows if r[0] < user_limit]
        n_users = min(n_users, user_limit)
    users = [r[0] for r in rows]
    pois = [r[1] for r in rows]
    freqs = [r[2] for r in rows]
    ts = [r[3] for r in rows] if has_ts else None
    return CheckInMatrix(n_users, n_pois, users, pois, freqs, timestamps=ts)


def load_dataset(data_directory, name, limit_users=-1):
    """Load and validate one dataset bundle.

    ``limit_users`` of -1 keeps everything; a positive value keeps only the
    lowest-numbered user ids (deterministic, no reindexing) and drops social
    edges touching removed users.
    """
    if limit_users != -1 and limit_users <= 0:
        raise ConfigurationError(f"limit_users must be -1 or positive, got {limit_users}")
    size_path = _dataset_file(data_directory, name, "data_size")
    if not os.path.exists(size_path):
        raise DatasetIncompleteError(f"dataset incomplete: missing {size_path}")
    size_rows = _parse_lines(size_path, {2}, lambda p: (int(p[0]), int(p[1])))
    if len(size_rows) != 1:
        raise DatasetParseError(f"{size_path}: expected exactly one line")
    n_users, n_pois = size_rows[0]
    if n_users < 0 or n_pois < 0:
        raise DatasetValidationError(f"{size_path}: negative counts")

    limit = limit_users if limit_users > 0 else None
    splits = {}
    for split in ("train", "test", "tune"):
        path = _dataset_file(data_directory, name, split)
        if not os.path.exists(path):
            raise DatasetIncompleteError(f"dataset incomplete: missing {path}")
        splits[split] = _load_checkins(path, n_users, n_pois, limit)
    eff_users = splits["train"].n_users

    social_path = _dataset_file(data_directory, name, "social_relations")
    if os.path.exists(social_path):
        edges = _parse_lines(social_path, {2}, lambda p: (int(p[0]), int(p[1])))
        if limit is not None:
            edges = [(u, v) for u, v in edges if u < limit and v < limit]
        social = SocialGraph(eff_users, edges)
    else:
        social = SocialGraph(eff_users, [])

    coos_path = _dataset_file(data_directory, name, "poi_coos")
    if not os.path.exists(coos_path):
        raise DatasetIncompleteError(f"dataset incomplete: missing {coos_path}")
    coord_rows = _parse_lines(coos_path, {3}, lambda p: (int(p[0]), float(p[1]), float(p[2])))
    geo = GeoIndex(n_pois, {p: (la, lo) for p, la, lo in coord_rows})

    cats_path = _dataset_file(data_directory, name, "poi_categories")
    if os.path.exists(cats_path):
        pairs = _parse_lines(cats_path, {2}, lambda p: (int(p[0]), int(p[1])))
        cats = CategoryIndex(n_pois, pairs)
    else:
        cats = CategoryIndex(n_pois, [])

    bundle = DatasetBundle(
        name=name,
        train=splits["train"],
        test=splits["test"],
        tune=splits["tune"],
        social=social,
        geo=geo,
        cats=cats,
    )
    return bundle.validate()


def write_dataset(bundle, data_directory):
    """Write a bundle back out in the standard file layout (round-trip aid)."""
    directory = os.path.join(data_directory, bundle.name)
    os.makedirs(directory, exist_ok=True)

    def path(suffix):
        return _dataset_file(data_directory, bundle.name, suffix)

    with open(path("data_size"), "w") as fh:
        fh.write(f"{bundle.n_users} {bundle.n_pois}\n")
    for split_name in ("train", "test", "tune"):
        m = getattr(bundle, split_name)
        with open(path(split_name), "w") as fh:
            for i in range(m.entry_count):
                line = f"{m.user_ids[i]} {m.poi_ids[i]} {m.freqs[i]}"
                if m.timestamps is not None:
                    line += f" {m.timestamps[i]}"
                fh.write(line + "\n")
    if not bundle.social.empty:
        with open(path("social_relations"), "w") as fh:
            for u, v in sorted(bundle.social.edges):
                fh.write(f"{u} {v}\n")
    with open(path("poi_coos"), "w") as fh:
        for p in bundle.geo.present():
            la, lo = bundle.geo.coords(p)
            fh.write(f"{p} {la!r} {lo!r}\n")
    if not bundle.cats.empty:
        with open(path("poi_categories"), "w") as fh:
            for p, c in bundle.cats.pairs():
                fh.write(f"{p} {c}\n")


# ---------------------------------------------------------------------------
# derived data


def compute_active_users(bundle, percentage):
    """Partition users into active/inactive by total train check-in frequency.

    The top ``round(percentage * users)`` by summed train frequency are
    active; ties go to the lower user id.
    """
    if not 0.0 < percentage < 1.0:
        raise ConfigurationError(
            f"activeUsersPercentage must lie in (0, 1), got {percentage}"
        )
    totals = np.asarray(bundle.train.to_csr().sum(axis=1)).ravel()
    order = np.lexsort((np.arange(bundle.n_users), -totals))
    n_active = int(np.floor(percentage * bundle.n_users + 0.5))
    active = frozenset(int(u) for u in order[:n_active])
    inactive = frozenset(range(bundle.n_users)) - active
    return UserGroups(active=active, inactive=frozenset(inactive), percentage=percentage)


def dataset_stats(bundle):
    """Headline counts for a bundle; check-ins count distinct (user, poi) pairs."""
    checkins = (
        bundle.train.entry_count + bundle.test.entry_count + bundle.tune.entry_count
    )
    cells = bundle.n_users * bundle.n_pois
    return DatasetStats(
        users=bundle.n_users,
        pois=bundle.n_pois,
        checkins=checkins,
        social_edges=bundle.social.edge_count,
        categories=bundle.cats.n_categories,
        density=checkins / cells if cells else 0.0,
    )
