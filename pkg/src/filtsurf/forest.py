"""Random-forest classification over flattened surface vectors.

Everything here is deterministic: per-tree RNGs are spawned from the
config seed, split ties break toward the lowest feature index and lowest
threshold, vote ties toward the smallest class label.  Training the trees
of a forest in parallel therefore agrees bit-for-bit with a serial run.
"""

from __future__ import annotations

import math
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import kernels
from .surface import FeatureMatrix

MODEL_MAGIC = b"FSRF"
MODEL_VERSION = 1


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 1000
    max_depth: int | None = None
    min_samples_split: int = 2
    features_per_split: int | None = None  # None: floor(sqrt(D)), at least 1
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be at least 1")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be at least 2")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be at least 1 when set")
        if self.features_per_split is not None and self.features_per_split < 1:
            raise ValueError("features_per_split must be at least 1 when set")


@dataclass(frozen=True, eq=False)
class DecisionTree:
    """Flat array form: feature[i] == -1 marks a leaf holding leaf[i]."""

    feature: np.ndarray  # int32
    threshold: np.ndarray  # float64
    left: np.ndarray  # int32
    right: np.ndarray  # int32
    leaf: np.ndarray  # int32 class index, -1 on internal nodes


@dataclass(frozen=True, eq=False)
class ForestModel:
    trees: tuple[DecisionTree, ...]
    n_features: int
    class_alphabet: tuple[int, ...]
    seed: int


@dataclass(frozen=True)
class CvReport:
    """Accuracies (percent) per repetition and fold, plus their moments.

    ``std`` is the population standard deviation over all folds of all
    repetitions.
    """

    accuracies: tuple[tuple[float, ...], ...]
    mean: float
    std: float
    repetitions: int
    n_folds: int

    def summary(self) -> str:
        return f"{self.mean:.2f} ± {self.std:.2f}"

    def to_json_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std": self.std,
            "folds": [list(rep) for rep in self.accuracies],
        }


def _grow_tree(X: np.ndarray, y_idx: np.ndarray, n_classes: int, cfg: ForestConfig,
               k_features: int, rng: np.random.Generator) -> DecisionTree:
    n, n_feat = X.shape
    bootstrap = rng.integers(0, n, size=n)

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    leaf: list[int] = []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        leaf.append(-1)
        return len(feature) - 1

    root = new_node()
    stack: list[tuple[np.ndarray, int, int]] = [(bootstrap, 0, root)]
    while stack:
        rows, depth, slot = stack.pop()
        counts = np.bincount(y_idx[rows], minlength=n_classes)
        if (
            counts.max() == rows.size
            or rows.size < cfg.min_samples_split
            or (cfg.max_depth is not None and depth >= cfg.max_depth)
        ):
            leaf[slot] = int(np.argmax(counts))
            continue
        cols = rng.permutation(n_feat).astype(np.int64)
        f, thr = kernels.best_split(X, y_idx, rows, cols, n_classes, k_features)
        if f < 0:
            # every feature is constant on this node
            leaf[slot] = int(np.argmax(counts))
            continue
        go_left = X[rows, f] <= thr
        feature[slot] = f
        threshold[slot] = thr
        lslot = new_node()
        rslot = new_node()
        left[slot] = lslot
        right[slot] = rslot
        stack.append((rows[~go_left], depth + 1, rslot))
        stack.append((rows[go_left], depth + 1, lslot))
    return DecisionTree(
        feature=np.asarray(feature, dtype=np.int32),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        leaf=np.asarray(leaf, dtype=np.int32),
    )


def _train_chunk(args) -> list[DecisionTree]:
    X, y_idx, n_classes, cfg, k_features, seeds = args
    out = []
    for seq in seeds:
        rng = np.random.default_rng(seq)
        out.append(_grow_tree(X, y_idx, n_classes, cfg, k_features, rng))
    return out


def train(features: FeatureMatrix, cfg: ForestConfig, threads: int = 1) -> ForestModel:
    """Fit a forest of CART trees on bootstrap samples.

    Each tree gets its own RNG spawned from ``cfg.seed``, so the result
    does not depend on ``threads``.
    """
    X = np.ascontiguousarray(features.X, dtype=np.float64)
    y = np.asarray(features.y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] != y.size:
        raise ValueError("feature matrix and labels disagree on the sample count")
    if X.shape[0] < 2:
        raise ValueError("training needs at least 2 samples")
    class_alphabet = tuple(int(c) for c in np.unique(y))
    if len(class_alphabet) < 2:
        raise ValueError("training set contains a single class")
    y_idx = np.searchsorted(np.asarray(class_alphabet), y).astype(np.int64)
    n_classes = len(class_alphabet)
    d = X.shape[1]
    k_features = cfg.features_per_split
    if k_features is None:
        k_features = max(1, int(math.floor(math.sqrt(d))))
    k_features = min(k_features, d)

    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.n_trees)
    if threads <= 1 or cfg.n_trees == 1:
        trees = _train_chunk((X, y_idx, n_classes, cfg, k_features, seeds))
    else:
        n_workers = min(threads, cfg.n_trees)
        chunks = [
            (X, y_idx, n_classes, cfg, k_features, seeds[w::n_workers])
            for w in range(n_workers)
        ]
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            parts = list(pool.map(_train_chunk, chunks))
        # chunk w holds trees w, w + n_workers, ...: reinterleave
        trees = [None] * cfg.n_trees
        for w, part in enumerate(parts):
            for i, tree in enumerate(part):
                trees[w + i * n_workers] = tree
    return ForestModel(
        trees=tuple(trees),
        n_features=d,
        class_alphabet=class_alphabet,
        seed=cfg.seed,
    )


def _tree_leaves(tree: DecisionTree, X: np.ndarray) -> np.ndarray:
    """Leaf class index per row of X."""
    node = np.zeros(X.shape[0], dtype=np.int64)
    while True:
        feats = tree.feature[node]
        internal = feats >= 0
        if not internal.any():
            break
        idx = np.nonzero(internal)[0]
        f = feats[internal].astype(np.int64)
        vals = X[idx, f]
        go_left = vals <= tree.threshold[node[idx]]
        node[idx] = np.where(go_left, tree.left[node[idx]], tree.right[node[idx]])
    return tree.leaf[node].astype(np.int64)


def predict_many(model: ForestModel, X: np.ndarray) -> np.ndarray:
    """Majority vote over all trees; ties go to the smallest class label."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ValueError(
            f"expected feature dimension {model.n_features}, got {X.shape[1] if X.ndim == 2 else X.shape}"
        )
    n_classes = len(model.class_alphabet)
    votes = np.zeros((X.shape[0], n_classes), dtype=np.int64)
    for tree in model.trees:
        leaves = _tree_leaves(tree, X)
        votes[np.arange(X.shape[0]), leaves] += 1
    pred_idx = np.argmax(votes, axis=1)  # first max: smallest class wins ties
    alphabet = np.asarray(model.class_alphabet, dtype=np.int64)
    return alphabet[pred_idx]


def predict(model: ForestModel, x: np.ndarray) -> int:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size != model.n_features:
        raise ValueError(f"expected a vector of length {model.n_features}")
    return int(predict_many(model, x[None, :])[0])


def _stratified_folds(y: np.ndarray, folds: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Round-robin fold assignment per class after a seeded shuffle."""
    assignments = [[] for _ in range(folds)]
    for cls in np.unique(y):
        members = np.nonzero(y == cls)[0]
        perm = rng.permutation(members)
        for i, sample in enumerate(perm):
            assignments[i % folds].append(int(sample))
    return [np.array(sorted(fold), dtype=np.int64) for fold in assignments]


def cross_validate(features: FeatureMatrix, cfg: ForestConfig, folds: int = 10,
                   repetitions: int = 10, threads: int = 1) -> CvReport:
    """Repeated stratified k-fold cross-validation with accuracy in percent."""
    if folds < 2:
        raise ValueError("folds must be at least 2")
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    y = np.asarray(features.y, dtype=np.int64)
    for cls in np.unique(y):
        count = int((y == cls).sum())
        if count < folds:
            raise ValueError(
                f"class {int(cls)} has only {count} samples; {folds}-fold CV needs at least {folds}"
            )
    rep_seqs = np.random.SeedSequence(cfg.seed).spawn(repetitions)
    all_rows: list[tuple[float, ...]] = []
    for rep in range(repetitions):
        children = rep_seqs[rep].spawn(folds + 1)
        shuffle_rng = np.random.default_rng(children[0])
        test_folds = _stratified_folds(y, folds, shuffle_rng)
        rep_accs: list[float] = []
        for f, test_idx in enumerate(test_folds):
            train_mask = np.ones(y.size, dtype=bool)
            train_mask[test_idx] = False
            train_idx = np.nonzero(train_mask)[0]
            fold_seed = int(children[f + 1].generate_state(1, np.uint64)[0])
            fold_cfg = replace(cfg, seed=fold_seed)
            sub = FeatureMatrix(
                X=features.X[train_idx],
                y=y[train_idx],
                graph_ids=tuple(features.graph_ids[i] for i in train_idx),
            )
            model = train(sub, fold_cfg, threads=threads)
            pred = predict_many(model, features.X[test_idx])
            acc = 100.0 * float(np.mean(pred == y[test_idx]))
            rep_accs.append(acc)
        all_rows.append(tuple(rep_accs))
    flat = np.array([a for rep in all_rows for a in rep], dtype=np.float64)
    return CvReport(
        accuracies=tuple(all_rows),
        mean=float(flat.mean()),
        std=float(flat.std()),
        repetitions=repetitions,
        n_folds=folds,
    )


# ---------------------------------------------------------------------------
# model serialization (versioned binary, little-endian)


def save_model(model: ForestModel, path: str | Path) -> None:
    buf = bytearray()
    buf += MODEL_MAGIC
    buf += struct.pack("<I", MODEL_VERSION)
    buf += struct.pack("<q", model.seed)
    buf += struct.pack("<Q", model.n_features)
    buf += struct.pack("<Q", len(model.class_alphabet))
    buf += np.asarray(model.class_alphabet, dtype="<i8").tobytes()
    buf += struct.pack("<Q", len(model.trees))
    for tree in model.trees:
        buf += struct.pack("<Q", tree.feature.size)
        buf += tree.feature.astype("<i4").tobytes()
        buf += tree.threshold.astype("<f8").tobytes()
        buf += tree.left.astype("<i4").tobytes()
        buf += tree.right.astype("<i4").tobytes()
        buf += tree.leaf.astype("<i4").tobytes()
    Path(path).write_bytes(bytes(buf))


def load_model(path: str | Path) -> ForestModel:
    raw = Path(path).read_bytes()
    if raw[:4] != MODEL_MAGIC:
        raise ValueError(f"{path}: not a forest model file")
    off = 4
    (version,) = struct.unpack_from("<I", raw, off)
    off += 4
    if version != MODEL_VERSION:
        raise ValueError(f"{path}: unsupported model version {version}")
    (seed,) = struct.unpack_from("<q", raw, off)
    off += 8
    (n_features,) = struct.unpack_from("<Q", raw, off)
    off += 8
    (n_classes,) = struct.unpack_from("<Q", raw, off)
    off += 8
    alphabet = np.frombuffer(raw, dtype="<i8", count=n_classes, offset=off)
    off += 8 * n_classes
    (n_trees,) = struct.unpack_from("<Q", raw, off)
    off += 8
    trees = []
    for _ in range(n_trees):
        (n_nodes,) = struct.unpack_from("<Q", raw, off)
        off += 8
        feature = np.frombuffer(raw, dtype="<i4", count=n_nodes, offset=off)
        off += 4 * n_nodes
        threshold = np.frombuffer(raw, dtype="<f8", count=n_nodes, offset=off)
        off += 8 * n_nodes
        left = np.frombuffer(raw, dtype="<i4", count=n_nodes, offset=off)
        off += 4 * n_nodes
        right = np.frombuffer(raw, dtype="<i4", count=n_nodes, offset=off)
        off += 4 * n_nodes
        leaf = np.frombuffer(raw, dtype="<i4", count=n_nodes, offset=off)
        off += 4 * n_nodes
        trees.append(DecisionTree(
            feature=feature.astype(np.int32),
            threshold=threshold.astype(np.float64),
            left=left.astype(np.int32),
            right=right.astype(np.int32),
            leaf=leaf.astype(np.int32),
        ))
    return ForestModel(
        trees=tuple(trees),
        n_features=int(n_features),
        class_alphabet=tuple(int(c) for c in alphabet),
        seed=int(seed),
    )
