"""scikit-learn style wrappers over the functional samplers.

``fit`` takes the graph (or sequence / counts), validates it and records the
exact counts; ``sample`` draws from a generator created at fit time, so a
fixed ``random_state`` makes the sequence of ``sample`` calls reproducible.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .arborescence import count_in_arborescences
from .digraph import Digraph, LazyDigraph, classify_eulerian, infer_sink, ladder_family
from .errors import NotEulerianInput
from .euler import (
    count_eulerian_paths,
    decode_path,
    require_sourced_eulerian,
    sample_eulerian_batch,
    sample_gibbs_prefix_batch,
)
from .pex import (
    TransitionCounts,
    condition_on_counts_batch,
    digraph_from_counts,
    transition_counts,
    transition_frequencies,
)
from .rng import as_generator
from .wilson import decode_arborescence, wilson_finite_batch


def _check_fitted(est, attr):
    if not hasattr(est, attr):
        raise NotFittedError(f"{type(est).__name__} is not fitted yet; call fit first")


def _draw_seed(est):
    return int(est._rng.integers(2**63))


class EulerianPathSampler(BaseEstimator):
    """Uniform Eulerian source-to-sink paths of a finite digraph."""

    def __init__(self, random_state=None, n_threads=None):
        self.random_state = random_state
        self.n_threads = n_threads

    def fit(self, g: Digraph, y=None):
        cls = classify_eulerian(g)
        if not cls.is_eulerian:
            raise NotEulerianInput(f"graph is not Eulerian: {cls.reason}", cls.witness)
        self.graph_ = g
        self.sink_ = infer_sink(g)
        self.n_paths_ = count_eulerian_paths(g)
        self._rng = as_generator(self.random_state)
        return self

    def sample_rows(self, n_samples=1):
        """Paths as rows of compiled edge indices (fast path)."""
        _check_fitted(self, "graph_")
        return sample_eulerian_batch(self.graph_, n_samples, random_state=_draw_seed(self),
                                     n_threads=self.n_threads)

    def sample(self, n_samples=1):
        rows = self.sample_rows(n_samples)
        g = self.graph_
        return [decode_path(g, g.source, r) for r in rows]


class ArborescenceSampler(BaseEstimator):
    """Uniform spanning in-arborescences rooted at ``root`` (default: the sink)."""

    def __init__(self, root=None, order=None, random_state=None, n_threads=None):
        self.root = root
        self.order = order
        self.random_state = random_state
        self.n_threads = n_threads

    def fit(self, g: Digraph, y=None):
        self.graph_ = g
        self.root_ = infer_sink(g) if self.root is None else self.root
        self.n_arborescences_ = count_in_arborescences(g, self.root_)
        self._rng = as_generator(self.random_state)
        return self

    def sample(self, n_samples=1):
        _check_fitted(self, "graph_")
        rows = wilson_finite_batch(self.graph_, self.root_, n_samples, order=self.order,
                                   random_state=_draw_seed(self), n_threads=self.n_threads)
        return [decode_arborescence(self.graph_, r) for r in rows]


class CountConditionedSampler(BaseEstimator):
    """Sequences with a given start and transition counts, all equally likely."""

    def __init__(self, random_state=None, n_threads=None):
        self.random_state = random_state
        self.n_threads = n_threads

    def fit(self, X, y=None):
        """``X`` is a :class:`TransitionCounts` or a sequence whose counts are used."""
        self.counts_ = X if isinstance(X, TransitionCounts) else transition_counts(X)
        cg = digraph_from_counts(self.counts_)
        self.states_ = cg.states
        self.end_ = cg.end
        self.n_paths_ = count_eulerian_paths(cg.graph) if len(cg.graph) else 1
        self._rng = as_generator(self.random_state)
        return self

    def sample(self, n_samples=1):
        _check_fitted(self, "counts_")
        return condition_on_counts_batch(self.counts_, n_samples, random_state=_draw_seed(self),
                                         n_threads=self.n_threads)


class TransitionFrequencies(TransformerMixin, BaseEstimator):
    """Empirical transition frequencies ``Q(u, v)`` of each sequence.

    ``fit`` learns the state vocabulary; ``transform`` returns an array of
    shape ``(n_sequences, n_states, n_states)`` whose row ``u`` is ``NaN``
    when the sequence never leaves ``u``.
    """

    def fit(self, X, y=None):
        states = set()
        for seq in X:
            states.update(seq)
        try:
            self.states_ = sorted(states)
        except TypeError:
            self.states_ = sorted(states, key=repr)
        self._index = {s: i for i, s in enumerate(self.states_)}
        return self

    def transform(self, X):
        _check_fitted(self, "states_")
        k = len(self.states_)
        out = np.full((len(X), k, k), np.nan)
        for n, seq in enumerate(X):
            q = transition_frequencies(seq)
            rows = {self._index[u] for u, _ in q}
            out[n, sorted(rows), :] = 0.0
            for (u, v), f in q.items():
                out[n, self._index[u], self._index[v]] = float(f)
        return out


class GibbsPrefixSampler(BaseEstimator):
    """First ``k`` steps of the Eulerian path to infinity on a sourced Eulerian graph."""

    def __init__(self, k=4, horizon=10**4, settle=None, random_state=None, n_threads=None):
        self.k = k
        self.horizon = horizon
        self.settle = settle
        self.random_state = random_state
        self.n_threads = n_threads

    def fit(self, g, y=None):
        """``g`` is a :class:`LazyDigraph` or a ladder ``(p, q)`` pair."""
        if not isinstance(g, LazyDigraph):
            g = ladder_family(*g)
        require_sourced_eulerian(g, self.k)
        self.graph_ = g
        self._rng = as_generator(self.random_state)
        return self

    def sample(self, n_samples=1):
        _check_fitted(self, "graph_")
        return sample_gibbs_prefix_batch(self.graph_, self.k, self.horizon, n_samples,
                                         random_state=_draw_seed(self), settle=self.settle,
                                         n_threads=self.n_threads)
