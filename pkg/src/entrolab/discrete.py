"""Exact Shannon-entropy verification over small cyclic groups.

Everything here is exhaustive computation on dense probability tables, so
checks are exact up to 1e-12 float accumulation: there is no numerical
error band to argue about, and identities must land on the nose.  This is
also where the results live that are true for Shannon entropy but fail for
differential entropy (functional submodularity, the covering identity).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .report import InequalityReport, make_report

__all__ = [
    "DiscretePmf",
    "DiscreteJoint",
    "discrete_entropy",
    "sum_pmf",
    "difference_pmf",
    "check_functional_submodularity",
    "check_covering_lemma",
    "check_discrete_registry",
    "random_pmf",
    "DISCRETE_CHECK_IDS",
]

EXACT_TOL = 1e-12
MAX_ORDER = 64
MAX_AXES = 5


@dataclass(frozen=True)
class DiscretePmf:
    """Probability mass function on the cyclic group of the given order."""

    group_order: int
    probs: np.ndarray

    def __post_init__(self):
        if not 2 <= self.group_order <= MAX_ORDER:
            raise ValueError(f"group order must be in [2, {MAX_ORDER}]")
        p = np.asarray(self.probs, dtype=float)
        if p.shape != (self.group_order,):
            raise ValueError("probs length must equal the group order")
        if np.any(p < 0.0):
            raise ValueError("probabilities must be nonnegative")
        total = float(p.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {total}")
        if total <= 0.0:
            raise ValueError("empty support")
        p = p / total
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    def entropy(self) -> float:
        return _entropy_of(self.probs)


@dataclass(frozen=True)
class DiscreteJoint:
    """Dense probability tensor over a product of cyclic groups (<= 5 axes)."""

    dims: tuple[int, ...]
    table: np.ndarray

    def __post_init__(self):
        if not 1 <= len(self.dims) <= MAX_AXES:
            raise ValueError(f"joint must have 1..{MAX_AXES} axes")
        t = np.asarray(self.table, dtype=float)
        if t.shape != tuple(self.dims):
            raise ValueError("table shape must match dims")
        if np.any(t < 0.0):
            raise ValueError("probabilities must be nonnegative")
        total = float(t.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"table sums to {total}")
        t = t / total
        t.flags.writeable = False
        object.__setattr__(self, "dims", tuple(self.dims))
        object.__setattr__(self, "table", t)

    def marginal(self, axes: Sequence[int]) -> np.ndarray:
        axes = tuple(axes)
        drop = tuple(i for i in range(len(self.dims)) if i not in axes)
        out = self.table.sum(axis=drop) if drop else self.table
        # reorder to the requested axis order
        kept = tuple(i for i in range(len(self.dims)) if i in axes)
        perm = tuple(kept.index(a) for a in axes)
        return np.transpose(out, perm)


def _entropy_of(p: np.ndarray) -> float:
    p = p[p > 0.0]
    return float(-np.sum(p * np.log(p)))


def discrete_entropy(j: DiscreteJoint, axes: Sequence[int] | None = None) -> float:
    """Exact Shannon entropy (nats) of the selected axes' marginal."""
    if axes is None:
        axes = tuple(range(len(j.dims)))
    return _entropy_of(j.marginal(axes).ravel())


def sum_pmf(p: DiscretePmf, q: DiscretePmf) -> DiscretePmf:
    """Law of X + Y (mod n) for independent X ~ p, Y ~ q."""
    if p.group_order != q.group_order:
        raise ValueError("group orders differ")
    n = p.group_order
    out = np.zeros(n)
    for shift in range(n):
        out[shift] = float(np.dot(p.probs, np.roll(q.probs[::-1], shift + 1)))
    return DiscretePmf(n, out)


def reflect_pmf(p: DiscretePmf) -> DiscretePmf:
    """Law of -X (mod n)."""
    return DiscretePmf(p.group_order, np.roll(p.probs[::-1], 1))


def difference_pmf(p: DiscretePmf, q: DiscretePmf) -> DiscretePmf:
    return sum_pmf(p, reflect_pmf(q))


def random_pmf(rng: np.random.Generator, group_order: int) -> DiscretePmf:
    return DiscretePmf(group_order, rng.dirichlet(np.ones(group_order)))


# ---------------------------------------------------------------------------


def check_functional_submodularity(
    joint: DiscreteJoint,
    f_map: Sequence[int],
    g_map: Sequence[int],
    r_map: np.ndarray,
) -> InequalityReport:
    """H(R(X1,X2)) + H(X0) <= H(X1) + H(X2) with X0 = F(X1) = G(X2) on the support.

    f_map/g_map give F and G by value tables on the two alphabets; r_map is
    a value table on the product.  Raises when F(X1) != G(X2) somewhere on
    the support, since X0 is then ill-defined.
    """
    if len(joint.dims) != 2:
        raise ValueError("needs a two-axis joint")
    n1, n2 = joint.dims
    f_arr = np.asarray(f_map, dtype=int)
    g_arr = np.asarray(g_map, dtype=int)
    r_arr = np.asarray(r_map, dtype=int)
    if f_arr.shape != (n1,) or g_arr.shape != (n2,) or r_arr.shape != (n1, n2):
        raise ValueError("map shapes must match the joint alphabet")

    support = joint.table > 0.0
    consistent = f_arr[:, None] == g_arr[None, :]
    if np.any(support & ~consistent):
        raise ValueError("F(X1) != G(X2) on the support; common value ill-defined")

    h1 = _entropy_of(joint.marginal([0]))
    h2 = _entropy_of(joint.marginal([1]))
    h0 = _entropy_of(np.bincount(f_arr, weights=joint.marginal([0])))
    h12 = _entropy_of(np.bincount(r_arr.ravel(), weights=joint.table.ravel()))
    return make_report("functional_submodularity", lhs=h12 + h0, rhs=h1 + h2,
                       err=EXACT_TOL)


def _covering_joint(p: DiscretePmf, q: DiscretePmf) -> DiscreteJoint:
    """Joint of (X1, X2, Y1, Y2): two conditionally independent copies of
    (X, Y) given X + Y, for independent X ~ p, Y ~ q."""
    n = p.group_order
    s_pmf = sum_pmf(p, q).probs
    idx = np.arange(n)
    table = np.zeros((n, n, n, n))
    for s in range(n):
        if s_pmf[s] <= 0.0:
            continue
        # conditional law of (X, Y) given X + Y = s, supported on y = s - x
        cond = p.probs * q.probs[(s - idx) % n] / s_pmf[s]
        pair = np.outer(cond, cond) * s_pmf[s]  # (x1, x2) weights
        table[idx[:, None], idx[None, :], ((s - idx) % n)[:, None], ((s - idx) % n)[None, :]] += pair
    return DiscreteJoint((n, n, n, n), table)


def check_covering_lemma(p: DiscretePmf, q: DiscretePmf) -> InequalityReport:
    """Exact identity H(X1, X2, Y1 | Y2) = 2 H(X) + H(Y) - H(X+Y).

    The conditional copies share the sum, so the left side is computable
    from the explicit four-variable joint; the continuous analog fails
    (the conditioned triple is degenerate there), which is why this check
    lives in the discrete lab only.
    """
    if p.group_order != q.group_order:
        raise ValueError("group orders differ")
    joint = _covering_joint(p, q)
    lhs = discrete_entropy(joint) - discrete_entropy(joint, [3])
    rhs = 2.0 * p.entropy() + q.entropy() - sum_pmf(p, q).entropy()
    return make_report("covering_lemma", lhs=lhs, rhs=rhs, err=EXACT_TOL, kind="identity")


# ---------------------------------------------------------------------------
# discrete registry: exact analogs of the continuous sumset checks


def _iid_power(p: DiscretePmf, copies: int) -> DiscretePmf:
    out = p
    for _ in range(copies - 1):
        out = sum_pmf(out, p)
    return out


def _dd_functionals(p: DiscretePmf) -> tuple[float, float]:
    h = p.entropy()
    d_plus = sum_pmf(p, p).entropy() - h
    d_minus = difference_pmf(p, p).entropy() - h
    return d_plus, d_minus


def _d_lower_bound(pmfs, params):
    x, y = pmfs
    return max(x.entropy(), y.entropy()), sum_pmf(x, y).entropy(), None, False


def _d_sum_upper(pmfs, params):
    x, y = pmfs
    return sum_pmf(x, y).entropy(), x.entropy() + y.entropy(), None, False


def _d_ruzsa_triangle(pmfs, params):
    x, y, z = pmfs
    lhs = difference_pmf(x, z).entropy()
    rhs = difference_pmf(x, y).entropy() + difference_pmf(y, z).entropy() - y.entropy()
    return lhs, rhs, None, False


def _d_dist(x, y):
    return difference_pmf(x, y).entropy() - 0.5 * x.entropy() - 0.5 * y.entropy()


def _d_triangle_metric(pmfs, params):
    x, y, z = pmfs
    return _d_dist(x, z), _d_dist(x, y) + _d_dist(y, z), None, False


def _d_csumdiff(pmfs, params):
    x, y, z = pmfs
    lhs = difference_pmf(x, z).entropy() + y.entropy()
    rhs = sum_pmf(x, y).entropy() + sum_pmf(y, z).entropy()
    return lhs, rhs, None, False


def _d_c3122(pmfs, params):
    x, y, z = pmfs
    lhs = sum_pmf(sum_pmf(x, y), z).entropy() + y.entropy()
    rhs = sum_pmf(x, y).entropy() + sum_pmf(y, z).entropy()
    return lhs, rhs, None, False


def _d_doubling_difference(pmfs, params):
    (x,) = pmfs
    d_plus, d_minus = _dd_functionals(x)
    if abs(d_minus) <= 1e-9:
        return d_plus, d_minus, "degenerate denominator", True
    ratio = d_plus / d_minus
    note = f"ratio={ratio:.6f}"
    if 2.0 * d_minus - d_plus <= d_plus - 0.5 * d_minus:
        return d_plus, 2.0 * d_minus, note + " side=upper", False
    return 0.5 * d_minus, d_plus, note + " side=lower", False


def _d_sigma_delta(pmfs, params):
    (x,) = pmfs
    d_plus, d_minus = _dd_functionals(x)
    if 2.0 * d_minus - d_plus <= d_plus - 0.5 * d_minus:
        return d_plus, 2.0 * d_minus, "side=upper", False
    return 0.5 * d_minus, d_plus, "side=lower", False


def _d_sum_difference(pmfs, params):
    x, y = pmfs
    lhs = sum_pmf(x, y).entropy()
    rhs = 3.0 * difference_pmf(x, y).entropy() - x.entropy() - y.entropy()
    return lhs, rhs, None, False


def _d_sum_difference_mi(pmfs, params):
    x, y = pmfs
    alpha = params["alpha"]
    h_sum = sum_pmf(x, y).entropy()
    h_diff = difference_pmf(x, y).entropy()
    hx, hy = x.entropy(), y.entropy()
    lhs = alpha * (h_sum - hy) + (1.0 - alpha) * (h_sum - hx)
    rhs = (1.0 + alpha) * (h_diff - hy) + (2.0 - alpha) * (h_diff - hx)
    return lhs, rhs, None, False


def _d_plunnecke_ruzsa(pmfs, params):
    x, ys = pmfs[0], pmfs[1:]
    hx = x.entropy()
    rhs = hx
    acc = x
    for y in ys:
        rhs += sum_pmf(x, y).entropy() - hx
        acc = sum_pmf(acc, y)
    return acc.entropy(), rhs, None, False


def _d_four_variable(pmfs, params):
    x, y, z, w = pmfs
    lhs = sum_pmf(sum_pmf(x, y), sum_pmf(z, w)).entropy() + y.entropy() + z.entropy()
    rhs = (sum_pmf(x, y).entropy() + sum_pmf(y, z).entropy()
           + sum_pmf(z, w).entropy())
    return lhs, rhs, None, False


def _d_iterated_sum(pmfs, params):
    x, y = pmfs
    n = params["n"]
    total = sum_pmf(_iid_power(x, n + 1), _iid_power(y, n + 1))
    h_xy = sum_pmf(x, y).entropy()
    rhs = (2 * n + 1) * h_xy - n * x.entropy() - n * y.entropy()
    return total.entropy(), rhs, None, False


_DISCRETE_EVALS: dict[str, tuple[int, Callable]] = {
    "lower_bound": (2, _d_lower_bound),
    "sum_upper": (2, _d_sum_upper),
    "ruzsa_triangle": (3, _d_ruzsa_triangle),
    "triangle_metric": (3, _d_triangle_metric),
    "csumdiff": (3, _d_csumdiff),
    "c3122": (3, _d_c3122),
    "doubling_difference": (1, _d_doubling_difference),
    "sigma_delta": (1, _d_sigma_delta),
    "sum_difference": (2, _d_sum_difference),
    "sum_difference_mi": (2, _d_sum_difference_mi),
    "plunnecke_ruzsa": (2, _d_plunnecke_ruzsa),
    "four_variable": (4, _d_four_variable),
    "iterated_sum": (2, _d_iterated_sum),
}

DISCRETE_CHECK_IDS = tuple(sorted(_DISCRETE_EVALS))


def discrete_arity(check_id: str, params: dict | None = None) -> int:
    params = params or {}
    arity, _ = _DISCRETE_EVALS[check_id]
    if check_id == "plunnecke_ruzsa":
        return 1 + params.get("n", 1)
    return arity


def check_discrete_registry(
    check_id: str,
    pmfs: Sequence[DiscretePmf],
    params: dict | None = None,
) -> InequalityReport:
    """Exact Shannon-entropy analog of a registered sumset check."""
    if check_id not in _DISCRETE_EVALS:
        raise KeyError(f"unknown discrete check '{check_id}'")
    params = dict(params or {})
    if check_id == "sum_difference_mi":
        params.setdefault("alpha", 0.5)
    if check_id in ("plunnecke_ruzsa", "iterated_sum"):
        params.setdefault("n", 2)
    need = discrete_arity(check_id, params)
    if len(pmfs) != need:
        raise ValueError(f"check '{check_id}' needs {need} pmfs, got {len(pmfs)}")
    orders = {p.group_order for p in pmfs}
    if len(orders) != 1:
        raise ValueError("all pmfs must share one group order")
    _, evaluator = _DISCRETE_EVALS[check_id]
    lhs, rhs, note, degenerate = evaluator(tuple(pmfs), params)
    return make_report(f"discrete.{check_id}", lhs=lhs, rhs=rhs, err=EXACT_TOL,
                       params=params, note=note, degenerate=degenerate,
                       inputs=tuple({"group_order": p.group_order,
                                     "probs": p.probs.tolist()} for p in pmfs))
