"""Expression trees over max, min, plus and scaling, and their normal forms.

The full grammar is

    f := Var(i) | InputVar(i) | Const(c) | Max(f, f) | Min(f, f)
       | Plus(f, f) | Scale(b, f)

The max-min-plus fragment drops Scale and Const (except as one operand of a
Plus) and admits a conjunctive normal form: a min of "max-plus projections",
each projection being a max of variable-plus-constant terms.  The normal
form is computed by distributing min over max and pruning projections that
are coefficientwise above another (those can never attain the min), which
leaves an antichain.  That antichain is what the one-step transition graphs
are read off from, so its stability matters more than its size.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .tropical import (
    EPS,
    TOP,
    TropicalMatrix,
    Weight,
    is_finite,
    oplus,
    oplus_dual,
    otimes,
)


class NotMaxMinPlusError(ValueError):
    """The expression falls outside the max-min-plus fragment."""


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class InputVar:
    index: int


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Max:
    left: "MmpsExpression"
    right: "MmpsExpression"


@dataclass(frozen=True)
class Min:
    left: "MmpsExpression"
    right: "MmpsExpression"


@dataclass(frozen=True)
class Plus:
    left: "MmpsExpression"
    right: "MmpsExpression"


@dataclass(frozen=True)
class Scale:
    factor: float
    child: "MmpsExpression"


MmpsExpression = Union[Var, InputVar, Const, Max, Min, Plus, Scale]


def max_of(*exprs: MmpsExpression) -> MmpsExpression:
    acc = exprs[0]
    for e in exprs[1:]:
        acc = Max(acc, e)
    return acc


def min_of(*exprs: MmpsExpression) -> MmpsExpression:
    acc = exprs[0]
    for e in exprs[1:]:
        acc = Min(acc, e)
    return acc


def shifted(e: MmpsExpression, c: float) -> MmpsExpression:
    return Plus(e, Const(c)) if c != 0 else e


def _scale(factor: float, v: Weight) -> Weight:
    # 0 * (+-inf) is 0 here: scaling by zero yields the zero function.
    if is_finite(v):
        return factor * v
    if factor == 0:
        return 0.0
    return v if factor > 0 else (EPS if v == TOP else TOP)


def eval_expr(e: MmpsExpression, x: Sequence[Weight], u: Sequence[Weight] = ()) -> Weight:
    """Evaluate over the completed semiring; EPS wins over TOP under Plus."""
    if isinstance(e, Var):
        if not 0 <= e.index < len(x):
            raise IndexError(f"state variable x{e.index} out of range")
        return x[e.index]
    if isinstance(e, InputVar):
        if not 0 <= e.index < len(u):
            raise IndexError(f"input variable u{e.index} out of range")
        return u[e.index]
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Max):
        return oplus(eval_expr(e.left, x, u), eval_expr(e.right, x, u))
    if isinstance(e, Min):
        return oplus_dual(eval_expr(e.left, x, u), eval_expr(e.right, x, u))
    if isinstance(e, Plus):
        return otimes(eval_expr(e.left, x, u), eval_expr(e.right, x, u))
    if isinstance(e, Scale):
        return _scale(e.factor, eval_expr(e.child, x, u))
    raise TypeError(f"not an expression node: {e!r}")


def is_max_min_plus(e: MmpsExpression) -> bool:
    """Var/InputVar, Max, Min and Plus-with-one-Const only."""
    if isinstance(e, (Var, InputVar)):
        return True
    if isinstance(e, (Max, Min)):
        return is_max_min_plus(e.left) and is_max_min_plus(e.right)
    if isinstance(e, Plus):
        if isinstance(e.left, Const):
            return is_finite(e.left.value) and is_max_min_plus(e.right)
        if isinstance(e.right, Const):
            return is_finite(e.right.value) and is_max_min_plus(e.left)
        return False
    return False


def lift_constants(e: MmpsExpression, aux_input_index: int) -> MmpsExpression:
    """Rewrite bare constants as offsets of an auxiliary input variable.

    Pinning that input to 0 preserves the value; the rewritten tree is in
    the max-min-plus fragment whenever the original only fell outside it
    because of standalone constants.
    """
    if isinstance(e, (Var, InputVar)):
        return e
    if isinstance(e, Const):
        return Plus(InputVar(aux_input_index), Const(e.value))
    if isinstance(e, Plus):
        if isinstance(e.left, Const) or isinstance(e.right, Const):
            return e
        return Plus(
            lift_constants(e.left, aux_input_index),
            lift_constants(e.right, aux_input_index),
        )
    if isinstance(e, Max):
        return Max(lift_constants(e.left, aux_input_index), lift_constants(e.right, aux_input_index))
    if isinstance(e, Min):
        return Min(lift_constants(e.left, aux_input_index), lift_constants(e.right, aux_input_index))
    raise NotMaxMinPlusError(f"cannot lift constants under {type(e).__name__}")


@dataclass(frozen=True)
class MaxPlusProjection:
    """max over i of (state_coeffs[i] + x_i) and (input_coeffs[p] + u_p)."""

    state_coeffs: tuple[Weight, ...]
    input_coeffs: tuple[Weight, ...] = ()

    def __post_init__(self) -> None:
        if all(c == EPS for c in self.state_coeffs + self.input_coeffs):
            raise ValueError("projection needs at least one non-epsilon coefficient")

    @property
    def coeffs(self) -> tuple[Weight, ...]:
        return self.state_coeffs + self.input_coeffs

    def eval(self, x: Sequence[Weight], u: Sequence[Weight] = ()) -> Weight:
        acc = EPS
        for c, v in zip(self.state_coeffs, x):
            acc = oplus(acc, otimes(c, v))
        for c, v in zip(self.input_coeffs, u):
            acc = oplus(acc, otimes(c, v))
        return acc


def dominates(p: MaxPlusProjection, q: MaxPlusProjection) -> bool:
    """True iff every coefficient of p is >= the matching one of q.

    Then q <= p pointwise as functions, so p can never attain the min of a
    conjunctive form that also contains q.
    """
    if len(p.coeffs) != len(q.coeffs):
        raise ValueError("projections over different variable counts")
    return all(a >= b for a, b in zip(p.coeffs, q.coeffs))


@dataclass(frozen=True)
class ConjunctiveForm:
    """min over an antichain of max-plus projections."""

    projections: tuple[MaxPlusProjection, ...]

    def __post_init__(self) -> None:
        if not self.projections:
            raise ValueError("conjunctive form needs at least one projection")
        for i, p in enumerate(self.projections):
            for j, q in enumerate(self.projections):
                if i != j and dominates(p, q):
                    raise ValueError("projections do not form an antichain")

    def eval(self, x: Sequence[Weight], u: Sequence[Weight] = ()) -> Weight:
        acc = TOP
        for p in self.projections:
            acc = oplus_dual(acc, p.eval(x, u))
        return acc


def _minimal_antichain(rows: list[tuple[Weight, ...]]) -> list[tuple[Weight, ...]]:
    """Keep only rows not coefficientwise above another row (min is unchanged)."""
    rows = sorted(set(rows))
    kept: list[tuple[Weight, ...]] = []
    for r in rows:
        if any(all(a >= b for a, b in zip(r, s)) for s in rows if s != r):
            continue
        kept.append(r)
    return kept


def to_conjunctive(
    e: MmpsExpression, n_state: int, n_input: int = 0
) -> ConjunctiveForm:
    """Distribute min over max and prune to the minimal antichain.

    Worst-case exponential in the number of min nodes; intended for small
    hand-built dynamics, where the antichain stays tiny.
    """
    if not is_max_min_plus(e):
        raise NotMaxMinPlusError(f"not in the max-min-plus fragment: {e!r}")
    width = n_state + n_input

    def rows_of(node: MmpsExpression) -> list[tuple[Weight, ...]]:
        if isinstance(node, Var):
            if not 0 <= node.index < n_state:
                raise IndexError(f"state variable x{node.index} out of range")
            return [tuple(0.0 if k == node.index else EPS for k in range(width))]
        if isinstance(node, InputVar):
            if not 0 <= node.index < n_input:
                raise IndexError(f"input variable u{node.index} out of range")
            j = n_state + node.index
            return [tuple(0.0 if k == j else EPS for k in range(width))]
        if isinstance(node, Plus):
            c = node.left.value if isinstance(node.left, Const) else node.right.value
            sub = node.right if isinstance(node.left, Const) else node.left
            return _minimal_antichain(
                [tuple(otimes(a, c) for a in row) for row in rows_of(sub)]
            )
        if isinstance(node, Min):
            return _minimal_antichain(rows_of(node.left) + rows_of(node.right))
        if isinstance(node, Max):
            left, right = rows_of(node.left), rows_of(node.right)
            merged = [
                tuple(oplus(a, b) for a, b in zip(lr, rr))
                for lr in left
                for rr in right
            ]
            return _minimal_antichain(merged)
        raise NotMaxMinPlusError(f"unexpected node {type(node).__name__}")

    rows = rows_of(e)
    if not rows:
        raise RuntimeError("pruning removed every projection")
    projections = tuple(
        MaxPlusProjection(row[:n_state], row[n_state:]) for row in sorted(rows)
    )
    return ConjunctiveForm(projections)


@dataclass(frozen=True)
class MatrixForm:
    """min over l of (A[l] ox x oplus B[l] ox u), and the C/D pair for outputs."""

    A: tuple[TropicalMatrix, ...]
    B: tuple[TropicalMatrix, ...]
    C: tuple[TropicalMatrix, ...]
    D: tuple[TropicalMatrix, ...]

    def __post_init__(self) -> None:
        if not self.A or not self.C:
            raise ValueError("matrix form needs L >= 1 and M >= 1")
        if len(self.A) != len(self.B):
            raise ValueError("A and B lists must have equal length")
        if len(self.C) != len(self.D):
            raise ValueError("C and D lists must have equal length")
        shape_a = (self.A[0].rows, self.A[0].cols)
        if shape_a[0] != shape_a[1]:
            raise ValueError("A matrices must be square")
        for a in self.A:
            if (a.rows, a.cols) != shape_a:
                raise ValueError("A matrices must share a shape")
        for b in self.B:
            if b.rows != shape_a[0]:
                raise ValueError("B row count must match A")
        rows_c = self.C[0].rows
        for c in self.C:
            if c.rows != rows_c or c.cols != shape_a[0]:
                raise ValueError("C matrices must be n_y x n")
        for d in self.D:
            if d.rows != rows_c:
                raise ValueError("D row count must match C")

    @property
    def n_state(self) -> int:
        return self.A[0].rows

    @property
    def n_input(self) -> int:
        return self.B[0].cols

    @property
    def n_output(self) -> int:
        return self.C[0].rows

    def eval_state(self, x: Sequence[Weight], u: Sequence[Weight] = ()) -> tuple[Weight, ...]:
        return _min_of_products(self.A, self.B, x, u)

    def eval_output(self, x: Sequence[Weight], u: Sequence[Weight] = ()) -> tuple[Weight, ...]:
        return _min_of_products(self.C, self.D, x, u)


def _min_of_products(
    mats: Sequence[TropicalMatrix],
    input_mats: Sequence[TropicalMatrix],
    x: Sequence[Weight],
    u: Sequence[Weight],
) -> tuple[Weight, ...]:
    out: list[Weight] | None = None
    for a, b in zip(mats, input_mats):
        vec = list(a.apply(x))
        if b.cols:
            for i, v in enumerate(b.apply(u)):
                vec[i] = oplus(vec[i], v)
        if out is None:
            out = vec
        else:
            out = [oplus_dual(p, q) for p, q in zip(out, vec)]
    assert out is not None
    return tuple(out)


def to_matrix_form(
    state_forms: Sequence[ConjunctiveForm],
    output_forms: Sequence[ConjunctiveForm],
    n_state: int,
    n_input: int = 0,
) -> MatrixForm:
    """Stack per-component conjunctive forms into shared-depth matrix lists.

    Components rarely agree on projection count, so each list is padded by
    repeating its last projection; the min over duplicates is a no-op, which
    keeps the stacked form value-equivalent to the inputs.
    """
    if len(state_forms) != n_state:
        raise ValueError("need one conjunctive form per state component")

    def stack(
        forms: Sequence[ConjunctiveForm],
    ) -> tuple[tuple[TropicalMatrix, ...], tuple[TropicalMatrix, ...]]:
        if not forms:
            raise ValueError("empty conjunctive form list")
        depth = max(len(f.projections) for f in forms)
        mats_x: list[TropicalMatrix] = []
        mats_u: list[TropicalMatrix] = []
        for level in range(depth):
            rows_x: list[Sequence[Weight]] = []
            rows_u: list[Sequence[Weight]] = []
            for f in forms:
                p = f.projections[min(level, len(f.projections) - 1)]
                if len(p.state_coeffs) != n_state or len(p.input_coeffs) != n_input:
                    raise ValueError("projection width disagrees with declared dims")
                rows_x.append(p.state_coeffs)
                rows_u.append(p.input_coeffs)
            mats_x.append(
                TropicalMatrix(len(forms), n_state, tuple(w for r in rows_x for w in r))
            )
            mats_u.append(
                TropicalMatrix(len(forms), n_input, tuple(w for r in rows_u for w in r))
            )
        return tuple(mats_x), tuple(mats_u)

    a, b = stack(state_forms)
    c, d = stack(output_forms)
    return MatrixForm(A=a, B=b, C=c, D=d)


@dataclass(frozen=True)
class TransitionGraph:
    """One-step dependency edges, labelled x1..xn / u1..um / y1..yk."""

    edges: frozenset[tuple[str, str]]

    def __contains__(self, edge: tuple[str, str]) -> bool:
        return edge in self.edges

    def sorted_edges(self) -> list[tuple[str, str]]:
        return sorted(self.edges)


def x_label(i: int) -> str:
    return f"x{i + 1}"


def u_label(p: int) -> str:
    return f"u{p + 1}"


def y_label(j: int) -> str:
    return f"y{j + 1}"


def _finite_edges(
    mats: Sequence[TropicalMatrix],
    src_label,
    dst_label,
) -> set[tuple[str, str]]:
    edges: set[tuple[str, str]] = set()
    for m in mats:
        for j in range(m.rows):
            for i in range(m.cols):
                if is_finite(m[j, i]):
                    edges.add((src_label(i), dst_label(j)))
    return edges


def transition_graph_f(mf: MatrixForm) -> TransitionGraph:
    """Edge (x_i, x_j) iff some A[l] has a finite (j,i) entry; same for B."""
    edges = _finite_edges(mf.A, x_label, x_label)
    edges |= _finite_edges(mf.B, u_label, x_label)
    return TransitionGraph(frozenset(edges))


def transition_graph_h(mf: MatrixForm) -> TransitionGraph:
    """Edge (x_i, y_j) iff some C[m] has a finite (j,i) entry; same for D."""
    edges = _finite_edges(mf.C, x_label, y_label)
    edges |= _finite_edges(mf.D, u_label, y_label)
    return TransitionGraph(frozenset(edges))
