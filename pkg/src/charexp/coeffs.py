"""Recurrence-defined coefficient families.

Two families are generated here:

* ``a_series`` -- the coefficients a_n(kappa) of the formal power-series
  solutions at infinity, from their eight-term recurrence.

* ``b_table`` -- the finer, triangularly supported table b(kappa; m, n1, n2)
  from the kernel-expansion recurrence.  The a-coefficients are grading-level
  sums of the b-coefficients:  a_n = sum of b(kappa; m, n1, n2) over
  3m - 2 n1 - n2 = n  (``a_from_b``), which provides an exact internal
  cross-check since both sides are independent recurrences.

When D3 = D6 = 0 the (n1, n2) = (0, 0) column of the table collapses to a
two-term recurrence with the closed form

    b(kappa; m, 0, 0) = (2 kappa s0)^{-m} ((tau-L)/3)_m ((tau+L)/3)_m / m!,

implemented in ``b_closed_form`` as a regression oracle.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

from mpmath import mp, mpf

from .errors import IncompleteTableError, InvalidParametersError
from .frame import EquationParams, Frame, _check_kappa
from .special import factorial, pochhammer

__all__ = ["CoeffSeries", "BTable", "a_series", "b_table", "a_from_b", "b_closed_form"]


@dataclass(frozen=True)
class CoeffSeries:
    """Formal-solution coefficients a_0..a_N for one sign kappa (a_0 = 1)."""

    kappa: int
    values: tuple

    def __getitem__(self, n: int):
        return self.values[n]

    def __len__(self) -> int:
        return len(self.values)


def a_series(frame: Frame, params: EquationParams, kappa: int, N: int) -> CoeffSeries:
    """Coefficients a_0..a_N of the formal solution exp(kappa P) z^{-tau(kappa)} sum a_n z^{-n}.

    Recurrence (a_{-8} = ... = a_{-1} = 0, a_0 = 1):

        6 kappa p3 n a_n = [-4 kappa p2 (tau+n-2) + p1^2 - B2] a_{n-1}
                         + [-2 kappa p1 (tau+n-5/2) - B1] a_{n-2}
                         + (tau+n-3-L)(tau+n-3+L) a_{n-3}
                         - sum_{m=1..6} D_m a_{n-m-3}.
    """
    _check_kappa(kappa)
    if N < 0:
        raise ValueError("N must be >= 0")
    p1, p2, p3 = frame.p1, frame.p2, frame.p3
    tau = frame.tau(kappa)
    L = params.L
    a = [mpf(1)]

    def prev(i: int):
        return a[i] if i >= 0 else mpf(0)

    for n in range(1, N + 1):
        acc = (-4 * kappa * p2 * (tau + n - 2) + p1 ** 2 - params.B[1]) * prev(n - 1)
        acc += (-2 * kappa * p1 * (tau + n - mpf(5) / 2) - params.B[0]) * prev(n - 2)
        acc += (tau + n - 3 - L) * (tau + n - 3 + L) * prev(n - 3)
        for m in range(1, 7):
            acc -= params.D[m - 1] * prev(n - m - 3)
        a.append(acc / (6 * kappa * p3 * n))
    return CoeffSeries(kappa=kappa, values=tuple(a))


@dataclass
class BTable:
    """Triangular table of b(kappa; m, n1, n2) up to caps (M, N1cap, N2cap).

    Entries exist only on the support n1 + n2 <= m, n1 <= N1cap, n2 <= N2cap;
    everything off-support, at negative indices, or on the zero grading
    3m - 2n1 - n2 = 0 (other than the origin) is exactly zero.  Completed
    rows are never mutated; ``extend`` appends rows for larger m using the
    same recurrence (not thread-safe while extending).
    """

    kappa: int
    M: int
    N1cap: int
    N2cap: int
    _frame: Frame = field(repr=False)
    _params: EquationParams = field(repr=False)
    _entries: dict = field(repr=False, default_factory=dict)

    def get(self, m: int, n1: int, n2: int):
        """b(kappa; m, n1, n2); exact zeros are returned without storage."""
        if m < 0 or n1 < 0 or n2 < 0:
            return mpf(0)
        if n1 + n2 > m:
            return mpf(0)
        if 3 * m - 2 * n1 - n2 == 0 and (m, n1, n2) != (0, 0, 0):
            return mpf(0)
        if m > self.M or n1 > self.N1cap or n2 > self.N2cap:
            raise IncompleteTableError(
                f"b({self.kappa}; {m}, {n1}, {n2}) beyond caps "
                f"(M={self.M}, N1cap={self.N1cap}, N2cap={self.N2cap})"
            )
        return self._entries[(m, n1, n2)]

    def extend(self, new_M: int) -> None:
        """Append rows m = M+1 .. new_M; existing entries are unchanged."""
        if new_M <= self.M:
            return
        _fill_rows(self, self.M + 1, new_M)
        self.M = new_M

    def dump(self) -> str:
        """Debug dump, one line per stored entry: 'm n1 n2 value' in decimal."""
        out = io.StringIO()
        for (m, n1, n2) in sorted(self._entries):
            out.write(f"{m} {n1} {n2} {mp.nstr(self._entries[(m, n1, n2)], mp.dps)}\n")
        return out.getvalue()


def _fill_rows(table: BTable, m_lo: int, m_hi: int) -> None:
    frame, params = table._frame, table._params
    kappa = table.kappa
    s0, t10, t20 = frame.s0, frame.t10, frame.t20
    tau = frame.tau(kappa)
    L = params.L
    B1, B2 = params.B[0], params.B[1]
    D = params.D
    entries = table._entries

    def get(m, n1, n2):
        if m < 0 or n1 < 0 or n2 < 0 or n1 + n2 > m:
            return mpf(0)
        if 3 * m - 2 * n1 - n2 == 0 and (m, n1, n2) != (0, 0, 0):
            return mpf(0)
        return entries[(m, n1, n2)]

    for m in range(m_lo, m_hi + 1):
        for n1 in range(min(m, table.N1cap) + 1):
            for n2 in range(min(m - n1, table.N2cap) + 1):
                if (m, n1, n2) == (0, 0, 0):
                    entries[(0, 0, 0)] = mpf(1)
                    continue
                g = 3 * m - 2 * n1 - n2
                if g == 0:
                    # constants of integration; fixed to zero
                    entries[(m, n1, n2)] = mpf(0)
                    continue
                acc = ((g + tau - 3) ** 2 - L ** 2) * get(m - 1, n1, n2)
                acc += (-4 * kappa * t10 * (g + tau - 2) + t20 ** 2 - B2) * get(m - 1, n1 - 1, n2)
                acc += (-2 * kappa * t20 * (g + tau - mpf(5) / 2) - B1) * get(m - 1, n1, n2 - 1)
                acc -= D[0] * get(m - 2, n1 - 1, n2)
                acc -= D[1] * get(m - 2, n1, n2 - 1)
                acc -= D[2] * get(m - 2, n1, n2)
                acc -= D[3] * get(m - 3, n1 - 1, n2)
                acc -= D[4] * get(m - 3, n1, n2 - 1)
                acc -= D[5] * get(m - 3, n1, n2)
                entries[(m, n1, n2)] = acc / (6 * kappa * s0 * g)


def b_table(
    frame: Frame,
    params: EquationParams,
    kappa: int,
    M: int,
    N1cap: int,
    N2cap: int,
) -> BTable:
    """Fill the b-table in increasing m (rows m-1, m-2, m-3 are then available),
    lexicographic (n1, n2) within a row."""
    _check_kappa(kappa)
    if M < 0 or N1cap < 0 or N2cap < 0:
        raise ValueError("table caps must be >= 0")
    table = BTable(kappa=kappa, M=M, N1cap=N1cap, N2cap=N2cap, _frame=frame, _params=params)
    _fill_rows(table, 0, M)
    return table


def a_from_b(btable: BTable, n: int):
    """a_n(kappa) as the finite sum of b(kappa; m, n1, n2) over 3m - 2n1 - n2 = n.

    The index set intersected with the support triangle needs m <= n,
    n1 <= n and n2 <= n // 2; the caps are checked up front so a too-small
    table raises instead of silently truncating.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if btable.M < n or btable.N1cap < n or btable.N2cap < n // 2:
        raise IncompleteTableError(
            f"a_from_b(n={n}) needs caps at least (M={n}, N1cap={n}, N2cap={n // 2}); "
            f"table has (M={btable.M}, N1cap={btable.N1cap}, N2cap={btable.N2cap})"
        )
    total = mpf(0)
    for m in range((n + 2) // 3, n + 1):
        r = 3 * m - n
        # n2 = r - 2 n1 >= 0 and n1 + n2 <= m  =>  max(0, 2m - n) <= n1 <= r // 2
        for n1 in range(max(0, 2 * m - n), r // 2 + 1):
            total += btable.get(m, n1, r - 2 * n1)
    return total


def b_closed_form(frame: Frame, params: EquationParams, kappa: int, m: int):
    """Closed form of b(kappa; m, 0, 0), valid only when D3 = D6 = 0:

        (2 kappa s0)^{-m} ((tau(kappa) - L)/3)_m ((tau(kappa) + L)/3)_m / m!
    """
    _check_kappa(kappa)
    if params.D[2] != 0 or params.D[5] != 0:
        raise InvalidParametersError("b_closed_form requires D3 = D6 = 0")
    if m < 0:
        raise ValueError("m must be >= 0")
    tau = frame.tau(kappa)
    L = params.L
    return (
        (2 * kappa * frame.s0) ** (-m)
        * pochhammer((tau - L) / 3, m)
        * pochhammer((tau + L) / 3, m)
        / factorial(m)
    )
