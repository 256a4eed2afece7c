"""Closed forms for the two-dimensional family indexed by an odd integer p.

R = [[2, 0], [1, 2]], B = {(0,0), (1,0), (0,p), (1,p)}, L = {(0,0), (1,0), (0,1), (1,1)}.
The attractor of the B-side maps lies between the graph of ``g`` and the
graph of ``g + p``, where ``g(x) = -sum_n (n/2) x_n / 2^n`` over the binary
digits of x. Its four extreme cycles split Z^2 along the integer function
``h``. Also houses the one-dimensional quarter system (R=[4], B={0,2},
L={0,1}) used as a complete-spectrum reference.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BadDyadicError, OutOfRangeError, UnsupportedPError
from .ifs import mu_hat
from .triple import HadamardTriple, make_triple

CYCLE_IDS = ("00", "10", "01", "m11")
CYCLE_POINTS = {"00": (0, 0), "10": (1, 0), "01": (0, 1), "m11": (-1, 1)}
DEFAULT_G_BITS = 60


def _check_p(p: int) -> int:
    if int(p) != p or p < 1 or p % 2 == 0:
        raise ValueError(f"p must be an odd positive integer, got {p}")
    return int(p)


def example_triple(p: int) -> HadamardTriple:
    p = _check_p(p)
    return make_triple([[2, 0], [1, 2]],
                       [(0, 0), (1, 0), (0, p), (1, p)],
                       [(0, 0), (1, 0), (0, 1), (1, 1)])


def quarter_triple() -> HadamardTriple:
    return make_triple([[4]], [(0,), (2,)], [(0,), (1,)])


# --- the function g ------------------------------------------------------

@dataclass(frozen=True)
class DyadicExpansion:
    """First K binary digits of x in [0, 1].

    Dyadic rationals use the expansion ending in zeros; x = 1 has only the
    all-ones expansion. ``terminating`` is True when every digit past K is 0.
    """

    x: Fraction
    bits: tuple[int, ...]
    terminating: bool

    @classmethod
    def of(cls, x, K: int, left: bool = False) -> "DyadicExpansion":
        x = Fraction(x)
        if not 0 <= x <= 1:
            raise OutOfRangeError(f"{x} is outside [0, 1]")
        y = x
        if left or x == 1:
            if x == 0:
                raise OutOfRangeError("0 has no left expansion")
            n = _dyadic_level(x)
            if n is not None:
                # the all-ones tail: x - 2^-n followed by ones
                y = x - Fraction(1, 2**n)
                bits = [int(b) for b in _bits(y, K)]
                for m in range(n, K):
                    bits[m] = 1
                return cls(x, tuple(bits), False)
        bits = _bits(y, K)
        # terminating iff y * 2^K is an integer
        return cls(x, tuple(bits), (y * 2**K).denominator == 1)

    def value(self) -> Fraction:
        return sum((Fraction(b, 2 ** (i + 1)) for i, b in enumerate(self.bits)), Fraction(0))


def _bits(y: Fraction, K: int) -> list[int]:
    num, den = y.numerator, y.denominator
    out = []
    for _ in range(K):
        num *= 2
        b = int(num >= den)
        out.append(b)
        num -= b * den
    return out


def _dyadic_level(x: Fraction):
    """n with x = k / 2^n, k odd, or None; x = 1 has level 0."""
    den = x.denominator
    if den & (den - 1):
        return None
    return den.bit_length() - 1


def g_tail_bound(K: int) -> float:
    """Bound on the neglected digits: sum_{n > K} n / 2^{n+1} = (K + 2) / 2^{K+1}."""
    return (K + 2) / 2 ** (K + 1)


def _g_from_bits(bits) -> float:
    return -math.fsum(n * b / 2 ** (n + 1) for n, b in enumerate(bits, start=1))


def g(x, K: int = DEFAULT_G_BITS) -> float:
    """g from the first K digits of the expansion ending in zeros."""
    return _g_from_bits(DyadicExpansion.of(x, K).bits)


def g_left(x, K: int = DEFAULT_G_BITS) -> float:
    """The left limit of g, from the expansion ending in ones."""
    return _g_from_bits(DyadicExpansion.of(x, K, left=True).bits)


def g_exact(x) -> Fraction:
    """g at a rational x in [0, 1], exactly.

    ``g(x) = -x/2 + g(2x mod 1)/2`` and the doubling orbit of a rational is
    eventually periodic, so the value solves a linear equation on the period.
    """
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise OutOfRangeError(f"{x} is outside [0, 1]")
    if x == 1:
        return g_left_exact(x)
    orbit: list[Fraction] = []
    seen: dict[Fraction, int] = {}
    y = x
    while y not in seen:
        seen[y] = len(orbit)
        orbit.append(y)
        y = 2 * y - int(2 * y)
    j = seen[y]
    period = orbit[j:]
    # g(y_j) = sum_k (-y_k/2) / 2^(k-j) + g(y_j) / 2^len(period)
    s = sum((-v / 2 / 2**k for k, v in enumerate(period)), Fraction(0))
    gj = s / (1 - Fraction(1, 2 ** len(period)))
    val = gj
    for v in reversed(orbit[:j]):
        val = -v / 2 + val / 2
    return val


def g_left_exact(x) -> Fraction:
    """Left limit of g at a rational in (0, 1]; equals g away from dyadics."""
    x = Fraction(x)
    if not 0 < x <= 1:
        raise OutOfRangeError(f"{x} has no left limit in [0, 1]")
    n = _dyadic_level(x)
    if n is None:
        return g_exact(x)
    return g_exact(x - Fraction(1, 2**n)) - Fraction(n + 2, 2 ** (n + 1))


def jump(k: int, n: int) -> Fraction:
    """g(k/2^n) - g(k/2^n -), for odd k with 0 < k < 2^n: exactly 2^-n."""
    if n < 1 or k % 2 == 0 or not 0 < k < 2**n:
        raise BadDyadicError(f"{k}/2^{n} is not a reduced dyadic in (0, 1)")
    return Fraction(1, 2**n)


def nowhere_diff_witness(n: int) -> list[tuple[Fraction, Fraction, Fraction]]:
    """For each dyadic interval [j/2^n, (j+1)/2^n), a pair straddling its level-(n+1) jump.

    Returns (x, y, quotient) with x the midpoint, y just left of it and
    quotient = (g(x) - g(y)) / (x - y), all exact.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    out = []
    gap = Fraction(1, 2 ** (n + 9))
    for j in range(2**n):
        x = Fraction(2 * j + 1, 2 ** (n + 1))
        y = x - gap
        out.append((x, y, (g_exact(x) - g_exact(y)) / (x - y)))
    return out


# --- the integer function h and the four sets ----------------------------

def h_int(k: int) -> int:
    """The integer threshold separating the cycle spectra in row t_2 = k."""
    k = int(k)
    if k >= 0:
        base, digits = 0, k
    else:
        n = 0
        while k + 2 ** (n + 1) < 0:
            n += 1
        base, digits = 2 ** (n + 1) - (n + 1) * 2**n, k + 2 ** (n + 1)
    total, m = 0, 0
    while digits:
        if digits & 1 and m >= 1:
            total += m * 2 ** (m - 1)
        digits >>= 1
        m += 1
    return base + total


def lambda_member(t, cycle_id: str) -> bool:
    t1, t2 = (int(c) for c in t)
    upper = t2 >= 0
    right = t1 >= h_int(t2)
    table = {"00": upper and right, "10": upper and not right,
             "m11": not upper and right, "01": not upper and not right}
    if cycle_id not in table:
        raise ValueError(f"unknown cycle id {cycle_id!r}")
    return table[cycle_id]


# --- Fourier transform and spectral identities ---------------------------

def sinc_phase(x) -> np.ndarray:
    """(e^{2 pi i x} - 1) / (2 pi i x), equal to 1 at x = 0."""
    x = np.asarray(x, dtype=float)
    return np.exp(1j * np.pi * x) * np.sinc(x)


def graph_integral(t1, t2, depth: int = 50) -> np.ndarray:
    """int_0^1 exp(2 pi i (t1 x + t2 g(x))) dx via the self-similarity of g.

    Splitting [0, 1] in halves and using ``g((x+b)/2) = -(x+b)/4 + g(x)/2``
    gives ``I(t1, t2) = (1 + e^{2 pi i s}) / 2 * I(s, t2 / 2)`` with
    ``s = t1/2 - t2/4``; after ``depth`` steps the remaining factor is 1.
    """
    s = np.asarray(t1, dtype=float)
    u = np.asarray(t2, dtype=float)
    out = np.ones(np.broadcast(s, u).shape, dtype=complex)
    for _ in range(depth):
        s = s / 2 - u / 4
        u = u / 2
        out = out * (1 + np.exp(2j * np.pi * s)) / 2
    return out


def mu_hat_closed(p: int, t1, t2, depth: int = 50):
    """Fourier transform of the invariant measure from the graph of g."""
    p = _check_p(p)
    val = graph_integral(t1, t2, depth) * sinc_phase(p * np.asarray(t2, dtype=float))
    return complex(val) if np.ndim(val) == 0 else val


def sinc_ratio(p: int, t) -> np.ndarray | float:
    """sin(p pi t) / (p sin(pi t)), with its limit at integers."""
    t = np.asarray(t, dtype=float)
    s = np.sin(np.pi * t)
    near = np.abs(s) < 1e-6
    safe = np.where(near, 1.0, s)
    val = np.sin(p * np.pi * t) / (p * safe)
    # near an integer m: (-1)^{m(p-1)} (1 - (p^2 - 1) pi^2 eps^2 / 6)
    m = np.round(t)
    eps = t - m
    series = (1 - (p * p - 1) * np.pi**2 * eps**2 / 6) * np.where((m * (p - 1)) % 2 == 0, 1.0, -1.0)
    out = np.where(near, series, val)
    return float(out) if out.ndim == 0 else out


def row_target(p: int, t2) -> float:
    """sin^2(p pi t2) / (p pi t2)^2."""
    return float(np.sinc(p * float(t2)) ** 2)


def row_sum_check(p: int, t1: float, t2: float, n_range: int = 200, depth: int = 50) -> dict:
    """Sum of |mu_hat(t1 + n, t2)|^2 over |n| <= n_range against its closed form.

    The neglected terms decay like 1/n^2, so the truncation error behaves
    like C / n_range; ``tail_estimate`` extrapolates it from n_range/2.
    """
    triple = example_triple(p)

    def partial(n):
        ns = np.arange(-n, n + 1)
        pts = np.stack([t1 + ns, np.full(ns.shape, float(t2))], axis=-1)
        return float(np.sum(np.abs(mu_hat(triple, pts, depth)) ** 2))

    lhs = partial(n_range)
    rhs = row_target(p, t2)
    half = partial(max(n_range // 2, 1))
    return {"lhs": lhs, "rhs": rhs, "defect": abs(lhs - rhs), "tail_estimate": abs(lhs - half)}


def harmonic_target(p: int, t):
    """(sin(p pi t_2) / (p sin(pi t_2)))^2 for one point or a batch."""
    return np.asarray(sinc_ratio(p, np.asarray(t, dtype=float)[..., 1])) ** 2


def trig_identity_defect(t2) -> float:
    """For p = 3: |sin(3 pi t)/(3 sin(pi t)) - (3 - 4 sin^2(pi t))/3|."""
    return float(np.abs(sinc_ratio(3, t2) - (3 - 4 * np.sin(np.pi * np.asarray(t2)) ** 2) / 3).max())


def integer_box(radius: int) -> np.ndarray:
    r = int(radius)
    ax = np.arange(-r, r + 1)
    return np.stack(np.meshgrid(ax, ax, indexing="ij"), axis=-1).reshape(-1, 2)


def predicate_spectrum(cycle_id: str, radius: int) -> np.ndarray:
    """Integer points of Λ(C) in the max-norm box, by the h-predicates."""
    pts = integer_box(radius)
    mask = np.array([lambda_member(t, cycle_id) for t in pts])
    return pts[mask]


def harmonic_sum_check(p: int, t, radius: int = 40, depth: int = 50) -> dict:
    """Sum over the four cycles of truncated completeness sums vs the closed form."""
    triple = example_triple(p)
    t = np.asarray(t, dtype=float)
    parts = {}
    for cid in CYCLE_IDS:
        pts = predicate_spectrum(cid, radius)
        parts[cid] = float(np.sum(np.abs(mu_hat(triple, t + pts, depth)) ** 2))
    lhs = math.fsum(parts.values())
    rhs = float(harmonic_target(p, t))
    out = {"lhs": lhs, "rhs": rhs, "defect": abs(lhs - rhs), "parts": parts}
    if p == 3:
        out["trig_identity_defect"] = trig_identity_defect(t[1])
    return out


def hurwitz_zeta2(t: float, n_terms: int = 10**4) -> float:
    """sum_{n >= 0} 1/(t+n)^2 by direct summation plus an Euler-Maclaurin tail."""
    n = np.arange(n_terms)
    head = math.fsum(1.0 / (t + n) ** 2)
    end = t + n_terms
    return head + 1.0 / end + 1.0 / (2 * end**2)


def zeta_split_check(p: int, t, radius: int = 40, depth: int = 50) -> dict:
    """Upper-half and lower-half sums of cycle completeness against Hurwitz zeta forms.

    Row t_2 + n contributes sin^2(p pi t_2) / (p pi (t_2 + n))^2, so the
    upper half is ``sin^2(p pi t_2) / (p^2 pi^2) * zeta_2(t_2)`` and the lower
    half ``sin^2(p pi t_2) / (p^2 pi^2) * (zeta_2(-t_2) - 1/t_2^2)``.
    Requires t_2 not an integer.
    """
    t = np.asarray(t, dtype=float)
    t2 = float(t[1])
    if float(t2).is_integer():
        raise ValueError("t_2 must not be an integer")
    res = harmonic_sum_check(p, t, radius, depth)["parts"]
    c = math.sin(p * math.pi * t2) ** 2 / (p * math.pi) ** 2
    upper_rhs = c * hurwitz_zeta2(t2)
    lower_rhs = c * (hurwitz_zeta2(-t2) - 1 / t2**2) if t2 > 0 else c * hurwitz_zeta2(1 - t2)
    upper = res["00"] + res["10"]
    lower = res["m11"] + res["01"]
    return {
        "upper": {"lhs": upper, "rhs": upper_rhs, "defect": abs(upper - upper_rhs)},
        "lower": {"lhs": lower, "rhs": lower_rhs, "defect": abs(lower - lower_rhs)},
    }


def h_Q(t, p: int = 3) -> np.ndarray | float:
    """Harmonic function of the non-cycle invariant set, known only for p = 3."""
    if p != 3:
        raise UnsupportedPError(f"closed form known only for p = 3, not {p}")
    t = np.asarray(t, dtype=float)
    val = 1 - (1 - 4 / 3 * np.sin(np.pi * t[..., 1]) ** 2) ** 2
    return float(val) if np.ndim(val) == 0 else val


# --- doubling orbits and the invariant segments --------------------------

def doubling_orbits(p: int) -> list[list[int]]:
    """Orbits of x -> 2x mod p on {1, ..., p-1}, each listed from its smallest element."""
    p = _check_p(p)
    seen: set[int] = set()
    out = []
    for a in range(1, p):
        if a in seen:
            continue
        orbit = []
        x = a
        while x not in orbit:
            orbit.append(x)
            x = 2 * x % p
        seen.update(orbit)
        out.append(orbit)
    return out


@dataclass(frozen=True)
class Segment:
    """The horizontal segment {(t, height) : left <= t <= right}."""

    height: Fraction
    left: Fraction
    right: Fraction


def invariant_set_M(p: int, orbit) -> list[Segment]:
    p = _check_p(p)
    out = []
    for a in orbit:
        eta = Fraction(a, p)
        lo = g_exact(eta)
        out.append(Segment(eta, lo, lo + 1))
    return out


def segment_transitions(p: int, point) -> list[int]:
    """Indices of L with nonzero transfer weight at a point, e.g. of a segment."""
    from .transfer import transfer_weights
    w = transfer_weights(example_triple(p), np.asarray(point, dtype=float))
    return [i for i, v in enumerate(w) if v > 1e-12]


# --- conformance report --------------------------------------------------

def _entry(lhs, rhs, tol) -> dict:
    defect = abs(float(lhs) - float(rhs))
    return {"lhs": float(lhs), "rhs": float(rhs), "defect": defect, "tolerance": tol, "pass": defect < tol}


def conformance_suite(p: int, depth: int = 50, radius: int = 40, n_range: int = 200) -> dict:
    """Identity-by-identity report; keys sorted for byte-stable JSON."""
    p = _check_p(p)
    from .transfer import harmonic_defect

    rep: dict[str, dict] = {}
    rep["g(1/3)"] = _entry(g(Fraction(1, 3)), Fraction(-4, 9), 1e-10)
    rep["g(2/3)"] = _entry(g(Fraction(2, 3)), Fraction(-5, 9), 1e-10)
    rep["g(1/2)"] = _entry(g(Fraction(1, 2)), Fraction(-1, 4), 1e-10)
    rep["g_left(1/2)"] = _entry(g_left(Fraction(1, 2)), Fraction(-3, 4), 1e-10)
    worst = max(abs(g_exact(Fraction(k, 2**n)) - g_left_exact(Fraction(k, 2**n)) - jump(k, n))
                for n in range(1, 9) for k in range(1, 2**n, 2))
    rep["jump_levels_1_8"] = _entry(worst, 0, 1e-15)
    bad = sum(2 * h_int(n) + n != h_int(2 * n + j) for n in range(-10**4, 10**4 + 1) for j in (0, 1))
    rep["h_functional_equation"] = {"violations": bad, "range": [-10**4, 10**4], "pass": bad == 0}
    qmin = min(q for n in range(1, 11) for _, _, q in nowhere_diff_witness(n))
    rep["nowhere_diff_min_quotient"] = {"lhs": float(qmin), "rhs": 0.25, "bound": "lhs > rhs",
                                        "pass": qmin > Fraction(1, 4)}
    triple = example_triple(p)
    r = row_sum_check(p, 0.25, 0.4, n_range, depth)
    rep["row_sum(0.25,0.4)"] = _entry(r["lhs"], r["rhs"], 5e-3)
    hs = harmonic_sum_check(p, (0.3, 0.25), radius, depth)
    rep["harmonic_sum(0.3,0.25)"] = _entry(hs["lhs"], hs["rhs"], 1e-2)
    zs = zeta_split_check(p, (0.3, 0.25), radius, depth)
    rep["zeta_split_upper(0.3,0.25)"] = _entry(zs["upper"]["lhs"], zs["upper"]["rhs"], 1e-2)
    rep["zeta_split_lower(0.3,0.25)"] = _entry(zs["lower"]["lhs"], zs["lower"]["rhs"], 1e-2)
    grid = np.arange(9) / 9
    tt = np.stack(np.meshgrid(grid, grid, indexing="ij"), axis=-1).reshape(-1, 2)
    diff = np.max(np.abs(mu_hat(triple, tt, depth) - mu_hat_closed(p, tt[:, 0], tt[:, 1], depth)))
    rep["mu_hat_closed_vs_product"] = _entry(diff, 0, 1e-8)
    rng = np.random.default_rng(0)
    samples = rng.uniform(-2, 2, size=(200, 2))
    rep["sinc_ratio_harmonic"] = _entry(
        harmonic_defect(triple, lambda s: harmonic_target(p, s), samples).max_defect, 0, 1e-9)
    if p == 3:
        rep["h_Q_harmonic"] = _entry(harmonic_defect(triple, h_Q, samples).max_defect, 0, 1e-9)
        rep["trig_identity_p3"] = _entry(trig_identity_defect(samples[:, 1]), 0, 1e-12)
        segs = invariant_set_M(3, [1, 2])
        ends = [(s.height, s.left, s.right) for s in segs]
        want = [(Fraction(1, 3), Fraction(-4, 9), Fraction(5, 9)),
                (Fraction(2, 3), Fraction(-5, 9), Fraction(4, 9))]
        rep["M_segments_p3"] = {"lhs": [[str(x) for x in e] for e in ends],
                                "rhs": [[str(x) for x in e] for e in want], "pass": ends == want}
    return dict(sorted(rep.items()))
