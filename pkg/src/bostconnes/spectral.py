"""Truncated representations on l^2({1..L}), Gibbs states and spectral probes.

The representation attached to a base point rho0 in Z-hat^x acts on the basis
``eps_n`` (n a positive integer) by ``pi(f) eps_m = sum_n f(n/m, m rho0) eps_n``.
Truncating to ``n, m <= L`` gives a finite matrix; identities that involve
products only hold exactly on an interior block, see :func:`interior_size`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np

from .arith import ResidueClass, factorize, lcm
from .groupoid import HeckeElement, analytic_evolve, convolve, time_evolve

BasePoint = Union[int, ResidueClass]

DEFAULT_STATE_CUTOFF = 10**4
DEFAULT_MATRIX_CUTOFF = 64


def base_residue(rho0: BasePoint, level: int) -> int:
    """Residue of the base point modulo ``level``.

    An integer ``r`` stands for the integer point ``r`` and must be prime to
    ``level``. A :class:`ResidueClass` ``r mod N`` must be invertible; it is
    lifted to the unit that is ``r`` at primes dividing ``N`` and ``1`` elsewhere,
    so every level sees the same point of Z-hat^x.
    """
    if isinstance(rho0, ResidueClass):
        if not rho0.is_invertible():
            raise ValueError(f"base point {rho0.residue} mod {rho0.modulus} is not invertible")
        out, mod = 0, 1
        for p, k in factorize(level):
            pk = p**k
            local = rho0.residue % pk if rho0.modulus % p == 0 else 1
            out = _crt(out, mod, local, pk)
            mod *= pk
        return out % level
    r = int(rho0)
    if math.gcd(r, level) != 1:
        raise ValueError(f"base point {r} is not invertible modulo {level}")
    return r % level


def _crt(a: int, m: int, b: int, n: int) -> int:
    # m, n coprime
    return (a + m * ((b - a) * pow(m, -1, n) % n)) % (m * n)


def check_beta(beta: float, abscissa: float = 1.0) -> None:
    if not beta > abscissa or not math.isfinite(beta):
        raise ValueError(f"beta must exceed {abscissa:g} (got {beta:g}); the series diverges")


def check_cutoff(cutoff: int) -> None:
    if int(cutoff) != cutoff or cutoff < 1:
        raise ValueError(f"cutoff must be a positive integer, got {cutoff}")


# --- representation --------------------------------------------------------

@dataclass(frozen=True)
class TruncatedRepresentation:
    """Sparse image of a HeckeElement: entries ``(n, m) -> value`` with 1-based indices."""

    cutoff: int
    base_point: BasePoint
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray

    def dense(self) -> np.ndarray:
        out = np.zeros((self.cutoff, self.cutoff), dtype=complex)
        np.add.at(out, (self.rows - 1, self.cols - 1), self.values)
        return out

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = np.zeros(self.cutoff, dtype=complex)
        np.add.at(y, self.rows - 1, self.values * x[self.cols - 1])
        return y

    def rmatvec(self, y: np.ndarray) -> np.ndarray:
        x = np.zeros(self.cutoff, dtype=complex)
        np.add.at(x, self.cols - 1, np.conj(self.values) * y[self.rows - 1])
        return x

    def to_csv_rows(self) -> List[Tuple[int, int, float, float]]:
        order = np.lexsort((self.cols, self.rows))
        return [(int(self.rows[i]), int(self.cols[i]), float(self.values[i].real),
                 float(self.values[i].imag)) for i in order]


def represent(f: HeckeElement, rho0: BasePoint = 1, cutoff: int = DEFAULT_MATRIX_CUTOFF
              ) -> TruncatedRepresentation:
    """Truncated matrix of ``f`` with entries ``f(n/m, m rho0)`` for ``n, m <= cutoff``."""
    check_cutoff(cutoff)
    level = f.level
    r0 = base_residue(rho0, level)
    rows, cols, vals = [], [], []
    table = {}
    for (g, r), c in f.items():
        table.setdefault(g, {})[r] = c
    for g, by_res in table.items():
        p, q = g.numerator, g.denominator
        kmax = cutoff // max(p, q)
        if kmax == 0:
            continue
        k = np.arange(1, kmax + 1)
        m = q * k
        res = (m * r0) % level
        lookup = np.zeros(level, dtype=complex)
        for r, c in by_res.items():
            lookup[r] = c
        v = lookup[res]
        nz = v != 0
        rows.append(p * k[nz])
        cols.append(m[nz])
        vals.append(v[nz])
    if rows:
        return TruncatedRepresentation(cutoff, rho0, np.concatenate(rows), np.concatenate(cols),
                                       np.concatenate(vals))
    empty = np.zeros(0, dtype=np.int64)
    return TruncatedRepresentation(cutoff, rho0, empty, empty, np.zeros(0, dtype=complex))


def entry(f: HeckeElement, rho0: BasePoint, n: int, m: int) -> complex:
    """Single matrix entry straight from the defining formula (used as an oracle)."""
    from fractions import Fraction
    g = Fraction(n, m)
    if f.level % g.denominator:
        return 0j
    r0 = base_residue(rho0, f.level)
    return f(g, m * r0)


def interior_size(cutoff: int, *elements: HeckeElement) -> int:
    """Block ``n, m <= cutoff / prod(heights)`` on which products are not truncated."""
    h = 1
    for f in elements:
        h *= f.max_height()
    return cutoff // h


# --- Hamiltonian and partition function ------------------------------------

def hamiltonian_diagonal(cutoff: int) -> np.ndarray:
    return np.log(np.arange(1, cutoff + 1, dtype=float))


def hamiltonian_conjugation_check(f: HeckeElement, rho0: BasePoint = 1,
                                  cutoff: int = DEFAULT_MATRIX_CUTOFF, t: float = 1.0) -> float:
    """``max |pi(sigma_t f) - e^{itH} pi(f) e^{-itH}|`` over all matrix entries."""
    lhs = represent(time_evolve(f, t), rho0, cutoff)
    rep = represent(f, rho0, cutoff)
    h = hamiltonian_diagonal(cutoff)
    rhs_vals = np.exp(1j * t * h[rep.rows - 1]) * rep.values * np.exp(-1j * t * h[rep.cols - 1])
    key_l = lhs.rows * (cutoff + 1) + lhs.cols
    key_r = rep.rows * (cutoff + 1) + rep.cols
    keys = np.union1d(key_l, key_r)
    a = np.zeros(len(keys), dtype=complex)
    b = np.zeros(len(keys), dtype=complex)
    np.add.at(a, np.searchsorted(keys, key_l), lhs.values)
    np.add.at(b, np.searchsorted(keys, key_r), rhs_vals)
    return float(np.max(np.abs(a - b), initial=0.0))


@dataclass(frozen=True)
class SeriesValue:
    """A truncated Dirichlet series value with a rigorous bound on the omitted tail."""

    value: complex
    tail_bound: float
    cutoff: int
    beta: float

    def to_json(self) -> dict:
        return {"value_re": float(self.value.real), "value_im": float(self.value.imag),
                "tail_bound": self.tail_bound, "cutoff": self.cutoff, "beta": self.beta}


def zeta_tail(beta: float, cutoff: int) -> float:
    """``sum_{n > L} n^-beta <= L^{1-beta} / (beta - 1)``."""
    return cutoff ** (1.0 - beta) / (beta - 1.0)


def power_terms(beta: float, cutoff: int) -> np.ndarray:
    """``n^-beta`` for ``n = 1..cutoff``."""
    return np.arange(1, cutoff + 1, dtype=float) ** (-beta)


def ordered_sum(values: np.ndarray) -> complex:
    """Correctly rounded sum; independent of chunking, so results are bit-reproducible."""
    values = np.asarray(values)
    if np.iscomplexobj(values):
        return complex(math.fsum(values.real.tolist()), math.fsum(values.imag.tolist()))
    return math.fsum(values.tolist())


def partition_function(beta: float, cutoff: int) -> SeriesValue:
    """Partial Riemann zeta ``sum_{n <= L} n^-beta`` = Trace(e^{-beta H}) on the truncation."""
    check_beta(beta)
    check_cutoff(cutoff)
    return SeriesValue(ordered_sum(power_terms(beta, cutoff)), zeta_tail(beta, cutoff),
                       cutoff, beta)


# --- Gibbs states ----------------------------------------------------------

@dataclass(frozen=True)
class GibbsState:
    """Truncated KMS state ``Trace(pi(f) e^{-beta H}) / Trace(e^{-beta H})``."""

    beta: float
    base_point: BasePoint = 1
    cutoff: int = DEFAULT_STATE_CUTOFF

    def __post_init__(self):
        check_beta(self.beta)
        check_cutoff(self.cutoff)

    @property
    def normalization(self) -> float:
        return partition_function(self.beta, self.cutoff).value

    @property
    def tail_bound(self) -> float:
        return zeta_tail(self.beta, self.cutoff)


@dataclass(frozen=True)
class StateValue:
    value: complex
    error_bound: float


def diagonal_values(f: HeckeElement, rho0: BasePoint, cutoff: int) -> np.ndarray:
    """``f(1, n rho0)`` for ``n = 1..cutoff`` (the diagonal of the representation)."""
    level = f.level
    r0 = base_residue(rho0, level)
    lookup = np.zeros(level, dtype=complex)
    for (g, r), c in f.items():
        if g == 1:
            lookup[r] = c
    n = np.arange(1, cutoff + 1, dtype=np.int64)
    return lookup[(n * r0) % level]


def gibbs_evaluate(state: GibbsState, f: HeckeElement) -> StateValue:
    """``sum_{n <= L} f(1, n rho0) n^-beta / sum_{n <= L} n^-beta``.

    The error bound ``2 |f|_inf T / S`` (T the zeta tail, S the partial sum)
    covers the distance to the untruncated state.
    """
    weights = power_terms(state.beta, state.cutoff)
    s = ordered_sum(weights)
    value = ordered_sum(diagonal_values(f, state.base_point, state.cutoff) * weights) / s
    return StateValue(value, 2.0 * f.sup_norm() * state.tail_bound / s)


@dataclass(frozen=True)
class KMSResult:
    lhs: complex
    rhs: complex
    residual: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.residual <= self.tolerance

    def to_json(self) -> dict:
        return {"lhs_re": self.lhs.real, "lhs_im": self.lhs.imag,
                "rhs_re": self.rhs.real, "rhs_im": self.rhs.imag,
                "residual": self.residual, "tolerance": self.tolerance, "ok": self.ok}


def kms_check(state: GibbsState, f1: HeckeElement, f2: HeckeElement) -> KMSResult:
    """Residual of ``Phi(f1 sigma_{i beta}(f2)) = Phi(f2 f1)`` with its truncation tolerance."""
    a = gibbs_evaluate(state, convolve(f1, analytic_evolve(f2, state.beta)))
    b = gibbs_evaluate(state, convolve(f2, f1))
    return KMSResult(a.value, b.value, abs(a.value - b.value), a.error_bound + b.error_bound)


@dataclass(frozen=True)
class GNSResult:
    gns_value: complex
    state_value: complex
    deviation: float

    def to_json(self) -> dict:
        return {"gns_re": self.gns_value.real, "gns_im": self.gns_value.imag,
                "state_re": self.state_value.real, "state_im": self.state_value.imag,
                "relative_deviation": self.deviation}


def gns_check(state: GibbsState, f: HeckeElement, sample_size: int = 512,
              weight_exponent: float | None = None) -> GNSResult:
    """Compare ``<(pi(f) (x) 1) Omega, Omega>`` with the state on ``n <= sample_size``.

    ``Omega = sum_n w_n eps_n (x) eps_n`` with ``w_n`` proportional to
    ``n^{weight_exponent}``, by default ``-beta/2``; normalized so ``|Omega| = 1``.
    In matrix form Omega is ``diag(w)`` and the pairing is ``trace(W^* A W)``.
    The deviation is relative to the summed absolute contributions.
    """
    check_cutoff(sample_size)
    exponent = -state.beta / 2 if weight_exponent is None else weight_exponent
    w = np.arange(1, sample_size + 1, dtype=float) ** exponent
    w /= math.sqrt(ordered_sum(w * w))
    a = represent(f, state.base_point, sample_size).dense()
    big_w = np.diag(w)
    gns = complex(np.trace(big_w.conj().T @ a @ big_w))
    ref_state = GibbsState(state.beta, state.base_point, sample_size)
    ref = gibbs_evaluate(ref_state, f).value
    diag = diagonal_values(f, state.base_point, sample_size)
    scale = ordered_sum(np.abs(diag) * power_terms(state.beta, sample_size)) \
        / partition_function(state.beta, sample_size).value
    dev = abs(gns - ref)
    return GNSResult(gns, ref, dev / scale if scale > 0 else dev)


# --- norms and commutants --------------------------------------------------

@dataclass(frozen=True)
class NormBound:
    estimate: float
    bound: float
    iterations: int
    converged: bool

    def to_json(self) -> dict:
        return {"estimate": self.estimate, "l1_bound": self.bound,
                "iterations": self.iterations, "converged": self.converged,
                "within_bound": self.estimate <= self.bound * (1 + 1e-12)}


def norm_bound(f: HeckeElement, rho0: BasePoint = 1, cutoff: int = DEFAULT_MATRIX_CUTOFF,
               max_steps: int = 200, tol: float = 1e-9) -> NormBound:
    """Largest singular value by power iteration on ``A^* A``, plus the l1 bound.

    The estimate is a Rayleigh quotient, so it never exceeds the true norm.
    """
    rep = represent(f, rho0, cutoff)
    bound = f.l1_bound()
    x = np.ones(cutoff, dtype=complex)
    x /= np.linalg.norm(x)
    est, steps, converged = 0.0, 0, False
    for steps in range(1, max_steps + 1):
        y = rep.rmatvec(rep.matvec(x))
        new = math.sqrt(max(float(np.vdot(x, y).real), 0.0))
        ny = np.linalg.norm(y)
        if ny == 0:
            est, converged = 0.0, True
            break
        x = y / ny
        if abs(new - est) <= tol * max(new, 1e-300):
            est, converged = new, True
            break
        est = new
    return NormBound(est, bound, steps, converged)


def generator_suite(cutoff: int, modulus: int = 4, prime_bound: int | None = None
                    ) -> List[Tuple[str, HeckeElement]]:
    """``delta_p`` for primes ``p <= prime_bound`` (default: the cutoff), then the classes ``(1, r mod modulus)``."""
    from .arith import primes_up_to
    bound = cutoff if prime_bound is None else prime_bound
    suite = [(f"delta_{p}", HeckeElement.delta(p)) for p in primes_up_to(bound)]
    suite += [(f"class_{r}_mod_{modulus}", HeckeElement.indicator(1, r, modulus))
              for r in range(modulus)]
    return suite


def commutant_dimensions(fs: Sequence[HeckeElement], rho0: BasePoint = 1, cutoff: int = 16,
                         rel_tol: float = 1e-9) -> List[int]:
    """Joint commutant dimension after each prefix of ``fs`` (entry 0 is the empty set).

    Each element contributes both ``pi(f)`` and ``pi(f)^*``: the commutant of a
    representation of a *-algebra is what is being probed. The dimension is the
    nullity of ``sum_i C_i^* C_i`` with ``C_i = A_i (x) 1 - 1 (x) A_i^T``
    acting on row-major ``vec(X)``.
    """
    check_cutoff(cutoff)
    n = cutoff
    eye = np.eye(n)
    gram = np.zeros((n * n, n * n), dtype=complex)
    dims = [n * n]
    for f in fs:
        a = represent(f, rho0, cutoff).dense()
        for op in (a, a.conj().T):
            c = np.kron(op, eye) - np.kron(eye, op.T)
            gram += c.conj().T @ c
        eig = np.linalg.eigvalsh(gram)
        top = max(float(eig[-1]), 0.0)
        dims.append(int(np.sum(eig <= rel_tol * top)) if top > 0 else n * n)
    return dims


def commutant_probe(fs: Iterable[HeckeElement], rho0: BasePoint = 1, cutoff: int = 16) -> int:
    """Dimension of ``{X : X pi(f) = pi(f) X, X pi(f)^* = pi(f)^* X for all f}``."""
    return commutant_dimensions(list(fs), rho0, cutoff)[-1]


COMMUTANT_SUITES = {
    # every prime up to the cutoff: the truncated *-algebra is irreducible
    "primes_to_cutoff": {"prime_bound": None, "cutoffs": (8, 12, 16, 24)},
    # the fixed small suite; primes above 7 stay unconstrained, so the dimension grows with the cutoff
    "primes_to_7": {"prime_bound": 7, "cutoffs": (16, 24, 32)},
}


def commutant_report(suites: Mapping[str, dict] | None = None, modulus: int = 4) -> dict:
    """Dimensions along each generator suite at several cutoffs (archived as a golden file)."""
    out = {}
    for name, cfg in (COMMUTANT_SUITES if suites is None else suites).items():
        runs = []
        for cutoff in cfg["cutoffs"]:
            suite = generator_suite(cutoff, modulus, cfg["prime_bound"])
            dims = commutant_dimensions([f for _, f in suite], 1, cutoff)
            runs.append({"cutoff": cutoff, "generators": ["none"] + [n for n, _ in suite],
                         "dimensions": dims})
        out[name] = {"prime_bound": cfg["prime_bound"], "runs": runs}
    return {"base_point": 1, "modulus": modulus, "suites": out}
