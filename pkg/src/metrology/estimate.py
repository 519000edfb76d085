"""Observables, error propagation and Monte Carlo phase estimation.

For a fixed input, layout and channel, the expectation of any operator X is
a trigonometric polynomial in the phase:

    <X>(phi) = sum_m c_m e^{i m phi},   c_m = tr(X E(rho_m)),

where rho_m keeps the entries of rho whose probe excitation counts differ
by m. ``ExpectationCurve`` stores the c_m once so Born probabilities, means
and slopes at any phase cost a handful of multiplications; adaptive runs,
branch inversion and the sweet-spot search all go through it.

Each observable is inverted on the branch (0, pi/k), k the number of
probes; every catalog observable is monotone there.
"""

import math
from typing import Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from src.linalg.matcore import CMat, allclose, dagger, eigh, is_hermitian
from src.metrology.fisher import qfi_scenario
from src.quantum.channel import (
    Layout,
    PhaseScenario,
    apply_noise,
    output_derivative,
    output_state,
)
from src.quantum.qstate import ParameterDomainError, basis_state, bell_basis, density
from src.schemas.results import EstimationRun
from src.utils.logging import log, get_logger
from src.utils.parallel import parallel_map
from src.utils.rng import (
    ADAPTIVE_STREAM,
    CHUNK_BATCHES,
    CHUNK_SHOTS,
    SAMPLE_STREAM,
    chunk_sizes,
    stream,
)
from src.utils.search import golden_minimize

MODULE = "estimate"
logger = get_logger()

STATIONARY_TOL = 1e-10
ZERO_QFI_TOL = 1e-12
# Eigenvalues closer than this share one outcome
DEGENERACY_TOL = 1e-9
# Click/outcome probabilities below this with a slope below it carry no information
NEGLIGIBLE = 1e-12
BISECTION_STEPS = 64
DEFAULT_BATCH = 50
FEEDBACK_GAIN = 0.5
SWEET_SPOT = math.pi / 2.0
# Fewer batches than this make the pooled variance unreliable
LOW_NU_BATCHES = 10

CatalogId = Literal["ad_ancilla", "depolarizing_single", "pauli_ancilla", "ad_noon4", "bell"]


class StationaryPointError(ArithmeticError):
    """d<O>/dphi vanishes at the operating point."""

    def __init__(self, message: str, phi: float, slope: float):
        super().__init__(message)
        self.phi = phi
        self.slope = slope


class ZeroInformationError(ArithmeticError):
    """The scenario carries no Fisher information about the phase."""

    def __init__(self, message: str, qfi: float):
        super().__init__(message)
        self.qfi = qfi


class BranchInversionError(ValueError):
    """<O>(phi) is flat on the inversion branch."""


# =============================================================================
# OBSERVABLES
# =============================================================================

class Observable(BaseModel):
    """Hermitian observable with its projective outcome model.

    ``values[k]`` is the outcome attached to ``projectors[k]``; values are
    ascending and distinct.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str
    matrix: np.ndarray
    values: np.ndarray
    projectors: tuple[np.ndarray, ...]

    @field_validator("matrix", "values")
    @classmethod
    def read_only(cls, v) -> np.ndarray:
        v = np.array(v)
        v.flags.writeable = False
        return v

    @model_validator(mode="after")
    def check_spectral(self) -> "Observable":
        if not is_hermitian(self.matrix):
            raise ValueError(f"observable {self.name} is not Hermitian")
        if len(self.projectors) != self.values.size:
            raise ValueError("one projector per outcome value")
        total = sum(self.projectors)
        if not allclose(total, np.eye(self.matrix.shape[0])):
            raise ValueError(f"projectors of {self.name} do not sum to the identity")
        rebuilt = sum(v * p for v, p in zip(self.values, self.projectors))
        if not allclose(rebuilt, self.matrix, tol=1e-10):
            raise ValueError(f"spectral decomposition of {self.name} does not rebuild it")
        return self

    @classmethod
    def from_matrix(cls, name: str, matrix: CMat) -> "Observable":
        """Group the spectrum of ``matrix`` into outcome projectors."""
        dec = eigh(matrix)
        groups: list[list[int]] = []
        for j, lam in enumerate(dec.eigenvalues):
            if groups and abs(lam - dec.eigenvalues[groups[-1][0]]) <= DEGENERACY_TOL:
                groups[-1].append(j)
            else:
                groups.append([j])
        values = np.array([float(np.mean(dec.eigenvalues[g])) for g in groups])
        projectors = tuple(
            dec.eigenvectors[:, g] @ dagger(dec.eigenvectors[:, g]) for g in groups
        )
        # Snap outcome values that are integers up to rounding
        snapped = np.where(np.abs(values - np.round(values)) <= DEGENERACY_TOL,
                           np.round(values), values)
        return cls(name=name, matrix=np.asarray(matrix, dtype=np.complex128),
                   values=snapped, projectors=projectors)

    @classmethod
    def from_projectors(cls, name: str, values: Sequence[float],
                        projectors: Sequence[CMat]) -> "Observable":
        projectors = tuple(np.asarray(p, dtype=np.complex128) for p in projectors)
        matrix = sum(v * p for v, p in zip(values, projectors))
        return cls(name=name, matrix=matrix, values=np.asarray(values, dtype=float),
                   projectors=projectors)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def expectation(self, rho: CMat) -> float:
        return float(np.real(np.trace(self.matrix @ rho)))


def _ket(bits: str) -> CMat:
    return density(basis_state(bits))


def observable_catalog(id: CatalogId) -> Observable:
    """Observables that reach the Cramer-Rao bound in their matching scenario.

    ad_ancilla            Pi_psi + 2|Phi+><Phi+|, Pi_psi = |01><01| + |10><10|
    depolarizing_single   |+><+|
    pauli_ancilla         |Phi-><Phi-| + |Psi-><Psi-|
    ad_noon4              2|N><N| + Sigma, |N> = (|0000> - |1111>)/sqrt(2),
                          Sigma = |0011><0011| + |0111><0111| + |1011><1011|
    bell                  four-outcome Bell measurement (Phi+, Phi-, Psi+, Psi-)

    pauli_ancilla saturates only for pure dephasing (p1 = p2 = 0) or a pure
    bit flip (p2 = p3 = 0). On the max-entangled pair its mean is
    1/2 - d cos(phi)/2 with d = 1 - 2(p2 + p3), so at phi = pi/2 the variance
    is 1/d^2, above 1/J for mixed noise, and the observable is flat when
    p2 + p3 = 1/2. The bell outcomes reach J at phi = pi/2 for every Pauli
    channel.
    """
    phi_p, phi_m, psi_p, psi_m = (density(b) for b in bell_basis())
    if id == "ad_ancilla":
        pi_psi = _ket("01") + _ket("10")
        return Observable.from_projectors(id, [0.0, 1.0, 2.0],
                                          [phi_m, pi_psi, phi_p])
    if id == "depolarizing_single":
        plus = np.full((2, 2), 0.5, dtype=np.complex128)
        return Observable.from_projectors(id, [0.0, 1.0], [np.eye(2) - plus, plus])
    if id == "pauli_ancilla":
        target = phi_m + psi_m
        return Observable.from_projectors(id, [0.0, 1.0], [np.eye(4) - target, target])
    if id == "ad_noon4":
        n_vec = np.zeros(16, dtype=np.complex128)
        n_vec[0], n_vec[15] = 1.0 / math.sqrt(2.0), -1.0 / math.sqrt(2.0)
        n_proj = np.outer(n_vec, n_vec.conj())
        sigma = _ket("0011") + _ket("0111") + _ket("1011")
        return Observable.from_projectors(
            id, [0.0, 1.0, 2.0], [np.eye(16) - n_proj - sigma, sigma, n_proj]
        )
    if id == "bell":
        return Observable.from_projectors(id, [0.0, 1.0, 2.0, 3.0],
                                          [phi_p, phi_m, psi_p, psi_m])
    raise ParameterDomainError(f"unknown observable {id!r}")


# =============================================================================
# EXPECTATION CURVES
# =============================================================================

class ExpectationCurve(BaseModel):
    """<X_k>(phi) = Re sum_m c_{k,m} e^{i m phi} for a list of operators."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    harmonics: np.ndarray
    coefficients: np.ndarray

    def _phases(self, phi) -> np.ndarray:
        return np.exp(1j * np.multiply.outer(self.harmonics, np.asarray(phi, dtype=float)))

    def values(self, phi) -> np.ndarray:
        """Shape (n_operators,) + shape(phi)."""
        return np.tensordot(self.coefficients, self._phases(phi), axes=(1, 0)).real

    def slopes(self, phi) -> np.ndarray:
        weighted = self.coefficients * (1j * self.harmonics)
        return np.tensordot(weighted, self._phases(phi), axes=(1, 0)).real


def response_curve(s: PhaseScenario, operators: Sequence[CMat]) -> ExpectationCurve:
    """Fourier coefficients of <X>(phi) for each operator, phase of ``s`` ignored."""
    rho = density(s.state)
    diff = s.layout.phase_differences()
    harmonics = np.unique(diff)
    ops = [np.asarray(x, dtype=np.complex128) for x in operators]
    coefficients = np.zeros((len(ops), harmonics.size), dtype=np.complex128)
    for i, m in enumerate(harmonics):
        noisy = apply_noise(np.where(diff == m, rho, 0.0), s.channel, s.layout)
        for k, x in enumerate(ops):
            coefficients[k, i] = np.sum(x * noisy.T)
    return ExpectationCurve(harmonics=harmonics.astype(float), coefficients=coefficients)


def branch(layout: Layout) -> tuple[float, float]:
    """Phase interval on which catalog observables are inverted."""
    return 0.0, math.pi / len(layout.probes)


# =============================================================================
# ERROR PROPAGATION AND BOUNDS
# =============================================================================

def error_propagation_variance(s: PhaseScenario, o: Observable) -> float:
    """Single-shot Delta phi^2 = Var(O) / (d<O>/dphi)^2.

    Raises:
        StationaryPointError: |d<O>/dphi| < 1e-10 at s.phi.
    """
    rho = output_state(s)
    mean = o.expectation(rho)
    second = float(np.real(np.trace(o.matrix @ o.matrix @ rho)))
    slope = float(np.real(np.trace(o.matrix @ output_derivative(s))))
    if abs(slope) < STATIONARY_TOL:
        raise StationaryPointError(
            f"d<{o.name}>/dphi = {slope:.3e} at phi={s.phi}", phi=s.phi, slope=slope
        )
    return max(second - mean * mean, 0.0) / slope ** 2


def qcr_bound(s: PhaseScenario, nu: int) -> float:
    """Quantum Cramer-Rao variance bound 1/(nu J).

    Raises:
        ZeroInformationError: the QFI vanishes.
    """
    if nu < 1:
        raise ParameterDomainError(f"nu={nu} must be at least 1")
    j = qfi_scenario(s)
    if j < ZERO_QFI_TOL:
        raise ZeroInformationError(f"QFI {j:.3e} leaves the phase unidentifiable", qfi=j)
    return 1.0 / (nu * j)


def classical_fisher(p: np.ndarray, dp: np.ndarray) -> float:
    """sum_k dp_k^2 / p_k over outcomes with p_k > 0.

    Outcomes with both p_k and dp_k negligible are dropped; a small p_k with
    a non-negligible slope is kept as is, since dp_k^2 / p_k stays finite
    as p_k -> 0 along a smooth curve.
    """
    p = np.asarray(p, dtype=float)
    dp = np.asarray(dp, dtype=float)
    silent = (p < NEGLIGIBLE) & (np.abs(dp) < NEGLIGIBLE)
    keep = (p > 0.0) & ~silent
    return float(np.sum(dp[keep] ** 2 / p[keep]))


def outcome_fisher(s: PhaseScenario, o: Observable) -> float:
    """Classical Fisher information of ``o``'s projective outcomes at s.phi."""
    rho = output_state(s)
    drho = output_derivative(s)
    p = np.array([np.real(np.trace(proj @ rho)) for proj in o.projectors])
    dp = np.array([np.real(np.trace(proj @ drho)) for proj in o.projectors])
    return classical_fisher(p, dp)


def sweet_spot(s: PhaseScenario, o: Observable) -> float:
    """Phase on the branch minimizing the error-propagation variance.

    Stationary points count as infinite variance, so the returned phase is
    always one where ``error_propagation_variance`` is defined.

    Raises:
        StationaryPointError: <O> is flat over the whole branch.
    """
    curve = response_curve(s, [o.matrix, o.matrix @ o.matrix])
    lo, hi = branch(s.layout)

    def variance(phi: float) -> float:
        mean, second = curve.values(phi)
        slope = curve.slopes(phi)[0]
        if abs(slope) < STATIONARY_TOL:
            return math.inf
        return max(second - mean * mean, 0.0) / slope ** 2

    phi, value = golden_minimize(variance, lo, hi, open_interval=True)
    # Recheck on the path error_propagation_variance takes
    slope = float(np.real(np.trace(o.matrix @ output_derivative(s.at(phi)))))
    if not math.isfinite(value) or abs(slope) < STATIONARY_TOL:
        raise StationaryPointError(
            f"d<{o.name}>/dphi vanishes on the whole branch ({lo}, {hi})", phi=phi, slope=slope
        )
    log.debug(logger, MODULE, "sweet_spot_done", "Sweet spot located",
              observable=o.name, phi=phi, variance=value)
    return phi


# =============================================================================
# SAMPLING AND INVERSION
# =============================================================================

def _born(probabilities: np.ndarray) -> np.ndarray:
    p = np.clip(np.asarray(probabilities, dtype=float), 0.0, None)
    return p / p.sum()


def born_probabilities(s: PhaseScenario, o: Observable) -> np.ndarray:
    rho = output_state(s)
    return _born([np.real(np.trace(proj @ rho)) for proj in o.projectors])


def draw_counts(p: np.ndarray, nu: int, seed: int) -> np.ndarray:
    """nu multinomial draws from p in CHUNK_SHOTS chunks; chunk j uses stream(seed, 0, j)."""
    chunks = list(enumerate(chunk_sizes(nu, CHUNK_SHOTS)))

    def draw(item: tuple[int, int]) -> np.ndarray:
        j, n = item
        return stream(seed, SAMPLE_STREAM, j).multinomial(n, p)

    return np.sum(parallel_map(draw, chunks), axis=0).astype(np.int64)


def sample_outcomes(s: PhaseScenario, o: Observable, nu: int, seed: int) -> np.ndarray:
    """Outcome counts of nu i.i.d. measurements of ``o`` on rho_phi.

    Shots are drawn in chunks of CHUNK_SHOTS; chunk j uses stream(seed, 0, j),
    so the counts do not depend on the worker count.
    """
    if nu < 1:
        raise ParameterDomainError(f"nu={nu} must be at least 1")
    counts = draw_counts(born_probabilities(s, o), nu, seed)
    log.debug(logger, MODULE, "sample_done", "Outcomes sampled",
              observable=o.name, nu=nu, seed=seed)
    return counts


def _invert_means(curve: ExpectationCurve, means: np.ndarray,
                  lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized bisection of curve(phi) = mean on [lo, hi]; returns (phis, clipped)."""
    means = np.asarray(means, dtype=float)
    f_lo = float(curve.values(lo)[0])
    f_hi = float(curve.values(hi)[0])
    if abs(f_hi - f_lo) <= NEGLIGIBLE:
        raise BranchInversionError(f"<O> is flat on [{lo}, {hi}]")
    increasing = f_hi > f_lo
    bottom, top = min(f_lo, f_hi), max(f_lo, f_hi)

    clipped = (means < bottom) | (means > top)
    targets = np.clip(means, bottom, top)
    a = np.full(targets.shape, lo)
    b = np.full(targets.shape, hi)
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (a + b)
        above = curve.values(mid)[0] > targets
        # Root lies left of mid when the curve already exceeds the target on an increasing branch
        go_left = above if increasing else ~above
        b = np.where(go_left, mid, b)
        a = np.where(go_left, a, mid)
    return 0.5 * (a + b), clipped


def invert_estimate(counts: Sequence[int], s: PhaseScenario, o: Observable) -> tuple[float, bool]:
    """Method-of-moments phase: solve mean(counts) = <O>(phi) on the branch.

    Returns the estimate and whether the empirical mean fell outside the
    range of <O> on the branch (then the estimate is the nearest endpoint).
    """
    counts = np.asarray(counts, dtype=float)
    if counts.shape != o.values.shape or counts.sum() <= 0:
        raise ParameterDomainError(
            f"need {o.values.size} non-negative counts with a positive total"
        )
    mean = float(counts @ o.values / counts.sum())
    curve = response_curve(s, [o.matrix])
    lo, hi = branch(s.layout)
    phis, clipped = _invert_means(curve, np.array([mean]), lo, hi)
    if clipped[0]:
        log.warning(logger, MODULE, "invert_clipped", "Empirical mean outside the branch range",
                    observable=o.name, mean=mean)
    return float(phis[0]), bool(clipped[0])


# =============================================================================
# ADAPTIVE ESTIMATION
# =============================================================================

def split_shots(nu: int, rounds: int) -> list[int]:
    """Spread nu shots over rounds as evenly as possible, earlier rounds first."""
    if rounds < 1 or nu < rounds:
        raise ParameterDomainError(f"cannot split nu={nu} over {rounds} rounds")
    base, extra = divmod(nu, rounds)
    return [base + (1 if r < extra else 0) for r in range(rounds)]


def adaptive_run(
    s: PhaseScenario,
    o: Observable,
    rounds: int,
    shots_per_round: Union[int, Sequence[int]],
    seed: int,
    *,
    batch_size: int = DEFAULT_BATCH,
    control: float = 0.0,
) -> EstimationRun:
    """Feedback estimation of the unknown phase ``s.phi``.

    Round r measures at phi_true + c_r. Its shots are split into batches of
    ``batch_size``; each batch mean is inverted on the branch and the control
    phase is subtracted. After the round, c <- c + 0.5 (pi/2 - phi_hat - c),
    phi_hat the running mean of all batch estimates. The final estimate is
    that mean and its variance is var(batch estimates) / batches.
    """
    if rounds < 1:
        raise ParameterDomainError(f"rounds={rounds} must be at least 1")
    if batch_size < 1:
        raise ParameterDomainError(f"batch_size={batch_size} must be at least 1")
    shots = ([int(shots_per_round)] * rounds if isinstance(shots_per_round, (int, np.integer))
             else [int(n) for n in shots_per_round])
    if len(shots) != rounds or any(n < 1 for n in shots):
        raise ParameterDomainError("every round needs at least one shot")

    phi_true = s.phi
    curve = response_curve(s, list(o.projectors))
    mean_curve = response_curve(s, [o.matrix])
    lo, hi = branch(s.layout)
    nu = sum(shots)
    log.info(logger, MODULE, "adaptive_start", "Adaptive estimation",
             observable=o.name, nu=nu, rounds=rounds, seed=seed, batch_size=batch_size)

    estimates: list[np.ndarray] = []
    round_counts: list[list[int]] = []
    controls: list[float] = []
    clipped_total = 0
    c = float(control)

    for r, n_round in enumerate(shots):
        controls.append(c)
        p = _born(curve.values(phi_true + c))
        batches = chunk_sizes(n_round, batch_size)
        groups = [batches[i:i + CHUNK_BATCHES] for i in range(0, len(batches), CHUNK_BATCHES)]

        def draw(item: tuple[int, list[int]]) -> np.ndarray:
            j, sizes = item
            return stream(seed, ADAPTIVE_STREAM, r, j).multinomial(np.array(sizes), p)

        drawn = np.concatenate(parallel_map(draw, list(enumerate(groups))), axis=0)
        sizes = np.array(batches, dtype=float)
        means = drawn @ o.values / sizes
        thetas, clipped = _invert_means(mean_curve, means, lo, hi)
        estimates.append(thetas - c)
        clipped_total += int(clipped.sum())
        round_counts.append([int(x) for x in drawn.sum(axis=0)])

        phi_hat = float(np.mean(np.concatenate(estimates)))
        c = c + FEEDBACK_GAIN * (SWEET_SPOT - phi_hat - c)
        log.debug(logger, MODULE, "adaptive_round", "Round finished",
                  round=r, control=controls[-1], phi_hat=phi_hat, clipped=int(clipped.sum()))

    pooled = np.concatenate(estimates)
    k = pooled.size
    if k >= 2:
        sample_variance = float(np.var(pooled, ddof=1) / k)
    else:
        # Single batch: uniform over the branch
        sample_variance = (hi - lo) ** 2 / 12.0
    low_nu = k < LOW_NU_BATCHES
    if low_nu:
        log.warning(logger, MODULE, "adaptive_low_nu", "Too few batches for a reliable variance",
                    nu=nu, batches=k)
    if clipped_total:
        log.warning(logger, MODULE, "adaptive_clipped", "Batch means clipped to the branch range",
                    clipped=clipped_total, batches=k)

    try:
        bound: Optional[float] = qcr_bound(s, nu)
    except ZeroInformationError:
        bound = None

    run = EstimationRun(
        seed=seed,
        nu=nu,
        observable=o.name,
        phi_true=phi_true,
        rounds=rounds,
        batch_size=batch_size,
        counts=round_counts,
        feedback_phases=controls,
        estimate=float(np.mean(pooled)),
        sample_variance=sample_variance,
        batches=k,
        clipped_batches=clipped_total,
        low_nu=low_nu,
        qcr_bound=bound,
        variance_ratio=sample_variance / bound if bound else None,
    )
    log.info(logger, MODULE, "adaptive_done", "Adaptive estimation finished",
             observable=o.name, estimate=run.estimate, variance=run.sample_variance,
             ratio=run.variance_ratio)
    return run


def operating_points(run: EstimationRun) -> list[float]:
    """phi_true + c_r for every round."""
    return [run.phi_true + c for c in run.feedback_phases]
