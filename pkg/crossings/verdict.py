"""Stability verdicts from crossing counts, checked against a closed-loop root oracle."""

from __future__ import annotations

import asyncio
import logging
import math
from collections.abc import Iterable, Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .config import ContourConfig, Tolerances, contour_config_for
from .const import (
    FUZZ_MARGINAL_BAND,
    FUZZ_MAX_GAIN,
    FUZZ_MAX_MAGNITUDE,
    FUZZ_MIN_GAIN,
    FUZZ_MIN_MAGNITUDE,
    METHOD_NICHOLS_MULTI,
    METHOD_NICHOLS_SINGLE,
    METHOD_NYQUIST,
    METHOD_WINDING,
    MODE_MULTIPLE,
    MODE_SINGLE,
    VERDICT_MARGINAL,
    VERDICT_STABLE,
    VERDICT_UNSTABLE,
    get_worker_count,
)
from .contour import build_contour, refine
from .exceptions import (
    CriticalPointHit,
    Indeterminate,
    InvalidConfig,
    MarginalError,
    MarginalPole,
    MethodDisagreement,
    NumericError,
)
from .fresponse import Crossing, detect_ray_crossings, map_response, winding_number
from .nichols import (
    critical_point_check,
    crossing_sum,
    detect_nichols_crossings,
    to_nichols,
)
from .polycore import RealPolynomial, poly_roots, routh_rhp_count
from .tflang import FactoredTF, cancel_check, expand

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class Verdict:
    """Stable, Unstable(n_z) or Marginal(reason)."""

    kind: str
    n_z: int | None = None
    reason: str | None = None

    @classmethod
    def stable(cls) -> Verdict:
        return cls(VERDICT_STABLE, 0)

    @classmethod
    def unstable(cls, n_z: int) -> Verdict:
        return cls(VERDICT_UNSTABLE, n_z)

    @classmethod
    def marginal(cls, reason: str) -> Verdict:
        return cls(VERDICT_MARGINAL, None, reason)

    @property
    def is_marginal(self) -> bool:
        return self.kind == VERDICT_MARGINAL

    def __str__(self) -> str:
        if self.kind == VERDICT_UNSTABLE:
            return f"Unstable({self.n_z})"
        if self.kind == VERDICT_MARGINAL:
            return f"Marginal({self.reason})"
        return self.kind


@dataclass(frozen=True)
class OracleResult:
    """Closed-loop right-half-plane root counts from two independent methods."""

    closed_loop_rhp: int
    routh_rhp: int
    roots: tuple[complex, ...] = ()


@dataclass(frozen=True)
class StabilityReport:
    """Everything one analysis produced."""

    tf: FactoredTF
    config: ContourConfig
    verdict: Verdict
    n_p: int | None = None
    n_by_method: dict[str, int] = field(default_factory=dict)
    n_z: int | None = None
    crossings: dict[str, tuple[Crossing, ...]] = field(default_factory=dict)
    oracle: OracleResult | None = None
    imag_axis_poles: tuple[complex, ...] = ()
    warnings: tuple[str, ...] = ()
    samples: int = 0

    @property
    def oracle_agrees(self) -> bool | None:
        """Return whether n_z matches both oracle counts (None when undecided)."""
        if self.oracle is None or self.n_z is None:
            return None
        return self.n_z == self.oracle.closed_loop_rhp == self.oracle.routh_rhp


def _classify_poles(tf: FactoredTF, band: float) -> tuple[int, tuple[complex, ...]]:
    """Return (RHP pole count, imaginary-axis poles)."""
    rhp = 0
    axis: list[complex] = []
    for pole in tf.poles:
        limit = band * max(1.0, abs(pole))
        if pole.real == 0.0:
            axis.append(pole)
        elif abs(pole.real) <= limit:
            raise MarginalPole(f"pole {pole} is inside the marginal band off the axis")
        elif pole.real > 0:
            rhp += 1
    return rhp, tuple(axis)


def count_open_loop_rhp_poles(tf: FactoredTF, band: float | None = None) -> int:
    """Count open-loop poles enclosed by the contour (imaginary-axis poles are detoured)."""
    band = Tolerances().marginal_band if band is None else band
    rhp, axis = _classify_poles(tf, band)
    if axis:
        _LOGGER.warning("Imaginary-axis poles %s are detoured, not counted", axis)
    return rhp


def oracle_assess(tf: FactoredTF, tolerances: Tolerances | None = None) -> OracleResult:
    """Count RHP zeros of num + den by root finding and by the Routh array."""
    tolerances = tolerances or Tolerances()
    characteristic = expand(tf).characteristic()
    if characteristic.is_zero:
        raise Indeterminate("1 + L vanishes identically")
    if characteristic.degree == 0:
        return OracleResult(closed_loop_rhp=0, routh_rhp=0)

    roots = poly_roots(characteristic, tolerances.root_tol, tolerances.max_iter)
    on_axis = roots.on_axis(tolerances.marginal_band)
    if on_axis:
        raise Indeterminate(f"closed-loop roots on the imaginary axis: {on_axis}")
    counted = roots.count_rhp()
    routh = routh_rhp_count(characteristic)
    if counted != routh:
        raise Indeterminate(f"root count {counted} and Routh count {routh} differ")
    return OracleResult(closed_loop_rhp=counted, routh_rhp=routh, roots=roots.roots)


def _marginal_report(
    tf: FactoredTF,
    cfg: ContourConfig,
    reason: str,
    warnings: list[str],
    **known,
) -> StabilityReport:
    _LOGGER.info("Marginal configuration for %s: %s", tf, reason)
    return StabilityReport(
        tf=tf,
        config=cfg,
        verdict=Verdict.marginal(reason),
        warnings=tuple(warnings),
        **known,
    )


def assess(
    tf: FactoredTF,
    cfg: ContourConfig | None = None,
    tolerances: Tolerances | None = None,
    half_chart: bool = False,
) -> StabilityReport:
    """Run contour, mapping, every crossing count and the oracle; issue the verdict."""
    tolerances = tolerances or Tolerances()
    cfg = cfg or contour_config_for(tf)
    warnings: list[str] = []

    pairs = cancel_check(tf, tolerances.cancel_tol)
    if pairs:
        warnings.extend(f"near pole-zero cancellation at {pole}" for _, pole in pairs)
        return _marginal_report(tf, cfg, "pole-zero cancellation", warnings)
    if tf.relative_degree < 0:
        warnings.append(f"improper loop function (relative degree {tf.relative_degree})")

    known: dict[str, object] = {}
    try:
        n_p, axis_poles = _classify_poles(tf, tolerances.marginal_band)
        known.update(n_p=n_p, imag_axis_poles=axis_poles)
        if axis_poles:
            warnings.append(f"{len(axis_poles)} imaginary-axis pole(s) detoured")

        contour = refine(build_contour(tf, cfg), tf, cfg)
        curve = map_response(tf, contour)
        known["samples"] = len(curve)
        nyquist = detect_ray_crossings(curve, tolerances.critical_tol)
        single = detect_nichols_crossings(
            to_nichols(curve, MODE_SINGLE), tolerances.tol_db, half_chart=half_chart
        )
        multiple_curve = to_nichols(curve, MODE_MULTIPLE)
        multi = detect_nichols_crossings(
            multiple_curve, tolerances.tol_db, half_chart=half_chart
        )
        winding = winding_number(curve, tolerances.critical_tol)
        hit = critical_point_check(multiple_curve, tolerances.tol_deg, tolerances.tol_db)
        if hit is not None:
            raise CriticalPointHit("Nichols curve meets a critical point", hit)
    except MarginalError as err:
        return _marginal_report(tf, cfg, str(err), warnings, **known)

    crossings = {
        METHOD_NYQUIST: tuple(nyquist),
        METHOD_NICHOLS_SINGLE: tuple(single),
        METHOD_NICHOLS_MULTI: tuple(multi),
    }
    counts = {
        METHOD_NYQUIST: crossing_sum(nyquist),
        METHOD_NICHOLS_SINGLE: crossing_sum(single, half_chart),
        METHOD_NICHOLS_MULTI: crossing_sum(multi, half_chart),
        METHOD_WINDING: winding,
    }
    if len(set(counts.values())) != 1:
        raise MethodDisagreement(counts)
    n_z = counts[METHOD_NYQUIST] + n_p
    if n_z < 0:
        raise MethodDisagreement({**counts, "n_p": n_p})

    try:
        oracle = oracle_assess(tf, tolerances)
    except Indeterminate as err:
        known.update(n_by_method=counts, crossings=crossings)
        return _marginal_report(tf, cfg, str(err), warnings, **known)

    verdict = Verdict.stable() if n_z == 0 else Verdict.unstable(n_z)
    report = StabilityReport(
        tf=tf,
        config=cfg,
        verdict=verdict,
        n_p=n_p,
        n_by_method=counts,
        n_z=n_z,
        crossings=crossings,
        oracle=oracle,
        imag_axis_poles=axis_poles,
        warnings=tuple(warnings),
        samples=len(curve),
    )
    if not report.oracle_agrees:
        _LOGGER.warning(
            "Oracle disagrees for %s: n_z=%s, roots=%s, routh=%s",
            tf,
            n_z,
            oracle.closed_loop_rhp,
            oracle.routh_rhp,
        )
    _LOGGER.info("Assessed %s: %s (N=%s, N_p=%s)", tf, verdict, counts[METHOD_NYQUIST], n_p)
    return report


# Gain sweeps


def _check_gains(gains: Sequence[float]) -> list[float]:
    values = [float(k) for k in gains]
    for gain in values:
        if not math.isfinite(gain) or gain == 0.0:
            raise InvalidConfig(f"gain {gain} must be finite and nonzero")
    return values


async def _run_in_pool(calls: Sequence[partial], max_workers: int | None) -> list:
    """Run blocking calls on a bounded pool; results keep input order."""
    if not calls:
        return []
    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=get_worker_count(max_workers)) as pool:
        futures = [loop.run_in_executor(pool, call) for call in calls]
        return list(await asyncio.gather(*futures))


async def async_gain_sweep(
    tf: FactoredTF,
    gains: Sequence[float],
    cfg: ContourConfig | None = None,
    tolerances: Tolerances | None = None,
    max_workers: int | None = None,
) -> list[tuple[float, StabilityReport]]:
    """Assess tf with each gain concurrently."""
    values = _check_gains(gains)
    cfg = cfg or contour_config_for(tf)
    calls = [partial(assess, tf.with_gain(k), cfg, tolerances) for k in values]
    reports = await _run_in_pool(calls, max_workers)
    _LOGGER.info("Gain sweep over %s gains finished", len(values))
    return list(zip(values, reports, strict=True))


def gain_sweep(
    tf: FactoredTF,
    gains: Sequence[float],
    cfg: ContourConfig | None = None,
    tolerances: Tolerances | None = None,
    max_workers: int | None = None,
) -> list[tuple[float, StabilityReport]]:
    """Synchronous wrapper around async_gain_sweep."""
    return asyncio.run(async_gain_sweep(tf, gains, cfg, tolerances, max_workers))


# Randomized differential verification

AGREE = "agree"
SKIP = "skip"
DISAGREE = "disagree"


@dataclass(frozen=True)
class FuzzResult:
    """Outcome of a randomized verification run."""

    agreements: int
    skipped: int
    disagreements: tuple[FactoredTF, ...] = ()
    reasons: tuple[str, ...] = ()

    @property
    def decided(self) -> int:
        return self.agreements + len(self.disagreements)


def _random_factor(rng: np.random.Generator) -> RealPolynomial:
    magnitude = 10 ** rng.uniform(np.log10(FUZZ_MIN_MAGNITUDE), np.log10(FUZZ_MAX_MAGNITUDE))
    sign = float(rng.choice((-1.0, 1.0)))
    return RealPolynomial((sign, 1.0 / magnitude))


def random_tf(rng: np.random.Generator, max_order: int) -> FactoredTF:
    """Draw a proper loop function of real first-order factors."""
    integrator = int(rng.integers(0, 2)) if max_order > 1 else 0
    n_pole = int(rng.integers(0 if integrator else 1, max_order - integrator + 1))
    n_zero = int(rng.integers(0, n_pole + integrator + 1))
    zeros = tuple(_random_factor(rng) for _ in range(n_zero))
    poles = tuple(_random_factor(rng) for _ in range(n_pole))
    gain = 10 ** rng.uniform(np.log10(FUZZ_MIN_GAIN), np.log10(FUZZ_MAX_GAIN))
    gain *= float(rng.choice((-1.0, 1.0)))
    return FactoredTF(
        gain=float(gain),
        integrator_order=integrator,
        zero_factors=zeros,
        pole_factors=poles,
    )


def classify_instance(
    tf: FactoredTF, tolerances: Tolerances | None = None
) -> tuple[str, str]:
    """Compare assess against the oracle and return the outcome with its reason."""
    tolerances = tolerances or Tolerances()
    try:
        cfg = contour_config_for(tf)
        characteristic = expand(tf).characteristic()
        roots = poly_roots(characteristic, tolerances.root_tol, tolerances.max_iter)
        if roots.on_axis(FUZZ_MARGINAL_BAND):
            return SKIP, "closed-loop root on the imaginary axis"
        oracle = oracle_assess(tf, tolerances)
        report = assess(tf, cfg, tolerances)
    except MarginalError as err:
        return SKIP, str(err)
    except NumericError as err:
        _LOGGER.warning("Numeric failure for %s: %s", tf, err)
        return DISAGREE, f"{type(err).__name__}: {err}"

    if report.verdict.is_marginal:
        return SKIP, str(report.verdict)
    if report.n_z == oracle.closed_loop_rhp == oracle.routh_rhp:
        return AGREE, ""
    reason = (
        f"n_z={report.n_z}, roots={oracle.closed_loop_rhp}, routh={oracle.routh_rhp}"
    )
    _LOGGER.warning("Disagreement for %s: %s", tf, reason)
    return DISAGREE, reason


def check_instance(tf: FactoredTF, tolerances: Tolerances | None = None) -> str:
    """Compare assess against the oracle: agree, skip (marginal) or disagree."""
    return classify_instance(tf, tolerances)[0]


def _smaller(tf: FactoredTF) -> Iterator[FactoredTF]:
    for i in range(len(tf.zero_factors)):
        yield FactoredTF(
            tf.gain,
            tf.integrator_order,
            tf.zero_factors[:i] + tf.zero_factors[i + 1 :],
            tf.pole_factors,
        )
    for i in range(len(tf.pole_factors)):
        yield FactoredTF(
            tf.gain,
            tf.integrator_order,
            tf.zero_factors,
            tf.pole_factors[:i] + tf.pole_factors[i + 1 :],
        )
    if tf.integrator_order:
        yield FactoredTF(
            tf.gain, tf.integrator_order - 1, tf.zero_factors, tf.pole_factors
        )


def shrink(tf: FactoredTF, tolerances: Tolerances | None = None) -> FactoredTF:
    """Remove factors while the instance keeps disagreeing."""
    current = tf
    improved = True
    while improved:
        improved = False
        for candidate in _smaller(current):
            if check_instance(candidate, tolerances) == DISAGREE:
                current = candidate
                improved = True
                break
    return current


async def async_fuzz_verify(
    seed: int,
    count: int,
    max_order: int = 6,
    fixtures: Iterable[FactoredTF] = (),
    tolerances: Tolerances | None = None,
    max_workers: int | None = None,
) -> FuzzResult:
    """Check count seeded instances (fixtures first) against the oracle concurrently."""
    if count < 1:
        raise InvalidConfig("count must be at least 1")
    if max_order < 1:
        raise InvalidConfig("max_order must be at least 1")

    rng = np.random.default_rng(seed)
    instances = list(fixtures)[:count]
    while len(instances) < count:
        instances.append(random_tf(rng, max_order))

    calls = [partial(classify_instance, tf, tolerances) for tf in instances]
    classified = await _run_in_pool(calls, max_workers)
    outcomes = [outcome for outcome, _ in classified]

    failing = [
        (tf, reason)
        for tf, (outcome, reason) in zip(instances, classified, strict=True)
        if outcome == DISAGREE
    ]
    result = FuzzResult(
        agreements=outcomes.count(AGREE),
        skipped=outcomes.count(SKIP),
        disagreements=tuple(shrink(tf, tolerances) for tf, _ in failing),
        reasons=tuple(reason for _, reason in failing),
    )
    _LOGGER.info(
        "Verification seed=%s: %s agreements, %s skipped, %s disagreements",
        seed,
        result.agreements,
        result.skipped,
        len(result.disagreements),
    )
    return result


def fuzz_verify(
    seed: int,
    count: int,
    max_order: int = 6,
    fixtures: Iterable[FactoredTF] = (),
    tolerances: Tolerances | None = None,
    max_workers: int | None = None,
) -> FuzzResult:
    """Synchronous wrapper around async_fuzz_verify."""
    return asyncio.run(
        async_fuzz_verify(seed, count, max_order, fixtures, tolerances, max_workers)
    )
