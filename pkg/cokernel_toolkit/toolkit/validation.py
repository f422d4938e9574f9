"""
Batería de identidades exactas que respaldan el comando ``validate``.

Cada comprobación produce un ``CheckResult`` con sus parámetros y ambos lados
exactos; el informe es determinista para un preset dado.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

from ..core.log import Log
from .exact_arith import Interval, json_fields, render_value
from .groups import subgroup_count, subgroup_type_counts, sur_count, sur_count_bruteforce
from .hall_littlewood import hl_pmf
from .matrix_lab import Ensemble, enumerate_cokernels
from .measures import (
    MeasureSpec, alternating_specialization_check, petrogradsky_identity, pmf, pmf_alternating_sp_form,
    pmf_fw_form, pmf_petrogradsky_form, prob_num_parts, prob_size, prob_size_and_parts, tail_bound_size,
)
from .moments import (
    moment_closed_form, moment_truncated, moments_unique_condition, subgroup_zeta_check, torsion_expectation,
    torsion_truncated,
)
from .partitions import Partition, enumerate_partitions, partitions_up_to
from .samplers import kernel_general, kernel_sym

logger = Log(__name__)

F = Fraction


@dataclass
class CheckResult:
    name: str
    params: Dict[str, str]
    passed: bool
    lhs: object
    rhs: object

    def to_json(self, decimal: bool = False) -> dict:
        return {
            'name': self.name,
            'params': self.params,
            'passed': self.passed,
            **json_fields('lhs', self.lhs, decimal),
            **json_fields('rhs', self.rhs, decimal),
        }

    def describe(self) -> str:
        params = ', '.join(f"{key}={value}" for key, value in self.params.items())
        return f"{self.name}({params}): {_render(self.lhs)} != {_render(self.rhs)}"


def _render(value):
    if isinstance(value, (Fraction, int, Interval)) and not isinstance(value, bool):
        return render_value(value)
    return value


@dataclass
class ValidationReport:
    preset: str
    results: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failures(self) -> List[CheckResult]:
        return [result for result in self.results if not result.passed]

    def to_json(self, decimal: bool = False) -> dict:
        return {
            'preset': self.preset,
            'passed': self.passed,
            'total': len(self.results),
            'failed': len(self.failures),
            'checks': [result.to_json(decimal) for result in self.results],
        }


@dataclass(frozen=True)
class Preset:
    """Rejillas de parámetros de la batería."""

    pu_grid: Tuple[Tuple[Fraction, Fraction], ...]
    max_d: int
    max_size: int
    hl_grid: Tuple[Tuple[Fraction, Fraction], ...]
    hl_max_d: int
    hl_max_size: int
    kernel_max_state: int
    path_max_size: int
    sym_max_n: int
    marginal_max_n: int
    alt_ns: Tuple[int, ...]
    alt_max_size: int
    zeta_max_d: int
    zeta_max_n: int
    zeta_ps: Tuple[Fraction, ...]
    identity_ps: Tuple[Fraction, ...]
    moment_mus: Tuple[Tuple[int, ...], ...]
    moment_ds: Tuple[Optional[int], ...]
    moment_grid: Tuple[Tuple[Fraction, Fraction], ...]
    moment_max_size: int
    torsion_ells: Tuple[int, ...]
    oracle_sizes: Tuple[Tuple[int, int], ...]
    sur_max_total: Tuple[Tuple[int, int], ...]
    matrix_cases: Tuple[Tuple[int, int], ...]


PRESETS: Dict[str, Preset] = {
    'quick': Preset(
        pu_grid=((F(2), F(1)), (F(3), F(1, 2))),
        max_d=3, max_size=6,
        hl_grid=((F(2), F(1)),), hl_max_d=3, hl_max_size=4,
        kernel_max_state=6, path_max_size=5, sym_max_n=3, marginal_max_n=6,
        alt_ns=(2, 4), alt_max_size=4,
        zeta_max_d=3, zeta_max_n=3, zeta_ps=(F(2), F(5, 2)),
        identity_ps=(F(2), F(7, 2)),
        moment_mus=((1,), (1, 1)), moment_ds=(2, None), moment_grid=((F(2), F(1, 2)),),
        moment_max_size=10, torsion_ells=(1, 2),
        oracle_sizes=((2, 4), (3, 2)), sur_max_total=((2, 5),),
        matrix_cases=((1, 2), (2, 2)),
    ),
    'default': Preset(
        pu_grid=((F(2), F(1)), (F(2), F(1, 2)), (F(3), F(1)), (F(7, 2), F(3, 2))),
        max_d=5, max_size=12,
        hl_grid=((F(2), F(1)), (F(3), F(1, 2))), hl_max_d=6, hl_max_size=8,
        kernel_max_state=12, path_max_size=10, sym_max_n=6, marginal_max_n=15,
        alt_ns=(2, 4, 6), alt_max_size=8,
        zeta_max_d=4, zeta_max_n=6, zeta_ps=(F(2), F(3), F(5, 2)),
        identity_ps=(F(2), F(3), F(7, 2)),
        moment_mus=((1,), (2,), (1, 1), (2, 1)), moment_ds=(2, 4, None),
        moment_grid=((F(2), F(1)), (F(2), F(1, 2)), (F(3), F(1))),
        moment_max_size=20, torsion_ells=(1, 2, 3),
        oracle_sizes=((2, 6), (3, 5)), sur_max_total=((2, 8), (3, 4)),
        matrix_cases=((1, 2), (1, 3), (2, 2), (2, 3)),
    ),
}


def _check(name: str, params: dict, lhs, rhs, passed: Optional[bool] = None) -> CheckResult:
    rendered = {key: _param(value) for key, value in params.items()}
    return CheckResult(name, rendered, lhs == rhs if passed is None else passed, lhs, rhs)


def _param(value) -> str:
    if value is None:
        return 'inf'
    if isinstance(value, Fraction):
        return render_value(value)
    return str(value)


def _product(values) -> Fraction:
    result = Fraction(1)
    for value in values:
        result *= value
    return result


def _path(start: int, partition: Partition) -> List[Tuple[int, int]]:
    states = (start,) + partition.columns() + (0,)
    return list(zip(states, states[1:]))


# ------------------------------------------------------------------------------------------------
# Comprobaciones
# ------------------------------------------------------------------------------------------------
def check_dual_form(preset: Preset) -> Iterator[CheckResult]:
    for p, u in preset.pu_grid:
        for d in range(1, preset.max_d + 1):
            spec = MeasureSpec.general(p, u, d)
            for partition in partitions_up_to(preset.max_size, d):
                yield _check('dual_form', {'p': p, 'u': u, 'd': d, 'lambda': partition},
                             pmf(spec, partition), pmf_petrogradsky_form(p, u, d, partition))


def check_hall_littlewood(preset: Preset) -> Iterator[CheckResult]:
    for p, u in preset.hl_grid:
        for d in range(1, preset.hl_max_d + 1):
            spec = MeasureSpec.general(p, u, d)
            for partition in partitions_up_to(preset.hl_max_size, d):
                yield _check('hall_littlewood', {'p': p, 'u': u, 'd': d, 'lambda': partition},
                             hl_pmf(partition, d, u, p), pmf(spec, partition))


def check_kernel_rows(preset: Preset) -> Iterator[CheckResult]:
    top = preset.kernel_max_state
    for p, u in preset.pu_grid:
        for a in range(top + 1):
            total = sum((kernel_general(a, b, top, u, p) for b in range(a + 1)), Fraction(0))
            yield _check('kernel_row_general', {'p': p, 'u': u, 'a': a}, total, Fraction(1))
    for p in preset.identity_ps:
        for a in range(preset.sym_max_n + 1):
            total = sum((kernel_sym(a, b, preset.sym_max_n, p) for b in range(a + 1)), Fraction(0))
            yield _check('kernel_row_sym', {'p': p, 'a': a}, total, Fraction(1))


def check_kernel_paths(preset: Preset) -> Iterator[CheckResult]:
    for p, u in preset.pu_grid:
        for d in range(1, preset.max_d + 1):
            spec = MeasureSpec.general(p, u, d)
            for partition in partitions_up_to(preset.path_max_size, d):
                product = _product(kernel_general(a, b, d, u, p) for a, b in _path(d, partition))
                yield _check('kernel_path_general', {'p': p, 'u': u, 'd': d, 'lambda': partition},
                             product, pmf(spec, partition))
    for p in preset.identity_ps:
        for n in range(1, preset.sym_max_n + 1):
            spec = MeasureSpec.symmetric(n, p)
            for partition in partitions_up_to(preset.path_max_size, n):
                product = _product(kernel_sym(a, b, n, p) for a, b in _path(n, partition))
                yield _check('kernel_path_sym', {'p': p, 'n': n, 'lambda': partition},
                             product, pmf(spec, partition))


def check_marginals(preset: Preset) -> Iterator[CheckResult]:
    top = preset.marginal_max_n
    for p, u in preset.pu_grid:
        for d in range(1, preset.max_d + 1):
            spec = MeasureSpec.general(p, u, d)
            by_parts: Dict[int, Fraction] = {}
            for n in range(top + 1):
                cells: Dict[int, Fraction] = {}
                for partition in enumerate_partitions(n, d):
                    value = pmf(spec, partition)
                    cells[partition.length] = cells.get(partition.length, Fraction(0)) + value
                    by_parts[partition.length] = by_parts.get(partition.length, Fraction(0)) + value
                params = {'p': p, 'u': u, 'd': d, 'n': n}
                yield _check('size_marginal', params, sum(cells.values(), Fraction(0)), prob_size(spec, n))
                for r in range(0, min(d, n) + 1):
                    yield _check('joint_marginal', dict(params, r=r), cells.get(r, Fraction(0)),
                                 prob_size_and_parts(spec, n, r))
            tail = tail_bound_size(spec, top)
            for r in range(d + 1):
                partial = by_parts.get(r, Fraction(0))
                exact = prob_num_parts(spec, r)
                yield _check('parts_marginal', {'p': p, 'u': u, 'd': d, 'r': r, 'max_size': top},
                             partial, exact, passed=partial <= exact <= partial + tail)


def check_specialization(preset: Preset) -> Iterator[CheckResult]:
    for p in (F(2), F(3)):
        for n in preset.alt_ns:
            for partition in partitions_up_to(preset.alt_max_size, n // 2):
                specialized, alternating = alternating_specialization_check(n, p, partition)
                params = {'p': p, 'n': n, 'lambda': partition}
                yield _check('alt_specialization', params, specialized, alternating)
                yield _check('alt_sp_form', params, pmf_alternating_sp_form(n, p, partition), alternating)


def check_zeta(preset: Preset) -> Iterator[CheckResult]:
    for p in preset.zeta_ps:
        for d in range(1, preset.zeta_max_d + 1):
            for n in range(preset.zeta_max_n + 1):
                lhs, rhs = subgroup_zeta_check(d, n, p)
                yield _check('subgroup_zeta', {'p': p, 'd': d, 'n': n}, lhs, rhs)


def check_petrogradsky(preset: Preset) -> Iterator[CheckResult]:
    for p in preset.identity_ps:
        for d in range(1, preset.max_d + 1):
            for partition in partitions_up_to(preset.max_size, d):
                lhs, rhs = petrogradsky_identity(partition, d, p)
                yield _check('rectangular_count', {'p': p, 'd': d, 'lambda': partition}, lhs, rhs)


def check_fw_form(preset: Preset) -> Iterator[CheckResult]:
    for p in preset.identity_ps:
        for d in range(1, preset.max_d + 1):
            spec = MeasureSpec.general(p, 1, d)
            for partition in partitions_up_to(preset.max_size, d):
                yield _check('fw_form', {'p': p, 'd': d, 'lambda': partition},
                             pmf_fw_form(p, d, partition), pmf(spec, partition))


def check_moments(preset: Preset) -> Iterator[CheckResult]:
    for p, u in preset.moment_grid:
        for d in preset.moment_ds:
            for parts in preset.moment_mus:
                mu = Partition(parts)
                closed = moment_closed_form(mu, d, u, p)
                enclosure = moment_truncated(mu, d, u, p, preset.moment_max_size)
                yield _check('moment', {'p': p, 'u': u, 'd': d, 'mu': mu}, closed,
                             Interval(enclosure.lower, enclosure.upper), passed=enclosure.encloses(closed))
            for ell in preset.torsion_ells:
                expected = torsion_expectation(ell, d, u, p)
                enclosure = torsion_truncated(ell, d, u, p, preset.moment_max_size)
                yield _check('torsion', {'p': p, 'u': u, 'd': d, 'ell': ell}, expected,
                             Interval(enclosure.lower, enclosure.upper), passed=enclosure.encloses(expected))


def check_subgroup_oracle(preset: Preset) -> Iterator[CheckResult]:
    for p, max_size in preset.oracle_sizes:
        for group in partitions_up_to(max_size):
            counts = subgroup_type_counts(group, p)
            for sub in partitions_up_to(group.size):
                yield _check('subgroup_oracle', {'p': p, 'lambda': group, 'mu': sub},
                             subgroup_count(group, sub, p), Fraction(counts.get(sub, 0)))
    for p, max_total in preset.sur_max_total:
        for source in partitions_up_to(max_total):
            for target in partitions_up_to(max_total - source.size):
                yield _check('surjection_oracle', {'p': p, 'lambda': source, 'mu': target},
                             sur_count(source, target, p), Fraction(sur_count_bruteforce(source, target, p)))


def check_exhaustive_matrices(preset: Preset) -> Iterator[CheckResult]:
    """Ley exacta del cokernel de matrices d x d sobre Z/p^2 frente a P_d en partes <= 1."""
    for d, p in preset.matrix_cases:
        if p ** (2 * d * d) > 2 ** 16:
            continue
        law = enumerate_cokernels(Ensemble.square(d), p, 2)
        spec = MeasureSpec.general(p, 1, d)
        captured = Fraction(0)
        for r in range(d + 1):
            partition = Partition((1,) * r)
            exact = pmf(spec, partition)
            captured += exact
            yield _check('exhaustive_matrix', {'p': p, 'd': d, 'lambda': partition}, law.frequency(partition), exact)
        yield _check('exhaustive_ambiguity', {'p': p, 'd': d}, Fraction(law.ambiguous, law.total), 1 - captured)


def check_uniqueness(preset: Preset) -> Iterator[CheckResult]:
    yield _check('moments_unique', {'p': 3, 'u': 1, 'd': None}, moments_unique_condition(None, 1, 3), True)
    yield _check('moments_unique', {'p': 2, 'u': 1, 'd': None}, moments_unique_condition(None, 1, 2), False)


CHECKS = (
    check_dual_form, check_hall_littlewood, check_kernel_rows, check_kernel_paths, check_marginals,
    check_specialization, check_zeta, check_petrogradsky, check_fw_form, check_moments,
    check_subgroup_oracle, check_exhaustive_matrices, check_uniqueness,
)


def run_suite(preset_name: str = 'default') -> ValidationReport:
    """
    Ejecuta todas las comprobaciones del preset.

    Raises:
        ValueError: Si el preset no existe.
    """
    preset = PRESETS.get(preset_name)
    if preset is None:
        logger.error(f"Preset desconocido: {preset_name!r}")
        raise ValueError(f"Preset desconocido {preset_name!r}; use uno de {sorted(PRESETS)}")
    report = ValidationReport(preset_name)
    for check in CHECKS:
        before = len(report.results)
        report.results.extend(check(preset))
        logger.debug(f"{check.__name__}: {len(report.results) - before} comprobaciones")
    for failure in report.failures:
        logger.warning(f"Identidad fallida: {failure.describe()}")
    return report


class Validation:
    """Ejecución de la batería de identidades."""

    def __init__(self, client):
        self.client = client  # Referencia al cliente principal

    def run(self, preset: str = 'default') -> ValidationReport:
        report = run_suite(preset)
        logger.info(f"Batería {preset}: {len(report.results)} comprobaciones, {len(report.failures)} fallidas")
        return report
