"""
Interfaz de línea de comandos: consultas exactas, muestreo, Monte Carlo y batería de identidades.

Estados de salida: 0 éxito, 1 batería con fallos, 2 error de uso o de validación.
"""
import argparse
import asyncio
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

from cokernel_toolkit.async_client import AsyncCokernelToolkit
from cokernel_toolkit.core.__version__ import __version__
from cokernel_toolkit.core.log import Log
from cokernel_toolkit.sync_client import CokernelToolkit
from .toolkit.exact_arith import Interval, json_fields, parse_json_value, parse_rational, render_value
from .toolkit.matrix_lab import Ensemble, quotient_spec
from .toolkit.measures import Family, MeasureSpec
from .toolkit.partitions import Partition
from .toolkit.samplers import SEED_BOUND, empirical_pmf
from .toolkit.validation import PRESETS

logger = Log(__name__)


def _default(value, fallback):
    return fallback if value is None else value


@dataclass
class RunConfig:
    """Parámetros de una ejecución, validados antes de cualquier cálculo."""

    command: str
    measure: Optional[MeasureSpec] = None
    partition: Optional[Partition] = None
    mu: Optional[Partition] = None
    ell: Optional[int] = None
    parts: Optional[int] = None
    size: Optional[int] = None
    seed: Optional[int] = None
    trials: Optional[int] = None
    precision_k: Optional[int] = None
    max_size: int = 20
    epsilon: Fraction = Fraction(1, 1000)
    fmt: str = 'text'
    jobs: int = 1
    out: Optional[Path] = None
    decimal: bool = False
    ensemble: Optional[Ensemble] = None
    p: Optional[int] = None
    w: Optional[int] = None
    compare: Optional[MeasureSpec] = None
    mode: str = 'closed'
    preset: str = 'default'

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> 'RunConfig':
        """
        Convierte y valida los argumentos.

        Raises:
            ValueError: Si falta un parámetro requerido o alguno está fuera de rango.
        """
        def optional(name, parser):
            value = getattr(args, name, None)
            return None if value is None else parser(value)

        config = cls(
            command=args.command,
            measure=optional('measure', MeasureSpec.parse),
            partition=optional('partition', Partition.parse),
            mu=optional('mu', Partition.parse),
            ell=getattr(args, 'ell', None),
            parts=getattr(args, 'parts', None),
            size=getattr(args, 'size', None),
            seed=getattr(args, 'seed', None),
            trials=getattr(args, 'trials', None),
            precision_k=getattr(args, 'precision_k', None),
            max_size=_default(getattr(args, 'max_size', None), 20),
            epsilon=_default(optional('epsilon', parse_rational), Fraction(1, 1000)),
            fmt=args.format,
            jobs=getattr(args, 'jobs', 1),
            out=optional('out', Path),
            decimal=args.decimal,
            ensemble=optional('ensemble', Ensemble.parse),
            p=getattr(args, 'p', None),
            w=getattr(args, 'w', None),
            compare=optional('compare', MeasureSpec.parse),
            mode=getattr(args, 'mode', 'closed'),
            preset=getattr(args, 'preset', 'default'),
        )
        config.validate()
        return config

    def _require(self, condition: bool, message: str):
        if not condition:
            logger.error(message)
            raise ValueError(message)

    def validate(self):
        command = self.command
        if command in ('pmf', 'marginal', 'sample', 'moment', 'torsion'):
            self._require(self.measure is not None, f"{command} requiere --measure")
        if command == 'pmf':
            self._require(self.partition is not None, "pmf requiere --partition")
        if command == 'marginal':
            self._require(self.parts is not None or self.size is not None, "marginal requiere --parts y/o --size")
            self._require((self.parts or 0) >= 0 and (self.size or 0) >= 0, "--parts y --size deben ser >= 0")
            if self.parts is not None and self.size is not None:
                self._require(self.measure.specialized().family is Family.GENERAL,
                              "la marginal conjunta requiere una medida general con d finito o alt")
        if command in ('moment', 'torsion'):
            self._require(self.measure.family in (Family.GENERAL, Family.GENERAL_INF),
                          f"{command} requiere una medida general")
        if command == 'moment':
            self._require(self.mu is not None, "moment requiere --mu")
            self._require(self.max_size >= 0, "--max-size debe ser >= 0")
        if command == 'torsion':
            self._require(self.ell is not None and self.ell >= 1, "torsion requiere --ell >= 1")
        if command in ('sample', 'montecarlo', 'quotient-sim'):
            self._require(self.seed is not None, f"{command} requiere --seed explícita")
            self._require(0 <= self.seed < SEED_BOUND, "--seed debe estar en [0, 2^64)")
            self._require(self.trials is not None, f"{command} requiere --trials")
            minimum = 0 if command == 'sample' else 1
            self._require(self.trials >= minimum, f"--trials debe ser >= {minimum}")
            self._require(self.jobs >= 1, "--jobs debe ser >= 1")
        if command in ('montecarlo', 'quotient-sim'):
            self._require(self.p is not None, f"{command} requiere --p")
            self._require(0 < self.epsilon < 1, "--epsilon debe estar en (0, 1)")
        if command == 'montecarlo':
            self._require(self.ensemble is not None, "montecarlo requiere --ensemble")
            self._require(self.precision_k is None or self.precision_k >= 1, "--precision-k debe ser >= 1")
        if command == 'quotient-sim':
            self._require(self.w is not None and self.w >= 1, "quotient-sim requiere --w >= 1")


# ------------------------------------------------------------------------------------------------
# Parser
# ------------------------------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='cokernel-toolkit',
        description="Distribuciones de cokernels de matrices p-ádicas aleatorias: valores exactos y simulación.",
    )
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest='command', required=True)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument('--format', choices=['text', 'json', 'csv'], default='text', help="Formato de salida.")
        sub.add_argument('--out', default=None, help="Archivo de salida (por defecto, salida estándar).")
        sub.add_argument('--decimal', action='store_true',
                         help="Texto y CSV con 12 cifras significativas; en JSON agrega campos *_decimal.")
        return sub

    def random_flags(sub: argparse.ArgumentParser):
        sub.add_argument('--seed', type=int, default=None, help="Semilla de 64 bits (obligatoria).")
        sub.add_argument('--trials', type=int, default=None, help="Número de muestras.")
        sub.add_argument('--jobs', type=int, default=1, help="Procesos de trabajo.")

    sub = command('pmf', "Masa exacta de una partición.")
    sub.add_argument('--measure', required=True, help='p. ej. "general:p=2,u=1,d=1"')
    sub.add_argument('--partition', required=True, help='p. ej. "[2,1]"')

    sub = command('marginal', "Probabilidad del número de partes, del tamaño o conjunta.")
    sub.add_argument('--measure', required=True)
    sub.add_argument('--parts', type=int, default=None, help="Número de partes r.")
    sub.add_argument('--size', type=int, default=None, help="Tamaño n.")

    sub = command('sample', "Particiones muestreadas con la cadena de Markov.")
    sub.add_argument('--measure', required=True)
    random_flags(sub)

    sub = command('moment', "mu-momento (forma cerrada o suma truncada).")
    sub.add_argument('--measure', required=True)
    sub.add_argument('--mu', required=True)
    sub.add_argument('--mode', choices=['closed', 'truncated'], default='closed')
    sub.add_argument('--max-size', type=int, default=20)

    sub = command('torsion', "Esperanza de T_ell.")
    sub.add_argument('--measure', required=True)
    sub.add_argument('--ell', type=int, required=True)

    sub = command('montecarlo', "Cokernels de matrices aleatorias sobre Z/p^k.")
    sub.add_argument('--ensemble', required=True, help='"square:2", "rect:2x3", "alt:4" o "sym:3"')
    sub.add_argument('--p', type=int, required=True)
    sub.add_argument('--precision-k', type=int, default=None)
    sub.add_argument('--compare', default=None, help="Medida exacta con la que comparar.")
    sub.add_argument('--epsilon', default='1/1000', help="Masa máxima fuera del soporte comparado.")
    random_flags(sub)

    sub = command('quotient-sim', "Proceso de cociente aleatorio H/<g_1..g_w>.")
    sub.add_argument('--w', type=int, required=True)
    sub.add_argument('--p', type=int, required=True)
    sub.add_argument('--epsilon', default='1/1000')
    random_flags(sub)

    sub = command('validate', "Batería de identidades exactas.")
    sub.add_argument('--preset', choices=sorted(PRESETS), default='default')
    return parser


# ------------------------------------------------------------------------------------------------
# Salida
# ------------------------------------------------------------------------------------------------
def _csv_rows(rows: Sequence[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerows(rows)
    return buffer.getvalue()


def _cell(value, decimal: bool = False):
    """Valor legible para texto y CSV; en JSON los números van en forma exacta."""
    if isinstance(value, dict) and set(value) == {'lower', 'upper'}:
        value = Interval.from_json(value)
    if isinstance(value, (int, Fraction, Interval)) and not isinstance(value, bool):
        return render_value(value, decimal)
    return value


def _render_result(config: RunConfig, document: dict, text: str, table: Optional[str] = None) -> str:
    if config.fmt == 'json':
        return json.dumps(document, indent=2) + '\n'
    if config.fmt == 'csv':
        if table is not None:
            return table
        return _csv_rows([['key', 'value']] + [[key, _cell(value)] for key, value in document.items()
                                               if not isinstance(value, list)])
    return text + '\n' if text else ''


def _emit(config: RunConfig, payload: str):
    if config.out is None:
        sys.stdout.write(payload)
    else:
        config.out.write_text(payload)
        logger.info(f"Resultado escrito en {config.out}")


# ------------------------------------------------------------------------------------------------
# Comandos
# ------------------------------------------------------------------------------------------------
def cmd_pmf(toolkit: CokernelToolkit, config: RunConfig) -> int:
    value = toolkit.measures.pmf(config.measure, config.partition)
    document = {'measure': str(config.measure), 'partition': str(config.partition),
                **json_fields('pmf', value, config.decimal)}
    _emit(config, _render_result(config, document, render_value(value, config.decimal)))
    return 0


def cmd_marginal(toolkit: CokernelToolkit, config: RunConfig) -> int:
    spec = config.measure
    if config.parts is not None and config.size is not None:
        kind, value = 'joint', toolkit.measures.prob_size_and_parts(spec, config.size, config.parts)
    elif config.parts is not None:
        kind, value = 'parts', toolkit.measures.prob_num_parts(spec, config.parts)
    else:
        kind, value = 'size', toolkit.measures.prob_size(spec, config.size)
    document = {'measure': str(spec), 'kind': kind, 'parts': config.parts, 'size': config.size,
                **json_fields('value', value, config.decimal)}
    _emit(config, _render_result(config, document, render_value(value, config.decimal)))
    return 0


def _run_async(coroutine_factory, config: RunConfig):
    toolkit = AsyncCokernelToolkit(precision_k=config.precision_k, jobs=config.jobs)
    return asyncio.run(coroutine_factory(toolkit))


def cmd_sample(toolkit: CokernelToolkit, config: RunConfig) -> int:
    if config.fmt == 'text':
        samples = toolkit.samplers.sample(config.measure, config.trials, config.seed)
        _emit(config, ''.join(f"{sample}\n" for sample in samples))
        return 0
    if config.jobs > 1:
        distribution = _run_async(
            lambda client: client.samplers.empirical(config.measure, config.trials, config.seed, config.jobs), config)
    else:
        distribution = empirical_pmf(toolkit.samplers.sample(config.measure, config.trials, config.seed))
    document = dict(distribution.to_json(), measure=str(config.measure), seed=config.seed)
    _emit(config, _render_result(config, document, '', distribution.to_csv()))
    return 0


def cmd_moment(toolkit: CokernelToolkit, config: RunConfig) -> int:
    spec = config.measure
    if config.mode == 'closed':
        value = toolkit.moments.closed_form(config.mu, spec.d, spec.u, spec.p)
        document = {'measure': str(spec), 'mu': str(config.mu), 'mode': 'closed',
                    **json_fields('value', value, config.decimal)}
        _emit(config, _render_result(config, document, render_value(value, config.decimal)))
        return 0
    enclosure = toolkit.moments.truncated(config.mu, spec.d, spec.u, spec.p, config.max_size)
    document = {
        'measure': str(spec), 'mu': str(config.mu), 'mode': 'truncated', 'max_size': config.max_size,
        **json_fields('value', enclosure.value, config.decimal),
        **json_fields('tail_bound', enclosure.tail, config.decimal),
    }
    value, tail = render_value(enclosure.value, config.decimal), render_value(enclosure.tail, config.decimal)
    text = f"{value} (+ cola <= {tail})"
    _emit(config, _render_result(config, document, text))
    return 0


def cmd_torsion(toolkit: CokernelToolkit, config: RunConfig) -> int:
    spec = config.measure
    value = toolkit.moments.torsion(config.ell, spec.d, spec.u, spec.p)
    exact_order = toolkit.moments.torsion_exact_order(config.ell, spec.d, spec.u, spec.p)
    document = {'measure': str(spec), 'ell': config.ell, **json_fields('expectation', value, config.decimal),
                **json_fields('exact_order_expectation', exact_order, config.decimal)}
    _emit(config, _render_result(config, document, render_value(value, config.decimal)))
    return 0


def _simulation_report(toolkit: CokernelToolkit, config: RunConfig, distribution, compare: Optional[MeasureSpec],
                       header: dict) -> int:
    document = dict(header, seed=config.seed, trials=distribution.total, ambiguous=distribution.ambiguous)
    if compare is not None:
        document.update(toolkit.matrix_lab.compare(distribution, compare, config.epsilon, config.decimal))
        text = f"tv_distance={_cell(parse_json_value(document['tv_distance']), config.decimal)}"
    else:
        document['empirical'] = distribution.to_json()['counts']
        text = distribution.to_csv().rstrip('\n')
    _emit(config, _render_result(config, document, text, distribution.to_csv()))
    return 0


def cmd_montecarlo(toolkit: CokernelToolkit, config: RunConfig) -> int:
    k = config.precision_k or toolkit.precision_k
    if config.jobs > 1:
        distribution = _run_async(
            lambda client: client.matrix_lab.monte_carlo(config.ensemble, config.p, config.trials, config.seed,
                                                         k, config.jobs), config)
    else:
        distribution = toolkit.matrix_lab.monte_carlo(config.ensemble, config.p, config.trials, config.seed, k)
    header = {'ensemble': str(config.ensemble), 'p': config.p, 'k': k}
    return _simulation_report(toolkit, config, distribution, config.compare, header)


def cmd_quotient_sim(toolkit: CokernelToolkit, config: RunConfig) -> int:
    if config.jobs > 1:
        distribution = _run_async(
            lambda client: client.matrix_lab.quotient_simulation(config.w, config.p, config.trials, config.seed,
                                                                 config.jobs), config)
    else:
        distribution = toolkit.matrix_lab.quotient_simulation(config.w, config.p, config.trials, config.seed)
    header = {'w': config.w, 'p': config.p}
    return _simulation_report(toolkit, config, distribution, quotient_spec(config.w, config.p), header)


def cmd_validate(toolkit: CokernelToolkit, config: RunConfig) -> int:
    report = toolkit.validation.run(config.preset)
    document = report.to_json(config.decimal)
    lines = [f"[validate] {'OK' if report.passed else 'FAIL'} "
             f"(preset={report.preset}, checks={len(report.results)}, failed={len(report.failures)})"]
    lines.extend(f"  - {failure.describe()}" for failure in report.failures)
    table = _csv_rows([['name', 'params', 'passed', 'lhs', 'rhs']] + [
        [result.name, ';'.join(f"{k}={v}" for k, v in result.params.items()), result.passed,
         _cell(result.lhs, config.decimal), _cell(result.rhs, config.decimal)]
        for result in report.results
    ])
    _emit(config, _render_result(config, document, '\n'.join(lines), table))
    return 0 if report.passed else 1


HANDLERS = {
    'pmf': cmd_pmf,
    'marginal': cmd_marginal,
    'sample': cmd_sample,
    'moment': cmd_moment,
    'torsion': cmd_torsion,
    'montecarlo': cmd_montecarlo,
    'quotient-sim': cmd_quotient_sim,
    'validate': cmd_validate,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return int(exit_.code or 0)
    try:
        config = RunConfig.from_args(args)
        toolkit = CokernelToolkit(precision_k=config.precision_k)
        return HANDLERS[config.command](toolkit, config)
    except (ValueError, TypeError) as err:
        print(f"[error] {err}", file=sys.stderr)
        return 2
