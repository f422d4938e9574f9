"""
Muestreo exacto de particiones por las cadenas de Markov sobre las columnas lambda'.

Partiendo de lambda'_0 = d (o n en la familia simétrica) se elige lambda'_{l+1} = b
con probabilidad K(lambda'_l, b) hasta llegar a 0. Cada elección compara un
uniforme diádico de 128 bits con la fila acumulada exacta y añade bits mientras
la celda sea ambigua.
"""
import asyncio
import csv
import io
import json
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.log import Log
from .exact_arith import Interval, Number, pochhammer, pochhammer_infinite_within
from .measures import DEFAULT_WIDTH, Family, MeasureSpec, as_spec
from .partitions import Partition

logger = Log(__name__)

SEED_BOUND = 2 ** 64
INITIAL_BITS = 128
EXTRA_BITS = 64


# ------------------------------------------------------------------------------------------------
# Núcleos
# ------------------------------------------------------------------------------------------------
def _require_transition(a: int, b: int, start: Optional[int]):
    if not 0 <= b <= a or (start is not None and a > start):
        logger.error(f"Transición inválida: a={a}, b={b}, inicio={start}")
        raise ValueError(f"Se requiere 0 <= b <= a <= {start} (recibido a={a}, b={b})")


def _qp(p: Fraction, m: int) -> Fraction:
    return pochhammer(1 / p, m, p)


def _general_kernel(a: int, b: int, u: Fraction, p: Fraction) -> Fraction:
    return u ** b * _qp(p, a) * pochhammer(u / p, a, p) / (
        p ** (b * b) * _qp(p, a - b) * _qp(p, b) * pochhammer(u / p, b, p)
    )


def _even_product(p: Fraction, count: int) -> Fraction:
    result = Fraction(1)
    for j in range(1, count + 1):
        result *= 1 - p ** (-2 * j)
    return result


def _sym_kernel(a: int, b: int, p: Fraction) -> Fraction:
    return _qp(p, a) / (p ** (b * (b + 1) // 2) * _qp(p, b) * _even_product(p, (a - b) // 2))


def kernel_general(a: int, b: int, d: int, u: Number, p: Number) -> Fraction:
    """
    K(a, b) = u^b (1/p)_a (u/p)_a / (p^{b^2} (1/p)_{a-b} (1/p)_b (u/p)_b).

    Raises:
        ValueError: Si no se cumple 0 <= b <= a <= d.
    """
    spec = MeasureSpec.general(p, u, d)
    _require_transition(a, b, d)
    return _general_kernel(a, b, spec.u, spec.p)


def kernel_general_first_step_inf(b: int, u: Number, p: Number, max_width: Fraction = DEFAULT_WIDTH) -> Interval:
    """Primer paso para d = inf: u^b (u/p)_inf / (p^{b^2} (1/p)_b (u/p)_b)."""
    spec = MeasureSpec.general(p, u, None)
    if b < 0:
        logger.error(f"Índice de primer paso negativo: {b}")
        raise ValueError(f"b debe ser >= 0 (recibido {b})")
    coefficient = _general_inf_coefficient(b, spec.u, spec.p)
    return coefficient * pochhammer_infinite_within(spec.u, spec.p, max_width / max(coefficient, 1))


def _general_inf_coefficient(b: int, u: Fraction, p: Fraction) -> Fraction:
    return u ** b / (p ** (b * b) * _qp(p, b) * pochhammer(u / p, b, p))


def kernel_sym(a: int, b: int, n: int, p: Number) -> Fraction:
    """
    K(a, b) = prod_{i<=a}(1-1/p^i) / (p^{C(b+1,2)} prod_{i<=b}(1-1/p^i) prod_{j<=floor((a-b)/2)}(1-1/p^{2j})).

    Raises:
        ValueError: Si no se cumple 0 <= b <= a <= n.
    """
    spec = MeasureSpec.symmetric(n, p)
    _require_transition(a, b, n)
    return _sym_kernel(a, b, spec.p)


def _sym_inf_coefficient(b: int, p: Fraction) -> Fraction:
    return 1 / (p ** (b * (b + 1) // 2) * _qp(p, b))


def _sym_inf_constant(p: Fraction, width: Fraction) -> Interval:
    """(1/p)_inf / prod_{j>=1}(1 - 1/p^{2j})."""
    return pochhammer_infinite_within(1, p, width / 4) / pochhammer_infinite_within(1, p * p, width / 4)


def kernel_sym_first_step_inf(b: int, p: Number, max_width: Fraction = DEFAULT_WIDTH) -> Interval:
    """Primer paso para n = inf: (1/p)_inf / (p^{C(b+1,2)} (1/p)_b prod_{j>=1}(1-1/p^{2j}))."""
    spec = MeasureSpec.symmetric(None, p)
    if b < 0:
        logger.error(f"Índice de primer paso negativo: {b}")
        raise ValueError(f"b debe ser >= 0 (recibido {b})")
    return _sym_inf_coefficient(b, spec.p) * _sym_inf_constant(spec.p, max_width)


# ------------------------------------------------------------------------------------------------
# Flujo aleatorio
# ------------------------------------------------------------------------------------------------
class RandomStream:
    """
    Generador Philox (basado en contador) con clave ``seed``.

    La misma semilla reproduce la misma secuencia en cualquier plataforma;
    ``derive`` produce subflujos con clave seed XOR índice.
    """

    def __init__(self, seed: int):
        if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < SEED_BOUND:
            logger.error(f"Semilla inválida: {seed!r}")
            raise ValueError(f"La semilla debe ser un entero en [0, 2^64) (recibido {seed!r})")
        self.seed = seed
        self._bit_generator = np.random.Philox(key=seed)
        self.generator = np.random.Generator(self._bit_generator)

    def derive(self, worker_index: int) -> 'RandomStream':
        return RandomStream(self.seed ^ worker_index)

    def bits(self, count: int) -> int:
        """Entero uniforme de ``count`` bits (múltiplo de 64) a partir de palabras crudas."""
        words = self._bit_generator.random_raw(count // 64)
        value = 0
        for word in words.tolist():
            value = (value << 64) | word
        return value

    def integers(self, high: int, size: int) -> np.ndarray:
        """``size`` enteros uniformes en [0, high)."""
        if high <= np.iinfo(np.int64).max:
            return self.generator.integers(0, high, size=size, dtype=np.int64)
        return np.array([self._below(high) for _ in range(size)], dtype=object)

    def _below(self, high: int) -> int:
        width = max(64, -(-high.bit_length() // 64) * 64)
        while True:
            value = self.bits(width) >> (width - high.bit_length())
            if value < high:
                return value


Cells = Callable[[Fraction], Iterator[Tuple[Fraction, Fraction]]]


def draw_index(stream: RandomStream, cells: Cells, exact: bool = True) -> int:
    """
    Elige el índice b de una distribución discreta dada por sus acumuladas.

    ``cells(width)`` produce, para b = 0, 1, ..., cotas (lo_b, hi_b) de la
    acumulada C_b. Un uniforme diádico U en [L, L + 2^-bits) cae en la celda b
    cuando hi_{b-1} <= L y L + 2^-bits <= lo_b; si no se decide, se añaden bits
    y, para filas no exactas, se estrecha el encierro.
    """
    bits = INITIAL_BITS
    value = stream.bits(bits)
    width = DEFAULT_WIDTH
    while True:
        scale = 1 << bits
        lower, upper = Fraction(value, scale), Fraction(value + 1, scale)
        for index, (lo, hi) in enumerate(cells(width)):
            if hi <= lower:
                continue
            if upper <= lo:
                return index
            break
        value = (value << EXTRA_BITS) | stream.bits(EXTRA_BITS)
        bits += EXTRA_BITS
        if not exact:
            width /= 1 << EXTRA_BITS


# ------------------------------------------------------------------------------------------------
# Muestreador
# ------------------------------------------------------------------------------------------------
class PartitionSampler:
    """
    Muestreador de una medida; guarda en caché las filas acumuladas exactas.

    ``alt`` se muestrea con su especialización general; ``general`` con d = inf y
    ``syminf`` usan un primer paso con encierros y luego las filas finitas.
    """

    def __init__(self, spec: MeasureSpec):
        self.spec = spec
        self._target = spec.specialized()
        self._rows: Dict[int, List[Fraction]] = {}
        self._first_coefficients: List[Fraction] = []
        self._constants: Dict[Fraction, Interval] = {}

    def _row(self, a: int) -> List[Fraction]:
        row = self._rows.get(a)
        if row is None:
            target = self._target
            if target.family in (Family.SYMMETRIC, Family.SYMMETRIC_INF):
                values = [_sym_kernel(a, b, target.p) for b in range(a + 1)]
            else:
                values = [_general_kernel(a, b, target.u, target.p) for b in range(a + 1)]
            row, total = [], Fraction(0)
            for value in values:
                total += value
                row.append(total)
            if total != 1:
                logger.error(f"Fila {a} no estocástica para {self.spec}: suma {total}")
                raise ValueError(f"La fila {a} del núcleo suma {total}")
            self._rows[a] = row
        return row

    def _finite_cells(self, a: int) -> Cells:
        row = self._row(a)
        return lambda width: ((value, value) for value in row)

    def _coefficient(self, b: int) -> Fraction:
        while len(self._first_coefficients) <= b:
            index = len(self._first_coefficients)
            target = self._target
            if target.family is Family.SYMMETRIC_INF:
                self._first_coefficients.append(_sym_inf_coefficient(index, target.p))
            else:
                self._first_coefficients.append(_general_inf_coefficient(index, target.u, target.p))
        return self._first_coefficients[b]

    def _constant(self, width: Fraction) -> Interval:
        constant = self._constants.get(width)
        if constant is None:
            target = self._target
            if target.family is Family.SYMMETRIC_INF:
                constant = _sym_inf_constant(target.p, width)
            else:
                constant = pochhammer_infinite_within(target.u, target.p, width)
            self._constants[width] = constant
        return constant

    def _infinite_cells(self, width: Fraction) -> Iterator[Tuple[Fraction, Fraction]]:
        constant = self._constant(width)
        cumulative = Fraction(0)
        b = 0
        while True:
            cumulative += self._coefficient(b)
            yield cumulative * constant.lower, min(cumulative * constant.upper, Fraction(1))
            b += 1

    def sample(self, stream: RandomStream) -> Partition:
        """Recorre la cadena hasta absorber en 0 y devuelve la conjugada de las columnas."""
        target = self._target
        columns = []
        if target.family in (Family.GENERAL_INF, Family.SYMMETRIC_INF):
            current = draw_index(stream, self._infinite_cells, exact=False)
        else:
            start = target.d if target.family is Family.GENERAL else target.n
            current = draw_index(stream, self._finite_cells(start))
        while current:
            columns.append(current)
            current = draw_index(stream, self._finite_cells(current))
        return Partition.from_columns(columns)


@lru_cache(maxsize=64)
def sampler_for(spec: MeasureSpec) -> PartitionSampler:
    return PartitionSampler(spec)


def sample_partition(spec: MeasureSpec, stream: RandomStream) -> Partition:
    """Una muestra de ``spec``; la distribución de la salida es exactamente pmf(spec, .)."""
    return sampler_for(spec).sample(stream)


# ------------------------------------------------------------------------------------------------
# Distribuciones empíricas
# ------------------------------------------------------------------------------------------------
class AmbiguousTruncation:
    """Marca de una muestra cuya valuación de Smith alcanzó la precisión k."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return 'AMBIGUOUS'

    def __reduce__(self):
        return (AmbiguousTruncation, ())


AMBIGUOUS = AmbiguousTruncation()

Sample = Union[Partition, AmbiguousTruncation]


def _display_key(partition: Partition):
    return partition.size, tuple(-part for part in partition.parts)


@dataclass
class EmpiricalDistribution:
    """Conteos exactos por partición; ``total`` = suma de conteos + ``ambiguous``."""

    counts: Counter = field(default_factory=Counter)
    total: int = 0
    ambiguous: int = 0

    def add(self, sample: Sample):
        self.total += 1
        if sample is AMBIGUOUS:
            self.ambiguous += 1
        else:
            self.counts[sample] += 1

    def merge(self, other: 'EmpiricalDistribution') -> 'EmpiricalDistribution':
        return EmpiricalDistribution(self.counts + other.counts, self.total + other.total,
                                     self.ambiguous + other.ambiguous)

    def frequency(self, partition: Partition) -> Fraction:
        if not self.total:
            return Fraction(0)
        return Fraction(self.counts.get(partition, 0), self.total)

    def mass_outside(self, support: Iterable[Partition]) -> Fraction:
        """Frecuencia fuera del soporte, incluidas las muestras ambiguas."""
        if not self.total:
            return Fraction(0)
        inside = sum(self.counts.get(partition, 0) for partition in set(support))
        return Fraction(self.total - inside, self.total)

    def partitions(self) -> List[Partition]:
        return sorted(self.counts, key=_display_key)

    def rows(self) -> List[Tuple[Partition, int, Fraction]]:
        return [(partition, self.counts[partition], self.frequency(partition)) for partition in self.partitions()]

    def to_csv(self) -> str:
        """CSV con filas de cabecera total/ambiguous y columnas partition,count,frequency."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(['total', self.total])
        writer.writerow(['ambiguous', self.ambiguous])
        writer.writerow(['partition', 'count', 'frequency'])
        for partition, count, frequency in self.rows():
            writer.writerow([str(partition), count, str(frequency)])
        return buffer.getvalue()

    def to_json(self) -> dict:
        return {
            'total': self.total,
            'ambiguous': self.ambiguous,
            'counts': [
                {'partition': str(partition), 'count': count, 'frequency': str(frequency)}
                for partition, count, frequency in self.rows()
            ],
        }

    @classmethod
    def from_json(cls, document: dict) -> 'EmpiricalDistribution':
        counts = Counter({Partition.parse(row['partition']): int(row['count']) for row in document['counts']})
        distribution = cls(counts, int(document['total']), int(document['ambiguous']))
        if sum(counts.values()) + distribution.ambiguous != distribution.total:
            logger.error("Documento de distribución empírica inconsistente")
            raise ValueError("Los conteos más las ambiguas no suman el total")
        return distribution

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def empirical_pmf(samples: Iterable[Sample]) -> EmpiricalDistribution:
    """Agrega muestras en una distribución empírica; el resultado no depende del orden."""
    distribution = EmpiricalDistribution()
    for sample in samples:
        distribution.add(sample)
    return distribution


def split_trials(trials: int, jobs: int) -> List[int]:
    """Reparte ``trials`` en ``jobs`` bloques; los primeros reciben el resto."""
    base, extra = divmod(trials, jobs)
    return [base + (1 if index < extra else 0) for index in range(jobs)]


def _sample_chunk(spec_text: str, seed: int, worker_index: int, count: int) -> EmpiricalDistribution:
    stream = RandomStream(seed).derive(worker_index)
    sampler = sampler_for(MeasureSpec.parse(spec_text))
    return empirical_pmf(sampler.sample(stream) for _ in range(count))


# ------------------------------------------------------------------------------------------------
# Fachadas
# ------------------------------------------------------------------------------------------------
class Samplers:
    """Muestreo secuencial con semilla explícita."""

    def __init__(self, client):
        self.client = client  # Referencia al cliente principal

    def sample(self, spec, count: int, seed: int) -> List[Partition]:
        """
        Genera ``count`` particiones con la semilla dada.

        Args:
            spec (MeasureSpec | str): Medida a muestrear.
            count (int): Número de muestras (>= 0).
            seed (int): Semilla de 64 bits.

        Returns:
            list[Partition]: Muestras en orden de generación.
        """
        spec = as_spec(spec)
        if count < 0:
            logger.error(f"count debe ser no negativo, recibido {count}")
            raise ValueError("count debe ser >= 0")
        stream = RandomStream(seed)
        sampler = sampler_for(spec)
        samples = [sampler.sample(stream) for _ in range(count)]
        logger.info(f"{count} muestras generadas para {spec} (semilla {seed})")
        return samples

    def empirical(self, spec, count: int, seed: int) -> EmpiricalDistribution:
        return empirical_pmf(self.sample(spec, count, seed))


class AsyncSamplers:
    """Muestreo en paralelo por procesos; cada trabajador usa el subflujo seed XOR índice."""

    def __init__(self, client):
        self.client = client  # Referencia al cliente principal

    async def empirical(self, spec, count: int, seed: int, jobs: Optional[int] = None) -> EmpiricalDistribution:
        """
        Distribución empírica de ``count`` muestras repartidas en ``jobs`` procesos.

        La fusión se hace en orden de índice de trabajador, así que el resultado
        depende solo de (spec, count, seed, jobs).
        """
        spec = as_spec(spec)
        jobs = self.client.jobs if jobs is None else jobs
        if count < 0 or jobs < 1:
            logger.error(f"Parámetros inválidos: count={count}, jobs={jobs}")
            raise ValueError("Se requiere count >= 0 y jobs >= 1")
        RandomStream(seed)
        loop = asyncio.get_running_loop()
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                loop.run_in_executor(pool, _sample_chunk, str(spec), seed, index, chunk)
                for index, chunk in enumerate(split_trials(count, jobs))
            ]
            parts: Sequence[EmpiricalDistribution] = await asyncio.gather(*futures)
        result = EmpiricalDistribution()
        for part in parts:
            result = result.merge(part)
        logger.info(f"{count} muestras de {spec} en {jobs} procesos")
        return result
