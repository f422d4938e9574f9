"""
Matrices aleatorias sobre Z/p^k, forma normal de Smith y tipos de cokernel.

La medida de Haar aditiva sobre matrices p-ádicas se aproxima por entradas
uniformes módulo p^k; una muestra cuya valuación de Smith alcanza k se marca
como ambigua y se cuenta aparte.
"""
import asyncio
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from sympy import isprime

from ..core.log import Log
from .exact_arith import Interval, json_fields
from .measures import MeasureSpec, as_spec, pmf, quotient_spec, support_for_mass
from .partitions import EMPTY, Partition
from .samplers import (
    AMBIGUOUS, EmpiricalDistribution, RandomStream, Sample, empirical_pmf, sample_partition, split_trials,
)

logger = Log(__name__)

DEFAULT_PRECISION_K = 8
DEFAULT_ENUMERATION_BOUND = 2 ** 16
DEFAULT_EPSILON = Fraction(1, 1000)

_ENSEMBLE_PATTERN = re.compile(r'^\s*(square|rect|alt|sym)\s*:\s*(\d+)(?:\s*x\s*(\d+))?\s*$')


# ------------------------------------------------------------------------------------------------
# Ensambles y matrices
# ------------------------------------------------------------------------------------------------
@dataclass(frozen=True)
class Ensemble:
    """
    Familia de matrices aleatorias.

    ``square`` (d x d), ``rect`` (rows x cols), ``alt`` (n x n alternada, n par) y
    ``sym`` (n x n simétrica).
    """

    kind: str
    rows: int
    cols: int

    def __post_init__(self):
        if self.kind not in ('square', 'rect', 'alt', 'sym'):
            _reject(f"Ensamble desconocido: {self.kind!r}")
        if self.rows < 1 or self.cols < 1:
            _reject(f"Dimensiones inválidas: {self.rows}x{self.cols}")
        if self.kind != 'rect' and self.rows != self.cols:
            _reject(f"El ensamble {self.kind} es cuadrado")
        if self.kind == 'alt' and self.rows % 2:
            _reject(f"Las matrices alternadas requieren n par (recibido {self.rows})")

    @classmethod
    def square(cls, d: int) -> 'Ensemble':
        return cls('square', d, d)

    @classmethod
    def rect(cls, rows: int, cols: int) -> 'Ensemble':
        return cls('rect', rows, cols)

    @classmethod
    def alternating(cls, n: int) -> 'Ensemble':
        return cls('alt', n, n)

    @classmethod
    def symmetric(cls, n: int) -> 'Ensemble':
        return cls('sym', n, n)

    @classmethod
    def parse(cls, text: str) -> 'Ensemble':
        """
        Lee "square:2", "rect:2x3", "alt:4" o "sym:3".

        Raises:
            ValueError: Si el texto está mal formado.
        """
        match = _ENSEMBLE_PATTERN.match(text or '')
        if not match:
            _reject(f"Ensamble mal formado: {text!r}")
        kind, first, second = match.groups()
        if kind == 'rect':
            if second is None:
                _reject(f"rect requiere la forma rect:RxC, recibido {text!r}")
            return cls.rect(int(first), int(second))
        if second is not None:
            _reject(f"{kind} recibe una sola dimensión, recibido {text!r}")
        return cls(kind, int(first), int(first))

    def __str__(self) -> str:
        if self.kind == 'rect':
            return f"rect:{self.rows}x{self.cols}"
        return f"{self.kind}:{self.rows}"

    def free_positions(self) -> Tuple[np.ndarray, np.ndarray]:
        """Posiciones de las entradas libres; las demás las fija la simetría."""
        if self.kind == 'alt':
            return np.triu_indices(self.rows, 1)
        if self.kind == 'sym':
            return np.triu_indices(self.rows)
        return tuple(np.indices((self.rows, self.cols)).reshape(2, -1))

    def fill(self, values: np.ndarray, modulus: int, dtype) -> np.ndarray:
        matrix = np.zeros((self.rows, self.cols), dtype=dtype)
        upper = self.free_positions()
        matrix[upper] = values
        if self.kind == 'alt':
            matrix[upper[1], upper[0]] = (-values) % modulus
        elif self.kind == 'sym':
            matrix[upper[1], upper[0]] = values
        return matrix


def _reject(message: str):
    logger.error(message)
    raise ValueError(message)


def _require_prime_precision(p: int, k: int):
    if not isinstance(p, int) or not isprime(p):
        _reject(f"p debe ser un primo entero (recibido {p!r})")
    if not isinstance(k, int) or k < 1:
        _reject(f"k debe ser un entero >= 1 (recibido {k!r})")


def _dtype_for(modulus: int):
    return np.int64 if modulus * modulus < 2 ** 62 else object


@dataclass
class ModPKMatrix:
    """Matriz con entradas reducidas en [0, p^k)."""

    entries: np.ndarray
    p: int
    k: int

    def __post_init__(self):
        _require_prime_precision(self.p, self.k)
        entries = np.array(self.entries, dtype=_dtype_for(self.modulus))
        if entries.ndim != 2:
            _reject("Las entradas deben formar una matriz")
        self.entries = entries % self.modulus

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], p: int, k: int) -> 'ModPKMatrix':
        return cls(np.array([[int(value) for value in row] for row in rows], dtype=object), p, k)

    @property
    def modulus(self) -> int:
        return self.p ** self.k

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]


def random_matrix(ensemble: Ensemble, p: int, k: int, stream: RandomStream) -> ModPKMatrix:
    """
    Matriz del ensamble con entradas libres i.i.d. uniformes en [0, p^k).

    Las entradas dependientes se fijan por la simetría (A^T = -A con diagonal nula
    para ``alt``; A^T = A para ``sym``).
    """
    _require_prime_precision(p, k)
    modulus = p ** k
    dtype = _dtype_for(modulus)
    count = len(ensemble.free_positions()[0])
    values = stream.integers(modulus, count)
    return ModPKMatrix(ensemble.fill(np.asarray(values, dtype=dtype), modulus, dtype), p, k)


# ------------------------------------------------------------------------------------------------
# Forma normal de Smith
# ------------------------------------------------------------------------------------------------
def _valuations(block: np.ndarray, p: int, k: int) -> np.ndarray:
    """Valuación p-ádica de cada entrada, con k para las entradas nulas módulo p^k."""
    result = np.zeros(block.shape, dtype=np.int64)
    power = 1
    for _ in range(k):
        power *= p
        result += (block % power == 0)
    return result


def smith_valuations(matrix: ModPKMatrix) -> Tuple[List[int], int]:
    """
    Valuaciones de la diagonal de Smith de ``matrix`` sobre Z/p^k.

    En cada paso toma como pivote la primera entrada (en orden por filas) de
    valuación mínima v < k, normaliza su parte unidad a 1 y anula su fila y su
    columna. Si todo el bloque restante es nulo módulo p^k, sus valuaciones son k.

    Returns:
        tuple: (min(rows, cols) valuaciones en [0, k], cuántas valen k).
    """
    p, k, modulus = matrix.p, matrix.k, matrix.modulus
    work = matrix.entries.copy()
    size = min(matrix.rows, matrix.cols)
    valuations: List[int] = []
    for step in range(size):
        block = work[step:, step:]
        levels = _valuations(block, p, k)
        flat = int(np.argmin(levels))
        low = int(levels.flat[flat])
        if low >= k:
            valuations.extend([k] * (size - step))
            break
        row, col = divmod(flat, block.shape[1])
        work[[step, step + row]] = work[[step + row, step]]
        work[:, [step, step + col]] = work[:, [step + col, step]]
        scale = p ** low
        unit = int(work[step, step]) // scale
        work[step] = (work[step] * pow(unit, -1, modulus)) % modulus
        factors = work[step + 1:, step] // scale
        work[step + 1:] = (work[step + 1:] - np.outer(factors, work[step])) % modulus
        work[step, step + 1:] = 0
        valuations.append(low)
    saturated = sum(1 for value in valuations if value == k)
    return valuations, saturated


def cokernel_type(matrix: ModPKMatrix) -> Sample:
    """
    Tipo del cokernel, o ``AMBIGUOUS`` si alguna valuación alcanzó k.

    Para matrices altas (rows > cols) la parte libre Z_p^{rows-cols} se descarta.
    """
    valuations, saturated = smith_valuations(matrix)
    if saturated:
        return AMBIGUOUS
    return Partition(tuple(sorted((value for value in valuations if value), reverse=True)))


def monte_carlo_cokernel(ensemble: Ensemble, p: int, k: int, trials: int, stream: RandomStream) -> EmpiricalDistribution:
    """Agrega ``cokernel_type`` sobre ``trials`` matrices independientes."""
    if trials < 1:
        _reject(f"trials debe ser >= 1 (recibido {trials})")
    distribution = empirical_pmf(cokernel_type(random_matrix(ensemble, p, k, stream)) for _ in range(trials))
    logger.debug(f"{trials} cokernels de {ensemble} (p={p}, k={k}): {distribution.ambiguous} ambiguos")
    return distribution


def enumerate_cokernels(ensemble: Ensemble, p: int, k: int,
                        bound: int = DEFAULT_ENUMERATION_BOUND) -> EmpiricalDistribution:
    """
    Ley exacta del cokernel truncado: recorre todas las matrices del ensamble sobre Z/p^k.

    Raises:
        ValueError: Si el número de matrices supera ``bound``.
    """
    _require_prime_precision(p, k)
    modulus = p ** k
    free = len(ensemble.free_positions()[0])
    if modulus ** free > bound:
        _reject(f"{modulus}^{free} matrices superan la cota de enumeración {bound}")
    dtype = _dtype_for(modulus)
    return empirical_pmf(
        cokernel_type(ModPKMatrix(ensemble.fill(np.array(values, dtype=dtype), modulus, dtype), p, k))
        for values in product(range(modulus), repeat=free)
    )


# ------------------------------------------------------------------------------------------------
# Proceso de cociente aleatorio
# ------------------------------------------------------------------------------------------------
def random_quotient_process(w: int, p: int, stream: RandomStream) -> Sample:
    """
    H / <g_1, ..., g_w> con H de tipo mu ~ P_{inf,1} y g_j uniformes en H.

    El cociente es el cokernel de la matriz r x (r + w) cuyo primer bloque es
    diag(p^{mu_1}, ..., p^{mu_r}) y cuyas columnas restantes son las coordenadas
    de los g_j, a precisión k = mu_1 + 1.
    """
    if not isinstance(w, int) or w < 1:
        _reject(f"w debe ser un entero >= 1 (recibido {w!r})")
    _require_prime_precision(p, 1)
    mu = sample_partition(MeasureSpec.general(p, 1, None), stream)
    if not mu:
        return EMPTY
    rank = mu.length
    k = mu.largest + 1
    rows = []
    for index, part in enumerate(mu.parts):
        relations = [p ** part if column == index else 0 for column in range(rank)]
        generators = [int(value) for value in stream.integers(p ** part, w)]
        rows.append(relations + generators)
    return cokernel_type(ModPKMatrix.from_rows(rows, p, k))


def quotient_simulation(w: int, p: int, trials: int, stream: RandomStream) -> EmpiricalDistribution:
    if trials < 1:
        _reject(f"trials debe ser >= 1 (recibido {trials})")
    return empirical_pmf(random_quotient_process(w, p, stream) for _ in range(trials))


# ------------------------------------------------------------------------------------------------
# Comparación con la ley exacta
# ------------------------------------------------------------------------------------------------
def _point(value) -> Fraction:
    return value.midpoint if isinstance(value, Interval) else value


def tv_distance(emp: EmpiricalDistribution, spec: MeasureSpec, support: Iterable[Partition]) -> Fraction:
    """
    (1/2) sum_{lambda en soporte} |frecuencia - pmf| + (1/2)(masa empírica fuera + cota de masa exacta fuera).

    Para pmf con intervalo se usa el punto medio en la suma y la cota inferior
    para la masa exacta fuera del soporte.
    """
    support = set(support)
    inside = Fraction(0)
    captured = Fraction(0)
    for partition in support:
        value = pmf(spec, partition)
        inside += abs(emp.frequency(partition) - _point(value))
        captured += value.lower if isinstance(value, Interval) else value
    outside = max(Fraction(0), 1 - captured)
    return (inside + emp.mass_outside(support) + outside) / 2


def comparison_report(emp: EmpiricalDistribution, spec: MeasureSpec,
                      epsilon: Fraction = DEFAULT_EPSILON, decimal: bool = False) -> dict:
    """
    Tablas empírica y exacta sobre un soporte de masa >= 1 - epsilon, con la distancia TV.

    Los valores van en forma exacta ("a/b" o {"lower", "upper"}); ``decimal`` agrega campos ``*_decimal``.
    """
    support, outside, max_size = support_for_mass(spec, epsilon)
    distance = tv_distance(emp, spec, support)
    return {
        'compare': str(spec),
        'max_size': max_size,
        **json_fields('exact_mass_outside_bound', outside, decimal),
        **json_fields('tv_distance', distance, decimal),
        'trials': emp.total,
        'ambiguous': emp.ambiguous,
        'empirical': emp.to_json()['counts'],
        'exact': [{'partition': str(partition), **json_fields('pmf', pmf(spec, partition), decimal)}
                  for partition in support],
    }


def _monte_carlo_chunk(ensemble_text: str, p: int, k: int, seed: int, worker_index: int,
                       trials: int) -> EmpiricalDistribution:
    stream = RandomStream(seed).derive(worker_index)
    ensemble = Ensemble.parse(ensemble_text)
    return empirical_pmf(cokernel_type(random_matrix(ensemble, p, k, stream)) for _ in range(trials))


def _quotient_chunk(w: int, p: int, seed: int, worker_index: int, trials: int) -> EmpiricalDistribution:
    stream = RandomStream(seed).derive(worker_index)
    return empirical_pmf(random_quotient_process(w, p, stream) for _ in range(trials))


# ------------------------------------------------------------------------------------------------
# Fachadas
# ------------------------------------------------------------------------------------------------
class MatrixLab:
    """Monte Carlo secuencial con la precisión k del cliente."""

    def __init__(self, client):
        self.client = client  # Referencia al cliente principal

    def monte_carlo(self, ensemble, p: int, trials: int, seed: int, k: Optional[int] = None) -> EmpiricalDistribution:
        """
        Distribución empírica de cokernels.

        Args:
            ensemble (Ensemble | str): p. ej. "square:2".
            p (int): Primo.
            trials (int): Número de matrices (>= 1).
            seed (int): Semilla de 64 bits.
            k (int, optional): Precisión; por defecto la del cliente.

        Returns:
            EmpiricalDistribution: Conteos con las muestras ambiguas aparte.
        """
        ensemble = ensemble if isinstance(ensemble, Ensemble) else Ensemble.parse(ensemble)
        k = k or self.client.precision_k
        distribution = monte_carlo_cokernel(ensemble, p, k, trials, RandomStream(seed))
        logger.info(f"Monte Carlo {ensemble} p={p} k={k}: {trials} ensayos, {distribution.ambiguous} ambiguos")
        return distribution

    def quotient_simulation(self, w: int, p: int, trials: int, seed: int) -> EmpiricalDistribution:
        return quotient_simulation(w, p, trials, RandomStream(seed))

    def enumerate(self, ensemble, p: int, k: int) -> EmpiricalDistribution:
        ensemble = ensemble if isinstance(ensemble, Ensemble) else Ensemble.parse(ensemble)
        return enumerate_cokernels(ensemble, p, k, self.client.bruteforce_bound)

    def compare(self, emp: EmpiricalDistribution, spec, epsilon: Fraction = DEFAULT_EPSILON,
                decimal: bool = False) -> dict:
        return comparison_report(emp, as_spec(spec), epsilon, decimal)

    @staticmethod
    def quotient_spec(w: int, p: int) -> MeasureSpec:
        return quotient_spec(w, p)


class AsyncMatrixLab:
    """Monte Carlo en paralelo; los subflujos son seed XOR índice y se fusionan en orden."""

    def __init__(self, client):
        self.client = client  # Referencia al cliente principal

    async def _gather(self, function, jobs: int, trials: int, *args) -> EmpiricalDistribution:
        if trials < 1 or jobs < 1:
            _reject(f"Se requiere trials >= 1 y jobs >= 1 (recibido trials={trials}, jobs={jobs})")
        loop = asyncio.get_running_loop()
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                loop.run_in_executor(pool, function, *args, index, chunk)
                for index, chunk in enumerate(split_trials(trials, jobs))
            ]
            parts = await asyncio.gather(*futures)
        result = EmpiricalDistribution()
        for part in parts:
            result = result.merge(part)
        return result

    async def monte_carlo(self, ensemble, p: int, trials: int, seed: int, k: Optional[int] = None,
                          jobs: Optional[int] = None) -> EmpiricalDistribution:
        ensemble = ensemble if isinstance(ensemble, Ensemble) else Ensemble.parse(ensemble)
        k = k or self.client.precision_k
        jobs = self.client.jobs if jobs is None else jobs
        _require_prime_precision(p, k)
        RandomStream(seed)
        result = await self._gather(_monte_carlo_chunk, jobs, trials, str(ensemble), p, k, seed)
        logger.info(f"Monte Carlo {ensemble} en {jobs} procesos: {result.ambiguous} ambiguos")
        return result

    async def quotient_simulation(self, w: int, p: int, trials: int, seed: int,
                                  jobs: Optional[int] = None) -> EmpiricalDistribution:
        jobs = self.client.jobs if jobs is None else jobs
        RandomStream(seed)
        return await self._gather(_quotient_chunk, jobs, trials, w, p, seed)
