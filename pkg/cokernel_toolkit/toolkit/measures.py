"""
Funciones de masa exactas de la familia P_{d,u} y sus especializaciones.

Familias soportadas:

- ``general``: P_{d,u} con d finito (P_d de Friedman-Washington cuando u = 1).
- ``general`` con ``d=inf``: el límite P_{inf,u}; devuelve intervalos.
- ``alt``: cokernel de una matriz alternada n x n (n par), P^Alt_{n,p}.
- ``sym``: cokernel de una matriz simétrica n x n, P^Sym_n.
- ``syminf``: el límite P^Sym_inf; devuelve intervalos.
"""
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from ..core.log import Log
from .exact_arith import (
    Interval, Number, as_rational, pochhammer, pochhammer_infinite_within, render_rational,
)
from .groups import aut_order, rectangular_subgroup_product, sp_order
from .partitions import EMPTY, Partition, enumerate_partitions, partitions_up_to

logger = Log(__name__)

DEFAULT_WIDTH = Fraction(1, 2 ** 64)
DEFAULT_MAX_SIZE_CAP = 200

Value = Union[Fraction, Interval]

_SPEC_PATTERN = re.compile(r'^\s*([a-z]+)\s*:\s*(.*?)\s*$')


class Family(str, Enum):
    GENERAL = 'general'
    GENERAL_INF = 'general_inf'
    ALTERNATING = 'alt'
    SYMMETRIC = 'sym'
    SYMMETRIC_INF = 'syminf'


@dataclass(frozen=True)
class MeasureSpec:
    """
    Descripción de una medida de la familia.

    Args:
        family (Family): Etiqueta de la familia.
        p (Fraction): Parámetro p > 1.
        u (Fraction, optional): 0 < u < p, solo familias generales.
        d (int, optional): Cota del número de partes, solo ``general``.
        n (int, optional): Tamaño de la matriz para ``alt`` (par) y ``sym``.
    """

    family: Family
    p: Fraction
    u: Optional[Fraction] = None
    d: Optional[int] = None
    n: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, 'family', Family(self.family))
        object.__setattr__(self, 'p', as_rational(self.p))
        if self.u is not None:
            object.__setattr__(self, 'u', as_rational(self.u))
        if self.p <= 1:
            self._reject(f"p debe ser mayor que 1 (recibido {self.p})")
        general = self.family in (Family.GENERAL, Family.GENERAL_INF)
        if general:
            if self.u is None or not 0 < self.u < self.p:
                self._reject(f"Se requiere 0 < u < p (recibido u={self.u}, p={self.p})")
            if self.n is not None:
                self._reject("Las familias generales no usan n")
        elif self.u is not None or self.d is not None:
            self._reject(f"La familia {self.family.value} no usa u ni d")
        if self.family is Family.GENERAL:
            if not isinstance(self.d, int) or self.d < 1:
                self._reject(f"d debe ser un entero >= 1 (recibido {self.d})")
        elif self.d is not None:
            self._reject("d solo se usa en la familia general finita")
        if self.family is Family.ALTERNATING:
            if not isinstance(self.n, int) or self.n < 2 or self.n % 2:
                self._reject(f"n debe ser un entero par positivo (recibido {self.n})")
        elif self.family is Family.SYMMETRIC:
            if not isinstance(self.n, int) or self.n < 1:
                self._reject(f"n debe ser un entero >= 1 (recibido {self.n})")
        elif not general and self.n is not None:
            self._reject("syminf no usa n")

    @staticmethod
    def _reject(message: str):
        logger.error(message)
        raise ValueError(message)

    # --------------------------------------------------------------------------------------------
    # Constructores
    # --------------------------------------------------------------------------------------------
    @classmethod
    def general(cls, p: Number, u: Number, d: Optional[int]) -> 'MeasureSpec':
        """P_{d,u}; ``d=None`` significa d = infinito."""
        if d is None:
            return cls(Family.GENERAL_INF, p, u=u)
        return cls(Family.GENERAL, p, u=u, d=d)

    @classmethod
    def alternating(cls, n: int, p: Number) -> 'MeasureSpec':
        return cls(Family.ALTERNATING, p, n=n)

    @classmethod
    def symmetric(cls, n: Optional[int], p: Number) -> 'MeasureSpec':
        """P^Sym_n; ``n=None`` significa n = infinito."""
        if n is None:
            return cls(Family.SYMMETRIC_INF, p)
        return cls(Family.SYMMETRIC, p, n=n)

    @classmethod
    def parse(cls, text: str) -> 'MeasureSpec':
        """
        Lee una especificación compacta.

        Ejemplos: "general:p=2,u=1/2,d=3", "general:p=2,u=1,d=inf", "alt:p=3,n=4",
        "sym:p=2,n=3", "syminf:p=2".

        Raises:
            ValueError: Si el texto está mal formado o los parámetros son inválidos.
        """
        match = _SPEC_PATTERN.match(text or '')
        if not match:
            cls._reject(f"Medida mal formada: {text!r}")
        tag, body = match.groups()
        params = {}
        for item in filter(None, (piece.strip() for piece in body.split(','))):
            key, sep, value = item.partition('=')
            if not sep or key.strip() in params:
                cls._reject(f"Parámetro mal formado en {text!r}: {item!r}")
            params[key.strip()] = value.strip()
        expected = {
            'general': {'p', 'u', 'd'},
            'alt': {'p', 'n'},
            'sym': {'p', 'n'},
            'syminf': {'p'},
        }
        if tag not in expected:
            cls._reject(f"Familia desconocida {tag!r} en {text!r}")
        if set(params) != expected[tag]:
            cls._reject(f"La familia {tag} requiere los parámetros {sorted(expected[tag])}")
        p = as_rational(params['p'])
        if tag == 'general':
            d = None if params['d'] == 'inf' else _parse_natural(params['d'], 'd')
            return cls.general(p, as_rational(params['u']), d)
        if tag == 'alt':
            return cls.alternating(_parse_natural(params['n'], 'n'), p)
        if tag == 'sym':
            return cls.symmetric(_parse_natural(params['n'], 'n'), p)
        return cls.symmetric(None, p)

    def __str__(self) -> str:
        p = render_rational(self.p)
        if self.family is Family.GENERAL:
            return f"general:p={p},u={render_rational(self.u)},d={self.d}"
        if self.family is Family.GENERAL_INF:
            return f"general:p={p},u={render_rational(self.u)},d=inf"
        if self.family is Family.ALTERNATING:
            return f"alt:p={p},n={self.n}"
        if self.family is Family.SYMMETRIC:
            return f"sym:p={p},n={self.n}"
        return f"syminf:p={p}"

    # --------------------------------------------------------------------------------------------
    # Propiedades derivadas
    # --------------------------------------------------------------------------------------------
    @property
    def is_exact(self) -> bool:
        """True si la masa de cada partición es un racional exacto."""
        return self.family in (Family.GENERAL, Family.ALTERNATING, Family.SYMMETRIC)

    @property
    def max_parts(self) -> Optional[int]:
        if self.family is Family.GENERAL:
            return self.d
        if self.family is Family.ALTERNATING:
            return self.n // 2
        if self.family is Family.SYMMETRIC:
            return self.n
        return None

    def specialized(self) -> 'MeasureSpec':
        """P^Alt_{n,p} como P^{p^2}_{n/2,p}; las demás familias se devuelven sin cambios."""
        if self.family is Family.ALTERNATING:
            return MeasureSpec.general(self.p ** 2, self.p, self.n // 2)
        return self


def _parse_natural(text: str, name: str) -> int:
    if not text.isdigit():
        logger.error(f"{name} debe ser un entero no negativo, recibido {text!r}")
        raise ValueError(f"{name} debe ser un entero no negativo (recibido {text!r})")
    return int(text)


def quotient_spec(w: int, p: Number) -> MeasureSpec:
    """Medida P_w del proceso de cociente aleatorio: P_{inf, 1/p^w}."""
    if w < 1:
        logger.error(f"w debe ser positivo, recibido {w}")
        raise ValueError(f"w debe ser >= 1 (recibido {w})")
    p = as_rational(p)
    return MeasureSpec.general(p, 1 / p ** w, None)


# ------------------------------------------------------------------------------------------------
# Productos auxiliares
# ------------------------------------------------------------------------------------------------
def _prod_one_minus(p: Fraction, exponents) -> Fraction:
    """prod (1 - 1/p^i) sobre los exponentes dados."""
    result = Fraction(1)
    for i in exponents:
        result *= 1 - p ** (-i)
    return result


def _qp(p: Fraction, m: int) -> Fraction:
    """(1/p)_m."""
    return pochhammer(1 / p, m, p)


def _up(u: Fraction, p: Fraction, m: int) -> Fraction:
    """(u/p)_m."""
    return pochhammer(u / p, m, p)


def _qp_infinite(p: Fraction, width: Fraction) -> Interval:
    """(1/p)_inf = prod_{i>=1}(1 - 1/p^i)."""
    return pochhammer_infinite_within(1, p, width)


def _up_infinite(u: Fraction, p: Fraction, width: Fraction) -> Interval:
    """(u/p)_inf = prod_{i>=1}(1 - u/p^i)."""
    return pochhammer_infinite_within(u, p, width)


def _odd_product_infinite(p: Fraction, width: Fraction) -> Interval:
    """prod_{i impar}(1 - 1/p^i) = prod_{i>=1}(1 - p/(p^2)^i)."""
    return pochhammer_infinite_within(p, p * p, width)


def _even_product_infinite(p: Fraction, width: Fraction) -> Interval:
    """prod_{j>=1}(1 - 1/p^{2j})."""
    return pochhammer_infinite_within(1, p * p, width)


def _half_multiplicity_product(partition: Partition, p: Fraction) -> Fraction:
    """prod_i prod_{j=1}^{floor(m_i/2)} (1 - 1/p^{2j})."""
    result = Fraction(1)
    for multiplicity in partition.multiplicities():
        result *= _prod_one_minus(p, range(2, 2 * (multiplicity // 2) + 1, 2))
    return result


def _full_multiplicity_even_product(partition: Partition, p: Fraction) -> Fraction:
    """prod_i prod_{j=1}^{m_i} (1 - 1/p^{2j})."""
    result = Fraction(1)
    for multiplicity in partition.multiplicities():
        result *= _prod_one_minus(p, range(2, 2 * multiplicity + 1, 2))
    return result


def _scaled_width(width: Fraction, coefficient: Fraction) -> Fraction:
    return width / max(abs(coefficient), Fraction(1))


# ------------------------------------------------------------------------------------------------
# Funciones de masa
# ------------------------------------------------------------------------------------------------
def pmf(spec: MeasureSpec, partition: Partition, max_width: Fraction = DEFAULT_WIDTH) -> Value:
    """
    Masa de ``partition`` bajo ``spec``.

    Args:
        spec (MeasureSpec): Medida.
        partition (Partition): Partición evaluada.
        max_width (Fraction): Ancho máximo de los encierros para familias infinitas.

    Returns:
        Fraction | Interval: Racional exacto para parámetros finitos; intervalo para
        ``d=inf`` y ``syminf``. Es 0 cuando se viola la cota de partes.
    """
    p, r, size = spec.p, partition.length, partition.size
    family = spec.family
    if spec.max_parts is not None and r > spec.max_parts:
        return Fraction(0)

    if family is Family.GENERAL:
        u, d = spec.u, spec.d
        return u ** size * _up(u, p, d) * _qp(p, d) / (aut_order(partition, p) * _qp(p, d - r))

    if family is Family.GENERAL_INF:
        coefficient = spec.u ** size / aut_order(partition, p)
        return coefficient * _up_infinite(spec.u, p, _scaled_width(max_width, coefficient))

    if family is Family.ALTERNATING:
        n = spec.n
        numerator = _prod_one_minus(p, range(n - 2 * r + 1, n + 1))
        numerator *= _prod_one_minus(p, range(1, 2 * (n // 2 - r), 2))
        denominator = p ** (size + 4 * partition.n_lambda()) * _full_multiplicity_even_product(partition, p)
        return numerator / denominator

    if family is Family.SYMMETRIC:
        n = spec.n
        numerator = _prod_one_minus(p, range(n - r + 1, n + 1))
        numerator *= _prod_one_minus(p, range(1, 2 * ((n - r + 1) // 2), 2))
        denominator = p ** (partition.n_lambda() + size) * _half_multiplicity_product(partition, p)
        return numerator / denominator

    coefficient = 1 / (p ** (partition.n_lambda() + size) * _half_multiplicity_product(partition, p))
    return coefficient * _odd_product_infinite(p, _scaled_width(max_width, coefficient))


def pmf_petrogradsky_form(p: Number, u: Number, d: int, partition: Partition) -> Fraction:
    """
    Segunda expresión de P_{d,u}(lambda) vía el conteo de subgrupos de tipo rectangular.

    (u^{|lambda|}/p^{|lambda| d}) prod_i p^{lambda'_{i+1}(d-lambda'_i)} [d-lambda'_{i+1}, lambda'_i-lambda'_{i+1}]_p
    prod_{i=1}^d (1 - u/p^i).
    """
    spec = MeasureSpec.general(p, u, d)
    p, u = spec.p, spec.u
    size = partition.size
    return u ** size / p ** (size * d) * rectangular_subgroup_product(partition, d, p) * _up(u, p, d)


def pmf_fw_form(p: Number, d: int, partition: Partition) -> Fraction:
    """P_d(G) = (1/|Aut(G)|) prod_{i=1}^d (1-1/p^i) prod_{i=d-r+1}^d (1-1/p^i)."""
    spec = MeasureSpec.general(p, 1, d)
    p, r = spec.p, partition.length
    if r > d:
        return Fraction(0)
    return _prod_one_minus(p, range(1, d + 1)) * _prod_one_minus(p, range(d - r + 1, d + 1)) / aut_order(partition, p)


def pmf_alternating_sp_form(n: int, p: Number, partition: Partition) -> Fraction:
    """
    P^Alt_{n,p} escrita como |Sur(Z_p^n, G)| / |Sp(G)| prod_{i=1}^{n/2-r}(1 - 1/p^{2i-1}) |G|^{1-n}.

    G = H x H con H de tipo lambda, |G| = p^{2|lambda|}.
    """
    spec = MeasureSpec.alternating(n, p)
    p, r, size = spec.p, partition.length, partition.size
    if r > n // 2:
        return Fraction(0)
    surjections = p ** (2 * n * size) * _prod_one_minus(p, range(n - 2 * r + 1, n + 1))
    corank = _prod_one_minus(p, range(1, 2 * (n // 2 - r), 2))
    return surjections / sp_order(partition, p) * corank * p ** (2 * size * (1 - n))


def petrogradsky_identity(partition: Partition, d: int, p: Number) -> Tuple[Fraction, Fraction]:
    """
    Ambos lados de la identidad entre el conteo rectangular y |Aut(lambda)|.

    Returns:
        tuple: (producto rectangular / p^{|lambda| d}, prod_{i=d-r+1}^d (1-1/p^i) / |Aut(lambda)|).
    """
    p = as_rational(p)
    if partition.length > d:
        logger.error(f"La identidad requiere r(lambda) <= d: {partition}, d={d}")
        raise ValueError(f"r(lambda) = {partition.length} supera d = {d}")
    lhs = rectangular_subgroup_product(partition, d, p) / p ** (partition.size * d)
    rhs = _prod_one_minus(p, range(d - partition.length + 1, d + 1)) / aut_order(partition, p)
    return lhs, rhs


def alternating_specialization_check(n: int, p: Number, partition: Partition) -> Tuple[Fraction, Fraction]:
    """
    Compara P^{p^2}_{n/2,p}(lambda) con P^Alt_{n,p}(lambda).

    Returns:
        tuple: (masa general especializada, masa alternada); deben coincidir.
    """
    spec = MeasureSpec.alternating(n, p)
    return pmf(spec.specialized(), partition), pmf(spec, partition)


# ------------------------------------------------------------------------------------------------
# Marginales
# ------------------------------------------------------------------------------------------------
def prob_num_parts(spec: MeasureSpec, r: int, max_width: Fraction = DEFAULT_WIDTH) -> Value:
    """
    Probabilidad de que lambda tenga exactamente r partes.

    Args:
        spec (MeasureSpec): Cualquier familia (``alt`` vía la especialización).
        r (int): Número de partes.
        max_width (Fraction): Ancho de los encierros para familias infinitas.

    Returns:
        Fraction | Interval: 0 fuera del soporte.
    """
    if r < 0:
        return Fraction(0)
    spec = spec.specialized()
    p, family = spec.p, spec.family
    if spec.max_parts is not None and r > spec.max_parts:
        return Fraction(0)

    if family is Family.GENERAL:
        u, d = spec.u, spec.d
        return u ** r * _qp(p, d) * _up(u, p, d) / (p ** (r * r) * _qp(p, d - r) * _qp(p, r) * _up(u, p, r))

    if family is Family.GENERAL_INF:
        u = spec.u
        coefficient = u ** r / (p ** (r * r) * _qp(p, r) * _up(u, p, r))
        return coefficient * _up_infinite(u, p, _scaled_width(max_width, coefficient))

    if family is Family.SYMMETRIC:
        n = spec.n
        return _prod_one_minus(p, range(r + 1, n + 1)) / (
            p ** (r * (r + 1) // 2) * _prod_one_minus(p, range(2, 2 * ((n - r) // 2) + 1, 2))
        )

    # syminf: prod_{j>r}(1 - 1/p^j) / (p^{C(r+1,2)} prod_{j>=1}(1 - 1/p^{2j}))
    coefficient = 1 / p ** (r * (r + 1) // 2)
    width = _scaled_width(max_width, coefficient) / 4
    upper_columns = pochhammer_infinite_within(p ** (-r), p, width)
    return coefficient * upper_columns / _even_product_infinite(p, width)


def prob_size(spec: MeasureSpec, n: int, max_width: Fraction = DEFAULT_WIDTH) -> Value:
    """
    Probabilidad de que |lambda| = n para las familias generales (y ``alt``).

    (u/p)^n (u/p)_d (1/p)_{d+n-1} / ((1/p)_{d-1} (1/p)_n); para d = inf el cociente
    (1/p)_{d+n-1}/(1/p)_{d-1} vale 1.

    Raises:
        ValueError: Para las familias simétricas, sin fórmula cerrada.
    """
    spec = spec.specialized()
    _require_general(spec, 'prob_size')
    if n < 0:
        return Fraction(0)
    p, u = spec.p, spec.u
    ratio = (u / p) ** n
    if spec.family is Family.GENERAL:
        d = spec.d
        return ratio * _up(u, p, d) * _qp(p, d + n - 1) / (_qp(p, d - 1) * _qp(p, n))
    coefficient = ratio / _qp(p, n)
    return coefficient * _up_infinite(u, p, _scaled_width(max_width, coefficient))


def prob_size_and_parts(spec: MeasureSpec, n: int, r: int) -> Fraction:
    """
    Probabilidad conjunta de |lambda| = n y r partes para ``general`` (y ``alt``).

    Vale (u/p)_d en (0, 0) y 0 fuera de 1 <= r <= min(d, n).
    """
    spec = spec.specialized()
    if spec.family is not Family.GENERAL:
        logger.error(f"prob_size_and_parts requiere d finito: {spec}")
        raise ValueError("prob_size_and_parts solo está definida para la familia general con d finito")
    p, u, d = spec.p, spec.u, spec.d
    if n == 0 and r == 0:
        return _up(u, p, d)
    if not 1 <= r <= min(d, n):
        return Fraction(0)
    first = u ** n * _up(u, p, d) * _qp(p, d) / (p ** (r * r) * _qp(p, d - r) * _qp(p, r))
    second = _qp(p, n - 1) / (p ** (n - r) * _qp(p, r - 1) * _qp(p, n - r))
    return first * second


def _require_general(spec: MeasureSpec, operation: str):
    if spec.family not in (Family.GENERAL, Family.GENERAL_INF):
        logger.error(f"{operation} no está disponible para {spec}")
        raise ValueError(f"{operation} solo está definida para las familias generales (y alt)")


def tail_bound_size(spec: MeasureSpec, max_size: int) -> Fraction:
    """
    Cota superior rigurosa de P(|lambda| > max_size).

    Usa P(|lambda| = n) <= (u/p)^n / (1/p)_inf y suma la serie geométrica.

    Returns:
        Fraction: Cota decreciente en ``max_size``.
    """
    spec = spec.specialized()
    _require_general(spec, 'tail_bound_size')
    ratio = spec.u / spec.p
    lower = _qp_infinite(spec.p, DEFAULT_WIDTH).lower
    return ratio ** (max_size + 1) / ((1 - ratio) * lower)


def support_for_mass(spec: MeasureSpec, epsilon: Fraction,
                     max_size_cap: int = DEFAULT_MAX_SIZE_CAP) -> Tuple[List[Partition], Fraction, int]:
    """
    Soporte truncado por tamaño cuya masa fuera de él es a lo sumo ``epsilon``.

    Para las familias generales el corte N sale de ``tail_bound_size``; para las
    simétricas se acumula la masa (cota inferior en las infinitas) hasta 1 - epsilon.

    Returns:
        tuple: (particiones con |lambda| <= N, cota de la masa fuera, N).

    Raises:
        ValueError: Si epsilon no es positivo o no se alcanza antes de ``max_size_cap``.
    """
    epsilon = as_rational(epsilon)
    if epsilon <= 0:
        logger.error(f"epsilon debe ser positivo, recibido {epsilon}")
        raise ValueError("epsilon debe ser positivo")
    general = spec.specialized().family in (Family.GENERAL, Family.GENERAL_INF)
    support: List[Partition] = []
    mass = Fraction(0)
    for size in range(max_size_cap + 1):
        for partition in enumerate_partitions(size, spec.max_parts):
            support.append(partition)
            value = pmf(spec, partition)
            mass += value.lower if isinstance(value, Interval) else value
        outside = 1 - mass
        if general:
            outside = min(outside, tail_bound_size(spec, size))
        if outside <= epsilon:
            logger.debug(f"Soporte de {len(support)} particiones (N={size}) para {spec}")
            return support, outside, size
    logger.error(f"No se alcanzó masa 1-{epsilon} con |lambda| <= {max_size_cap} para {spec}")
    raise ValueError(f"No se alcanzó la masa requerida con |lambda| <= {max_size_cap}")


def truncated_mass(spec: MeasureSpec, max_size: int) -> Value:
    """Suma de pmf sobre |lambda| <= max_size."""
    total: Value = Fraction(0)
    for partition in partitions_up_to(max_size, spec.max_parts):
        total = total + pmf(spec, partition)
    return total


# ------------------------------------------------------------------------------------------------
# Fachada
# ------------------------------------------------------------------------------------------------
def as_spec(spec) -> MeasureSpec:
    return spec if isinstance(spec, MeasureSpec) else MeasureSpec.parse(spec)


def as_partition(partition) -> Partition:
    if partition is None:
        return EMPTY
    return partition if isinstance(partition, Partition) else Partition.parse(partition)


class Measures:
    """Acceso a las funciones de masa con los anchos configurados en el cliente."""

    def __init__(self, client):
        self.client = client  # Referencia al cliente principal

    def pmf(self, spec, partition) -> Value:
        """
        Masa de una partición.

        Args:
            spec (MeasureSpec | str): Medida, p. ej. "general:p=2,u=1,d=1".
            partition (Partition | str): Partición, p. ej. "[2,1]".

        Returns:
            Fraction | Interval: Valor exacto o encierro.
        """
        spec, partition = as_spec(spec), as_partition(partition)
        value = pmf(spec, partition, self.client.max_width)
        logger.info(f"pmf calculada para {spec} en {partition}")
        return value

    def prob_num_parts(self, spec, r: int) -> Value:
        return prob_num_parts(as_spec(spec), r, self.client.max_width)

    def prob_size(self, spec, n: int) -> Value:
        return prob_size(as_spec(spec), n, self.client.max_width)

    def prob_size_and_parts(self, spec, n: int, r: int) -> Fraction:
        return prob_size_and_parts(as_spec(spec), n, r)

    def tail_bound_size(self, spec, max_size: int) -> Fraction:
        return tail_bound_size(as_spec(spec), max_size)

    def support_for_mass(self, spec, epsilon) -> Tuple[List[Partition], Fraction, int]:
        return support_for_mass(as_spec(spec), as_rational(epsilon))
