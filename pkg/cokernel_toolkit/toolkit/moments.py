"""Momentos de sobreyecciones, esperanzas de torsión, identidad zeta y unicidad por momentos."""
from fractions import Fraction
from typing import NamedTuple, Optional, Union

from ..core.log import Log
from .exact_arith import Interval, Number, as_rational, pochhammer, pochhammer_infinite
from .groups import sur_count, subgroup_count, torsion_count
from .measures import DEFAULT_WIDTH, MeasureSpec, pmf
from .partitions import EMPTY, Partition, enumerate_partitions, partitions_up_to

logger = Log(__name__)

DEFAULT_REFINEMENT_DEPTH = 32
_TERMS_PER_REFINEMENT = 16


class MomentEnclosure(NamedTuple):
    """
    Suma truncada y cota de la cola omitida.

    ``value`` es un racional (d finito) o un intervalo (d = inf); el valor
    verdadero está en [value.lower, value.upper + tail].
    """

    value: Union[Fraction, Interval]
    tail: Fraction

    @property
    def lower(self) -> Fraction:
        return self.value.lower if isinstance(self.value, Interval) else self.value

    @property
    def upper(self) -> Fraction:
        upper = self.value.upper if isinstance(self.value, Interval) else self.value
        return upper + self.tail

    def encloses(self, target: Number) -> bool:
        return self.lower <= target <= self.upper


def _spec(d: Optional[int], u: Number, p: Number) -> MeasureSpec:
    return MeasureSpec.general(p, u, d)


# ------------------------------------------------------------------------------------------------
# Momentos
# ------------------------------------------------------------------------------------------------
def moment_closed_form(mu: Partition, d: Optional[int], u: Number, p: Number) -> Fraction:
    """
    mu-momento de P_{d,u}: u^{|mu|} (1/p)_d / (1/p)_{d-r(mu)}.

    Args:
        mu (Partition): Tipo del grupo destino.
        d (int | None): Cota de partes; None significa d = inf.
        u (Fraction): 0 < u < p.
        p (Fraction): p > 1.

    Returns:
        Fraction: 0 si r(mu) > d; u^{|mu|} para d = inf, pues el cociente de
        productos vale 1.
    """
    spec = _spec(d, u, p)
    p, u = spec.p, spec.u
    weight = u ** mu.size
    if d is None:
        return weight
    r = mu.length
    if r > d:
        return Fraction(0)
    return weight * pochhammer(1 / p, d, p) / pochhammer(1 / p, d - r, p)


def _joint_tail(spec: MeasureSpec, max_size: int, exponent: int) -> Fraction:
    """
    Cota de sum_{|lambda| > max_size} P(lambda) p^{exponent r(lambda)}.

    P(|lambda| = n, r) <= (u/p)^n p^{r - r^2} / L^2 con L la cota inferior de (1/p)_inf;
    sum_r p^{r(1+c) - r^2} se acota con términos explícitos hasta c+2 y una geométrica.
    """
    p, ratio = spec.p, spec.u / spec.p
    lower = pochhammer_infinite(1, p, 64).lower
    cutoff = exponent + 2
    rows = sum((p ** (r * (1 + exponent) - r * r) for r in range(1, cutoff + 1)), Fraction(0))
    rows += p ** ((cutoff + 1) * (1 + exponent) - (cutoff + 1) ** 2) / (1 - 1 / p)
    return ratio ** (max_size + 1) / (1 - ratio) * rows / lower ** 2


def _truncated_expectation(spec: MeasureSpec, weight, max_size: int, max_width: Fraction):
    total = Fraction(0)
    for partition in partitions_up_to(max_size, spec.max_parts):
        factor = weight(partition)
        if factor:
            total = total + pmf(spec, partition, max_width) * factor
    return total


def moment_truncated(mu: Partition, d: Optional[int], u: Number, p: Number, max_size: int,
                     max_width: Fraction = DEFAULT_WIDTH) -> MomentEnclosure:
    """
    Suma sum_{|lambda| <= max_size} P_{d,u}(lambda) |Sur(lambda, mu)| con cota de cola.

    |Sur(lambda, mu)| <= |Hom(lambda, mu)| <= p^{|mu| r(lambda)}, y la cola se acota con
    la distribución conjunta de tamaño y partes.

    Returns:
        MomentEnclosure: El momento exacto queda en [lower, upper].
    """
    spec = _spec(d, u, p)
    if max_size < 0:
        logger.error(f"max_size debe ser no negativo, recibido {max_size}")
        raise ValueError("max_size debe ser >= 0")
    value = _truncated_expectation(spec, lambda partition: sur_count(partition, mu, spec.p), max_size, max_width)
    tail = _joint_tail(spec, max_size, mu.size)
    logger.debug(f"Momento truncado de {mu} bajo {spec}: cola <= {float(tail):.3e}")
    return MomentEnclosure(value, tail)


# ------------------------------------------------------------------------------------------------
# Torsión
# ------------------------------------------------------------------------------------------------
def _require_ell(ell: int):
    if not isinstance(ell, int) or ell < 1:
        logger.error(f"ell debe ser un entero positivo, recibido {ell}")
        raise ValueError(f"ell debe ser >= 1 (recibido {ell})")


def torsion_expectation(ell: int, d: Optional[int], u: Number, p: Number) -> Fraction:
    """
    E[T_ell] = (u^ell + ... + u)(1 - p^{-d}) + 1.

    Para d = inf el factor (1 - p^{-d}) vale 1.
    """
    _require_ell(ell)
    spec = _spec(d, u, p)
    geometric = sum((spec.u ** i for i in range(1, ell + 1)), Fraction(0))
    if d is None:
        return geometric + 1
    return geometric * (1 - spec.p ** (-d)) + 1


def torsion_exact_order_expectation(ell: int, d: Optional[int], u: Number, p: Number) -> Fraction:
    """E[T_ell - T_{ell-1}] = u^ell (1 - p^{-d})."""
    _require_ell(ell)
    spec = _spec(d, u, p)
    if d is None:
        return spec.u ** ell
    return spec.u ** ell * (1 - spec.p ** (-d))


def torsion_truncated(ell: int, d: Optional[int], u: Number, p: Number, max_size: int,
                      max_width: Fraction = DEFAULT_WIDTH) -> MomentEnclosure:
    """Esperanza truncada de T_ell con la misma cota de cola (T_ell <= p^{ell r})."""
    _require_ell(ell)
    spec = _spec(d, u, p)
    value = _truncated_expectation(spec, lambda partition: torsion_count(partition, ell, spec.p), max_size, max_width)
    return MomentEnclosure(value, _joint_tail(spec, max_size, ell))


# ------------------------------------------------------------------------------------------------
# Identidad zeta y unicidad
# ------------------------------------------------------------------------------------------------
def subgroup_zeta_check(d: int, n: int, p: Number):
    """
    Ambos lados de sum_{|lambda|=n} n_{lambda*}(lambda) = p^{n(d-1)} (1/p)_{d+n-1} / ((1/p)_{d-1} (1/p)_n).

    lambda* es el tipo de (Z/p^n)^d.

    Returns:
        tuple: (lhs, rhs) como racionales exactos.
    """
    p = as_rational(p)
    if d < 1 or n < 0:
        logger.error(f"Parámetros zeta inválidos: d={d}, n={n}")
        raise ValueError("Se requiere d >= 1 y n >= 0")
    ambient = Partition((n,) * d) if n else EMPTY
    lhs = sum((subgroup_count(ambient, partition, p) for partition in enumerate_partitions(n, d)), Fraction(0))
    rhs = p ** (n * (d - 1)) * pochhammer(1 / p, d + n - 1, p) / (pochhammer(1 / p, d - 1, p) * pochhammer(1 / p, n, p))
    return lhs, rhs


def moments_unique_condition(d: Optional[int], u: Number, p: Number,
                             max_refinements: int = DEFAULT_REFINEMENT_DEPTH) -> Optional[bool]:
    """
    Decide si 1/(u/p)_d < 2, condición bajo la cual los momentos determinan P_{d,u}.

    Para d = inf refina el encierro de prod_{i>=1}(1 - u/p^i) hasta separarlo de 1/2.

    Returns:
        bool | None: None si el encierro no se separa de 1/2 en ``max_refinements`` rondas.
    """
    spec = _spec(d, u, p)
    half = Fraction(1, 2)
    if d is not None:
        return pochhammer(spec.u / spec.p, d, spec.p) > half
    for depth in range(1, max_refinements + 1):
        enclosure = pochhammer_infinite(spec.u, spec.p, _TERMS_PER_REFINEMENT * depth)
        if enclosure.lower > half:
            return True
        if enclosure.upper <= half:
            return False
    logger.warning(f"Condición de unicidad indeterminada para {spec} tras {max_refinements} refinamientos")
    return None


class Moments:
    """Momentos y esperanzas con la configuración del cliente."""

    def __init__(self, client):
        self.client = client  # Referencia al cliente principal

    def closed_form(self, mu, d: Optional[int], u, p) -> Fraction:
        mu = mu if isinstance(mu, Partition) else Partition.parse(mu)
        return moment_closed_form(mu, d, as_rational(u), as_rational(p))

    def truncated(self, mu, d: Optional[int], u, p, max_size: int) -> MomentEnclosure:
        mu = mu if isinstance(mu, Partition) else Partition.parse(mu)
        result = moment_truncated(mu, d, as_rational(u), as_rational(p), max_size, self.client.max_width)
        logger.info(f"Momento truncado de {mu} calculado hasta |lambda| <= {max_size}")
        return result

    def torsion(self, ell: int, d: Optional[int], u, p) -> Fraction:
        return torsion_expectation(ell, d, as_rational(u), as_rational(p))

    def torsion_exact_order(self, ell: int, d: Optional[int], u, p) -> Fraction:
        return torsion_exact_order_expectation(ell, d, as_rational(u), as_rational(p))

    def unique_condition(self, d: Optional[int], u, p) -> Optional[bool]:
        return moments_unique_condition(d, as_rational(u), as_rational(p), self.client.refinement_depth)
