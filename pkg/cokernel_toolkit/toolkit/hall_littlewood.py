"""
Polinomios de Hall-Littlewood evaluados exactamente por simetrización sobre S_n.

P_lambda(x_1..x_n; t) = (1/v_lambda(t)) sum_{w in S_n} w(x^lambda prod_{i<j} (x_i - t x_j)/(x_i - x_j)).
"""
from fractions import Fraction
from itertools import permutations
from typing import List, Sequence

from ..core.log import Log
from .exact_arith import Number, as_rational, pochhammer, q_integer
from .partitions import Partition

logger = Log(__name__)

DEFAULT_MAX_VARS = 8


def v_lambda(partition: Partition, n_vars: int, t: Number) -> Fraction:
    """
    v_lambda(t) = prod_{i>=0} prod_{j=1}^{m_i} (1 - t^j)/(1 - t), con m_0 = n_vars - r(lambda).

    Cada factor se evalúa como [j]_t, válido también en t = 1.

    Raises:
        ValueError: Si n_vars < r(lambda).
    """
    if n_vars < partition.length:
        logger.error(f"n_vars={n_vars} menor que r(lambda)={partition.length}")
        raise ValueError(f"Se requieren al menos {partition.length} variables (recibido {n_vars})")
    t = as_rational(t)
    result = Fraction(1)
    for multiplicity in [n_vars - partition.length] + partition.multiplicities():
        for j in range(1, multiplicity + 1):
            result *= q_integer(j, t)
    return result


def _validate_variables(partition: Partition, x: Sequence[Fraction], max_vars: int):
    if len(x) < partition.length:
        logger.error(f"Se requieren al menos {partition.length} variables, recibidas {len(x)}")
        raise ValueError(f"Se requieren al menos r(lambda) = {partition.length} variables")
    if len(x) > max_vars:
        logger.error(f"{len(x)} variables superan la cota factorial {max_vars}")
        raise ValueError(f"El número de variables ({len(x)}) supera la cota {max_vars}")
    if any(value == 0 for value in x):
        logger.error("Las variables deben ser no nulas")
        raise ValueError("Las variables deben ser no nulas")
    if len(set(x)) != len(x):
        logger.error(f"Variables repetidas: {[str(value) for value in x]}")
        raise ValueError("Las variables deben ser distintas dos a dos")


def hl_eval(partition: Partition, x: Sequence[Number], t: Number, max_vars: int = DEFAULT_MAX_VARS) -> Fraction:
    """
    Evalúa P_lambda(x; t) exactamente.

    Args:
        partition (Partition): lambda, rellenada con ceros hasta len(x) partes.
        x (list): Variables racionales no nulas y distintas.
        t (Fraction): Parámetro t.
        max_vars (int): Cota de len(x); el coste es len(x)! términos.

    Returns:
        Fraction: Valor exacto, simétrico en x.

    Raises:
        ValueError: Si hay variables repetidas o nulas, o demasiadas variables.
    """
    x = [as_rational(value) for value in x]
    t = as_rational(t)
    _validate_variables(partition, x, max_vars)
    n = len(x)
    exponents = partition.parts + (0,) * (n - partition.length)
    pair = [
        [(x[a] - t * x[b]) / (x[a] - x[b]) if a != b else None for b in range(n)]
        for a in range(n)
    ]
    powers = [[x[a] ** e for e in range(exponents[0] + 1)] for a in range(n)] if n else []
    total = Fraction(0)
    for order in permutations(range(n)):
        term = Fraction(1)
        for i, a in enumerate(order):
            if exponents[i]:
                term *= powers[a][exponents[i]]
            row = pair[a]
            for b in order[i + 1:]:
                term *= row[b]
        total += term
    return total / v_lambda(partition, n, t)


def principal_variables(d: int, u: Number, p: Number) -> List[Fraction]:
    """Especialización principal x_i = u/p^i, i = 1..d."""
    u, p = as_rational(u), as_rational(p)
    return [u / p ** i for i in range(1, d + 1)]


def hl_pmf(partition: Partition, d: int, u: Number, p: Number, max_vars: int = DEFAULT_MAX_VARS) -> Fraction:
    """
    P_{d,u}(lambda) = (u/p)_d P_lambda(u/p, ..., u/p^d; 1/p) / p^{n(lambda)}.

    Se usan exactamente d variables no nulas; las variables nulas adicionales no
    alteran P_lambda cuando r(lambda) <= d.

    Returns:
        Fraction: 0 si r(lambda) > d.
    """
    u, p = as_rational(u), as_rational(p)
    if p <= 1 or not 0 < u < p:
        logger.error(f"Parámetros inválidos: p={p}, u={u}")
        raise ValueError(f"Se requiere p > 1 y 0 < u < p (recibido p={p}, u={u})")
    if partition.length > d:
        return Fraction(0)
    value = hl_eval(partition, principal_variables(d, u, p), 1 / p, max_vars)
    return pochhammer(u / p, d, p) * value / p ** partition.n_lambda()


class HallLittlewood:
    """Evaluaciones de Hall-Littlewood con la cota factorial del cliente."""

    def __init__(self, client):
        self.client = client  # Referencia al cliente principal

    def evaluate(self, partition: Partition, x: Sequence[Number], t: Number) -> Fraction:
        return hl_eval(partition, x, t, self.client.hl_max_vars)

    def pmf(self, partition: Partition, d: int, u: Number, p: Number) -> Fraction:
        value = hl_pmf(partition, d, u, p, self.client.hl_max_vars)
        logger.info(f"Forma Hall-Littlewood evaluada para {partition} con d={d}")
        return value
