"""
Conteos exactos asociados a p-grupos abelianos finitos de tipo lambda.

Las fórmulas aceptan cualquier p > 1 racional. Los oráculos por fuerza bruta
requieren p primo y construyen explícitamente Z/p^{lambda_1} x ... x Z/p^{lambda_r}.
"""
from fractions import Fraction
from itertools import product
from typing import Dict, Iterator, List, Set, Tuple

from sympy import isprime

from ..core.log import Log
from .exact_arith import Number, pochhammer, q_binomial_or_zero
from .partitions import Partition

logger = Log(__name__)

DEFAULT_BRUTEFORCE_BOUND = 2 ** 16

Element = Tuple[int, ...]


def _base(p: Number) -> Fraction:
    p = Fraction(p)
    if p <= 1:
        logger.error(f"p debe ser mayor que 1, recibido {p}")
        raise ValueError(f"p debe ser mayor que 1 (recibido {p})")
    return p


# ------------------------------------------------------------------------------------------------
# Fórmulas cerradas
# ------------------------------------------------------------------------------------------------
def aut_order(partition: Partition, p: Number) -> Fraction:
    """
    |Aut(lambda)| = p^{sum (lambda'_i)^2} prod_i (1/p)_{m_i(lambda)}.

    Args:
        partition (Partition): Tipo del grupo.
        p (Fraction): Parámetro p > 1 (primo para la interpretación como grupo).

    Returns:
        Fraction: Entero positivo cuando p es entero.
    """
    p = _base(p)
    result = p ** sum(column * column for column in partition.columns())
    for multiplicity in partition.multiplicities():
        result *= pochhammer(1 / p, multiplicity, p)
    return result


def sp_order(partition: Partition, p: Number) -> Fraction:
    """
    |Sp(G)| para G = H x H con H de tipo lambda y pareo alternado no degenerado.

    Returns:
        Fraction: p^{4 n(lambda) + 3|lambda|} prod_i prod_{j=1}^{m_i} (1 - 1/p^{2j}).
    """
    p = _base(p)
    result = p ** (4 * partition.n_lambda() + 3 * partition.size)
    for multiplicity in partition.multiplicities():
        for j in range(1, multiplicity + 1):
            result *= 1 - p ** (-2 * j)
    return result


def subgroup_count(group: Partition, sub: Partition, p: Number) -> Fraction:
    """
    n_lambda(mu): subgrupos de tipo mu en un grupo de tipo lambda.

    Usa el producto prod_i p^{mu'_{i+1}(lambda'_i - mu'_i)} [lambda'_i - mu'_{i+1}, mu'_i - mu'_{i+1}]_p,
    validado contra ``subgroup_count_bruteforce`` en la batería de pruebas.

    Args:
        group (Partition): Tipo lambda del grupo.
        sub (Partition): Tipo mu del subgrupo.
        p (Fraction): p > 1.

    Returns:
        Fraction: 0 si mu no está contenida en lambda.
    """
    p = _base(p)
    if not group.contains(sub):
        return Fraction(0)
    big = group.columns()
    small = sub.columns()
    width = len(big)

    def col(columns, i):
        return columns[i - 1] if i <= len(columns) else 0

    result = Fraction(1)
    for i in range(1, width + 1):
        big_i, small_i, small_next = col(big, i), col(small, i), col(small, i + 1)
        result *= p ** (small_next * (big_i - small_i))
        result *= q_binomial_or_zero(big_i - small_next, small_i - small_next, p)
    return result


def rectangular_subgroup_product(partition: Partition, d: int, p: Number) -> Fraction:
    """
    prod_{i=1}^{lambda_1} p^{lambda'_{i+1}(d - lambda'_i)} [d - lambda'_{i+1}, lambda'_i - lambda'_{i+1}]_p.

    Es n_{lambda*}(lambda) con lambda* = (lambda_1, ..., lambda_1) de d partes; se
    anula cuando lambda tiene más de d partes.
    """
    p = _base(p)
    if partition.length > d:
        return Fraction(0)
    columns = partition.columns() + (0,)
    result = Fraction(1)
    for i in range(partition.largest):
        current, following = columns[i], columns[i + 1]
        result *= p ** (following * (d - current))
        result *= q_binomial_or_zero(d - following, current - following, p)
    return result


def sur_count(group: Partition, target: Partition, p: Number) -> Fraction:
    """|Sur(lambda, mu)| = n_lambda(mu) |Aut(mu)|."""
    return subgroup_count(group, target, p) * aut_order(target, p)


def torsion_count(partition: Partition, ell: int, p: Number) -> Fraction:
    """
    T_ell = |H[p^ell]| = p^{lambda'_1 + ... + lambda'_ell}.

    ``ell = 0`` da T_0 = 1.

    Raises:
        ValueError: Si ell es negativo.
    """
    p = _base(p)
    if ell < 0:
        logger.error(f"ell debe ser no negativo, recibido {ell}")
        raise ValueError(f"ell debe ser >= 0 (recibido {ell})")
    return p ** sum(partition.columns()[:ell])


# ------------------------------------------------------------------------------------------------
# Oráculos por fuerza bruta (p primo)
# ------------------------------------------------------------------------------------------------
class FiniteAbelianGroup:
    """Z/p^{lambda_1} x ... x Z/p^{lambda_r} con elementos como tuplas de residuos."""

    def __init__(self, partition: Partition, p: int, bound: int = DEFAULT_BRUTEFORCE_BOUND):
        if not isinstance(p, int) or not isprime(p):
            logger.error(f"Los oráculos requieren p primo, recibido {p}")
            raise ValueError(f"p debe ser un primo entero (recibido {p})")
        order = p ** partition.size
        if order > bound:
            logger.error(f"Grupo de orden {order} supera la cota {bound}")
            raise ValueError(f"El grupo de orden {order} supera la cota de fuerza bruta {bound}")
        self.partition = partition
        self.p = p
        self.moduli = tuple(p ** part for part in partition.parts)
        self.order = order

    def elements(self) -> Iterator[Element]:
        return product(*(range(modulus) for modulus in self.moduli))

    def add(self, a: Element, b: Element) -> Element:
        return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))

    def scale(self, k: int, a: Element) -> Element:
        return tuple((k * x) % m for x, m in zip(a, self.moduli))

    def encode(self, a: Element) -> int:
        """Codificación en base mixta, usada como clave de deduplicación."""
        code = 0
        for x, m in zip(a, self.moduli):
            code = code * m + x
        return code

    def zero(self) -> Element:
        return (0,) * len(self.moduli)

    def extend(self, subgroup: Set[Element], generator: Element) -> Set[Element]:
        """<subgroup, generator>."""
        result = set(subgroup)
        multiple = generator
        while multiple not in subgroup:
            result.update(self.add(h, multiple) for h in subgroup)
            multiple = self.add(multiple, generator)
        return result

    def type_of(self, subgroup: Set[Element]) -> Partition:
        """Tipo de un subgrupo a partir de sus p^i-torsiones."""
        return _type_from_torsion(self, lambda i: sum(1 for h in subgroup if self.scale(self.p ** i, h) == self.zero()))

    def quotient_type(self, subgroup: Set[Element]) -> Partition:
        """Tipo de G/H: |(G/H)[p^i]| = #{g : p^i g en H} / |H|."""
        size = len(subgroup)
        return _type_from_torsion(
            self,
            lambda i: sum(1 for g in self.elements() if self.scale(self.p ** i, g) in subgroup) // size,
        )


def _type_from_torsion(group: FiniteAbelianGroup, torsion) -> Partition:
    columns = []
    previous = 1
    for i in range(1, group.partition.largest + 1):
        current = torsion(i)
        ratio = current // previous
        rank = 0
        while ratio > 1:
            ratio //= group.p
            rank += 1
        if rank == 0:
            break
        columns.append(rank)
        previous = current
    return Partition.from_columns(columns)


def subgroups_bruteforce(partition: Partition, p: int, max_generators: int = None,
                         bound: int = DEFAULT_BRUTEFORCE_BOUND) -> List[Set[Element]]:
    """
    Enumera los subgrupos generados por a lo sumo ``max_generators`` elementos.

    Cierra sucesivamente <H, g> para cada subgrupo H ya hallado y cada g en G,
    deduplicando por la lista ordenada de elementos codificados.

    Args:
        partition (Partition): Tipo del grupo.
        p (int): Primo.
        max_generators (int, optional): Por defecto r(lambda), que alcanza todos los subgrupos.
        bound (int): Orden máximo aceptado.

    Returns:
        list[set]: Cada subgrupo como conjunto de elementos.
    """
    group = FiniteAbelianGroup(partition, p, bound)
    if max_generators is None:
        max_generators = partition.length
    elements = list(group.elements())
    trivial = {group.zero()}
    seen: Dict[Tuple[int, ...], Set[Element]] = {(group.encode(group.zero()),): trivial}
    frontier = [trivial]
    for _ in range(max_generators):
        next_frontier = []
        for subgroup in frontier:
            for generator in elements:
                if generator in subgroup:
                    continue
                extended = group.extend(subgroup, generator)
                key = tuple(sorted(group.encode(h) for h in extended))
                if key not in seen:
                    seen[key] = extended
                    next_frontier.append(extended)
        frontier = next_frontier
        if not frontier:
            break
    logger.debug(f"{len(seen)} subgrupos enumerados para tipo {partition}, p={p}")
    return list(seen.values())


def subgroup_count_bruteforce(group: Partition, sub: Partition, p: int,
                              bound: int = DEFAULT_BRUTEFORCE_BOUND) -> int:
    """
    Cuenta por enumeración los subgrupos de tipo ``sub`` del grupo de tipo ``group``.

    Raises:
        ValueError: Si p no es primo o p^{|lambda|} supera ``bound``.
    """
    abelian = FiniteAbelianGroup(group, p, bound)
    subgroups = subgroups_bruteforce(group, p, max_generators=sub.length, bound=bound)
    return sum(1 for subgroup in subgroups if abelian.type_of(subgroup) == sub)


def subgroup_type_counts(group: Partition, p: int, bound: int = DEFAULT_BRUTEFORCE_BOUND) -> Dict[Partition, int]:
    """Número de subgrupos de cada tipo, enumerando el retículo completo una sola vez."""
    abelian = FiniteAbelianGroup(group, p, bound)
    counts: Dict[Partition, int] = {}
    for subgroup in subgroups_bruteforce(group, p, bound=bound):
        kind = abelian.type_of(subgroup)
        counts[kind] = counts.get(kind, 0) + 1
    return counts


def sur_count_bruteforce(source: Partition, target: Partition, p: int,
                         bound: int = DEFAULT_BRUTEFORCE_BOUND) -> int:
    """
    Cuenta los homomorfismos suprayectivos enumerando las imágenes de los generadores.

    La imagen de e_j (de orden p^{lambda_j}) debe anularse por p^{lambda_j}.
    """
    FiniteAbelianGroup(source, p, bound)
    codomain = FiniteAbelianGroup(target, p, bound)
    if p ** (source.size + target.size) > bound:
        logger.error(f"Conteo de homomorfismos demasiado grande para la cota {bound}")
        raise ValueError(f"p^(|lambda|+|mu|) supera la cota de fuerza bruta {bound}")
    elements = list(codomain.elements())
    zero = codomain.zero()
    candidates = [
        [h for h in elements if codomain.scale(p ** part, h) == zero]
        for part in source.parts
    ]
    count = 0
    for images in product(*candidates):
        span = {zero}
        for image in images:
            span = codomain.extend(span, image)
        if len(span) == codomain.order:
            count += 1
    return count


class Groups:
    """Conteos de grupos con la cota de fuerza bruta configurada en el cliente."""

    def __init__(self, client):
        self.client = client  # Referencia al cliente principal

    def aut_order(self, partition: Partition, p: Number) -> Fraction:
        return aut_order(partition, p)

    def subgroup_count(self, group: Partition, sub: Partition, p: Number) -> Fraction:
        return subgroup_count(group, sub, p)

    def sur_count(self, group: Partition, target: Partition, p: Number) -> Fraction:
        return sur_count(group, target, p)

    def subgroup_count_bruteforce(self, group: Partition, sub: Partition, p: int) -> int:
        count = subgroup_count_bruteforce(group, sub, p, self.client.bruteforce_bound)
        logger.info(f"{count} subgrupos de tipo {sub} en {group} (p={p}) por enumeración")
        return count

    def sur_count_bruteforce(self, source: Partition, target: Partition, p: int) -> int:
        return sur_count_bruteforce(source, target, p, self.client.bruteforce_bound)
