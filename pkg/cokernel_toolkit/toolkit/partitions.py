"""Particiones enteras: conjugada, multiplicidades, n(lambda) y enumeración."""
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple

from ..core.log import Log

logger = Log(__name__)

_PARTITION_PATTERN = re.compile(r'^\s*\[\s*((?:\d+\s*(?:,\s*\d+\s*)*)?)\]\s*$')


@dataclass(frozen=True, order=True)
class Partition:
    """
    Partición lambda = (lambda_1 >= lambda_2 >= ... >= lambda_r >= 1).

    La lista vacía es la única partición de 0. Las columnas (lambda') y las
    multiplicidades m_i se calculan bajo demanda.
    """

    parts: Tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(self.parts)
        object.__setattr__(self, 'parts', parts)
        for index, part in enumerate(parts):
            if not isinstance(part, int) or isinstance(part, bool) or part < 1:
                raise ValueError(f"Las partes deben ser enteros positivos: {list(parts)}")
            if index and parts[index - 1] < part:
                raise ValueError(f"Las partes deben ser débilmente decrecientes: {list(parts)}")

    @classmethod
    def parse(cls, text: str) -> 'Partition':
        """
        Lee una partición escrita como "[3,1,1]"; "[]" es la partición vacía.

        Raises:
            ValueError: Si el texto no es una lista entre corchetes o no es decreciente.
        """
        match = _PARTITION_PATTERN.match(text or '')
        if not match:
            logger.error(f"Partición mal formada: {text!r}")
            raise ValueError(f"Partición mal formada: {text!r}. Use la forma '[3,1,1]'.")
        body = match.group(1)
        parts = tuple(int(piece) for piece in body.split(',')) if body else ()
        try:
            return cls(parts)
        except ValueError:
            logger.error(f"Partición inválida: {text!r}")
            raise

    @classmethod
    def from_columns(cls, columns: Sequence[int]) -> 'Partition':
        """Construye la partición cuya conjugada tiene las columnas dadas (decrecientes)."""
        return cls(tuple(columns)).conjugate()

    def __str__(self) -> str:
        return '[' + ','.join(str(part) for part in self.parts) + ']'

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    @property
    def size(self) -> int:
        """|lambda|."""
        return sum(self.parts)

    @property
    def length(self) -> int:
        """r(lambda), el número de partes."""
        return len(self.parts)

    @property
    def largest(self) -> int:
        return self.parts[0] if self.parts else 0

    def conjugate(self) -> 'Partition':
        return _conjugate(self.parts)

    def column(self, i: int) -> int:
        """lambda'_i (indexado desde 1); 0 fuera del diagrama."""
        if i < 1:
            raise ValueError(f"Las columnas se indexan desde 1 (recibido {i})")
        return sum(1 for part in self.parts if part >= i)

    def columns(self) -> Tuple[int, ...]:
        return self.conjugate().parts

    def multiplicity(self, i: int) -> int:
        """m_i(lambda), número de partes iguales a i."""
        return self.parts.count(i)

    def multiplicities(self) -> List[int]:
        """Lista [m_1, ..., m_{lambda_1}]."""
        return [self.multiplicity(i) for i in range(1, self.largest + 1)]

    def n_lambda(self) -> int:
        return sum(column * (column - 1) // 2 for column in self.columns())

    def contains(self, other: 'Partition') -> bool:
        """True si el diagrama de ``other`` cabe en el de esta partición."""
        if other.length > self.length:
            return False
        return all(small <= big for small, big in zip(other.parts, self.parts))


EMPTY = Partition()


@lru_cache(maxsize=4096)
def _conjugate(parts: Tuple[int, ...]) -> Partition:
    if not parts:
        return EMPTY
    return Partition(tuple(sum(1 for part in parts if part >= i) for i in range(1, parts[0] + 1)))


def conjugate(partition: Partition) -> Partition:
    """Partición conjugada lambda' con lambda'_i = #{j : lambda_j >= i}."""
    return partition.conjugate()


def n_lambda(partition: Partition) -> int:
    """n(lambda) = sum_i C(lambda'_i, 2)."""
    return partition.n_lambda()


def _descending(size: int, max_part: int, max_parts: int) -> Iterator[Tuple[int, ...]]:
    if size == 0:
        yield ()
        return
    if max_parts == 0:
        return
    for first in range(min(size, max_part), 0, -1):
        for rest in _descending(size - first, first, max_parts - 1):
            yield (first,) + rest


def enumerate_partitions(size: int, max_parts: Optional[int] = None) -> List[Partition]:
    """
    Enumera las particiones de ``size`` con a lo sumo ``max_parts`` partes.

    El orden es lexicográfico inverso: (4), (3,1), (2,2), (2,1,1), (1,1,1,1).

    Args:
        size (int): Tamaño |lambda| >= 0.
        max_parts (int, optional): Cota del número de partes; None significa sin cota.

    Returns:
        list[Partition]: Particiones en orden determinista.

    Raises:
        ValueError: Si size o max_parts son negativos.
    """
    if size < 0 or (max_parts is not None and max_parts < 0):
        logger.error(f"Parámetros de enumeración inválidos: size={size}, max_parts={max_parts}")
        raise ValueError("size y max_parts deben ser no negativos")
    bound = size if max_parts is None else max_parts
    return [Partition(parts) for parts in _descending(size, size, bound)]


def partitions_up_to(max_size: int, max_parts: Optional[int] = None) -> List[Partition]:
    """Todas las particiones con |lambda| <= max_size, por tamaño creciente."""
    result = []
    for size in range(max_size + 1):
        result.extend(enumerate_partitions(size, max_parts))
    return result


@lru_cache(maxsize=None)
def partition_number(n: int) -> int:
    """Función de particiones p(n) por la recurrencia pentagonal de Euler."""
    if n < 0:
        return 0
    if n == 0:
        return 1
    total = 0
    k = 1
    while True:
        first = k * (3 * k - 1) // 2
        if first > n:
            break
        sign = 1 if k % 2 else -1
        total += sign * partition_number(n - first)
        second = k * (3 * k + 1) // 2
        if second <= n:
            total += sign * partition_number(n - second)
        k += 1
    return total
