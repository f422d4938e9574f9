"""Escalares racionales exactos, intervalos racionales y primitivas de q-series.

Todas las probabilidades del toolkit son ``Fraction``; los productos infinitos
se encierran en ``Interval`` con cotas racionales rigurosas.
"""
import re
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from typing import Union

from ..core.log import Log

logger = Log(__name__)

Rational = Fraction
Number = Union[int, Fraction]

_RATIONAL_PATTERN = re.compile(r'^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$')
_INTERVAL_PATTERN = re.compile(r'^\s*\[([^,\]]*),([^,\]]*)\]\s*$')


# ------------------------------------------------------------------------------------------------
# Racionales
# ------------------------------------------------------------------------------------------------
def parse_rational(text: str) -> Fraction:
    """
    Convierte un texto de la forma "a/b" o "a" (base 10) en un racional exacto.

    Args:
        text (str): Representación textual del racional.

    Returns:
        Fraction: Valor en términos mínimos con denominador positivo.

    Raises:
        ValueError: Si el texto no tiene la forma esperada o el denominador es cero.
    """
    match = _RATIONAL_PATTERN.match(text or '')
    if not match:
        logger.error(f"Racional mal formado: {text!r}")
        raise ValueError(f"Racional mal formado: {text!r}. Use la forma 'a/b' o 'a'.")
    numerator, denominator = match.groups()
    if denominator is not None and int(denominator) == 0:
        logger.error(f"Denominador cero en {text!r}")
        raise ValueError(f"Denominador cero en {text!r}")
    return Fraction(int(numerator), int(denominator or 1))


def render_rational(value: Number, decimal: bool = False) -> str:
    """
    Representa un racional como "a/b" (o "a" si es entero).

    Args:
        value (Fraction | int): Valor a representar.
        decimal (bool): Si es True, usa 12 cifras significativas en notación decimal.

    Returns:
        str: Representación textual.
    """
    value = Fraction(value)
    if not decimal:
        return str(value)
    with localcontext() as ctx:
        ctx.prec = 12
        return format(Decimal(value.numerator) / Decimal(value.denominator), '.12g')


def as_rational(value) -> Fraction:
    """Normaliza enteros, racionales o textos a ``Fraction``. Rechaza floats."""
    if isinstance(value, bool) or isinstance(value, float):
        logger.error(f"Tipo no exacto recibido: {type(value).__name__}")
        raise TypeError("Solo se aceptan enteros, Fraction o textos 'a/b'; los float no son exactos")
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    raise TypeError(f"No se puede interpretar {value!r} como racional")


# ------------------------------------------------------------------------------------------------
# Intervalos
# ------------------------------------------------------------------------------------------------
@dataclass(frozen=True)
class Interval:
    """Intervalo racional cerrado [lower, upper] que encierra una cantidad no exacta."""

    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'lower', Fraction(self.lower))
        object.__setattr__(self, 'upper', Fraction(self.upper))
        if self.lower > self.upper:
            raise ValueError(f"Intervalo vacío: [{self.lower}, {self.upper}]")

    @classmethod
    def exact(cls, value: Number) -> 'Interval':
        return cls(Fraction(value), Fraction(value))

    @classmethod
    def parse(cls, text: str) -> 'Interval':
        """
        Convierte un texto "[a/b, c/d]" en un intervalo.

        Args:
            text (str): Extremos racionales entre corchetes separados por coma.

        Returns:
            Interval: Intervalo cerrado con esos extremos.

        Raises:
            ValueError: Si el texto no tiene la forma esperada o los extremos están invertidos.
        """
        match = _INTERVAL_PATTERN.match(text or '')
        if not match:
            logger.error(f"Intervalo mal formado: {text!r}")
            raise ValueError(f"Intervalo mal formado: {text!r}. Use la forma '[a/b, c/d]'.")
        return cls(parse_rational(match.group(1)), parse_rational(match.group(2)))

    @classmethod
    def from_json(cls, document: dict) -> 'Interval':
        """Inversa de ``to_json``: extremos "a/b" bajo las claves lower y upper."""
        if not isinstance(document, dict) or set(document) != {'lower', 'upper'}:
            logger.error(f"Intervalo JSON mal formado: {document!r}")
            raise ValueError(f"Intervalo JSON mal formado: {document!r}. Se esperan las claves 'lower' y 'upper'.")
        return cls(parse_rational(document['lower']), parse_rational(document['upper']))

    def to_json(self) -> dict:
        return {'lower': str(self.lower), 'upper': str(self.upper)}

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    def contains(self, value: Number) -> bool:
        return self.lower <= value <= self.upper

    def __add__(self, other):
        other = _to_interval(other)
        return Interval(self.lower + other.lower, self.upper + other.upper)

    __radd__ = __add__

    def __sub__(self, other):
        other = _to_interval(other)
        return Interval(self.lower - other.upper, self.upper - other.lower)

    def __rsub__(self, other):
        return _to_interval(other) - self

    def __mul__(self, other):
        other = _to_interval(other)
        products = (
            self.lower * other.lower, self.lower * other.upper,
            self.upper * other.lower, self.upper * other.upper,
        )
        return Interval(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _to_interval(other)
        if other.lower <= 0 <= other.upper:
            raise ZeroDivisionError("El divisor contiene al cero")
        return self * Interval(1 / other.upper, 1 / other.lower)

    def __rtruediv__(self, other):
        return _to_interval(other) / self

    def __str__(self) -> str:
        return f"[{self.lower}, {self.upper}]"


def _to_interval(value) -> Interval:
    if isinstance(value, Interval):
        return value
    return Interval.exact(value)


def render_value(value, decimal: bool = False) -> str:
    """Representa un racional o un intervalo de racionales."""
    if isinstance(value, Interval):
        return f"[{render_rational(value.lower, decimal)}, {render_rational(value.upper, decimal)}]"
    return render_rational(value, decimal)


# ------------------------------------------------------------------------------------------------
# q-series
# ------------------------------------------------------------------------------------------------
def _require_base(p: Fraction, name: str = 'p'):
    if p <= 1:
        logger.error(f"{name} debe ser mayor que 1, recibido {p}")
        raise ValueError(f"{name} debe ser mayor que 1 (recibido {p})")


def pochhammer(x: Number, i: int, p: Number) -> Fraction:
    """
    Calcula (x)_i = (1 - x)(1 - x/p)...(1 - x/p^{i-1}).

    Args:
        x (Fraction): Argumento.
        i (int): Número de factores (i >= 0).
        p (Fraction): Base, p > 1.

    Returns:
        Fraction: Producto exacto; 1 cuando i = 0.

    Raises:
        ValueError: Si p <= 1 o i < 0.
    """
    x, p = Fraction(x), Fraction(p)
    _require_base(p)
    if i < 0:
        logger.error(f"Número de factores negativo: {i}")
        raise ValueError(f"i debe ser >= 0 (recibido {i})")
    result = Fraction(1)
    power = Fraction(1)
    for _ in range(i):
        result *= 1 - x / power
        power *= p
    return result


def pochhammer_infinite(x: Number, p: Number, terms: int) -> Interval:
    """
    Encierra el producto infinito prod_{i>=1} (1 - x/p^i).

    La cota superior es el producto parcial de ``terms`` factores; la inferior lo
    multiplica por 1 - sum_{i>terms} x/p^i cuando ese factor es positivo.

    Args:
        x (Fraction): Argumento, 0 <= x < p.
        p (Fraction): Base, p > 1.
        terms (int): Factores calculados explícitamente.

    Returns:
        Interval: Encierro cuyo ancho decrece geométricamente en ``terms``.

    Raises:
        ValueError: Si p <= 1, x fuera de [0, p) o terms < 0.
    """
    x, p = Fraction(x), Fraction(p)
    _require_base(p)
    if not 0 <= x < p:
        logger.error(f"x fuera de rango para el producto infinito: x={x}, p={p}")
        raise ValueError(f"Se requiere 0 <= x < p (recibido x={x}, p={p})")
    if terms < 0:
        raise ValueError(f"terms debe ser >= 0 (recibido {terms})")
    partial = Fraction(1)
    power = Fraction(1)
    for _ in range(terms):
        power *= p
        partial *= 1 - x / power
    # sum_{i>terms} x/p^i = x / (p^terms (p - 1))
    remainder = 1 - x / (power * (p - 1))
    lower = partial * remainder if remainder > 0 else Fraction(0)
    return Interval(lower, partial)


@lru_cache(maxsize=1024)
def pochhammer_infinite_within(x: Number, p: Number, max_width: Fraction) -> Interval:
    """Encierra prod_{i>=1}(1 - x/p^i) con ancho menor o igual a ``max_width``."""
    x, p = Fraction(x), Fraction(p)
    _require_base(p)
    if x == 0:
        return Interval.exact(1)
    # el ancho está acotado por x / (p^terms (p - 1))
    terms = 0
    bound = x / (p - 1)
    while bound > max_width:
        bound /= p
        terms += 1
    return pochhammer_infinite(x, p, terms)


def q_integer(n: int, q: Number) -> Fraction:
    """[n]_q = 1 + q + ... + q^{n-1}."""
    q = Fraction(q)
    return sum((q ** k for k in range(n)), Fraction(0))


def q_factorial(n: int, q: Number) -> Fraction:
    """[n]_q! = [n]_q [n-1]_q ... [1]_q."""
    result = Fraction(1)
    for k in range(2, n + 1):
        result *= q_integer(k, q)
    return result


def q_binomial(n: int, j: int, q: Number) -> Fraction:
    """
    Coeficiente q-binomial [n j]_q = [n]_q! / ([j]_q! [n-j]_q!).

    Args:
        n (int): Entero no negativo.
        j (int): 0 <= j <= n.
        q (Fraction): Base, q > 1.

    Returns:
        Fraction: Valor exacto (entero cuando q es entero).

    Raises:
        ValueError: Si j no está en [0, n] o q <= 1.
    """
    q = Fraction(q)
    _require_base(q, 'q')
    if n < 0 or not 0 <= j <= n:
        logger.error(f"q-binomial fuera de rango: n={n}, j={j}")
        raise ValueError(f"Se requiere 0 <= j <= n (recibido n={n}, j={j})")
    j = min(j, n - j)
    # producto de (q^{n-i} - 1)/(q^{i+1} - 1): evita los factoriales completos
    result = Fraction(1)
    for i in range(j):
        result *= (q ** (n - i) - 1) / (q ** (i + 1) - 1)
    return result


def q_binomial_or_zero(n: int, j: int, q: Number) -> Fraction:
    """Como ``q_binomial`` pero devuelve 0 fuera de 0 <= j <= n."""
    if n < 0 or not 0 <= j <= n:
        return Fraction(0)
    return q_binomial(n, j, q)


def json_value(value):
    """
    Forma JSON exacta de un valor: "a/b" para racionales y {"lower", "upper"} para intervalos.

    Los booleanos y cualquier otro valor no numérico se devuelven sin cambios.
    """
    if isinstance(value, Interval):
        return value.to_json()
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return str(Fraction(value))
    return value


def parse_json_value(document) -> Union[Fraction, Interval]:
    """Inversa de ``json_value`` para racionales e intervalos."""
    if isinstance(document, dict):
        return Interval.from_json(document)
    if isinstance(document, str):
        return parse_rational(document)
    logger.error(f"Valor JSON no numérico: {document!r}")
    raise ValueError(f"Valor JSON no numérico: {document!r}")


def json_fields(key: str, value, decimal: bool = False) -> dict:
    """
    Entrada JSON exacta para ``key``; con ``decimal`` agrega ``<key>_decimal`` con la lectura aproximada.

    Args:
        key (str): Nombre del campo.
        value (Fraction | int | Interval): Valor a serializar.
        decimal (bool): Si es True, agrega el campo decimal aparte del exacto.

    Returns:
        dict: Uno o dos campos listos para ``json.dumps``.
    """
    fields = {key: json_value(value)}
    if decimal and isinstance(value, (int, Fraction, Interval)) and not isinstance(value, bool):
        fields[f'{key}_decimal'] = render_value(value, decimal=True)
    return fields
