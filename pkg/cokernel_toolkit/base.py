import os
from fractions import Fraction

from dotenv import load_dotenv

from cokernel_toolkit.core.log import Log, set_package_level

load_dotenv(override=True)
logger = Log(__name__)


def _read_int(name: str, value, default: int, minimum: int) -> int:
    """Toma el valor explícito o la variable de entorno y valida que sea un entero >= minimum."""
    raw = value if value is not None else os.getenv(name, str(default))
    try:
        number = int(raw)
    except (TypeError, ValueError):
        logger.error(f"{name} debe ser un entero, recibido {raw!r}")
        raise ValueError(f"{name} debe ser un entero (recibido {raw!r}).")
    if isinstance(raw, (bool, float)) or number < minimum:
        logger.error(f"{name} fuera de rango: {raw!r}")
        raise ValueError(f"{name} debe ser un entero >= {minimum} (recibido {raw!r}).")
    return number


class CokernelToolkitBase:
    """
    Clase base con la configuración común para las versiones sync y async del toolkit.

    Los valores se toman de los argumentos o, en su defecto, de las variables de
    entorno (cargadas desde ``.env``).
    """

    def __init__(
            self,
            precision_k: int = None,
            interval_width_bits: int = None,
            bruteforce_bound: int = None,
            hl_max_vars: int = None,
            refinement_depth: int = None,
            log_level: str = None,
            ):
        """
        Inicializa la configuración del toolkit.

        Args:
            precision_k (int): Precisión k de las matrices sobre Z/p^k (PRECISION_K, por defecto 8).
            interval_width_bits (int): Los productos infinitos se encierran con ancho < 2^-bits
                (INTERVAL_WIDTH_BITS, por defecto 64).
            bruteforce_bound (int): Orden máximo de grupo para los oráculos (BRUTEFORCE_BOUND, por defecto 65536).
            hl_max_vars (int): Cota factorial de Hall-Littlewood (HL_MAX_VARS, por defecto 8).
            refinement_depth (int): Rondas de refinamiento de intervalos (REFINEMENT_DEPTH, por defecto 32).
            log_level (str): Nivel de logging del paquete (LOG_LEVEL).

        Raises:
            ValueError: Si algún valor no es un entero válido.
        """
        self.precision_k = _read_int('PRECISION_K', precision_k, 8, 1)
        self.interval_width_bits = _read_int('INTERVAL_WIDTH_BITS', interval_width_bits, 64, 1)
        self.bruteforce_bound = _read_int('BRUTEFORCE_BOUND', bruteforce_bound, 2 ** 16, 2)
        self.hl_max_vars = _read_int('HL_MAX_VARS', hl_max_vars, 8, 1)
        self.refinement_depth = _read_int('REFINEMENT_DEPTH', refinement_depth, 32, 1)

        if log_level:
            set_package_level(log_level)

        logger.debug(
            f"Inicializando CokernelToolkitBase con k={self.precision_k}, "
            f"bits={self.interval_width_bits}, cota={self.bruteforce_bound}"
        )
        logger.info("CokernelToolkitBase inicializado correctamente")

    @property
    def max_width(self) -> Fraction:
        """Ancho máximo de los encierros de productos infinitos."""
        return Fraction(1, 2 ** self.interval_width_bits)
