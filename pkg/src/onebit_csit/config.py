from __future__ import annotations

from dataclasses import asdict, dataclass, fields


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    """Simulation parameters. Defaults are the reference operating point.

    ``s`` is an upper bound on every user's support size and ``c`` a lower
    bound on the common support size; both are what the recovery algorithms
    are told. ``snr_db`` sets the per-pilot transmit power
    ``P = 10 ** (snr_db / 10)`` against unit-variance noise.
    """

    M: int = 128
    N: int = 2
    K: int = 10
    T: int = 64
    s: int = 10
    c: int = 6
    snr_db: float = 15.0
    mu: float = 0.01
    max_iter: int = 200
    trials: int = 100
    seed: int = 0

    def __post_init__(self):
        for name in ("M", "N", "K", "T", "trials", "max_iter"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.mu <= 0:
            raise ConfigurationError(f"mu must be > 0, got {self.mu}")
        if not 0 <= self.c <= self.s:
            raise ConfigurationError(f"need 0 <= c <= s, got c={self.c}, s={self.s}")
        if not 1 <= self.s <= self.M:
            raise ConfigurationError(f"need 1 <= s <= M, got s={self.s}, M={self.M}")

    @property
    def power(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)

    def check_feasible(self) -> None:
        """Raise unless supports can be drawn with |S_i| in {s-2..s}, |C| in {c, c+1}."""
        if self.s < 3:
            raise ConfigurationError(f"support-size draw needs s >= 3, got s={self.s}")
        if self.c > 0 and self.c + 1 > self.s - 2:
            raise ConfigurationError(
                f"common support up to c+1={self.c + 1} can exceed the smallest "
                f"individual support s-2={self.s - 2}"
            )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]
