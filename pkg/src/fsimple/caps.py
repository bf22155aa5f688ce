"""Probe bounds shared by the closure, descent and CLI layers."""

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Caps:
    e_max: int = 6  # largest Frobenius exponent probed
    t_max: int = 4  # largest power t in J_t = (x_1^t, ..., x_d^t)
    window: int = 2  # consecutive equal levels that count as stabilized
    ladder_e: int = 1  # exponent of the root map
    power_cap: int = 3  # largest test-element power tried before refuting
    integral_cap: int = 4  # largest degree of integral dependence searched
    descent_steps: int = 20

    def to_dict(self):
        return asdict(self)


DEFAULT_CAPS = Caps()
