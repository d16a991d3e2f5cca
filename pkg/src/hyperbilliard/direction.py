from dataclasses import dataclass, field

from .scalars.numeric import DEFAULT_PRECISION, as_mpf, context, default_epsilon
from .scalars.symbolic import symbolic_field

IRRATIONALITY_CAVEAT = (
    "Irrationality of the direction is assumed, not verified. Symbolic "
    "verdicts are generic: they hold when 1, theta_1, ..., theta_d satisfy no "
    "extra rational relation and may differ for special algebraic directions."
)


@dataclass(frozen=True)
class Direction:
    """Billiard direction (1, theta_1, ..., theta_d).

    ``thetas`` holds mpf values for a numeric direction, or the generators
    t_1..t_d of Q(t_1..t_d) for the generic symbolic one.
    """

    thetas: tuple
    symbolic: bool = False
    precision: int = DEFAULT_PRECISION
    epsilon: float = None
    text: str = ""
    irrationality_declared: bool = True
    notes: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if not self.thetas:
            raise ValueError("a direction needs d >= 1 free components")
        if self.epsilon is None:
            object.__setattr__(self, "epsilon", default_epsilon(self.precision))
        if not self.symbolic:
            ctx = self.ctx
            thetas = tuple(as_mpf(t, ctx) for t in self.thetas)
            for k, t in enumerate(thetas, start=1):
                if t <= self.epsilon:
                    raise ValueError(f"theta_{k} must be strictly positive, got {t}")
            object.__setattr__(self, "thetas", thetas)

    @property
    def d(self):
        return len(self.thetas)

    @property
    def ctx(self):
        return context(self.precision)

    @property
    def components(self):
        """All d+1 components, starting with the implicit 1."""
        one = symbolic_field(self.d)[0].one if self.symbolic else self.ctx.mpf(1)
        return (one,) + tuple(self.thetas)

    @property
    def generic(self):
        """Generators t_1..t_d of the generic symbolic field of this dimension."""
        return symbolic_field(self.d)[1]

    def norm(self):
        if self.symbolic:
            raise TypeError("the norm of a symbolic direction is not rational")
        ctx = self.ctx
        return ctx.sqrt(ctx.fsum(c * c for c in self.components))

    def with_thetas(self, thetas, text=None, notes=()):
        return Direction(tuple(thetas), self.symbolic, self.precision, self.epsilon,
                         text if text is not None else self.text,
                         self.irrationality_declared, tuple(self.notes) + tuple(notes))

    @classmethod
    def numeric(cls, *thetas, precision=DEFAULT_PRECISION, epsilon=None, text=""):
        return cls(tuple(thetas), False, precision, epsilon, text)

    @classmethod
    def generic_symbolic(cls, d, precision=DEFAULT_PRECISION):
        _, gens = symbolic_field(d)
        text = "1," + ",".join(f"t{k}" for k in range(1, d + 1))
        return cls(gens, True, precision, None, text)
