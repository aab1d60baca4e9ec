from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    analysis: float = 1e-12      # float-mode comparisons of masses / e_max
    lp_compare: float = 1e-8     # closed form vs LP oracle
    lp_pivot: float = 1e-11
    lp_feasibility: float = 1e-9
    membership: float = 1e-9     # u_i > this  =>  i in I
    span_residual: float = 1e-10


TOL = Tolerances()
