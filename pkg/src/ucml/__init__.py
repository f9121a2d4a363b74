"""Coalgebraic modal logics of uncertainty: spaces, measures, functors,
formulas, models, a model checker and a soundness harness."""

from .errors import (DomainError, FormulaSortError, MalformedMeasureError, MalformedSpaceError, ModelError,
                     NotMeasurableError, ParseError, SchemaError, SideConditionError, SortError, UcmlError)
from .spaces import (Inj, MeasurableSet, SetAlgebra, UncertaintySpace, coproduct_space, discrete_algebra,
                     generate_algebra, make_space, product_space)
from .measures import (Kind, dual, eval_measure, find_cover_violation, is_plausibility, is_possibility,
                       is_probability, is_upper_probability_lp, lower_envelope, mass_function, probability,
                       possibility_distribution, tabulated, upper_envelope)
from .functors import (ID, Coprod, Const, Delta, Id, MeasureElem, Plaus, Poss, Prob, Prod, Upper,
                       format_functor, ingredients, multigraph, parse_functor)
from .logic import SortedFormula, parse_formula, print_formula, sort_check
from .models import Coalgebra, check_morphism, load_model, save_model, validate
from .semantics import description_set, interpret, satisfies, valid_in_model
from .deduction import (gen_cover_rule_instance, instantiate_axiom, random_coalgebra,
                        soundness_harness)

__all__ = [name for name in dir() if not name.startswith("_")]
