"""Sequential fair allocation with instantaneous, perfect-recall and
past-discounted fairness states."""
from ._backend import NAME as backend
from .allocator import Allocation, Item, enumerate_allocations, optimize, step_utilities
from .simulator import Scenario, compare, load_scenario, metrics, run_episode, validate_scenario
from .state_space import (DiscretizationSpec, build_augmented_mdp, discounted_bound, discretize,
                          state_count_discounted, state_count_perfect, value_iteration)
from .temporal import FairnessState, ParadigmConfig, add_agent, commit, init, preview, remove_agent
from .welfare import UtilityVector, WelfareSpec, evaluate

__version__ = "0.1.0"
