"""Expectation-maximization planners for infinite-horizon discounted DEC-POMDPs.

Three E-step engines share one M-step: truncated forward-backward sums
(``em``), an exact solve of the forward and backward Bellman equations
(``bem``), and warm-started Bellman-operator iteration (``mbem``).
"""
from ._accel import backend
from .errors import DecemError, ModelError, NumericError, ParseError, ResourceError
from .estep import (
    EstepResult,
    apply_backward_operator,
    apply_forward_operator,
    bellman_solve,
    forward_backward,
    mbem_estep,
    tmax_bound,
)
from .formats import parse_model, parse_policy, serialize_model, serialize_policy, write_trace_csv
from .kernel import (
    JointChain,
    action_conditioned_kernel,
    build_joint_chain,
    observation_conditioned_kernel,
    scale_reward,
)
from .model import DecPomdpModel, JointPolicy, init_policy, random_model, reward_bounds, validate_model
from .mstep import m_step, update_lambda, update_nu, update_pi
from .solver import IterationTrace, SolverConfig, evaluate, expected_return, run

__version__ = "0.1.0"
