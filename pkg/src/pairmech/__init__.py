"""Multi-task peer prediction via divergence-pairing payment rules.

The package pays agents for unverifiable reports by pairing scores on
shared and crossed tasks so that truth-telling earns the mutual
information of the signal prior and no strategy can earn more.
"""

from .errors import (AbsoluteContinuityError, DegenerateInputError,
                     DomainError, InputError, PairmechError, SolverError,
                     UnsupportedError)
from .generators import (CATALOG_NAMES, ConvexGenerator, FiniteDistribution,
                         catalog, divergence, mutual_information,
                         variational_value)
from .learning import (EmpiricalJoint, LearnerConfig, accuracy,
                       check_tv_accuracy_bound, learn_erm, learn_generative,
                       lipschitz_constant, tv_distance)
from .mechanism import (ExperimentReport, PaymentLedger, TaskAssignment,
                        default_assignments, exact_ex_ante_payment,
                        fantasy_payment, mechanism_ex_ante_payment,
                        monte_carlo_payment, multi_agent_latent_pairing,
                        multi_agent_random_pairing, pairing_payment,
                        plurality_vote, random_assignments, run_mechanism)
from .priors import (BUILTIN_PRIORS, DawidSkeneModel, FiniteJoint,
                     GaussianJoint, builtin_prior, eq1_joint,
                     independent_joint, is_fine_grained,
                     is_stochastic_relevant, is_strictly_correlated,
                     marginals, pushforward, ratio, ratio_matrix,
                     sample_tasks)
from .scoring import (AccuracyGap, EllipseThreshold, Quadratic, Tabular,
                      bregman_gap, clamp_to_domain, evaluate, ideal_finite,
                      ideal_gaussian, variational_value_finite)
from .strategies import (GaussianStrategy, MatrixStrategy, StrategyProfile,
                         apply_profile, is_oblivious, is_oblivious_profile,
                         is_permutation, is_permutation_profile, oblivious,
                         permutation, random_oblivious_profile,
                         random_profile, random_strategy, truth_profile,
                         truth_telling)

__version__ = "0.1.0"
