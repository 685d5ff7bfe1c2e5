"""Simulation library for latent-type recommendation: preference model, engine,
user- and item-based collaborative filtering, regret bounds, regularity checks,
and the Monte Carlo harness."""

from .model import (ModelParams, PreferenceModel, OracleView, new_model, oracle_view,
                    GENERIC, USER_STRUCTURE, ITEM_STRUCTURE)
from .engine import (run_trial, RepeatRecommendation, ItemSource, History, HistoryView,
                     TrialResult, EXPLORE, EXPLOIT, UNKNOWN)
from .baselines import RandomRecommender, OmniscientRecommender
from .cf_user import (UserUserParams, NoisyPartitionParams, UserPartition, UserUser,
                      NoisyUserUser, user_user, noisy_user_user, phase1_length,
                      noisy_phase1_length, partition_by_equality, clique_partition_check,
                      same_partition)
from .cf_item import ItemItemParams, ItemItem, item_item, build_rater_schedule, block_raters
from .bounds import (BoundCurve, user_upper, user_upper_noisy, user_lower, item_upper,
                     item_lower, evaluate_bound, BOUND_KINDS)
from . import regcheck
from .harness import (ExperimentConfig, ConfigError, RegretCurve, run_experiment,
                      coldstart, AnytimeRecommender, build_recommender, emit_csv,
                      bound_overlays, epoch_lengths)

__version__ = "0.1.0"
