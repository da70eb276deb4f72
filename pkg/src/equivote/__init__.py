"""Voting rules, tie-breaking that keeps anonymity and neutrality whenever
possible, and exact tests for when that is impossible."""

from .core import (BudgetExceeded, EquivoteError, Histogram, Permutation, PriorityOrder,
                   Profile, Setting, Space, SpaceError, apply_perm, enumerate_space,
                   format_element, format_profile, histogram, parse_element, parse_profile,
                   priority_compare, read_profile)
from .groups import (PermutationGroup, closure, cyclic_group_from_partition, fixed_points,
                     fpd, orbit, orbit_sizes, orbits, stab_histogram, subgroups,
                     symmetric_group, trivial_group)
from .impossibility import (alpha_bounds, anr_impossible, at_large, circledast, coin_set,
                            combine, condition1_holds, condition1_witness, feasible,
                            impossibility_witness, lcmset, oslash, partitions)
from .likelihood import (ImpartialCulture, Mallows, Mixture, estimate_violation,
                         exact_violation, is_problematic, parse_distribution,
                         sample_profile, slope_fit, theoretical_exponents)
from .oracle import (EnumerationBudget, brute_force_anr_exists, cross_check_classical,
                     cross_check_theorem1, enumerate_histograms, problematic_histogram,
                     verify_most_equitable)
from .rules import (RuleSpec, approval, borda, copeland, maximin, plurality,
                    positional_scoring, ranked_pairs_put, schulze, stv_put, trivial_rule,
                    veto, wmg)
from .tiebreak import (TieBreaker, fixed_agent_break, lexicographic_break, mfp_fast,
                       mfp_general, resolve, resolve_explain)

__version__ = "0.1.0"
