"""Concurrent regenerating codes: cut-set bounds, a functional codec and a cluster simulator."""

from .bounds import (CodeParams, CoopParams, InfeasibleError, TradeoffPoint, capacity_bruteforce,
                     capacity_closed_form, enumerate_compositions, mb_point, ms_point,
                     optimal_composition, tradeoff_alpha, tradeoff_curve)
from .cluster import Scenario, compare_mechanisms, load_scenario, run
from .codec import (Cluster, CodedNode, check_mds, check_strong_mds, concurrent_repair, distribute,
                    reconstruct, upgrade)
from .gf import FieldElement, PrimeField
from .matrix import GfMatrix, random_matrix

__version__ = "0.1.0"
