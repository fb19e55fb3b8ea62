"""Inequality in the use frequency of patent technology codes."""

__version__ = "0.1.0"

from .ingest import (EventTable, IngestStats, PatentCodeEvent, SchemaError, Scheme,
                     filter_window, ingest, join_cpc, normalize_code, parse_delimited)
from .frequency import (DescriptiveStats, FrequencyDistribution, GroupedFrequencyTable,
                        build_distributions, describe, group_table)
from .measures import InequalityResult, LorenzCurve, gini, inequality, lorenz, theil
from .decomposition import (DecompositionResult, DivisionRanking, PartitionedDistribution,
                            decompose, decomposition_series, rank_divisions, share_percentages)
from .concordance import (CO_IPC, DIVISIONS, ClassifiedEvent, ConcordanceError,
                          ConcordanceTable, ConditionalRule, classify, load_concordance,
                          partition)
