# -*- coding: utf-8 -*-
"""TRT-SNN Diagnostics."""

from trtsnn.diagnostics.asfr import asfr
from trtsnn.diagnostics.fisher import FisherProfile
from trtsnn.diagnostics.fisher import fisher_profile
from trtsnn.diagnostics.fisher import fisher_trace
from trtsnn.diagnostics.fisher import information_centroid
from trtsnn.diagnostics.landscape import LandscapeGrid
from trtsnn.diagnostics.landscape import filter_normalized_direction
from trtsnn.diagnostics.landscape import grid_offsets
from trtsnn.diagnostics.landscape import landscape_2d
from trtsnn.diagnostics.report import format_table
from trtsnn.diagnostics.report import write_asfr_csv
from trtsnn.diagnostics.report import write_csv
from trtsnn.diagnostics.report import write_fisher_csv
from trtsnn.diagnostics.report import write_landscape_csv
from trtsnn.diagnostics.report import write_vanishing_csv
from trtsnn.diagnostics.vanishing import VanishingRow
from trtsnn.diagnostics.vanishing import vanishing_probe
