# -*- coding: utf-8 -*-
"""TRT-SNN Network."""

from trtsnn.network.model import ForwardTrace
from trtsnn.network.model import Gradients
from trtsnn.network.model import LayerTrace
from trtsnn.network.model import Parameters
from trtsnn.network.model import SNNModel
from trtsnn.network.model import TemporalGradComponents
from trtsnn.network.model import apply_running_stats
from trtsnn.network.model import backward
from trtsnn.network.model import forward
from trtsnn.network.model import init_params
from trtsnn.network.model import pname
from trtsnn.network.model import temporal_grad_components
from trtsnn.network.norm import NormCache
from trtsnn.network.norm import NormState
from trtsnn.network.norm import tdbn_backward
from trtsnn.network.norm import tdbn_forward
from trtsnn.network.spec import LayerSpec
from trtsnn.network.spec import NetworkSpec
from trtsnn.network.spec import build_network_spec
