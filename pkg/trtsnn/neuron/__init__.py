# -*- coding: utf-8 -*-
"""TRT-SNN Neuron dynamics."""

from trtsnn.neuron.lif import LIFParams
from trtsnn.neuron.lif import LIFStepResult
from trtsnn.neuron.lif import heaviside
from trtsnn.neuron.lif import lif_forward
from trtsnn.neuron.lif import lif_step
from trtsnn.neuron.lif import membrane_grad
from trtsnn.neuron.lif import quiescent_bound
from trtsnn.neuron.lif import smooth_spike
from trtsnn.neuron.lif import surrogate_grad
from trtsnn.neuron.lif import temporal_backward
from trtsnn.neuron.lif import xi_factor
from trtsnn.neuron.lif import xi_product
