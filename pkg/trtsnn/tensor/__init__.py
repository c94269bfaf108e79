# -*- coding: utf-8 -*-
"""TRT-SNN Tensor core."""

from trtsnn.tensor.core import Tensor
from trtsnn.tensor.core import as_tensor
from trtsnn.tensor.core import check_finite
from trtsnn.tensor.core import default_dtype
from trtsnn.tensor.core import matmul
from trtsnn.tensor.core import reduce_mean
from trtsnn.tensor.core import seeded_normal
from trtsnn.tensor.core import zeros
from trtsnn.tensor.rng import Rng
