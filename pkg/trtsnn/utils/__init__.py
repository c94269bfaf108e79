# -*- coding: utf-8 -*-
"""TRT-SNN Utils."""
