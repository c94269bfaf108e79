# -*- coding: utf-8 -*-
"""TRT-SNN Dataset."""

from trtsnn.dataset.base_dataset import SpikeDataset
from trtsnn.dataset.base_dataset import collate_time_major
from trtsnn.dataset.base_dataset import make_loader
from trtsnn.dataset.events import EventStream
from trtsnn.dataset.events import bin_events
from trtsnn.dataset.events import load_event_dataset
from trtsnn.dataset.events import load_events
from trtsnn.dataset.events import normalize_frames
from trtsnn.dataset.events import write_events
from trtsnn.dataset.images import direct_encode
from trtsnn.dataset.images import load_csv_images
from trtsnn.dataset.images import write_csv_images
from trtsnn.dataset.split import DatasetSplit
from trtsnn.dataset.split import LabeledSamples
from trtsnn.dataset.split import split
from trtsnn.dataset.synthetic import SyntheticTaskSpec
from trtsnn.dataset.synthetic import corrupt_labels
from trtsnn.dataset.synthetic import load_spike_dataset
from trtsnn.dataset.synthetic import save_spike_dataset
from trtsnn.dataset.synthetic import synth_envelope
from trtsnn.dataset.synthetic import synth_generate
