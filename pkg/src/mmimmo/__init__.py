"""Link-level simulator for short-range line-of-sight massive-MIMO backhaul."""

__version__ = "0.1.0"

from .geometry import (CarrierConfig, LinkGeometry, UlaSpec, compute_num_streams,
                       compute_spacing, condition_ratios, element_positions,
                       pairwise_distances, parallel_link)
from .channel import (ChannelMatrix, PointScatterer, RayField, fs_channel, load_rays,
                      ray_channel, save_rays, synth_rays)
from .schemes import (SchemeConfig, SchemeKind, bdft_sm_mrt, build_block_mapping, butler,
                      dft_sm_mrt, normalize_power, svd_scheme)
from .metrics import (SeBounds, complexity_mu, phi_ratios, practical_se, sir, stream_se,
                      total_se)
from .scenario import Scenario, ScenarioResult, run_scenario, run_suite
