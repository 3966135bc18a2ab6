from .bcs import (BcsMode, BcsParams, BcsRestrictedSpace, GroundPair, bcs_first_order_states,
                  bcs_gap_solve, bcs_ground_corrections, bcs_modes, bcs_normalization,
                  bcs_observables, bcs_restricted_model, gap_residual, jump_matrix)
from .hatano_nelson import HatanoNelsonParams, hatano_nelson, pair_state
from .tls import TlsParams, excited_state, tls_model, tls_reference
