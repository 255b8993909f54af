"""modeshift: urban on-road decarbonization toolkit.

Subpackages and modules:
    inventory  -- baseline on-road GHG inventory (class/fuel/zone/hour ledger)
    scenario   -- BAU and policy trajectories, milestone checks, offset sizing
    equity     -- EV equity index, affordability gap, adoption projection
    mobsim     -- seedable agent-based multimodal day simulator
    hubpipe    -- smart-hub telemetry pipeline with privacy and incentives
    gateway    -- CLI and HTTP service tying everything together
"""

__version__ = "0.1.0"
