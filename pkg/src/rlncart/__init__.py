"""Cart-pole balancing with reinforcement-learning neurons (RLNs).

Two single-dendrite neurons, one per force direction, pick the action each
step through a two-level winner-take-all.  Synapses learn online from three
factors: the input spike, the winning segment, and a broadcast reward.
"""

__version__ = "0.1.0"
