"""Round-trip one user's feedback frame through the bit-level wire format and print it."""
import numpy as np

from onebit_csit.airlink import FeedbackFrame, design_pilots, downlink_receive, receiver_feedback
from onebit_csit.channel import draw_channels, draw_supports
from onebit_csit.config import ScenarioConfig
from onebit_csit.numerics import RandomSource


def main():
    cfg = ScenarioConfig(M=16, N=2, K=1, T=8, s=4, c=0)
    rng = RandomSource(cfg.seed)
    ch = draw_channels(draw_supports(cfg, rng), cfg, rng)
    pilots = design_pilots(cfg.M, cfg.T, cfg.power, rng)
    frame = receiver_feedback(downlink_receive(ch.antenna[0], pilots, rng), cfg.N)
    print(f"{frame.n_bits} bits in {len(frame.payload)} bytes: {frame.payload.hex()}")
    again = FeedbackFrame(user=0, T=cfg.T, N=cfg.N, payload=bytes(frame.payload))
    assert np.array_equal(again.symbols(), frame.symbols())
    print(again.symbols())


if __name__ == "__main__":
    main()
