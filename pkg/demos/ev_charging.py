"""Schedule one overnight EV charge on top of a household load profile.

Each 15-minute slot either idles or charges at 1.1-6.6 kW; the solver
flattens total load (household + EV) in the least-squares sense.

    python3 demos/ev_charging.py [energy_wh] [seed]
"""

import sys

import numpy as np

from rapdibc import EvGenConfig, gen_ev, solve_instance

energy_wh = float(sys.argv[1]) if len(sys.argv) > 1 else 19500.0
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0
cfg = EvGenConfig.from_wh(energy_wh, seed=seed)
inst = gen_ev(cfg, canonical=False)  # slots in time order
sol = solve_instance(inst)

print(f"energy {energy_wh / 1000:g} kWh over {cfg.T} slots of {cfg.dt * 60:g} min, "
      f"status {sol.status.value}, objective {sol.objective:.4f}")
print(f"charging slots: {int(np.count_nonzero(sol.x))}, "
      f"delivered {cfg.dt * sol.x.sum():.3f} kWh")
print(f"peak load: household {inst.b.max():.2f} kW, with EV {(inst.b + sol.x).max():.2f} kW")
print("\nslot  time   house    ev   total")
for t, (h, x) in enumerate(zip(inst.b, sol.x)):
    clock = 18.0 + t * cfg.dt  # the default profile starts at 18:00
    hh, mm = divmod(int(round(clock * 60)) % (24 * 60), 60)
    bar = "#" * int(round(2 * (h + x)))
    print(f"{t:4d}  {hh:02d}:{mm:02d}  {h:5.2f}  {x:5.2f}  {h + x:5.2f} {bar}")
