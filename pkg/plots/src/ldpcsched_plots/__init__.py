"""Figure rendering for ldpcsched FER CSV files.

Consumes only the simulator's CSV interface
(schedule,ebno_db,iter_cap,frames,errors,fer,ci_lo,ci_hi); the decoding
library itself is never imported.
"""

from .render import PlotSpec, build_figure, read_fer_csv, render

__version__ = "0.1.0"
