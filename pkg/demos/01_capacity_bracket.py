"""
Certified capacity brackets for small channels
==============================================

Walks through the information measures and the bracket solver on a
hand-sized channel, then round-trips the channel through the CSV format
used by the `randchan capacity` command.
"""

import tempfile
from pathlib import Path

import numpy as np

from randchan import (
    conditional_entropy_vector,
    dual_F,
    dual_G,
    entropy,
    load_channel_csv,
    lower_bound_uniform,
    mutual_information,
    save_matrix_csv,
    solve_capacity,
    upper_bound_lambda0,
)

# A 2-input, 2-output channel: input 0 is fairly reliable, input 1 less so.
W = np.array([[0.9, 0.1], [0.2, 0.8]])

print("row entropies r:", conditional_entropy_vector(W))
print("uniform-input mutual information:", mutual_information([0.5, 0.5], W))

# Two closed-form bounds sandwich the capacity before any iteration runs:
# the dual value at lambda = 0 from above, the uniform input from below.
print("lower bound (uniform input): ", lower_bound_uniform(W))
print("upper bound (lambda = 0):    ", upper_bound_lambda0(W))

# Any lambda gives an upper bound G + F; lambda = 0 is just one choice.
for lam in ([0.0, 0.0], [0.5, 0.5], [1.0, 0.0]):
    print(f"  G+F at lambda={lam}:", dual_G(lam, W) + dual_F(lam))

# The solver tightens both sides until they agree to the tolerance.
bracket = solve_capacity(W, tol=1e-9)
print("\nbracket:", bracket.lower, "<= C <=", bracket.upper)
print("achieving input:", bracket.input_distribution.values)
print("iterations:", bracket.iterations, "converged:", bracket.converged)

# The certificate is self-contained: its value recomputes from lambda.
cert = bracket.certificate
print("certificate value recomputed:", dual_G(cert.lam, W) + dual_F(cert.lam))

# For a binary symmetric channel the answer is classical: 1 - H(delta).
delta = 0.11
bsc = [[1 - delta, delta], [delta, 1 - delta]]
print("\nBSC(0.11):", solve_capacity(bsc, tol=1e-9).lower,
      "= 1 - H(delta) =", 1.0 - entropy([1 - delta, delta]))

# CSV round trip: this is the on-disk format the CLI consumes.
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "channel.csv"
    save_matrix_csv(W, path)
    print("\nCSV contents:")
    print(path.read_text())
    again = load_channel_csv(path)
    print("reload max error:", np.max(np.abs(again.entries - W)))
