"""Smoke test for the Python bindings; run after `maturin develop`."""

import cmath
import math

import ququart


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    rows = ququart.branch_table(2.25, -4.0, fs_mhz=1000.0 / 60.0)
    unfolded = [r[2] for r in rows]
    assert [r[0] for r in rows] == [1, 2, 3, 4, 5, 6]
    assert all(close(a, b, 1e-12) for a, b in zip(unfolded, [4.0, 0.5, 3.5, 5.0, 5.5, 1.5])), unfolded
    assert close(ququart.fold_frequency(10.0, 1000.0 / 60.0), 1000.0 / 60.0 - 10.0, 1e-12)

    s = ququart.RamseySettings(delta_mhz=-4.0)
    signal = s.signal()
    assert len(signal) == 512 and all(0.0 <= v <= 1.0 for v in signal)
    assert s.tau_ns()[1] == 60.0

    freqs, mags = s.spectrum()
    assert len(freqs) == len(mags) and close(freqs[-1], 500.0 / 60.0, 1e-9)
    found = sorted(p["frequency_mhz"] for p in s.peaks())
    for want in [0.5, 1.5, 3.5, 4.0, 5.0, 5.5]:
        assert any(close(f, want, 0.033) for f in found), (want, found)

    u = s.pulse_unitary()
    for i in range(4):
        for j in range(4):
            dot = sum(u[k][i].conjugate() * u[k][j] for k in range(4))
            assert cmath.isclose(dot, 1.0 if i == j else 0.0, abs_tol=1e-12)

    hard = ququart.RamseySettings(
        delta_mhz=1.0, omega1_mhz=5.0, pulse_ns=50.0, dtau_ns=10.0,
        initial_state="plus_half", pulse_model="hard",
    )
    d = hard.decomposition()
    x23 = next(t["x"] for t in d["terms"] if set(t["pair"]) == {"-1/2", "+1/2"})
    assert abs(x23) < 1e-10

    traj = hard.bloch(pair=("+3/2", "+1/2"), free_ns=100.0)
    assert all(x * x + y * y + z * z <= p * p + 1e-10 for _, x, y, z, p in traj)

    sweep = s.sweep([-4.0, 0.0, 4.0], threads=2)
    assert [row[0] for row in sweep] == [-4.0, 0.0, 4.0]
    assert sweep[0][2] == mags

    try:
        ququart.RamseySettings(pulse_ns=-1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative pulse length accepted")
    try:
        ququart.RamseySettings().decomposition()
    except ValueError:
        pass
    else:
        raise AssertionError("mixed state decomposed")

    assert math.isfinite(d["c0"])
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
