"""Quick end-to-end check of the Python bindings. Run after `pip install -e crates/python`."""

import numpy as np

import meanking


def close(a, b, tol=1e-9):
    return np.allclose(np.asarray(a), np.asarray(b), atol=tol)


def field():
    info = meanking.field_info(2, 2)
    assert info["irreducible"] == [1, 1, 1]
    # x * x = x + 1
    assert info["mul"][2][2] == 3
    assert meanking.QuditSystem(9).mul(4, 4) == 6


def bases():
    s = meanking.QuditSystem(4)
    report = s.unbiasedness()
    assert report["all_unbiased"] and report["total_pairs"] == 10
    a, b = np.array(s.mub_state(1, 0)), np.array(s.mub_state(3, 2))
    assert abs(abs(np.vdot(a, b)) ** 2 - 0.25) < 1e-9

    z = meanking.QuditSystem(15, mode="modular").unbiasedness()
    assert z["unbiased_pairs"] == 75 and not z["all_unbiased"]


def bell():
    s = meanking.QuditSystem(5)
    for k in range(1, 6):
        for m in range(5):
            for n in range(5):
                m2, n2, phase = s.bell_transform(k, m, n)
                assert close(s.bell_state(m, n, k), phase * np.array(s.bell_state(m2, n2, 0)))
    try:
        s.bell_transform(0, 1, 1)
    except ValueError:
        pass
    else:
        raise AssertionError("k = 0 accepted")


def king():
    s = meanking.QuditSystem(3)
    full = s.run_protocol(exhaustive=True)
    assert full["successes"] == full["trials"] == 36
    a = s.run_protocol(trials=500, seed=7)
    assert a == s.run_protocol(trials=500, seed=7)
    assert a["successes"] == 500
    psi = np.array(s.king_state(1, 2))
    assert abs(np.linalg.norm(psi) - 1) < 1e-9


def wigner():
    s = meanking.QuditSystem(3)
    v = np.array(s.mub_state(2, 1))
    w = np.array(s.wigner_grid(np.outer(v, v.conj()).tolist()))
    assert abs(w.sum() - 3) < 1e-9
    try:
        meanking.QuditSystem(3, mode="modular").wigner_grid(np.eye(3).tolist())
    except ValueError:
        pass
    else:
        raise AssertionError("modular Wigner accepted")


def verify():
    report = meanking.verify(4, suite="all")
    assert report["all_passed"], [c for c in report["checks"] if not c["passed"]]
    try:
        meanking.QuditSystem(6)
    except ValueError:
        pass
    else:
        raise AssertionError("dimension 6 accepted")


if __name__ == "__main__":
    for check in (field, bases, bell, king, wigner, verify):
        check()
        print(f"ok  {check.__name__}")
    print(f"meanking {meanking.__version__}: all smoke checks passed")
