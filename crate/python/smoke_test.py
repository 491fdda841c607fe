"""Smoke test for the cartan_py extension module."""

import math

import cartan_py as cp

SWAP = [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]
CX = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]


def close(a, b, tol=1e-9):
    return all(abs(x - y) < tol for x, y in zip(a, b))


def main():
    q = math.pi / 4
    assert close(cp.cartan_coordinate(CX), (q, 0, 0))
    assert close(cp.cartan_coordinate(SWAP), (q, q, q))

    kak = cp.kak_decompose(SWAP)
    assert close(kak["coord"], (q, q, q))

    basis = cp.BasisGate.da(q)
    plan = cp.compile_2q(SWAP, basis)
    assert plan.basis_count == 3, plan
    assert cp.distance_up_to_phase(plan.assemble(), SWAP) < 1e-7
    again = cp.SynthesisPlan.from_json(plan.to_json())
    assert again.basis_count == 3

    assert cp.lower_bound(SWAP, cp.BasisGate.da(math.pi / 28))[0] == 7

    model = cp.HardwareModel("xx")
    mixed = cp.compile_2q_mixed(CX, [cp.BasisGate.cx(), cp.BasisGate.da(math.pi / 8)], "max_fidelity", model)
    assert mixed.residual < 1e-7
    assert 0 < model.plan_fidelity(mixed) <= 1

    qft = cp.Circuit.qft(3)
    out, report = cp.transpile(qft, [basis])
    assert report["basis_count"] == 6, report
    u, v = qft.unitary(), out.unitary()
    phase = sum(a.conjugate() * b for ra, rb in zip(u, v) for a, b in zip(ra, rb))
    phase /= abs(phase)
    err = math.sqrt(sum(abs(b - phase * a) ** 2 for ra, rb in zip(u, v) for a, b in zip(ra, rb)))
    assert err < 1e-6, err

    assert cp.brute_force_min_count(CX, basis, 2) == 1
    print("smoke test passed")


if __name__ == "__main__":
    main()
