"""Smoke test of the crossdecay Python module. Run directly or with pytest."""

import math

import numpy as np

import crossdecay as cd


def test_closed_forms():
    k, t = 1000.0, 500e-6
    for r in (500.0, 750.0, 1000.0):
        peak = cd.prob_e_two_cavity(math.pi / 4, math.pi / 2, k, r, math.pi / 2, t)
        assert abs(peak - math.exp(-2 * (k - r) * t)) < 1e-12
    d = cd.discriminator(k, 1000.0, math.pi / 2, 2e-3)
    assert abs(d - (1 - math.exp(-4))) < 1e-12
    assert abs(cd.prob_e_single_cavity_detuned(k, t) - math.exp(-1)) < 1e-15


def test_evolution_matches_dense_exponential():
    p = cd.SymmetricDecayParameters(1000.0, 600.0, 0.8)
    amps, dims = cd.prepared_state(2.0, 0.5)
    psi = np.array(amps)
    rho0 = np.outer(psi, psi.conj())
    l = cd.symmetric_liouvillian(p, dims)
    t = 7e-4
    # vec stacks columns
    w, v = np.linalg.eig(np.array(l.matrix()))
    vec = v @ np.diag(np.exp(w * t)) @ np.linalg.solve(v, rho0.flatten(order="F"))
    expected = vec.reshape(rho0.shape, order="F")
    for method in ("rk4", "exponential"):
        out = np.array(cd.evolve_master(rho0.tolist(), l, t, method))
        assert np.max(np.abs(out - expected)) < 1e-8
    fid = cd.fidelity(expected.tolist(), amps, dims)
    assert abs(fid - cd.prob_e_two_cavity(2.0, 0.5, 1000.0, 600.0, 0.8, t)) < 1e-8


def test_builders_and_decomposition():
    p = cd.SymmetricDecayParameters(900.0, 400.0, 1.1, 300.0)
    dims = [3, 3]
    sym = np.array(cd.symmetric_liouvillian(p, dims, "lab").matrix())
    gen = np.array(cd.general_liouvillian(dims, **p.to_general("lab")).matrix())
    assert np.max(np.abs(sym - gen)) < 1e-12
    l1, l2 = cd.decompose_symmetric(p, dims, "lab")
    assert np.max(np.abs(np.array((l1 + l2).matrix()) - sym)) < 1e-10


def test_protected_state_survives():
    gamma = 2.2
    p = cd.SymmetricDecayParameters(1000.0, 1000.0, gamma)
    amps, dims = cd.robust_entangled_state(gamma)
    rho0 = np.outer(amps, np.conj(amps))
    out = cd.evolve_master(rho0.tolist(), cd.symmetric_liouvillian(p, dims), 1e-3)
    assert cd.fidelity(out, amps, dims) > 1 - 1e-9


def test_protocol_runs():
    p = cd.SymmetricDecayParameters(1000.0, 1000.0, math.pi / 2)
    rec = cd.run_two_cavity(p, math.pi / 4, math.pi / 2, 500e-6)
    assert abs(rec["p_e"] - 1.0) < 1e-6
    assert rec["preparation_fidelity"] > 1 - 1e-9
    rec = cd.run_single_cavity(cd.SymmetricDecayParameters(1000.0, 300.0, 0.0), 500e-6, "detuned")
    assert abs(rec["p_e"] - math.exp(-1)) < 1e-6


def test_errors_surface_as_value_error():
    for call in (
        lambda: cd.SymmetricDecayParameters(10.0, 20.0, 0.0),
        lambda: cd.robust_coherent_state(0.0, 3.0 + 0j, 2),
        lambda: cd.run_two_cavity(cd.SymmetricDecayParameters(1.0, 0.0, 0.0), 0.1, 0.2, 1e-4, "explicit"),
    ):
        try:
            call()
        except ValueError:
            continue
        raise AssertionError("expected ValueError")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            fn()
            print(f"ok {name}")
