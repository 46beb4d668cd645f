"""Self-check battery run by ``inputdesign verify``."""

import numpy as np

from . import embeddings as emb
from .inversion import (
    affine_solution_dimension,
    cross_map_fde_to_tde,
    cross_map_tde_to_fde,
    fdie,
    giie,
    half_length,
    phases_from_spectrum,
    random_phases,
    solve_spectrum,
    tde_params_from_coordinates,
    tdie,
)
from .spectral import (
    circulant,
    circulant_eig,
    dft,
    dft_matrix,
    idft,
    quadratic_map,
    shift_matrix,
)


def _rel(a, b):
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)) / max(1.0, np.linalg.norm(b)))


def run_battery(N, n, trials=20, seed=0, cap=4096):
    """Returns a list of ``(name, passed, detail)``."""
    rng = np.random.default_rng(seed)
    results = []

    def record(name, ok, detail=""):
        results.append((name, bool(ok), detail))

    us = [rng.standard_normal(N) for _ in range(trials)]

    err = max(np.max(np.abs(idft(dft(u)) - u)) for u in us)
    record("dft round trip", err <= 1e-10, f"max error {err:.1e}")
    err = max(abs(np.sum(np.abs(dft(u)) ** 2) - u @ u) for u in us)
    record("parseval", err <= 1e-10, f"max error {err:.1e}")

    err = 0.0
    for _ in range(trials):
        b = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        tau, V = circulant_eig(b)
        B = circulant(b)
        err = max(err, np.linalg.norm(V @ np.diag(tau) @ V.conj().T - B) / np.linalg.norm(B))
    record("circulant eigendecomposition", err <= 1e-10, f"max rel error {err:.1e}")
    w = 2 * np.pi / N
    tau, _ = circulant_eig(shift_matrix(N)[0])
    err = np.max(np.abs(tau - np.exp(1j * w * np.arange(N))))
    record("ring adjacency spectrum", err <= 1e-10, f"max error {err:.1e}")
    mirror = (shift_matrix(N) + shift_matrix(N).T) / 2
    tau, _ = circulant_eig(mirror[0])
    err = np.max(np.abs(tau - np.cos(w * np.arange(N))))
    record("mirror graph spectrum", err <= 1e-10, f"max error {err:.1e}")

    embeddings = [emb.build_tde(N, n), emb.build_fde(N, n)]
    for g in (0, 0.5, 1, 0.3 + 0.7j, 2 - 3j):
        embeddings.append(emb.build_gie(N, n, g))
    for e in embeddings:
        err = max(_rel(e.forward(u), quadratic_map(u, n)) for u in us)
        record(f"embedding soundness {e.label}", err <= 1e-9, f"max rel error {err:.1e}")

    Wf = dft_matrix(N)
    L = emb.build_lambda(N)
    err = np.max(np.abs(emb.tde_basis(N).T - L @ Wf))
    record("connector W^T = L Wf", err <= 1e-10, f"max error {err:.1e}")
    Sf = emb.fde_autocov_matrix(N, n)
    err = np.max(np.abs(emb.cosine_matrix(N, n) - (Sf + Sf.conj()) / 2))
    record("connector S = (Sf + conj Sf)/2", err <= 1e-10, f"max error {err:.1e}")
    record("connector is unitary", np.allclose(L.conj().T @ L, np.eye(N), atol=1e-10, rtol=0))

    expected = emb.real_embedding_count(N)
    if expected <= cap:
        family = emb.enumerate_real_embeddings(N, n, cap=cap)
        sound = all(
            _rel(e.forward(u), quadratic_map(u, n)) <= 1e-9 for e in family for u in us[:3]
        )
        record(f"{len(family)} real embeddings", len(family) == expected and sound,
               f"expected {expected}")
    else:
        record(f"{expected} real embeddings (sampled)",
               all(emb.verify_embedding_identity(emb.real_connector(N, int(i)), N, n, trials=5)
                   for i in rng.integers(0, expected, 8)))

    H = half_length(N)
    r = quadratic_map(us[0], n)
    if N < 2 * n:
        a = solve_spectrum(r, N, seed=1)
        b = solve_spectrum(r, N, seed=2)
        record("solution set is a singleton (N < 2n)", np.max(np.abs(a - b)) <= 1e-10)
        if N == n:
            R = dft_matrix(n) @ r
            record("closed form R/sqrt(n) (N = n)", np.max(np.abs(a - R.real / np.sqrt(n))) <= 1e-10)
    else:
        dim = affine_solution_dimension(N, n)
        record(f"affine dimension {H - n}", dim == H - n, f"rank test gives {dim}")

    worst = 0.0
    for s, u0 in enumerate(us):
        r = quadratic_map(u0, n)
        weights = solve_spectrum(r, N, seed=s)
        ut = tdie(r, N, seed=s, weights=weights)
        z = np.linalg.solve(emb.tde_basis(N), ut)
        uf = fdie(r, N, phases=phases_from_spectrum(cross_map_tde_to_fde(z)), weights=weights)
        worst = max(worst, np.max(np.abs(ut - uf)))
        uf = fdie(r, N, seed=s, weights=weights)
        signs, split = tde_params_from_coordinates(cross_map_fde_to_tde(dft(uf)))
        ut = tdie(r, N, signs=signs, split=split, weights=weights)
        worst = max(worst, np.max(np.abs(ut - uf)))
    record("time/frequency inverse equivalence", worst <= 1e-10, f"max error {worst:.1e}")

    worst = 0.0
    for s, u0 in enumerate(us[:5]):
        r = quadratic_map(u0, n)
        p = random_phases(N, s)
        ref = giie(r, N, 1, phases=p, seed=s)
        for g in (0, 0.5, 2 - 3j):
            worst = max(worst, np.max(np.abs(giie(r, N, g, phases=p, seed=s) - ref)))
    record("graph-induced inverse independent of gamma", worst <= 1e-10, f"max error {worst:.1e}")
    return results
