"""Operations are pure functions over immutable inputs: concurrent callers
sharing one space must all see identical results."""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from atsuji import (
    atsuji_check,
    convergent_sequence,
    greedy_epsilon_net,
    min_pairwise_distance,
    remetrize,
    verify_metric_axioms,
)


def test_shared_space_concurrent_checks_agree():
    space, view = convergent_sequence(150)

    def job(_):
        verdict = atsuji_check(space, view, [1.0, 0.25, 0.01], 1e-6)
        net = greedy_epsilon_net(space, space.ids, 0.2)
        iso = min_pairwise_distance(space, space.ids)
        return verdict.status, tuple(net), iso.eta, iso.witness

    with ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(job, range(16)))
    assert len(set(results)) == 1


def test_concurrent_remetrization_is_reproducible():
    space, view = convergent_sequence(100)

    with ThreadPoolExecutor(max_workers=6) as pool:
        outputs = list(pool.map(lambda _: remetrize(space, view), range(12)))
    first = outputs[0]
    assert verify_metric_axioms(first.space).passed
    for other in outputs[1:]:
        assert np.array_equal(first.newdist, other.newdist)
        assert first.levels == other.levels
