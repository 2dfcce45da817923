"""Certificates, greedy partitions, and the Monte-Carlo probe."""

import math

import numpy as np
import pytest

from hypifs.ifs import IfsFamily, affine_map, bernoulli_psi
from hypifs.transversality import (PartitionError, build_pm_translation,
                                   d_max, greedy_partition,
                                   mc_transversality_probe, overlap_domain,
                                   vertical_certificate)


def sep_base(ratio, off1, off2):
    return IfsFamily((affine_map(ratio, off1), affine_map(ratio, off2)),
                     (0.0, 1.0), (0.0, 1e-9))


def test_greedy_partition_disjoint_classes():
    ivs = [(0.0, 0.3), (0.2, 0.5), (0.45, 0.8), (0.75, 1.0)]
    plus, minus = greedy_partition(ivs)
    assert sorted(plus + minus) == [0, 1, 2, 3]
    for cls in (plus, minus):
        for a in range(len(cls)):
            for b in range(a + 1, len(cls)):
                ia, ib = ivs[cls[a]], ivs[cls[b]]
                assert max(ia[0], ib[0]) > min(ia[1], ib[1])


def test_greedy_partition_triple_cover_fails():
    with pytest.raises(PartitionError) as exc:
        greedy_partition([(0.0, 0.5), (0.1, 0.6), (0.2, 0.7)])
    assert exc.value.witness is not None


def test_greedy_partition_validation():
    with pytest.raises(ValueError):
        greedy_partition([])
    with pytest.raises(ValueError):
        greedy_partition([(0.5, 0.2)])


def test_build_pm_translation_shrinks_halfwidth():
    base = sep_base(0.3, 0.2, 0.4)
    tf = build_pm_translation(base, 0.0, 0.5)
    lo, hi = tf.param_interval
    assert hi <= 0.5 and hi > 0
    assert lo == -hi
    assert not tf.gamma2_warning
    tf6 = build_pm_translation(sep_base(0.6, 0.1, 0.3), 0.0, 0.05)
    assert tf6.gamma2_warning


def test_overlap_domain_detects_overlap():
    base = sep_base(0.3, 0.2, 0.4)
    tf = build_pm_translation(base, 0.0, 0.05)
    assert overlap_domain(tf, 1, 2) is not None
    with pytest.raises(ValueError):
        overlap_domain(tf, 1, 1)


def test_overlap_domain_none_when_separated():
    base = sep_base(0.1, 0.05, 0.85)
    tf = build_pm_translation(base, 0.0, 0.01)
    assert overlap_domain(tf, 1, 2) is None


def test_d_max_formula():
    base = sep_base(0.3, 0.2, 0.4)
    tf = build_pm_translation(base, 0.0, 0.05)
    # |a'| = 1, sup|f'| = 0.3 -> D_max = 1/0.7
    assert d_max(tf) == pytest.approx(1.0 / 0.7, rel=1e-9)


def test_certificate_cond1_ratio_03():
    tf = build_pm_translation(sep_base(0.3, 0.2, 0.4), 0.0, 0.05)
    rep = vertical_certificate(tf)
    assert rep.verdict == "CERTIFIED-cond1"
    # eta = |1 - (-1)| = 2, D_max = 1/0.7, margin = 2 - 0.6/0.7
    assert rep.pairs[0].margin1 == pytest.approx(2.0 - 0.6 / 0.7, rel=1e-9)


def test_certificate_inconclusive_ratio_06():
    tf = build_pm_translation(sep_base(0.6, 0.1, 0.3), 0.0, 0.05)
    rep = vertical_certificate(tf)
    assert rep.verdict == "INCONCLUSIVE"
    assert rep.pairs[0].margin1 < 0


def test_certificate_vacuous_when_no_overlap():
    tf = build_pm_translation(sep_base(0.1, 0.05, 0.85), 0.0, 0.01)
    rep = vertical_certificate(tf)
    assert rep.verdict == "CERTIFIED-cond1"
    assert rep.pairs == []


def test_probe_falsifies_identical_maps():
    fam = IfsFamily((affine_map(0.5, 0.25), affine_map(0.5, 0.25)),
                    (0.0, 1.0), (0.4, 0.6))
    rep = mc_transversality_probe(fam, samples=2000, depth=30, seed=1)
    assert rep.verdict == "FALSIFIED"
    u, v, lam = rep.witness
    assert u[0] != v[0]


def test_probe_deterministic_and_inconclusive():
    fam = IfsFamily((bernoulli_psi(0), bernoulli_psi(1)),
                    (-1.0, 1.0), (0.5, 0.66))
    a = mc_transversality_probe(fam, samples=500, depth=25, seed=42)
    b = mc_transversality_probe(fam, samples=500, depth=25, seed=42)
    assert a.verdict == "INCONCLUSIVE"
    assert a.empirical_eta == b.empirical_eta
    assert a.n_events == b.n_events


def test_probe_distinct_first_symbols_forced():
    fam = IfsFamily((bernoulli_psi(0), bernoulli_psi(1)),
                    (-1.0, 1.0), (0.5, 0.66))
    rep = mc_transversality_probe(fam, samples=100, depth=10, seed=0)
    assert rep.n_samples == 100 * 17


def test_report_lines_cover_fields():
    tf = build_pm_translation(sep_base(0.3, 0.2, 0.4), 0.0, 0.05)
    rep = vertical_certificate(tf)
    text = "\n".join(rep.lines())
    assert "verdict: CERTIFIED-cond1" in text
    assert "d_max" in text and "margin1" in text
