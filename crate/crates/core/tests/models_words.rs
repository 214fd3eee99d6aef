use entropic_core::domain::DEFAULT_CAP;
use entropic_core::models::{a_pow_b, named_sets, xi_key};
use entropic_core::prog::default_budget;
use entropic_core::symimg::weed;
use entropic_core::words::{
    big_gamma_recursive, brute_primitive, gamma_mobius, gamma_recursive, is_primitive,
    preimage_counts, validate_annexe, WordConstraint,
};
use entropic_core::{
    build_domain, build_event_index, entropic_weight, maxps_oracle, run, LiteralFilter, ModelId,
};

/// Border of `w` by direct comparison of every prefix with the suffix of
/// the same length.
fn border(w: &[u8]) -> usize {
    let n = w.len();
    (0..n).rev().find(|&k| w[..k] == w[n - k..]).unwrap_or(0)
}

#[test]
fn oracle_matches_direct_border() {
    let mut w = vec![0u8; 9];
    for i in 0..3usize.pow(9) {
        entropic_core::domain::word_at(i, 3, &mut w);
        assert_eq!(maxps_oracle(&w), border(&w) as i64);
    }
}

#[test]
fn zero_weight_events() {
    for m in [ModelId::MaxPsA0, ModelId::MaxPsA1] {
        for (n, a) in [(8, 2), (8, 3), (9, 2), (9, 3)] {
            let dom = build_domain(m, n, a, DEFAULT_CAP).unwrap();
            let idx = build_event_index(m.program(), &dom, LiteralFilter::Essential).unwrap();
            let last = idx.get(&xi_key(n, n - 1, n - 1)).unwrap();
            // a…ab with a ≠ b
            assert_eq!(last.occurrence.count(), (a * (a - 1)) as usize);
            assert_eq!(entropic_weight(&dom, &last.occurrence), 0.0);
            if n % 2 == 1 {
                let h = idx.get(&xi_key(n, n - 2, n - 2)).unwrap();
                assert_eq!(entropic_weight(&dom, &h.occurrence), 0.0, "{m} n={n} a={a}");
            }
        }
    }
}

#[test]
fn quadratic_trace_follows_xi_blocks() {
    for n in [5, 8] {
        let p = ModelId::MaxPsA0.program();
        let x = a_pow_b(n, 2);
        let t = run(p, &x, default_budget(n)).unwrap();
        let keys: Vec<String> = weed(p, &t)
            .unwrap()
            .entries
            .iter()
            .map(|e| e.literal.key(p))
            .collect();
        let mut expected = Vec::new();
        for k in (1..n).rev() {
            for i in 1..=k {
                expected.push(xi_key(n, k, i));
            }
        }
        expected.push("O(phi,0)".to_string());
        assert_eq!(keys, expected);
    }
}

#[test]
fn lemma_on_runs_of_equal_characters() {
    for a in [2u32, 3] {
        for n in 2..=12usize {
            lemma(n, a);
        }
    }
}

fn lemma(n: usize, a: u32) {
    let dom = build_domain(ModelId::MaxPsA0, n, a, DEFAULT_CAP).unwrap();
    for s in 1..n {
        let set = dom.collect_set(|w| w.word[..=s].iter().all(|&c| c == w.word[0]));
        for i in (n - s - 1)..=(n - 2) {
            assert!(set.is_disjoint(dom.preimage(i)), "n={n} a={a} s={s} i={i}");
        }
        assert!(dom.preimage(n - 1).is_subset(&set));
    }
}

#[test]
fn named_set_relations() {
    for (n, a) in [(8, 2), (8, 3), (10, 2)] {
        let dom = build_domain(ModelId::MaxPsA0, n, a, DEFAULT_CAP).unwrap();
        let idx =
            build_event_index(ModelId::MaxPsA0.program(), &dom, LiteralFilter::Weeded).unwrap();
        let s = named_sets(&dom, &idx).unwrap();
        assert!(s.g.is_disjoint(dom.preimage(n - 1)));
        assert_eq!(s.g.intersection(dom.preimage(n - 2)), *dom.preimage(n - 2));
        for k in 0..=n - 2 {
            assert_eq!(
                s.g.intersection(dom.preimage(k)),
                s.g_sat.intersection(dom.preimage(k))
            );
        }
        assert_eq!(s.h.intersection(dom.preimage(1)), s.w1);
        // H also holds a^{n-1}c, which the quadratic algorithm reaches after
        // the ξ_{n-1} block fails at its last comparison.
        let tail = dom.collect_set(|w| {
            w.word[..n - 1].iter().all(|&c| c == w.word[0]) && w.word[n - 1] != w.word[0]
        });
        assert_eq!(s.h.intersection(dom.preimage(0)), s.w0.union(&tail));
        assert_eq!(s.h, s.w0.union(&s.w1).union(&tail));
        let (ai, a1) = (a as usize, a as usize - 1);
        assert_eq!(s.w0.count(), ai * a1 * (ai - 2));
        assert_eq!(s.w1.count(), ai * a1);
    }
}

#[test]
fn named_sets_reject_other_models() {
    let dom = build_domain(ModelId::Xor, 6, 2, DEFAULT_CAP).unwrap();
    let idx = build_event_index(ModelId::Xor.program(), &dom, LiteralFilter::Weeded).unwrap();
    assert!(named_sets(&dom, &idx).is_err());
}

#[test]
fn primitive_counts_agree() {
    for a in 2..=4u32 {
        for s in 1..=10u32 {
            let g = gamma_mobius(s, a).unwrap();
            assert_eq!(g, gamma_recursive(s, a).unwrap());
            if (a as u64).pow(s) <= 1 << 20 {
                assert_eq!(
                    g as u64,
                    brute_primitive(s, a, WordConstraint::None, DEFAULT_CAP).unwrap()
                );
                if s >= 3 {
                    assert_eq!(
                        big_gamma_recursive(s, a).unwrap() as u64,
                        brute_primitive(s, a, WordConstraint::FirstEqualsThird, DEFAULT_CAP)
                            .unwrap()
                    );
                }
            }
        }
    }
    assert_eq!(gamma_mobius(6, 2).unwrap(), 54);
    assert!(is_primitive(&[0, 1, 0]) && !is_primitive(&[0, 1, 0, 1]));
}

#[test]
fn periodic_preimages_count_primitive_words() {
    for a in [2u32, 3] {
        for n in 2..=10usize {
            let counts = preimage_counts(n, a, DEFAULT_CAP).unwrap();
            for s in 1..=n / 2 {
                assert_eq!(
                    counts[n - s] as i128,
                    gamma_mobius(s as u32, a).unwrap(),
                    "n={n} s={s}"
                );
            }
            let dom = build_domain(ModelId::MaxPsA0, n, a, DEFAULT_CAP).unwrap();
            let g = dom.collect_set(|w| n < 3 || w.word[0] == w.word[2]);
            for s in 3..=n / 2 {
                assert_eq!(
                    g.intersection_count(dom.preimage(n - s)) as i128,
                    big_gamma_recursive(s as u32, a).unwrap()
                );
            }
        }
    }
}

#[test]
fn annexe_at_twelve() {
    let r = validate_annexe(12, 2, DEFAULT_CAP).unwrap();
    assert!(r.all_links_hold(), "{:?}", r.failing().collect::<Vec<_>>());
    assert!(r.d_g > r.d_g_lower && r.d_h <= r.d_h_upper);
    let ids: Vec<&str> = r.discrepancies.iter().map(|d| d.id.as_str()).collect();
    assert!(ids.contains(&"h-in-f0-is-w0"));
    assert!(validate_annexe(10, 2, DEFAULT_CAP).is_err());
    assert!(validate_annexe(13, 2, DEFAULT_CAP).is_err());
}
