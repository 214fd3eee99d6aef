use entropic_core::domain::DEFAULT_CAP;
use entropic_core::entropy::{
    df_check, df_check_occurrence, formula_set, mdf_check, mdf_check_occurrence,
};
use entropic_core::entropy::{logical_step_prob, logical_uncertainty, TOLERANCE};
use entropic_core::models::{a_pow_b, xi_key};
use entropic_core::prog::default_budget;
use entropic_core::symimg::weed;
use entropic_core::{
    build_domain, build_event_index, check_bounds, class_weights, delta, entropic_weight,
    entropic_weight_alt, run, trace_profile, weighted_volume_profile, Domain, InputInstance,
    InputSet, LiteralFilter, ModelId, TraceLiteral,
};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;

/// The entropic weight written out with plain floating point over the preimage counts.
fn naive_weight(dom: &Domain, s: &InputSet) -> f64 {
    let m = dom.m() as f64;
    let p: Vec<f64> = dom
        .preimages()
        .iter()
        .map(|f| s.intersection_count(f) as f64 / (m * f.count() as f64))
        .collect();
    let total: f64 = p.iter().sum();
    p.iter()
        .filter(|&&x| x > 0.0)
        .map(|x| -x * (x / total).log2())
        .sum()
}

#[test]
fn d1_to_d3() {
    for (m, n, a) in [
        (ModelId::MaxPsA0, 3, 2),
        (ModelId::MaxPsA0, 6, 3),
        (ModelId::Xor, 8, 2),
    ] {
        let dom = build_domain(m, n, a, DEFAULT_CAP).unwrap();
        let full = dom.full_set();
        let log_m = (dom.m() as f64).log2();
        assert!((entropic_weight(&dom, &full) - log_m).abs() < TOLERANCE);
        assert!((entropic_weight_alt(&dom, &full) - log_m).abs() < TOLERANCE);
        assert_eq!(entropic_weight(&dom, &dom.empty_set()), 0.0);
        for f in dom.preimages() {
            assert_eq!(entropic_weight(&dom, f), 0.0);
            let half = InputSet::from_indices(dom.len(), f.ones().step_by(2));
            assert_eq!(entropic_weight(&dom, &half), 0.0);
        }
    }
    let dom = build_domain(ModelId::MaxPsA0, 3, 2, DEFAULT_CAP).unwrap();
    assert!((entropic_weight(&dom, &dom.full_set()) - 3f64.log2()).abs() < TOLERANCE);
}

#[test]
fn small_example_against_direct_sum() {
    let dom = build_domain(ModelId::MaxPsA0, 3, 2, DEFAULT_CAP).unwrap();
    // aab has border 0, aba border 1
    let s = InputSet::from_indices(dom.len(), [1, 2]);
    let p0: f64 = 1.0 / 12.0;
    let p1: f64 = 1.0 / 6.0;
    let p = p0 + p1;
    let direct = -p0 * (p0 / p).log2() - p1 * (p1 / p).log2();
    assert!((entropic_weight(&dom, &s) - direct).abs() < TOLERANCE);
    assert!((entropic_weight(&dom, &s) - 0.229572).abs() < 1e-5);
}

#[test]
fn delta_examples() {
    let dom = build_domain(ModelId::MaxPsA0, 5, 2, DEFAULT_CAP).unwrap();
    let m = dom.m();
    let all: Vec<usize> = (0..m).collect();
    let s = InputSet::from_indices(dom.len(), (0..dom.len()).step_by(3));
    assert!((delta(&dom, &s, &all) - entropic_weight(&dom, &s)).abs() < TOLERANCE);
    let single = (m as f64).log2() / m as f64;
    assert!((delta(&dom, &dom.full_set(), &[2]) - single).abs() < TOLERANCE);
    assert_eq!(delta(&dom, &dom.empty_set(), &all), 0.0);
    let r = check_bounds(&dom, &dom.full_set(), &[2]);
    assert!(r.all_hold());
    assert!(r.checks[0].slack.abs() < TOLERANCE);
    let inside = InputSet::from_indices(dom.len(), dom.preimage(1).ones().take(3));
    let r = check_bounds(&dom, &inside, &[1]);
    assert!(r.all_hold() && r.skipped.is_empty());
    assert_eq!(delta(&dom, &inside, &[1]), 0.0);
    let r = check_bounds(&dom, &dom.full_set(), &[0, 1]);
    assert_eq!(r.skipped.len(), 1);
}

#[test]
fn logical_uncertainty_examples() {
    assert!((logical_uncertainty(4, 1).unwrap() - 2.0).abs() < TOLERANCE);
    assert!((logical_uncertainty(2, 1).unwrap() - 1.0).abs() < TOLERANCE);
    assert!((logical_uncertainty(4, 3).unwrap() - (2.0 - 0.75 * 3f64.log2())).abs() < TOLERANCE);
    assert!(logical_uncertainty(1, 0).is_err());
    assert!(logical_uncertainty(4, 4).is_err());
    let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    assert_eq!(logical_step_prob(10, 1).unwrap(), q(1, 10));
    assert_eq!(logical_step_prob(10, 2).unwrap(), q(9, 80));
    assert_eq!(logical_step_prob(3, 0).unwrap(), q(2, 9));
}

#[test]
fn xor_prefix_classes_weigh_two_to_minus_k() {
    let n = 8;
    let dom = build_domain(ModelId::Xor, n, 2, DEFAULT_CAP).unwrap();
    let p = ModelId::Xor.program();
    let idx = build_event_index(p, &dom, LiteralFilter::Essential).unwrap();
    let w = class_weights(&dom, &idx);
    for c in idx.classes() {
        if c.literal.is_output() {
            assert_eq!(w.get(&c.key).unwrap(), 0.0);
            continue;
        }
        let k = (c.first_time as usize - 2) / 3;
        assert_eq!(c.first_time, c.last_time);
        assert_eq!(c.occurrence.count(), 1 << (n - k));
        let expected = if k < n { 0.5f64.powi(k as i32) } else { 0.0 };
        assert!(
            (w.get(&c.key).unwrap() - expected).abs() < TOLERANCE,
            "{}",
            c.key
        );
    }
    let x = dom.input(0b10110010);
    let prof = trace_profile(p, &dom, &idx, &w, &x).unwrap();
    for k in 1..n {
        let d = prof.at(2 + 3 * k as u32).unwrap().d;
        assert!((d - 0.5f64.powi(k as i32)).abs() < TOLERANCE);
    }
    let times: Vec<u32> = prof.points.iter().map(|p| p.t).collect();
    assert!(times.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn xor_weighted_volume() {
    // Every level k < n contributes 2^k classes of weight 2^-k; the last
    // level fixes the whole word, so its classes weigh 0.
    for n in [4, 6, 8] {
        let dom = build_domain(ModelId::Xor, n, 2, DEFAULT_CAP).unwrap();
        let idx =
            build_event_index(ModelId::Xor.program(), &dom, LiteralFilter::Essential).unwrap();
        let v = weighted_volume_profile(&dom, &idx, &class_weights(&dom, &idx));
        for k in 0..=n {
            let expected = (n - k) as f64;
            assert!(
                (v.at(2 + 3 * k as u32).unwrap() - expected).abs() < TOLERANCE,
                "n={n} k={k}"
            );
        }
        assert_eq!(v.points.last().unwrap().volume, 0.0);
    }
}

#[test]
fn volumes_are_nonincreasing() {
    for m in ModelId::ALL {
        for n in [4, 6, 7] {
            let a = if m == ModelId::Xor { 2 } else { 3 };
            let dom = build_domain(m, n, a, DEFAULT_CAP).unwrap();
            let idx = build_event_index(m.program(), &dom, LiteralFilter::Essential).unwrap();
            let v = weighted_volume_profile(&dom, &idx, &class_weights(&dom, &idx));
            assert!(
                v.points.windows(2).all(|w| w[0].volume >= w[1].volume),
                "{m} n={n}"
            );
            assert!(v.points[0].volume >= v.init_weight);
        }
    }
}

#[test]
fn maxps_trace_profile_jumps_after_zero() {
    let n = 8;
    let dom = build_domain(ModelId::MaxPsA0, n, 2, DEFAULT_CAP).unwrap();
    let p = ModelId::MaxPsA0.program();
    let idx = build_event_index(p, &dom, LiteralFilter::Essential).unwrap();
    let w = class_weights(&dom, &idx);
    let prof = trace_profile(p, &dom, &idx, &w, &a_pow_b(n, 2)).unwrap();
    let zero = prof
        .points
        .iter()
        .position(|q| q.literal_key == xi_key(n, n - 1, n - 1))
        .unwrap();
    assert_eq!(prof.points[zero].d, 0.0);
    assert_eq!(prof.points[zero + 1].literal_key, xi_key(n, n - 2, 1));
    assert!(prof.points[zero + 1].d > 0.1);
    let csv = prof.to_csv();
    assert!(csv.starts_with("t,literal_key,D\n"));
    assert!(csv.contains("\"G(ne,w(7),w(8))\",0\n"));
}

fn weeded_literals(m: ModelId, x: &InputInstance) -> Vec<TraceLiteral> {
    let p = m.program();
    let t = run(p, x, default_budget(x.n())).unwrap();
    weed(p, &t)
        .unwrap()
        .entries
        .into_iter()
        .map(|e| e.literal)
        .collect()
}

#[test]
fn defining_formula_examples() {
    let n = 6;
    let m = ModelId::MaxPsA0;
    let dom = build_domain(m, n, 2, DEFAULT_CAP).unwrap();
    let p = m.program();
    let idx = build_event_index(p, &dom, LiteralFilter::Weeded).unwrap();
    let x = a_pow_b(n, 2);
    let lits = weeded_literals(m, &x);
    let last_guard = lits
        .iter()
        .find(|l| l.key(p) == xi_key(n, n - 1, n - 1))
        .unwrap()
        .clone();
    let first = lits[0].clone();

    assert!(df_check_occurrence(
        &dom,
        &idx,
        p,
        std::slice::from_ref(&last_guard),
        &x
    ));
    assert!(mdf_check_occurrence(
        &dom,
        &idx,
        p,
        std::slice::from_ref(&last_guard),
        &x
    ));
    assert!(!mdf_check_occurrence(
        &dom,
        &idx,
        p,
        &[last_guard.clone(), first.clone()],
        &x
    ));
    assert!(df_check_occurrence(&dom, &idx, p, &lits, &x));
    assert!(!mdf_check_occurrence(&dom, &idx, p, &lits, &x));
    assert!(!df_check(&dom, &[], &x));

    // Read as a plain constraint on the input, w(n-1) != w(n) does not force
    // the result: ababab satisfies it and has border 4.
    assert!(!df_check(&dom, std::slice::from_ref(&last_guard), &x));
    let sat = formula_set(&dom, &[&last_guard]);
    let abab = InputInstance::parse("ababab", 2).unwrap();
    assert!(sat.contains(dom.index_of(&abab).unwrap()));
    assert!(df_check(&dom, &lits, &x));
    assert!(!mdf_check(&dom, &lits, &x));
}

#[test]
fn full_traces_define_their_output() {
    for m in ModelId::ALL {
        for n in [4, 6, 8] {
            let a = 2;
            let dom = build_domain(m, n, a, DEFAULT_CAP).unwrap();
            let p = m.program();
            let idx = build_event_index(p, &dom, LiteralFilter::Weeded).unwrap();
            for i in 0..dom.len() {
                let x = dom.input(i);
                let lits = weeded_literals(m, &x);
                assert!(
                    df_check(&dom, &lits, &x),
                    "{m} {}",
                    x.render(m == ModelId::Xor)
                );
                assert!(df_check_occurrence(&dom, &idx, p, &lits, &x));
            }
        }
    }
}

fn random_set(dom: &Domain, seed: &[u8]) -> InputSet {
    InputSet::from_indices(
        dom.len(),
        (0..dom.len()).filter(|i| seed[i % seed.len()] & (1 << (i % 8)) != 0),
    )
}

fn domains() -> &'static [Domain] {
    static DOMS: std::sync::OnceLock<Vec<Domain>> = std::sync::OnceLock::new();
    DOMS.get_or_init(|| {
        vec![
            build_domain(ModelId::MaxPsA0, 8, 2, DEFAULT_CAP).unwrap(),
            build_domain(ModelId::MaxPsA0, 6, 3, DEFAULT_CAP).unwrap(),
            build_domain(ModelId::Xor, 10, 2, DEFAULT_CAP).unwrap(),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn both_forms_agree(d in 0usize..3, seed in prop::collection::vec(any::<u8>(), 1..64)) {
        let dom = &domains()[d];
        let s = random_set(dom, &seed);
        let a = entropic_weight(dom, &s);
        prop_assert!((a - entropic_weight_alt(dom, &s)).abs() <= TOLERANCE);
        prop_assert!((a - naive_weight(dom, &s)).abs() <= 1e-9);
        prop_assert!(a >= 0.0 && a <= (dom.m() as f64).log2() + TOLERANCE);
    }

    #[test]
    fn weight_is_monotone(d in 0usize..3, a in prop::collection::vec(any::<u8>(), 1..64), b in prop::collection::vec(any::<u8>(), 1..64)) {
        let dom = &domains()[d];
        let s0 = random_set(dom, &a);
        let s1 = s0.union(&random_set(dom, &b));
        prop_assert!(entropic_weight(dom, &s0) <= entropic_weight(dom, &s1) + TOLERANCE);
    }

    #[test]
    fn delta_bounds_hold(d in 0usize..3, seed in prop::collection::vec(any::<u8>(), 1..64), jmask in any::<u32>(), restrict in any::<bool>()) {
        let dom = &domains()[d];
        let m = dom.m();
        let j: Vec<usize> = (0..m).filter(|k| jmask & (1 << k) != 0).collect();
        let mut s = random_set(dom, &seed);
        if restrict {
            let mut inside = dom.empty_set();
            for &k in &j {
                inside.union_with(dom.preimage(k));
            }
            s.intersect_with(&inside);
        }
        let r = check_bounds(dom, &s, &j);
        prop_assert!(r.all_hold(), "{:?}", r);
        if restrict && !j.is_empty() {
            prop_assert!(r.checks.iter().any(|c| c.name == "delta-le-pr-log-j"));
        }
        let pr = dom.measure(&s).to_f64().unwrap();
        prop_assert!(delta(dom, &s, &j) <= pr * (m as f64).log2() + TOLERANCE);
    }
}
