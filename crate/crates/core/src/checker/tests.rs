use super::*;
use crate::rational::{int, ratio};

fn u() -> Poly3 {
    Poly3::var(Axis::U)
}
fn v() -> Poly3 {
    Poly3::var(Axis::V)
}
fn w() -> Poly3 {
    Poly3::var(Axis::W)
}

fn intro(b: i64, c: i64) -> NonlinearityTriple {
    NonlinearityTriple::new(
        &v().pow(5) - &u().pow(6),
        &w().pow(7) - &v().pow(5).scale(&int(b)),
        &u().pow(6) - &w().pow(7).scale(&int(c)),
    )
}

fn sampler() -> SamplerConfig {
    SamplerConfig { box_samples: 500, ..SamplerConfig::default() }
}

fn weights(a: i64, b: i64) -> IwscWeights {
    IwscWeights::new(int(a), int(b)).unwrap()
}

#[test]
fn ladder_is_zero_then_powers_of_two() {
    let l: Vec<Rational> = ladder().take(5).collect();
    assert_eq!(l, vec![int(0), int(1), int(2), int(4), int(8)]);
    assert_eq!(ladder().count(), 66);
}

#[test]
fn weights_reject_mixed_branches() {
    assert!(IwscWeights::new(int(2), ratio(1, 2)).is_err());
    assert!(IwscWeights::new(int(1), int(2)).is_err());
    assert!(IwscWeights::new(int(0), ratio(1, 2)).is_err());
    assert_eq!(weights(2, 3).branch(), Branch::Above1);
    assert_eq!(IwscWeights::new(ratio(1, 2), ratio(1, 3)).unwrap().branch(), Branch::Below1);
}

#[test]
fn quasi_positivity_examples() {
    let (l, q, r) = (2, 3, 2);
    let ex1 = NonlinearityTriple::new(
        &v().pow(l) - &u().pow(q),
        &w().pow(r) - &v().pow(l).scale(&int(3)),
        &u().pow(q) - &w().pow(r).scale(&int(3)),
    );
    assert!(check_quasi_positivity(&ex1, &sampler()).is_certified());

    let bad = NonlinearityTriple::new(-&v(), Poly3::zero(), Poly3::zero());
    match check_quasi_positivity(&bad, &sampler()) {
        Verdict::Falsified { witness } => {
            assert_eq!(witness.point, [0.0, 1.0, 0.0]);
            assert_eq!(witness.excess, int(1));
            assert_eq!(witness.label, "f(0,v,w)");
        }
        other => panic!("expected falsified, got {other:?}"),
    }
}

#[test]
fn quasi_positivity_unknown_when_nothing_is_found() {
    // v^2 - 2vw + w^2 = (v - w)^2 >= 0 but has a negative coefficient
    let p = &(&v().pow(2) - &(&v() * &w()).scale(&int(2))) + &w().pow(2);
    let n = NonlinearityTriple::new(p, Poly3::zero(), Poly3::zero());
    assert_eq!(check_quasi_positivity(&n, &sampler()), Verdict::Unknown);
}

#[test]
fn mass_control_examples() {
    let r = check_mass_control(&intro(5, 5), &sampler());
    assert!(r.verdict.is_certified());
    assert_eq!(r.constant, Some(int(0)));

    let conserving = NonlinearityTriple::new(&v() - &u(), &w() - &v(), &u() - &w());
    assert_eq!(check_mass_control(&conserving, &sampler()).constant, Some(int(0)));

    let uvw = &(&u() * &v()) * &w();
    let cubic = NonlinearityTriple::new(uvw.clone(), uvw.clone(), uvw);
    let r = check_mass_control(&cubic, &sampler());
    let witness = r.verdict.witness().expect("falsified");
    // found on the diagonal ray
    assert_eq!(witness.point[0], witness.point[1]);
    assert_eq!(witness.point[1], witness.point[2]);
    assert!(r.constant.is_none());
}

#[test]
fn mass_control_constant_is_least_on_ladder() {
    let n = NonlinearityTriple::new(u().scale(&int(3)), Poly3::constant(int(1)), Poly3::zero());
    let r = check_mass_control(&n, &sampler());
    assert_eq!(r.constant, Some(int(4)));
    assert!(!Poly3::lambda().scale(&int(2)).dominates(&n.sum()));
}

#[test]
fn iwsc_examples() {
    let r = check_iwsc(&intro(5, 5), &weights(4, 4), &sampler());
    assert!(r.verdict.is_certified());
    assert_eq!(r.constants, [Some(int(0)), Some(int(0)), Some(int(0))]);
    assert!(r.all_constants_zero());

    let rows = iwsc_rows(&intro(5, 5), &weights(4, 4));
    let expected_row1 =
        &(&v().pow(5).scale(&int(4 - 5)) + &u().pow(6).scale(&int(1 - 4))) + &w().pow(7).scale(&int(1 - 5));
    assert_eq!(rows[0], expected_row1);

    let r = check_iwsc(&intro(5, 5), &weights(6, 6), &sampler());
    let witness = r.rows[0].verdict.witness().expect("row 1 falsified");
    assert_eq!(witness.point[0], 0.0);
    assert!(witness.point[1] > 0.0);
    assert_eq!(witness.point[2], 0.0);

    let r = check_iwsc(&NonlinearityTriple::zero(), &weights(3, 7), &sampler());
    assert!(r.verdict.is_certified());
    assert!(r.all_constants_zero());
}

#[test]
fn growth_examples() {
    assert_eq!(check_growth(&intro(5, 5)).m, 7);
    let lam = NonlinearityTriple::new(Poly3::lambda(), Poly3::lambda(), Poly3::lambda());
    let g = check_growth(&lam);
    assert_eq!((g.m, g.big_m), (1, Some(int(1))));
    let ex1 = NonlinearityTriple::new(
        &v().pow(2) - &u().pow(2),
        &w().pow(2) - &v().pow(2).scale(&int(2)),
        &u().pow(2) - &w().pow(2).scale(&int(2)),
    );
    assert_eq!(check_growth(&ex1).m, 2);
    assert_eq!(check_growth(&NonlinearityTriple::zero()).m, 1);
}

#[test]
fn growth_constant_accounts_for_multinomials() {
    // 5uv <= M (1+u+v+w)^2 needs M*2 >= 5
    let n = NonlinearityTriple::new((&u() * &v()).scale(&int(5)), Poly3::zero(), Poly3::zero());
    assert_eq!(check_growth(&n).big_m, Some(int(4)));
}

#[test]
fn isc_examples() {
    let r = check_isc(&intro(5, 5), &int(1), &IscMatrix::identity(), &sampler()).unwrap();
    let witness = r.rows[0].verdict.witness().expect("f alone is unbounded by K*Lambda");
    assert_eq!((witness.point[0], witness.point[2]), (0.0, 0.0));
    assert!(witness.point[1] > 0.0);
    assert!(r.verdict.is_falsified());

    let zero = check_isc(&NonlinearityTriple::zero(), &int(1), &IscMatrix::identity(), &sampler());
    assert!(zero.unwrap().verdict.is_certified());

    let neg = NonlinearityTriple::new(-&u(), -&v(), -&w());
    let r = check_isc(&neg, &int(1), &IscMatrix::identity(), &sampler()).unwrap();
    assert!(r.verdict.is_certified());

    assert!(check_isc(&neg, &ratio(1, 2), &IscMatrix::identity(), &sampler()).is_err());
}

#[test]
fn isc_fractional_exponent_brackets() {
    // u^2 <= K Lambda^(3/2) is false; u <= K Lambda^(3/2) certifies via Lambda^1.
    let sq = NonlinearityTriple::new(u().pow(2), Poly3::zero(), Poly3::zero());
    let r = check_isc(&sq, &ratio(3, 2), &IscMatrix::identity(), &sampler()).unwrap();
    assert_eq!(r.verdict, Verdict::Unknown);
    let lin = NonlinearityTriple::new(u(), Poly3::zero(), Poly3::zero());
    let r = check_isc(&lin, &ratio(3, 2), &IscMatrix::identity(), &sampler()).unwrap();
    assert!(r.verdict.is_certified());
    let cube = NonlinearityTriple::new(u().pow(3), Poly3::zero(), Poly3::zero());
    let r = check_isc(&cube, &ratio(3, 2), &IscMatrix::identity(), &sampler()).unwrap();
    assert!(r.verdict.is_falsified());
}

#[test]
fn isc_matrix_validation() {
    let z = || int(0);
    let o = || int(1);
    assert!(IscMatrix::new([[o(), o(), z()], [z(), o(), z()], [z(), z(), o()]]).is_err());
    assert!(IscMatrix::new([[o(), z(), z()], [int(-1), o(), z()], [z(), z(), o()]]).is_err());
    assert!(IscMatrix::new([[o(), z(), z()], [o(), z(), z()], [z(), z(), o()]]).is_err());
    assert!(IscMatrix::new([[o(), z(), z()], [o(), o(), z()], [o(), int(2), o()]]).is_ok());
}

#[test]
fn iwsc_and_isc_separate_on_intro_triple() {
    let report = check_all(&intro(5, 5), &weights(4, 4), &int(1), &sampler()).unwrap();
    assert_eq!(report.overall(), Overall::AllCertified);
    assert!(report.all_constants_zero());
    assert!(report.isc.verdict.is_falsified());
}

fn grid_samples(n: usize) -> Vec<[Rational; 3]> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    (0..n).map(|_| std::array::from_fn(|_| ratio(rng.random_range(0..10_000), 100))).collect()
}

#[test]
fn liws_examples() {
    let pts = grid_samples(2000);
    let p = lemma_liws_probe(&-&u(), &Poly3::zero(), &int(3), &int(0), &int(0), &int(2), &pts).unwrap();
    assert!(p.holds());
    assert_eq!(p.checked, 2000);

    let phi = &u() - &v();
    let p = lemma_liws_probe(&phi, &v(), &int(2), &int(2), &int(2), &ratio(3, 2), &pts).unwrap();
    assert!(p.holds());

    let p =
        lemma_liws_probe(&Poly3::zero(), &Poly3::lambda(), &ratio(1, 3), &int(1), &int(1), &ratio(1, 2), &pts).unwrap();
    assert!(p.holds());
}

#[test]
fn liws_rejects_bad_preconditions() {
    let pts = grid_samples(10);
    let phi = &u() - &v();
    // alpha* outside [1, alpha]
    assert!(lemma_liws_probe(&phi, &v(), &int(2), &int(2), &int(2), &int(3), &pts).is_err());
    // premise not certified
    assert!(lemma_liws_probe(&u().pow(2), &Poly3::zero(), &int(2), &int(1), &int(1), &int(1), &pts).is_err());
    assert!(lemma_liws_probe(&phi, &v(), &int(0), &int(2), &int(2), &int(1), &pts).is_err());
    assert!(lemma_liws_probe(&phi, &v(), &int(2), &int(-1), &int(2), &int(1), &pts).is_err());
}

#[test]
fn report_serializes_with_stable_field_order() {
    let report = check_all(&intro(5, 5), &weights(4, 4), &int(1), &sampler()).unwrap();
    let s = serde_json::to_string(&report).unwrap();
    let keys = ["\"quasi_positive\"", "\"mass_control\"", "\"iwsc\"", "\"growth\"", "\"isc\""];
    let pos: Vec<usize> = keys.iter().map(|k| s.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
    let back: ConditionReport = serde_json::from_str(&s).unwrap();
    assert_eq!(back, report);
}

#[test]
fn verdicts_are_deterministic_per_seed() {
    let uvw = &(&u() * &v()) * &w();
    let n = NonlinearityTriple::new(uvw.clone(), -&uvw, Poly3::zero());
    let a = check_all(&n, &weights(2, 2), &int(1), &SamplerConfig::with_seed(5)).unwrap();
    let b = check_all(&n, &weights(2, 2), &int(1), &SamplerConfig::with_seed(5)).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}
