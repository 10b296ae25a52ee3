use ana_dof::channel_model::Seed;
use ana_dof::entropy_oracle::{
    random_lemma_sweep, verify_essential_lemma, EntropyProfile, ExchangeableSource, LemmaStatus,
};

#[test]
fn thousand_random_mixtures_satisfy_the_lemma() {
    let sweep = random_lemma_sweep(1000, 5, 3, Seed(2024), 1e-9).unwrap();
    assert_eq!(sweep.count, 1000);
    assert!(sweep.pass);
    assert!(sweep.hypothesis_violations.is_empty());
    assert!(sweep.worst_margin_ess1.unwrap() >= -1e-9);
    assert!(sweep.worst_margin_ess2.unwrap() >= -1e-9);
}

#[test]
fn profiles_are_concave_and_nondecreasing() {
    for i in 0..200 {
        let s = ExchangeableSource::random(2 + (i % 4) as usize, 2 + (i % 2) as usize, Seed(i)).unwrap();
        let p = EntropyProfile::of(&s.joint());
        assert_eq!(p.values[0], 0.0);
        assert!(p.values.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!(p.second_differences().iter().all(|&d| d <= 1e-9));
    }
}

#[test]
fn iid_sources_meet_the_second_inequality_with_equality() {
    for marginal in [vec![0.5, 0.5], vec![0.2, 0.3, 0.5], vec![0.1, 0.9]] {
        let s = ExchangeableSource::iid(5, marginal).unwrap();
        let r = verify_essential_lemma(&s.into(), 1e-9);
        assert_eq!(r.status, LemmaStatus::Pass);
        assert!(r.ess2.iter().all(|e| e.margin.abs() < 1e-9));
    }
}
