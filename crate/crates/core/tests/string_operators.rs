use fractal_spectra::measure::{MeasureGrid, SlConstants};
use fractal_spectra::sturm_liouville::{
    eigensolve_oracle, generating_set, shoot, spectrum_hn, HnIndex, SturmCounter,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn generating_set_is_simple_and_increasing(alpha in 0.15f64..0.5) {
        let c = SlConstants::new(alpha).unwrap();
        let set = generating_set(6, &c, 9).unwrap();
        prop_assert!(set.values[0] > 0.0);
        prop_assert!(set.values.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn level_spectrum_splits_into_rescaled_and_new_values(alpha in 0.15f64..0.5) {
        // Eigenvalues of the level-(n+1) grid below a cutoff are the rescaled level-n
        // eigenvalues plus the generating-set values.
        let c = SlConstants::new(alpha).unwrap();
        let set = generating_set(8, &c, 8).unwrap();
        let cutoff = set.values[7] * 0.999;
        let fine = SturmCounter::new(&MeasureGrid::build(9, &c)).count(cutoff);
        let coarse = SturmCounter::new(&MeasureGrid::build(8, &c)).count(cutoff / c.gamma());
        let from_set = set.values.iter().filter(|&&v| v < cutoff).count();
        prop_assert_eq!(fine, coarse + from_set);
    }
}

#[test]
fn union_spectrum_tracks_oracle_at_third() {
    let c = SlConstants::new(1.0 / 3.0).unwrap();
    let set = generating_set(40, &c, 12).unwrap();
    let union = spectrum_hn(HnIndex::Finite(0), 0, 20, &set).unwrap().below(set.values[39]);
    let oracle = eigensolve_oracle(union.len(), &MeasureGrid::build(12, &c)).unwrap();
    // The set carries the accuracy of the next finer grid, so the two differ by the
    // level-12 discretization error, largest at the top of the range.
    for (u, o) in union.values().zip(oracle.values()) {
        assert!((u - o).abs() < 5e-4 * u, "{u} vs {o}");
    }
}

#[test]
fn shooting_solution_vanishes_at_eigenvalues() {
    let c = SlConstants::new(0.4).unwrap();
    let grid = MeasureGrid::build(10, &c);
    let counter = SturmCounter::new(&grid);
    for k in 1..=5 {
        let lambda = counter.eigenvalue(k);
        let f = shoot(lambda, &grid);
        let end = f.values.last().unwrap().abs();
        let scale = f.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(end < 1e-8 * scale, "k = {k}");
        // The k-th eigenfunction has k - 1 interior sign changes.
        let changes = f.values[1..f.values.len() - 1].windows(2).filter(|w| w[0] * w[1] < 0.0).count();
        assert_eq!(changes, k - 1);
    }
}
