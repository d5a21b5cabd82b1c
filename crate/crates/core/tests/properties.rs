use jensen_sharp::bounds::{curvature_bounds, jensen_bounds, sample_bounds};
use jensen_sharp::distributions::DistributionSpec;
use jensen_sharp::functions::{make_catalog_function, CatalogKind, FunctionSpec};
use jensen_sharp::oracle::{estimate_conditional_gap, estimate_gap, estimate_gap_with, OracleConfig};
use jensen_sharp::partition::{build_partition, partition_bounds};
use proptest::prelude::*;

fn law() -> impl Strategy<Value = DistributionSpec> {
    prop_oneof![
        (-3.0..3.0f64, 0.2..2.0f64).prop_map(|(m, s)| DistributionSpec::normal(m, s).unwrap()),
        (0.3..4.0f64).prop_map(|r| DistributionSpec::exponential(r).unwrap()),
        (0.1..5.0f64, 0.5..10.0f64).prop_map(|(lo, w)| DistributionSpec::uniform(lo, lo + w).unwrap()),
        prop::collection::vec(0.05..30.0f64, 2..40).prop_map(|xs| DistributionSpec::empirical(xs).unwrap()),
    ]
}

fn positive_function() -> impl Strategy<Value = FunctionSpec> {
    prop_oneof![
        (-1.0..1.0f64).prop_filter("t != 0", |t| t.abs() > 0.05).prop_map(|t| {
            make_catalog_function(CatalogKind::ExpScaled { t }).unwrap()
        }),
        prop::sample::select(vec![-1.0, -0.5, 0.5, 1.5, 2.0, 3.0])
            .prop_map(|p| make_catalog_function(CatalogKind::Power { p }).unwrap()),
        Just(make_catalog_function(CatalogKind::NegLog).unwrap()),
    ]
}

fn fits(f: &FunctionSpec, d: &DistributionSpec) -> bool {
    d.support().is_subset_of(&f.natural_domain())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cells_recover_total_mass_mean_and_variance(d in law(), m in 1usize..6) {
        let cuts = d.equal_probability_cuts(m).unwrap();
        let plan = build_partition(&d, &cuts).unwrap();
        let scale = d.mean().abs().max(d.sd()).max(1.0);
        prop_assert!((plan.total_prob() - 1.0).abs() < 1e-12);
        prop_assert!((plan.coarse.mean() - d.mean()).abs() < 1e-8 * scale);
        let within: f64 = plan.cells.iter().map(|c| c.stats.prob * c.stats.variance).sum();
        let total = within + plan.coarse.variance();
        prop_assert!((total - d.variance()).abs() < 1e-8 * scale * scale, "{total} vs {}", d.variance());
    }

    #[test]
    fn h_bounds_nest_inside_curvature_bounds(d in law(), f in positive_function()) {
        prop_assume!(fits(&f, &d));
        let h = jensen_bounds(&f, &d).unwrap();
        let c = curvature_bounds(&f, &d).unwrap();
        let slack = 1e-12 * h.lower.abs().max(1.0);
        prop_assert!(c.lower <= h.lower + slack, "{c:?} vs {h:?}");
        prop_assert!(h.upper <= c.upper + slack * h.upper.abs().max(1.0), "{c:?} vs {h:?}");
        prop_assert!(h.lower <= h.upper);
    }

    #[test]
    fn quadratic_bounds_are_exact(d in law(), c2 in -3.0..3.0f64, c1 in -3.0..3.0f64) {
        let f = make_catalog_function(CatalogKind::Quadratic { c2, c1, c0: 0.5 }).unwrap();
        let b = jensen_bounds(&f, &d).unwrap();
        let want = c2 * d.variance();
        let tol = 1e-10 * want.abs().max(1.0);
        prop_assert!((b.lower - want).abs() < tol && (b.upper - want).abs() < tol, "{b:?} vs {want}");
    }

    #[test]
    fn single_cell_partition_is_the_plain_bound(d in law(), f in positive_function()) {
        prop_assume!(fits(&f, &d));
        let plan = build_partition(&d, &[]).unwrap();
        let p = partition_bounds(&f, &plan).unwrap().bounds;
        let j = jensen_bounds(&f, &d).unwrap();
        prop_assert_eq!(p.lower, j.lower);
        prop_assert_eq!(p.upper, j.upper);
    }

    #[test]
    fn conditional_gaps_rebuild_the_full_gap(d in law(), f in positive_function(), m in 2usize..5) {
        prop_assume!(fits(&f, &d));
        let full = estimate_gap(&f, &d, 100_000).unwrap();
        prop_assume!(full.value.is_finite());
        let cuts = d.equal_probability_cuts(m).unwrap();
        let plan = build_partition(&d, &cuts).unwrap();
        let mut rebuilt = -f.eval(d.mean());
        let mut err = full.error_bound;
        for cell in &plan.cells {
            let g = estimate_conditional_gap(&f, &d, &cell.interval, 100_000).unwrap();
            rebuilt += cell.stats.prob * (g.value + f.eval(cell.stats.mean));
            err += cell.stats.prob * g.error_bound;
        }
        let scale = f.eval(d.mean()).abs().max(full.value.abs()).max(1.0);
        prop_assert!((rebuilt - full.value).abs() <= 3.0 * err + 1e-8 * scale, "{rebuilt} vs {full:?}");
    }

    #[test]
    fn sample_bounds_bracket_the_sample_gap(xs in prop::collection::vec(0.05..50.0f64, 2..60), f in positive_function()) {
        let b = sample_bounds(&f, &xs).unwrap();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let gap = xs.iter().map(|&x| f.eval(x)).sum::<f64>() / n - f.eval(mean);
        let slack = 1e-9 * f.eval(mean).abs().max(1.0);
        prop_assert!(b.lower - slack <= gap && gap <= b.upper + slack, "{gap} outside {b:?}");
    }
}

#[test]
fn monte_carlo_error_shrinks_like_inverse_root_n() {
    let f = make_catalog_function(CatalogKind::ExpScaled { t: 0.5 }).unwrap();
    let d = DistributionSpec::normal(0.0, 1.0).unwrap();
    let errs: Vec<f64> = [10_000, 100_000, 1_000_000]
        .into_iter()
        .map(|n| estimate_gap_with(&f, &d, OracleConfig::MonteCarlo { n, seed: 42 }).unwrap().error_bound)
        .collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!(ratio > 10f64.sqrt() / 2.0 && ratio < 10f64.sqrt() * 2.0, "{errs:?}");
    }
}

#[test]
fn same_seed_same_estimate() {
    let f = make_catalog_function(CatalogKind::Power { p: 2.5 }).unwrap();
    let d = DistributionSpec::exponential(1.5).unwrap();
    let cfg = OracleConfig::MonteCarlo { n: 50_000, seed: 9 };
    let a = estimate_gap_with(&f, &d, cfg).unwrap();
    let b = estimate_gap_with(&f, &d, cfg).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.error_bound.to_bits(), b.error_bound.to_bits());
    let other = estimate_gap_with(&f, &d, OracleConfig::MonteCarlo { n: 50_000, seed: 10 }).unwrap();
    assert_ne!(a.value, other.value);
}
