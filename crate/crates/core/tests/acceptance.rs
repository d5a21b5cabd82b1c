use std::time::{Duration, Instant};

use jensen_sharp::bounds::{curvature_bounds, h_direct, h_extrema, jensen_bounds, power_mean_bounds, sample_bounds, GapBounds};
use jensen_sharp::distributions::DistributionSpec;
use jensen_sharp::functions::{make_catalog_function, CatalogKind, FunctionSpec, PhiPrimeShape};
use jensen_sharp::interval::SupportInterval;
use jensen_sharp::oracle::{estimate_gap, GapEstimate};
use jensen_sharp::partition::{build_partition, partition_bounds};
use jensen_sharp::samples::reference_sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Checks {
    name: &'static str,
    failures: Vec<String>,
    count: usize,
}

impl Checks {
    fn new(name: &'static str) -> Self {
        Self { name, failures: Vec::new(), count: 0 }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.count += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn near(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        self.check((got - want).abs() <= tol, || {
            format!("{label}: got {got}, want {want} +/- {tol} (off by {:.3e})", (got - want).abs())
        });
    }

    fn finish(self, elapsed: Duration, limit: Duration) {
        let mut failures = self.failures;
        if elapsed > limit {
            failures.push(format!("took {elapsed:?}, limit {limit:?}"));
        }
        let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
        println!("{verdict}  {} ({} checks, {elapsed:.2?})", self.name, self.count);
        for f in &failures {
            println!("      {f}");
        }
        assert!(failures.is_empty(), "{} failed", self.name);
    }
}

fn cat(k: CatalogKind) -> FunctionSpec {
    make_catalog_function(k).unwrap()
}

fn brackets(b: &GapBounds, g: &GapEstimate) -> bool {
    let slack = 3.0 * g.error_bound;
    g.value >= b.lower - slack && g.value <= b.upper + slack
}

#[test]
fn criterion_1_exponential_example() {
    let start = Instant::now();
    let mut c = Checks::new("criterion 1: exp(x/2) under Exponential(1)");
    let f = cat(CatalogKind::ExpScaled { t: 0.5 });
    let d = DistributionSpec::exponential(1.0).unwrap();
    let b = jensen_bounds(&f, &d).unwrap();
    c.near("lower vs closed form", b.lower, 1.0 - 0.5 * 0.5f64.exp(), 1e-10);
    c.near("lower vs 0.176", b.lower, 0.176, 5e-4);
    c.check(b.upper == f64::INFINITY, || format!("upper {} is not inf", b.upper));
    let cb = curvature_bounds(&f, &d).unwrap();
    c.near("curvature lower", cb.lower, 0.125, 1e-9);
    let g = estimate_gap(&f, &d, 1_000_000).unwrap();
    c.near("oracle gap", g.value, 2.0 - 0.5f64.exp(), 1e-8);
    c.check(brackets(&b, &g), || format!("{g:?} outside {b:?}"));
    c.finish(start.elapsed(), Duration::from_secs(1));
}

#[test]
fn criterion_2_normal_tertiles() {
    let start = Instant::now();
    let mut c = Checks::new("criterion 2: exp(x) under Normal(0,1), three equal cells");
    let f = cat(CatalogKind::ExpScaled { t: 1.0 });
    let d = DistributionSpec::normal(0.0, 1.0).unwrap();
    let cuts = d.equal_probability_cuts(3).unwrap();
    c.check(cuts.len() == 2, || format!("cuts {cuts:?}"));
    c.near("cut 1", cuts[0], -0.431, 1e-3);
    c.near("cut 2", cuts[1], 0.431, 1e-3);
    let plan = build_partition(&d, &cuts).unwrap();
    let pb = partition_bounds(&f, &plan).unwrap();
    let means = [-1.091, 0.0, 1.091];
    let vars = [0.280, 0.060, 0.280];
    let infs = [0.0, 0.435, 1.209];
    let sups = [0.212, 0.580, f64::INFINITY];
    for (j, row) in pb.cells.iter().enumerate() {
        c.near(&format!("cell {j} prob"), row.prob, 1.0 / 3.0, 1e-12);
        c.near(&format!("cell {j} mean"), row.mean, means[j], 1e-3);
        c.near(&format!("cell {j} variance"), row.variance, vars[j], 1e-3);
        c.near(&format!("cell {j} inf h"), row.inf_h.value, infs[j], 2e-3);
        if sups[j].is_finite() {
            c.near(&format!("cell {j} sup h"), row.sup_h.value, sups[j], 2e-3);
        } else {
            c.check(row.sup_h.value == f64::INFINITY, || format!("cell {j} sup h {}", row.sup_h.value));
        }
    }
    c.near("partition lower", pb.bounds.lower, 0.409, 2e-3);
    c.check(pb.bounds.upper == f64::INFINITY, || format!("partition upper {}", pb.bounds.upper));
    let g = estimate_gap(&f, &d, 1_000_000).unwrap();
    c.near("oracle gap", g.value, 0.6487, 5e-4);
    c.near("oracle gap vs closed form", g.value, 0.5f64.exp_m1(), 1e-8);
    c.check(brackets(&pb.bounds, &g), || format!("{g:?} outside partition bounds"));
    c.finish(start.elapsed(), Duration::from_secs(5));
}

#[test]
fn criterion_3_sample_means() {
    let start = Instant::now();
    let mut c = Checks::new("criterion 3: means of the seeded Uniform(10,100) sample");
    let xs = reference_sample();
    c.check(xs.len() == 100, || format!("sample has {} points", xs.len()));
    let n = xs.len() as f64;
    let arith = xs.iter().sum::<f64>() / n;
    let geo = (xs.iter().map(|x| x.ln()).sum::<f64>() / n).exp();
    let harm = n / xs.iter().map(|x| 1.0 / x).sum::<f64>();

    let neglog = cat(CatalogKind::NegLog);
    let sb = sample_bounds(&neglog, &xs).unwrap();
    let ratio = arith / geo;
    c.check(sb.lower.exp() <= ratio && ratio <= sb.upper.exp(), || {
        format!("arith/geo {ratio} outside [{}, {}]", sb.lower.exp(), sb.upper.exp())
    });
    let d = DistributionSpec::empirical(xs.clone()).unwrap();
    let cb = curvature_bounds(&neglog, &d).unwrap();
    c.check(cb.lower < sb.lower, || format!("curvature lower {} not below {}", cb.lower, sb.lower));
    c.check(cb.upper > sb.upper, || format!("curvature upper {} not above {}", cb.upper, sb.upper));

    let pm = power_mean_bounds(&d, 1.0, -1.0).unwrap();
    c.check(pm.mean_lower <= harm && harm <= pm.mean_upper, || {
        format!("harmonic mean {harm} outside [{}, {}]", pm.mean_lower, pm.mean_upper)
    });
    c.check(pm.mean_upper < arith, || format!("upper {} not below arithmetic mean {arith}", pm.mean_upper));
    c.finish(start.elapsed(), Duration::from_secs(1));
}

fn random_function(rng: &mut ChaCha8Rng, positive_support: bool) -> FunctionSpec {
    let pick = if positive_support { rng.random_range(0..4) } else { rng.random_range(0..2) * 3 };
    match pick {
        0 => {
            let t: f64 = rng.random_range(-1.5..1.5);
            cat(CatalogKind::ExpScaled { t: if t.abs() < 0.05 { 0.5 } else { t } })
        }
        1 => {
            let ps = [-2.0, -1.0, -0.5, 0.5, 1.5, 2.0, 2.5, 3.0];
            cat(CatalogKind::Power { p: ps[rng.random_range(0..ps.len())] })
        }
        2 => cat(CatalogKind::NegLog),
        _ => cat(CatalogKind::Quadratic {
            c2: rng.random_range(-2.0..2.0),
            c1: rng.random_range(-2.0..2.0),
            c0: rng.random_range(-2.0..2.0),
        }),
    }
}

fn random_law(rng: &mut ChaCha8Rng) -> (DistributionSpec, bool) {
    match rng.random_range(0..4) {
        0 => (
            DistributionSpec::normal(rng.random_range(-3.0..3.0), rng.random_range(0.2..2.0)).unwrap(),
            false,
        ),
        1 => (DistributionSpec::exponential(rng.random_range(0.5..4.0)).unwrap(), true),
        2 => {
            let lo = rng.random_range(0.1..5.0);
            (DistributionSpec::uniform(lo, lo + rng.random_range(0.5..10.0)).unwrap(), true)
        }
        _ => {
            let n = rng.random_range(2..60);
            let scale = rng.random_range(0.5..20.0);
            let xs = (0..n).map(|_| 0.05 + scale * rng.random::<f64>()).collect();
            (DistributionSpec::empirical(xs).unwrap(), true)
        }
    }
}

#[test]
fn criterion_4_randomized_bracketing() {
    let start = Instant::now();
    let mut c = Checks::new("criterion 4: randomized bracketing");
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let cases = 240;
    for case in 0..cases {
        let (d, positive) = random_law(&mut rng);
        let f = random_function(&mut rng, positive);
        let label = format!("case {case}: {} under {:?}", f.name(), d.law());
        let g = match estimate_gap(&f, &d, 200_000) {
            Ok(g) => g,
            Err(e) => {
                c.check(false, || format!("{label}: oracle error {e}"));
                continue;
            }
        };
        let jb = jensen_bounds(&f, &d).unwrap();
        c.check(brackets(&jb, &g), || format!("{label}: {g:?} outside jensen {jb:?}"));
        let cb = curvature_bounds(&f, &d).unwrap_or_else(|e| panic!("{label}: {e}"));
        c.check(brackets(&cb, &g), || format!("{label}: {g:?} outside curvature {cb:?}"));
        if let Some(atoms) = d.atoms() {
            let xs: Vec<f64> = atoms.iter().map(|a| a.0).collect();
            let sb = sample_bounds(&f, &xs).unwrap();
            c.check(brackets(&sb, &g), || format!("{label}: {g:?} outside sample {sb:?}"));
        }
        for m in [1, 2, 3, 5] {
            let cuts = d.equal_probability_cuts(m).unwrap();
            let plan = build_partition(&d, &cuts).unwrap();
            let pb = partition_bounds(&f, &plan).unwrap().bounds;
            c.check(brackets(&pb, &g), || format!("{label}: m={m} {g:?} outside partition {pb:?}"));
            if m == 1 {
                let same = (pb.lower - jb.lower).abs() <= 1e-12 * jb.lower.abs().max(1.0)
                    && (pb.upper == jb.upper || (pb.upper - jb.upper).abs() <= 1e-12 * jb.upper.abs().max(1.0));
                c.check(same, || format!("{label}: m=1 partition {pb:?} differs from {jb:?}"));
            }
        }
        if let Some(CatalogKind::Quadratic { c2, .. }) = f.catalog_kind() {
            let want = c2 * d.variance();
            let tol = 1e-10 * want.abs().max(1.0);
            c.near(&format!("{label}: quadratic lower"), jb.lower, want, tol);
            c.near(&format!("{label}: quadratic upper"), jb.upper, want, tol);
            c.near(&format!("{label}: quadratic oracle"), g.value, want, tol);
        }
        let linear = cat(CatalogKind::Quadratic { c2: 0.0, c1: rng.random_range(-3.0..3.0), c0: 1.0 });
        let lb = jensen_bounds(&linear, &d).unwrap();
        c.check(lb.lower == 0.0 && lb.upper == 0.0, || format!("{label}: linear bounds {lb:?}"));
    }
    c.finish(start.elapsed(), Duration::from_secs(60));
}

fn tagged_catalog() -> Vec<FunctionSpec> {
    let mut v = Vec::new();
    for t in [-2.0, -1.0, -0.3, 0.3, 1.0, 2.0] {
        v.push(cat(CatalogKind::ExpScaled { t }));
    }
    for p in [-2.0, -1.0, -0.5, 0.5, 1.5, 2.0, 3.0, 4.0] {
        v.push(cat(CatalogKind::Power { p }));
    }
    v.push(cat(CatalogKind::NegLog));
    v.push(cat(CatalogKind::Quadratic { c2: 1.5, c1: -1.0, c0: 0.0 }));
    v
}

#[test]
fn criterion_5_monotone_h() {
    let start = Instant::now();
    let mut c = Checks::new("criterion 5: monotone h for shape-tagged functions");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for f in tagged_catalog() {
        let shape = f.phi_prime_shape();
        let scan_f = f.clone().with_shape(PhiPrimeShape::Unknown);
        let positive = !f.natural_domain().contains(-1.0);
        for k in 0..50 {
            let (a, b) = if positive {
                let a = rng.random_range(0.05..5.0);
                (a, a + rng.random_range(0.1..10.0))
            } else {
                let a = rng.random_range(-4.0..3.0);
                (a, a + rng.random_range(0.1..5.0))
            };
            let nu = rng.random_range(a..b);
            let interval = SupportInterval::closed(a, b).unwrap();
            let grid: Vec<f64> = (0..1000).map(|i| h_direct(&f, nu, a + (b - a) * i as f64 / 999.0)).collect();
            let scale = grid.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let dir = match shape {
                PhiPrimeShape::Convex => 1.0,
                PhiPrimeShape::Concave => -1.0,
                PhiPrimeShape::Unknown => unreachable!(),
            };
            let worst = grid.windows(2).map(|w| dir * (w[0] - w[1])).fold(f64::NEG_INFINITY, f64::max);
            c.check(worst <= 1e-10 * scale, || {
                format!("{} config {k} on [{a}, {b}] nu={nu}: violation {worst:.3e} (scale {scale:.3e})", f.name())
            });
            let fast = h_extrema(&f, &interval, nu).unwrap();
            let scan = h_extrema(&scan_f, &interval, nu).unwrap();
            for (label, x, y) in [("inf", fast.inf.value, scan.inf.value), ("sup", fast.sup.value, scan.sup.value)] {
                c.check((x - y).abs() <= 1e-8 * scale, || {
                    format!("{} config {k} {label}: fast {x} vs scan {y} (scale {scale:.3e})", f.name())
                });
            }
        }
    }
    c.finish(start.elapsed(), Duration::from_secs(60));
}
