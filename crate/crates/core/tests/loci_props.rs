// Traced loci against the local theory: constant curvature lines at umbilics,
// ridge-line singularities, and the singular set of the parallel surface.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wavefront::curvature::{LocalCurvature, Sheet};
use wavefront::fixtures::fixture;
use wavefront::front::lambda;
use wavefront::loci::{classify_umbilic, ridge_line_singular};
use wavefront::monge::to_monge;
use wavefront::trace::{trace_locus, Locus, Topology};
use wavefront::verify::{cpc_transversality, first_order_ridge, random_sample, second_order_ridge, umbilic_of};
use wavefront::{Region64, Surface64};

fn near_origin(points: impl IntoIterator<Item = [f64; 2]>, radius: f64) -> usize {
    points.into_iter().filter(|p| p[0].hypot(p[1]) < radius).count()
}

#[test]
fn constant_curvature_branches_change_color_at_hyperbolic_umbilic() {
    let s: Surface64 = fixture("S-HYP").unwrap();
    let trace = trace_locus(&s, Locus::Cpc(1.0), &Region64::square(0.25), 200);
    // (angle, color) samples on a ring around the umbilic
    let mut ring: Vec<(f64, Sheet)> = Vec::new();
    for l in &trace.polylines {
        let Some(color) = l.color else { continue };
        for p in &l.points {
            let r = p[0].hypot(p[1]);
            if (0.05..0.06).contains(&r) {
                ring.push((p[1].atan2(p[0]), color));
            }
        }
    }
    let mut clusters: Vec<(f64, Vec<Sheet>)> = Vec::new();
    for (a, c) in ring {
        let angular = |b: f64| ((a - b + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI).abs();
        match clusters.iter_mut().find(|(b, _)| angular(*b) < 0.3) {
            Some((_, cs)) => cs.push(c),
            None => clusters.push((a, vec![c])),
        }
    }
    assert_eq!(clusters.len(), 4, "{clusters:?}");
    for (a, colors) in &clusters {
        assert!(colors.iter().all(|c| *c == colors[0]));
        let opposite = clusters
            .iter()
            .min_by(|x, y| {
                let d = |b: f64| ((a - b).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI).abs();
                d(x.0).partial_cmp(&d(y.0)).unwrap()
            })
            .unwrap();
        assert_ne!(opposite.1[0], colors[0], "branch at angle {a} keeps its color");
    }
}

#[test]
fn constant_curvature_line_at_elliptic_umbilic_is_isolated() {
    let s: Surface64 = fixture("S-ELL").unwrap();
    let trace = trace_locus(&s, Locus::Cpc(1.0), &Region64::square(0.1), 80);
    let at_umbilic: Vec<_> = trace.singular.iter().filter(|p| p.point[0].hypot(p.point[1]) < 0.01).collect();
    assert_eq!(at_umbilic.len(), 1);
    assert_eq!(at_umbilic[0].topology, Topology::IsolatedPoint);
}

fn seeds() -> impl Strategy<Value = u64> {
    any::<u64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn product_field_hessian_is_minus_gamma(seed in seeds(), hyperbolic in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sample = umbilic_of(&mut rng, hyperbolic, false);
        let s = sample.surface();
        let gamma = classify_umbilic(&to_monge(&s, [0.0, 0.0]).unwrap()).unwrap().gamma;
        let p = |u: f64, v: f64| LocalCurvature::at(&s, [u, v]).unwrap().cpc_product(sample.k1);
        let hessian = |h: f64| {
            let puu = (p(h, 0.0) - 2.0 * p(0.0, 0.0) + p(-h, 0.0)) / (h * h);
            let pvv = (p(0.0, h) - 2.0 * p(0.0, 0.0) + p(0.0, -h)) / (h * h);
            let puv = (p(h, h) - p(h, -h) - p(-h, h) + p(-h, -h)) / (4.0 * h * h);
            [puu, pvv, puv]
        };
        let (coarse, fine) = (hessian(2e-3), hessian(1e-3));
        let [puu, pvv, puv]: [f64; 3] = std::array::from_fn(|k| (4.0 * fine[k] - coarse[k]) / 3.0);
        let det = puu * pvv - puv * puv;
        prop_assert!((det + gamma).abs() < 1e-4 * gamma.abs().max(1.0), "det {det} gamma {gamma}");
    }

    #[test]
    fn gamma_sign_is_morse_type(seed in seeds(), hyperbolic in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sample = umbilic_of(&mut rng, hyperbolic, false);
        // the Morse type depends on the cubic part only; higher terms can put further
        // critical points of the product field within a grid cell of the umbilic
        for (i, j) in [(4, 0), (3, 1), (2, 2), (1, 3), (0, 4), (5, 0), (4, 1), (3, 2), (2, 3), (1, 4), (0, 5)] {
            sample.set(i, j, 0.0);
        }
        let s = sample.surface();
        let report = classify_umbilic(&to_monge(&s, [0.0, 0.0]).unwrap()).unwrap();
        prop_assume!(report.gamma.abs() > 0.25);
        let trace = trace_locus(&s, Locus::Cpc(sample.k1), &Region64::square(0.004), 80);
        let at: Vec<_> = trace.singular.iter().filter(|p| p.point[0].hypot(p.point[1]) < 2e-4).collect();
        prop_assert_eq!(at.len(), 1, "{:?}", trace.singular);
        let expected = if report.gamma > 0.0 { Topology::Crossing } else { Topology::IsolatedPoint };
        prop_assert_eq!(at[0].topology, expected);
    }

    #[test]
    fn ridge_line_singular_iff_both_conditions(seed in seeds(), singular in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sample = second_order_ridge(&mut rng, singular);
        let s = sample.surface();
        prop_assert_eq!(ridge_line_singular(&s, [0.0, 0.0], Sheet::Blue).unwrap(), singular);
        // a weakly regular ridge line passes within a grid cell of a saddle of the ridge field
        prop_assume!(singular || sample.ridge_cross().abs() > 0.5);
        let trace = trace_locus(&s, Locus::Ridge(Sheet::Blue), &Region64::square(0.01), 60);
        let found = near_origin(trace.singular.iter().map(|p| p.point), 1e-3);
        prop_assert_eq!(found > 0, singular, "{:?}", trace.singular);
    }

    #[test]
    fn first_order_ridge_line_is_smooth(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = first_order_ridge(&mut rng, false).surface();
        prop_assert!(!ridge_line_singular(&s, [0.0, 0.0], Sheet::Blue).unwrap());
        let trace = trace_locus(&s, Locus::Ridge(Sheet::Blue), &Region64::square(0.01), 60);
        prop_assert_eq!(near_origin(trace.singular.iter().map(|p| p.point), 1e-3), 0);
        prop_assert!(trace.polylines.iter().any(|l| l.points.iter().any(|p| p[0].hypot(p[1]) < 5e-4)));
    }

    #[test]
    fn singular_set_is_the_constant_curvature_line(seed in seeds(), u in -0.3..0.3f64, v in -0.3..0.3f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_sample(&mut rng).surface();
        let lc = LocalCurvature::at(&s, [u, v]).unwrap();
        for sheet in [Sheet::Blue, Sheet::Red] {
            let k = lc.kappa(sheet);
            prop_assume!(k.abs() > 0.1);
            prop_assume!((1.0 - 1.2 * lc.kappa(sheet.other()) / k).abs() > 0.1);
            let on = lambda(&s, [u, v], 1.0 / k).unwrap();
            let off = lambda(&s, [u, v], 1.2 / k).unwrap();
            prop_assert!(on.abs() < 1e-10 * off.abs().max(1.0), "on {on} off {off}");
            prop_assert!(off.abs() > 1e-3);
        }
    }
}

#[test]
fn constant_curvature_line_meets_ridges_as_expected() {
    let b = cpc_transversality(20, 5);
    assert!(b.ok(), "{:?}", b.failures);
}
