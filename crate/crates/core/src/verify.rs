//! Seeded random surfaces targeted at each classification branch, and the cross-route batteries.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::Sheet;
use crate::front::{parallel_jacobian, parallel_jacobian_fd, SingularityType};
use crate::geom::SurfaceModel;
use crate::germ::{classify_germ, germ_from_monge, germ_from_surface, GermClass, GermJet};
use crate::linalg::det_with_scale;
use crate::loci::{classify_umbilic, ridge_cpc_angle, ridge_line_singular, subparabolic_info, UmbilicClass};
use crate::monge::{to_monge, MongeJet};
use crate::report::analyze_focal;
use crate::scalar::negligible;
use crate::vec3::{dot, norm};
use crate::versality::{versality, Family};

/// Minimum size of the quantity a generator keeps away from zero.
pub const MARGIN: f64 = 0.05;

/// Monge coefficients `a_ij` at the origin, keyed by `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MongeSample {
    pub k1: f64,
    pub k2: f64,
    pub a: BTreeMap<(usize, usize), f64>,
}

impl MongeSample {
    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a.get(&(i, j)).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.a.insert((i, j), x);
    }

    pub fn surface(&self) -> SurfaceModel<f64> {
        let a: Vec<((usize, usize), f64)> = self.a.iter().map(|(&k, &v)| (k, v)).collect();
        SurfaceModel::monge(self.k1, self.k2, &a)
    }

    /// `3 a21^2 + (a40 - 3 k1^3)(k1 - k2)`: vanishes on second order blue ridges.
    pub fn ridge_second(&self) -> f64 {
        3.0 * self.a(2, 1).powi(2) + (self.a(4, 0) - 3.0 * self.k1.powi(3)) * (self.k1 - self.k2)
    }

    /// `3 a21 a12 + a31 (k1 - k2)`: with `ridge_second`, vanishes on singular blue ridge lines.
    pub fn ridge_cross(&self) -> f64 {
        3.0 * self.a(2, 1) * self.a(1, 2) + self.a(3, 1) * (self.k1 - self.k2)
    }

    /// Non-degeneracy of a second order blue ridge.
    pub fn ridge_third(&self) -> f64 {
        let d = self.k1 - self.k2;
        15.0 * self.a(2, 1).powi(2) * self.a(1, 2) + 10.0 * self.a(2, 1) * self.a(3, 1) * d + self.a(5, 0) * d * d
    }

    /// Quintic coefficient of the blue germ in kernel coordinates, Taylor-normalized.
    pub fn quintic_germ(&self) -> f64 {
        self.ridge_third() / (self.k1 * (self.k1 - self.k2).powi(2))
    }

    /// Hessian determinant of `kappa_1` at a ridge and sub-parabolic origin, times `(k1 - k2)^2`.
    pub fn morse_a(&self) -> f64 {
        let d = self.k1 - self.k2;
        let b22 = 2.0 * self.a(1, 2).powi(2) + (self.a(2, 2) - self.k1 * self.k2 * self.k2) * d;
        (self.a(4, 0) - 3.0 * self.k1.powi(3)) * d * b22 - self.a(3, 1).powi(2) * d * d
    }

    pub fn gamma(&self) -> (f64, f64) {
        let (a30, a21, a12, a03) = (self.a(3, 0), self.a(2, 1), self.a(1, 2), self.a(0, 3));
        det_with_scale(&[
            vec![a30, 2.0 * a21, a12, 0.0],
            vec![0.0, a30, 2.0 * a21, a12],
            vec![a21, 2.0 * a12, a03, 0.0],
            vec![0.0, a21, 2.0 * a12, a03],
        ])
    }
}

/// Random jet: `a_ij` uniform in `[-2, 2]`, `k1` in `[1, 3]`, `k2` in `[-1, 1]`, `|k1 - k2| > 0.5`.
pub fn random_sample(rng: &mut ChaCha8Rng) -> MongeSample {
    let k1 = rng.gen_range(1.0..3.0);
    let k2 = loop {
        let k2: f64 = rng.gen_range(-1.0..1.0);
        if k1 - k2 > 0.5 {
            break k2;
        }
    };
    let mut a = BTreeMap::new();
    for d in 3..=5 {
        for j in 0..=d {
            a.insert((d - j, j), rng.gen_range(-2.0..2.0));
        }
    }
    MongeSample { k1, k2, a }
}

fn umbilic_sample(rng: &mut ChaCha8Rng) -> MongeSample {
    let mut s = random_sample(rng);
    s.k2 = s.k1;
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    CuspidalEdge,
    Swallowtail,
    CuspidalButterfly,
    CuspidalLips,
    CuspidalBeaks,
    D4Plus,
    D4Minus,
}

impl Target {
    pub const ALL: [Target; 7] = [
        Target::CuspidalEdge,
        Target::Swallowtail,
        Target::CuspidalButterfly,
        Target::CuspidalLips,
        Target::CuspidalBeaks,
        Target::D4Plus,
        Target::D4Minus,
    ];

    pub fn expected(self) -> SingularityType {
        match self {
            Target::CuspidalEdge => SingularityType::CuspidalEdge,
            Target::Swallowtail => SingularityType::Swallowtail,
            Target::CuspidalButterfly => SingularityType::CuspidalButterfly,
            Target::CuspidalLips => SingularityType::CuspidalLips,
            Target::CuspidalBeaks => SingularityType::CuspidalBeaks,
            Target::D4Plus => SingularityType::D4Plus3D,
            Target::D4Minus => SingularityType::D4Minus3D,
        }
    }
}

/// First order blue ridge; `subparabolic` also places the origin on the red sub-parabolic line.
pub fn first_order_ridge(rng: &mut ChaCha8Rng, subparabolic: bool) -> MongeSample {
    loop {
        let mut s = random_sample(rng);
        s.set(3, 0, 0.0);
        if subparabolic {
            s.set(2, 1, 0.0);
        } else if s.a(2, 1).abs() < MARGIN {
            continue;
        }
        // relative margin keeps the ridge visibly transverse to the constant curvature line
        let transverse = s.ridge_second().abs() >= MARGIN * s.ridge_cross().abs().max(1.0);
        if transverse && (!subparabolic || s.morse_a().abs() >= MARGIN) {
            return s;
        }
    }
}

/// Second order blue ridge, not sub-parabolic; `singular_line` projects onto a singular ridge line.
pub fn second_order_ridge(rng: &mut ChaCha8Rng, singular_line: bool) -> MongeSample {
    loop {
        let mut s = random_sample(rng);
        s.set(3, 0, 0.0);
        let a21 = s.a(2, 1);
        if a21.abs() < MARGIN {
            continue;
        }
        let d = s.k1 - s.k2;
        s.set(4, 0, 3.0 * s.k1.powi(3) - 3.0 * a21 * a21 / d);
        if singular_line {
            s.set(3, 1, -3.0 * a21 * s.a(1, 2) / d);
        } else if s.ridge_cross().abs() < MARGIN {
            continue;
        }
        // the rank test's last pivot scales with the square of the germ's quintic term
        if s.quintic_germ().abs() >= 1.0 {
            return s;
        }
    }
}

/// Umbilic with the requested sign of the cubic discriminant; `right_angled` projects onto the right-angled locus.
pub fn umbilic_of(rng: &mut ChaCha8Rng, hyperbolic: bool, right_angled: bool) -> MongeSample {
    loop {
        let mut s = umbilic_sample(rng);
        let (a30, a21, a12) = (s.a(3, 0), s.a(2, 1), s.a(1, 2));
        if right_angled {
            if a21.abs() < MARGIN {
                continue;
            }
            s.set(0, 3, (a12 * a12 + a21 * a21 - a30 * a12) / a21);
        }
        let (g, _) = s.gamma();
        let gp = det_with_scale(&[vec![1.0, 0.0, 1.0], vec![a30, a21, a12], vec![a21, a12, s.a(0, 3)]]).0;
        if g.abs() < MARGIN || (g > 0.0) != hyperbolic || (!right_angled && gp.abs() < MARGIN) {
            continue;
        }
        return s;
    }
}

/// Surface whose origin, offset to the blue focal point, belongs to `target`.
pub fn generate(target: Target, rng: &mut ChaCha8Rng) -> MongeSample {
    match target {
        Target::CuspidalEdge => loop {
            let s = random_sample(rng);
            if s.a(3, 0).abs() >= MARGIN {
                return s;
            }
        },
        Target::Swallowtail => first_order_ridge(rng, false),
        Target::CuspidalButterfly => second_order_ridge(rng, false),
        Target::CuspidalLips | Target::CuspidalBeaks => loop {
            let s = first_order_ridge(rng, true);
            if (s.morse_a() > 0.0) == (target == Target::CuspidalLips) {
                return s;
            }
        },
        Target::D4Plus => umbilic_of(rng, true, false),
        Target::D4Minus => umbilic_of(rng, false, false),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatteryResult {
    pub name: String,
    pub passed: usize,
    pub total: usize,
    pub failures: Vec<String>,
}

impl BatteryResult {
    fn new(name: &str) -> Self {
        Self { name: name.into(), passed: 0, total: 0, failures: Vec::new() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.total += 1;
        if ok {
            self.passed += 1;
        } else {
            self.failures.push(what());
        }
    }

    pub fn ok(&self) -> bool {
        self.passed == self.total
    }

    pub fn line(&self) -> String {
        format!("{} {}/{} {}", self.name, self.passed, self.total, if self.ok() { "pass" } else { "FAIL" })
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Geometric, front and germ routes on `n` surfaces cycling through the targets.
pub fn route_agreement(n: usize, seed: u64) -> BatteryResult {
    let mut rng = rng_for(seed, 1);
    let mut out = BatteryResult::new("agreement");
    for k in 0..n {
        let target = Target::ALL[k % Target::ALL.len()];
        let s = generate(target, &mut rng);
        let report = analyze_focal(&s.surface(), [0.0, 0.0], Sheet::Blue);
        let ok = match &report {
            Ok(r) => {
                let e = &r.evidence;
                r.kind == target.expected() && e.geometric.is_some() && e.front.is_some() && e.germ.is_some()
            }
            Err(_) => false,
        };
        out.record(ok, || match report {
            Ok(r) => format!("{target:?}: got {:?} {:?} {:?}", r.kind, s, r.evidence.failures),
            Err(e) => format!("{target:?}: {e} {s:?}"),
        });
    }
    out
}

fn germ_of(s: &MongeSample) -> crate::error::Result<GermJet<f64>> {
    germ_from_monge(&to_monge(&s.surface(), [0.0, 0.0])?, Sheet::Blue)
}

/// Versality verdicts against the geometric conditions, `n` instances per germ class.
pub fn versality_biconditionals(n: usize, seed: u64) -> Vec<BatteryResult> {
    let mut rng = rng_for(seed, 2);
    let mut a3 = BatteryResult::new("versality-A3");
    let mut a4 = BatteryResult::new("versality-A4");
    let mut d4p = BatteryResult::new("versality-D4+");
    let mut d4m = BatteryResult::new("versality-D4-");
    let mut witness = BatteryResult::new("versality-D4-witness");
    let mut mono = BatteryResult::new("versality-monotone");
    let check = |s: &MongeSample, label: GermClass, family: Family| -> crate::error::Result<(bool, bool, GermJet<f64>)> {
        let g = germ_of(s)?;
        let got = classify_germ(&g)?.class;
        let v = versality(&g, family)?.versal;
        let vt = versality(&g, Family::PhiT)?.versal;
        let vp = versality(&g, Family::Phi)?.versal;
        Ok((got == label && (!vt || vp), v, g))
    };
    for k in 0..n {
        let flag = k % 2 == 1;
        let s = first_order_ridge(&mut rng, flag);
        let geo = subparabolic_info(&s.surface(), [0.0, 0.0], Sheet::Red);
        let r = check(&s, GermClass::A3, Family::PhiT);
        let ok = matches!((&r, &geo), (Ok((true, v, _)), Ok(sp)) if *v == !sp.subparabolic);
        a3.record(ok, || format!("subparabolic={flag} {s:?}"));
        mono.record(r.as_ref().is_ok_and(|x| x.0), || format!("A3 {s:?}"));

        let s = second_order_ridge(&mut rng, flag);
        let geo = ridge_line_singular(&s.surface(), [0.0, 0.0], Sheet::Blue);
        let r = check(&s, GermClass::A4, Family::Phi);
        let ok = matches!((&r, &geo), (Ok((true, v, _)), Ok(sing)) if *v == !sing);
        a4.record(ok, || format!("singular_line={flag} {s:?}"));
        mono.record(r.as_ref().is_ok_and(|x| x.0), || format!("A4 {s:?}"));

        for (hyperbolic, battery) in [(true, &mut d4p), (false, &mut d4m)] {
            let s = umbilic_of(&mut rng, hyperbolic, hyperbolic && flag);
            let jet = MongeJet::from_graph(match &s.surface() {
                SurfaceModel::Monge(m) => m,
                _ => unreachable!(),
            });
            let label = if hyperbolic { GermClass::D4Plus } else { GermClass::D4Minus };
            let r = check(&s, label, Family::Phi);
            let um = classify_umbilic(&jet);
            let ok = matches!((&r, &um), (Ok((true, v, _)), Ok(u)) if *v == (u.class != UmbilicClass::RightAngledHyperbolic));
            battery.record(ok, || format!("right_angled={} {s:?}", hyperbolic && flag));
            mono.record(r.as_ref().is_ok_and(|x| x.0), || format!("D4 {s:?}"));
            if let Ok((_, v, g)) = &r {
                let (det, scale) = det_with_scale(&[
                    vec![1.0, 0.0, 1.0],
                    vec![g.c(3, 0), g.c(2, 1), g.c(1, 2)],
                    vec![g.c(2, 1), g.c(1, 2), g.c(0, 3)],
                ]);
                witness.record(*v == !negligible(det, scale), || format!("det={det} {s:?}"));
            }
        }
    }
    vec![a3, a4, d4p, d4m, witness, mono]
}

/// Closed-form parallel Jacobian against finite differences; also checks the shared normal.
pub fn jacobian_formula(n: usize, seed: u64) -> (BatteryResult, f64) {
    let mut rng = rng_for(seed, 3);
    let mut out = BatteryResult::new("jacobian");
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let s = random_sample(&mut rng).surface();
        let p = [rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)];
        let t = rng.gen_range(-1.0..1.0);
        let res = (|| -> crate::error::Result<(f64, f64)> {
            let j = parallel_jacobian(&s, p, t)?;
            let fd = parallel_jacobian_fd(&s, p, t, 1e-5)?;
            let jet = s.eval_jet(p, 1)?;
            let nrm = crate::vec3::normalize(crate::vec3::cross(jet.d(1, 0), jet.d(0, 1)));
            let scale = norm(j.columns[0]).max(norm(j.columns[1])).max(1.0);
            let mut rel: f64 = 0.0;
            let mut normal: f64 = 0.0;
            for a in 0..2 {
                rel = rel.max(norm(crate::vec3::sub(j.columns[a], fd[a])) / scale);
                normal = normal.max(dot(j.columns[a], nrm).abs());
            }
            Ok((rel, normal))
        })();
        let ok = matches!(res, Ok((rel, normal)) if rel < 1e-6 && normal < 1e-9);
        if let Ok((rel, _)) = res {
            worst = worst.max(rel);
        }
        out.record(ok, || format!("p={p:?} t={t} {res:?}"));
    }
    (out, worst)
}

/// Constant curvature line against the ridge: transverse on first order ridges, tangent on second order ones.
pub fn cpc_transversality(n: usize, seed: u64) -> BatteryResult {
    let mut rng = rng_for(seed, 4);
    let mut out = BatteryResult::new("cpc-transversality");
    for k in 0..n {
        let second = k % 2 == 1;
        let s = if second { second_order_ridge(&mut rng, false) } else { first_order_ridge(&mut rng, false) };
        let angle = ridge_cpc_angle(&s.surface(), [0.0, 0.0], Sheet::Blue);
        let ok = matches!(angle, Ok(a) if (a < 1e-2) == second);
        out.record(ok, || format!("second={second} angle={angle:?}"));
    }
    out
}

/// Germ labels under random rotations of the chart, for the fixtures and the normal forms.
pub fn germ_rotation(n: usize, seed: u64) -> BatteryResult {
    let mut rng = rng_for(seed, 5);
    let mut out = BatteryResult::new("germ-rotation");
    let mut germs: Vec<(String, GermJet<f64>)> = Vec::new();
    for name in crate::fixtures::names() {
        if let Ok(g) = germ_from_surface(&crate::fixtures::fixture::<f64>(name).expect("fixture"), [0.0, 0.0], Sheet::Blue) {
            germs.push((name.to_string(), g));
        }
    }
    for (name, g) in normal_forms() {
        germs.push((name.to_string(), g));
    }
    for (name, g) in &germs {
        let Ok(base) = classify_germ(g) else { continue };
        for _ in 0..n {
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            let got = classify_germ(&g.rotated(theta)).map(|c| c.class);
            out.record(got == Ok(base.class), || format!("{name} theta={theta} {got:?}"));
        }
    }
    out
}

/// `u^3 + v^2`, `u^4 + v^2`, `u^5 + v^2`, `u^2 v + v^3`, `u^2 v - v^3`.
pub fn normal_forms() -> Vec<(&'static str, GermJet<f64>)> {
    vec![
        ("u3+v2", GermJet::from_taylor(&[((3, 0), 6.0), ((0, 2), 2.0)])),
        ("u4+v2", GermJet::from_taylor(&[((4, 0), 24.0), ((0, 2), 2.0)])),
        ("u5+v2", GermJet::from_taylor(&[((5, 0), 120.0), ((0, 2), 2.0)])),
        ("u2v+v3", GermJet::from_taylor(&[((2, 1), 2.0), ((0, 3), 6.0)])),
        ("u2v-v3", GermJet::from_taylor(&[((2, 1), 2.0), ((0, 3), -6.0)])),
    ]
}

/// Every battery with `n` instances; deterministic in `seed`.
pub fn run_all(n: usize, seed: u64) -> Vec<BatteryResult> {
    let mut out = vec![route_agreement(n, seed)];
    out.extend(versality_biconditionals(n, seed));
    out.push(jacobian_formula(n, seed).0);
    out.push(cpc_transversality(n, seed));
    out.push(germ_rotation(n.min(10), seed));
    out
}
