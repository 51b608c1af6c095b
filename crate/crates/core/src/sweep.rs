//! Offset sweeps: singular points of `g^t` found on the constant principal curvature lines.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{LocalCurvature, Sheet};
use crate::front::SingularityType;
use crate::geom::{Region, SurfaceModel};
use crate::linalg::solve2;
use crate::loci::find_umbilics;
use crate::monge::to_monge;
use crate::report::{analyze_singularity, SingularityReport};
use crate::scalar::{lit, Real};
use crate::trace::{aligned_field_value, cpc_ridge_intersections, distance, trace_locus, Locus, Topology};

/// Umbilic with the radius inside which constant curvature features scale with `|c - k|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct UmbilicSite<T> {
    pub param: [T; 2],
    pub kappa: T,
    /// Largest absolute cubic Monge coefficient at the umbilic.
    pub cubic_size: T,
}

impl<T: Real> UmbilicSite<T> {
    /// Neighbourhood radius `4 |c - k| / max|a_ij|` used for local counts.
    pub fn radius(&self, c: T) -> T {
        lit::<T>(4.0) * (c - self.kappa).abs() / self.cubic_size.max(T::epsilon())
    }
}

pub fn umbilic_sites<T: Real>(surface: &SurfaceModel<T>, region: &Region<T>, n: usize) -> Vec<UmbilicSite<T>> {
    find_umbilics(surface, region, n)
        .into_iter()
        .filter_map(|u| {
            let jet = to_monge(surface, u.param).ok()?;
            let cubic_size = [(3, 0), (2, 1), (1, 2), (0, 3)].iter().fold(T::zero(), |m, &(i, j)| m.max(jet.a(i, j).abs()));
            Some(UmbilicSite { param: u.param, kappa: u.kappa, cubic_size })
        })
        .collect()
}

/// Points within the neighbourhood radius of some umbilic, at curvature level `c`.
pub fn near_umbilic<T: Real>(points: &[[T; 2]], sites: &[UmbilicSite<T>], c: T) -> Vec<[T; 2]> {
    points.iter().copied().filter(|&p| sites.iter().any(|s| distance(p, s.param) <= s.radius(c))).collect()
}

/// Newton refinement of `kappa_sheet = c`, `v_sheet kappa_sheet = 0` from `start`.
pub fn refine_cpc_ridge<T: Real>(surface: &SurfaceModel<T>, sheet: Sheet, c: T, start: [T; 2]) -> Option<[T; 2]> {
    let reference = LocalCurvature::at(surface, start).ok()?.dir(sheet);
    let residual = |q: [T; 2]| -> Option<([T; 2], [T; 2])> {
        let lc = LocalCurvature::at(surface, q).ok()?;
        let w = aligned_field_value(surface, sheet, sheet, reference, q)?;
        Some(([lc.kappa(sheet) - c, w], lc.grad(sheet).ok()?))
    };
    let h = lit::<T>(1e-6);
    let mut q = start;
    for _ in 0..30 {
        let (f, gk) = residual(q)?;
        let wu = (aligned_field_value(surface, sheet, sheet, reference, [q[0] + h, q[1]])?
            - aligned_field_value(surface, sheet, sheet, reference, [q[0] - h, q[1]])?)
            / (h + h);
        let wv = (aligned_field_value(surface, sheet, sheet, reference, [q[0], q[1] + h])?
            - aligned_field_value(surface, sheet, sheet, reference, [q[0], q[1] - h])?)
            / (h + h);
        let step = solve2([gk, [wu, wv]], [-f[0], -f[1]])?;
        q = [q[0] + step[0], q[1] + step[1]];
        if step[0].hypot(step[1]) < lit::<T>(1e-13) * T::one().max(q[0].hypot(q[1])) {
            let (f, _) = residual(q)?;
            let tol = lit::<T>(1e-10) * T::one().max(c.abs());
            return (f[0].abs() < tol && f[1].abs() < tol).then_some(q);
        }
    }
    None
}

/// Newton projection onto `kappa_sheet = c` along the gradient.
fn project_cpc<T: Real>(surface: &SurfaceModel<T>, sheet: Sheet, c: T, start: [T; 2]) -> Option<[T; 2]> {
    let mut q = start;
    for _ in 0..30 {
        let lc = LocalCurvature::at(surface, q).ok()?;
        let f = lc.kappa(sheet) - c;
        let g = lc.grad(sheet).ok()?;
        let g2 = g[0] * g[0] + g[1] * g[1];
        if g2 == T::zero() {
            return None;
        }
        q = [q[0] - f * g[0] / g2, q[1] - f * g[1] / g2];
        if f.abs() < lit::<T>(1e-13) * T::one().max(c.abs()) {
            return Some(q);
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SweepFrame<T> {
    pub t: T,
    pub reports: Vec<SingularityReport<T>>,
    /// Counts per singularity type over the whole region.
    pub counts: BTreeMap<SingularityType, usize>,
    /// Counts restricted to the umbilic neighbourhoods.
    pub near_umbilic: BTreeMap<SingularityType, usize>,
    /// Candidate points that could not be refined onto the singular set.
    pub unrefined: Vec<[T; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Sweep<T> {
    pub umbilics: Vec<UmbilicSite<T>>,
    pub frames: Vec<SweepFrame<T>>,
}

fn tally<T: Real>(reports: &[&SingularityReport<T>]) -> BTreeMap<SingularityType, usize> {
    let mut m = BTreeMap::new();
    for r in reports {
        *m.entry(r.kind).or_insert(0) += 1;
    }
    m
}

/// Classifies the singular points of `g^t` on its singular set, the constant curvature line `kappa = 1/t`.
pub fn sweep_frame<T: Real>(surface: &SurfaceModel<T>, region: &Region<T>, t: T, n: usize, sites: &[UmbilicSite<T>]) -> SweepFrame<T> {
    let mut reports: Vec<SingularityReport<T>> = Vec::new();
    let mut unrefined = Vec::new();
    let empty = |reports, unrefined| SweepFrame { t, reports, counts: BTreeMap::new(), near_umbilic: BTreeMap::new(), unrefined };
    if t == T::zero() {
        return empty(reports, unrefined);
    }
    let c = T::one() / t;
    let dedupe = lit::<T>(1e-7);
    let push = |reports: &mut Vec<SingularityReport<T>>, p: [T; 2]| {
        if reports.iter().any(|r| distance(r.point, p) < dedupe) {
            return;
        }
        if let Ok(r) = analyze_singularity(surface, p, t) {
            reports.push(r);
        }
    };
    let [du, dv] = region.spacing(n);
    let cell = du.hypot(dv);
    for sheet in [Sheet::Blue, Sheet::Red] {
        for hit in cpc_ridge_intersections(surface, c, sheet, region, n) {
            match refine_cpc_ridge(surface, sheet, c, hit).filter(|&q| distance(q, hit) < lit::<T>(4.0) * cell) {
                Some(q) => push(&mut reports, q),
                None => unrefined.push(hit),
            }
        }
    }
    let traced = trace_locus(surface, Locus::Cpc(c), region, n);
    for s in &traced.singular {
        // umbilics on the singular set are taken from the dedicated umbilic search
        let site = sites.iter().find(|u| distance(u.param, s.point) < lit::<T>(2.0) * cell && (t * u.kappa - T::one()).abs() < lit(1e-6));
        push(&mut reports, site.map_or(s.point, |u| u.param));
    }
    // one representative per smooth branch, as far as possible from the special points
    let special: Vec<[T; 2]> = reports.iter().map(|r| r.point).chain(unrefined.iter().copied()).collect();
    for line in traced.polylines.iter().filter(|l| l.topology != Topology::IsolatedPoint && l.points.len() > 2) {
        let Some(sheet) = line.color else { continue };
        let far = |p: &[T; 2]| special.iter().map(|&s| distance(s, *p)).fold(T::infinity(), T::min);
        let Some(&best) = line.points.iter().max_by(|a, b| far(a).partial_cmp(&far(b)).unwrap_or(std::cmp::Ordering::Equal)) else {
            continue;
        };
        if let Some(q) = project_cpc(surface, sheet, c, best) {
            push(&mut reports, q);
        }
    }
    reports.sort_by(|a, b| a.point.partial_cmp(&b.point).unwrap_or(std::cmp::Ordering::Equal));
    let all: Vec<&SingularityReport<T>> = reports.iter().collect();
    let near: Vec<&SingularityReport<T>> =
        reports.iter().filter(|r| sites.iter().any(|s| distance(r.point, s.param) <= s.radius(c))).collect();
    SweepFrame { t, counts: tally(&all), near_umbilic: tally(&near), reports, unrefined }
}

/// Sweep over offsets `ts`; frames are returned in input order.
pub fn singular_sweep<T: Real>(surface: &SurfaceModel<T>, region: &Region<T>, ts: &[T], n: usize) -> Sweep<T> {
    let umbilics = umbilic_sites(surface, region, 64);
    let frames = ts.par_iter().map(|&t| sweep_frame(surface, region, t, n, &umbilics)).collect();
    Sweep { umbilics, frames }
}

/// `n` evenly spaced values from `a` to `b` inclusive, parsed from `a:b:n`.
pub fn parse_range<T: Real>(text: &str) -> crate::error::Result<Vec<T>> {
    let bad = || crate::error::Error::Invalid(format!("expected a:b:n, got {text:?}"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !a.is_finite() || !b.is_finite() || n == 0 {
        return Err(bad());
    }
    Ok((0..n)
        .map(|k| if n == 1 { lit::<T>(a) } else { lit::<T>(a + (b - a) * k as f64 / (n - 1) as f64) })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fixture;

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range::<f64>("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_range::<f64>("2:5:1").unwrap(), vec![2.0]);
        assert!(parse_range::<f64>("0:1").is_err());
        assert!(parse_range::<f64>("0:1:0").is_err());
    }

    #[test]
    fn plane_has_no_singular_points() {
        let plane = SurfaceModel::monge(0.0_f64, 0.0, &[]);
        let s = singular_sweep(&plane, &Region::square(0.5), &[0.5, 1.0, 2.0], 50);
        assert!(s.umbilics.is_empty() || s.frames.iter().all(|f| f.reports.is_empty()));
        assert!(s.frames.iter().all(|f| f.reports.is_empty() && f.unrefined.is_empty()));
    }

    #[test]
    fn ellipsoid_fixture_swallowtails() {
        let s = fixture::<f64>("S-ELL").unwrap();
        let region = Region::square(0.5);
        let sweep = singular_sweep(&s, &region, &[1.0 / 1.05, 1.0 / 0.95], 200);
        assert_eq!(sweep.umbilics.len(), 1);
        for f in &sweep.frames {
            assert_eq!(f.near_umbilic.get(&SingularityType::Swallowtail), Some(&3), "t={} {:?}", f.t, f.counts);
        }
    }
}
