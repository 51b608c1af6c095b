//! Three-route singularity reports: geometric, front and germ evidence combined.

use serde::{Deserialize, Serialize};

use crate::curvature::{LocalCurvature, Sheet};
use crate::error::{Error, Result};
use crate::front::{classify_front, classify_geometric, discriminant_probe, match_sheet, parallel_point, DiscriminantProbe, GeometricEvidence, SheetMatch, SingularityType};
use crate::geom::SurfaceModel;
use crate::germ::{classify_germ, cubic_kernel_values, germ_from_surface, GermClass, GermClassification};
use crate::scalar::{negligible, Real};
use crate::vec3::V3;
use crate::versality::{versality, Family, VersalityVerdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct FrontEvidence<T> {
    pub probe: DiscriminantProbe<T>,
    pub verdict: SingularityType,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct GermEvidence<T> {
    pub label: GermClass,
    pub classification: GermClassification<T>,
    pub versal_phi_t: Option<VersalityVerdict>,
    pub versal_phi: Option<VersalityVerdict>,
    /// Front types compatible with the germ data.
    pub candidates: Vec<SingularityType>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Evidence<T> {
    pub geometric: Option<GeometricEvidence<T>>,
    pub front: Option<FrontEvidence<T>>,
    pub germ: Option<GermEvidence<T>>,
    /// Routes that failed, with the reason.
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SingularityReport<T> {
    pub point: [T; 2],
    pub t: T,
    pub sheet: SheetMatch,
    #[serde(rename = "type")]
    pub kind: SingularityType,
    /// Position on the parallel surface `g^t`.
    pub position: V3<T>,
    pub evidence: Evidence<T>,
}

/// Germ label and versality verdicts at the focal point over `p`, mapped to front types.
pub fn germ_evidence<T: Real>(surface: &SurfaceModel<T>, p: [T; 2], sheet: SheetMatch) -> Result<GermEvidence<T>> {
    let germ = germ_from_surface(surface, p, sheet.sheet().unwrap_or(Sheet::Blue))?;
    let classification = classify_germ(&germ)?;
    let label = classification.class;
    let verdict = |f| match label {
        GermClass::Worse => Ok(None),
        _ => versality(&germ, f).map(Some),
    };
    let versal_phi_t = verdict(Family::PhiT)?;
    let versal_phi = verdict(Family::Phi)?;
    use SingularityType::*;
    let candidates = match label {
        GermClass::A1 => vec![Regular],
        GermClass::A2 => vec![CuspidalEdge],
        GermClass::A3 => match &versal_phi_t {
            Some(v) if v.versal => vec![Swallowtail],
            _ => vec![CuspidalLips, CuspidalBeaks, Unclassified],
        },
        GermClass::A4 => {
            let kernel = classification.kernel.as_ref().ok_or(Error::KernelRank(0))?;
            let [_, c3v, _] = cubic_kernel_values(&germ, kernel);
            let scale = T::one().max(germ.series.max_abs());
            if negligible(c3v, scale) {
                vec![Unclassified]
            } else {
                vec![CuspidalButterfly]
            }
        }
        GermClass::D4Plus => vec![D4Plus3D],
        GermClass::D4Minus => vec![D4Minus3D],
        GermClass::Worse => vec![Unclassified],
    };
    Ok(GermEvidence { label, classification, versal_phi_t, versal_phi, candidates })
}

/// Combines route verdicts; any disagreement or indecision gives `Unclassified`.
pub fn combine(geometric: Option<SingularityType>, front: Option<SingularityType>, germ: Option<&[SingularityType]>) -> SingularityType {
    let verdicts: Vec<SingularityType> = geometric.into_iter().chain(front).collect();
    let Some(&first) = verdicts.first() else { return SingularityType::Unclassified };
    if verdicts.iter().any(|&v| v != first) {
        return SingularityType::Unclassified;
    }
    // at least two routes must have spoken
    let routes = verdicts.len() + usize::from(germ.is_some());
    if routes < 2 {
        return SingularityType::Unclassified;
    }
    match germ {
        Some(c) if !c.contains(&first) => SingularityType::Unclassified,
        _ => first,
    }
}

/// Full report at a singular point of `g^t`.
pub fn analyze_singularity<T: Real>(surface: &SurfaceModel<T>, p: [T; 2], t: T) -> Result<SingularityReport<T>> {
    let lc = LocalCurvature::at(surface, p)?;
    let sheet = match_sheet(&lc, t)?;
    let position = parallel_point(surface, p, t)?;
    let mut failures = Vec::new();
    let mut note = |route: &str, e: &Error| failures.push(format!("{route}: {e}"));
    let geometric = classify_geometric(surface, p, sheet).map_err(|e| note("geometric", &e)).ok();
    let front = discriminant_probe(surface, p, t)
        .map(|probe| FrontEvidence { verdict: classify_front(&probe), probe })
        .map_err(|e| note("front", &e))
        .ok();
    let germ = germ_evidence(surface, p, sheet).map_err(|e| note("germ", &e)).ok();
    let kind = combine(
        geometric.as_ref().map(|g| g.verdict),
        front.as_ref().map(|f| f.verdict),
        germ.as_ref().map(|g| g.candidates.as_slice()),
    );
    Ok(SingularityReport { point: p, t, sheet, kind, position, evidence: Evidence { geometric, front, germ, failures } })
}

/// Report at the focal point of `sheet` over `p`.
pub fn analyze_focal<T: Real>(surface: &SurfaceModel<T>, p: [T; 2], sheet: Sheet) -> Result<SingularityReport<T>> {
    let t = crate::front::focal_distance(surface, p, sheet)?;
    analyze_singularity(surface, p, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fixture;
    use SingularityType::*;

    #[test]
    fn fixture_reports() {
        let expected = [
            ("S-A2", CuspidalEdge, GermClass::A2),
            ("S-SW", Swallowtail, GermClass::A3),
            ("S-CBF", CuspidalButterfly, GermClass::A4),
            ("S-LIPS", CuspidalLips, GermClass::A3),
            ("S-BKS", CuspidalBeaks, GermClass::A3),
            ("S-ELL", D4Minus3D, GermClass::D4Minus),
            ("S-HYP", D4Plus3D, GermClass::D4Plus),
            ("S-HYPRA", D4Plus3D, GermClass::D4Plus),
        ];
        for (name, ty, label) in expected {
            let r = analyze_focal(&fixture::<f64>(name).unwrap(), [0.0, 0.0], Sheet::Blue).unwrap();
            assert_eq!(r.kind, ty, "{name} {:?}", r.evidence);
            assert!(r.evidence.failures.is_empty(), "{name} {:?}", r.evidence.failures);
            assert_eq!(r.evidence.germ.as_ref().unwrap().label, label);
        }
    }

    #[test]
    fn disagreement_is_unclassified() {
        assert_eq!(combine(Some(Swallowtail), Some(CuspidalEdge), None), Unclassified);
        assert_eq!(combine(Some(Swallowtail), Some(Swallowtail), Some(&[CuspidalEdge])), Unclassified);
        assert_eq!(combine(Some(CuspidalLips), None, Some(&[CuspidalLips, CuspidalBeaks])), CuspidalLips);
        assert_eq!(combine(Some(CuspidalLips), None, None), Unclassified);
        assert_eq!(combine(None, None, Some(&[CuspidalEdge])), Unclassified);
    }

    #[test]
    fn report_json_shape() {
        let r = analyze_focal(&fixture::<f64>("S-SW").unwrap(), [0.0, 0.0], Sheet::Blue).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in ["point", "t", "sheet", "type", "evidence"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["type"], "Swallowtail");
        assert_eq!(v["evidence"]["germ"]["versal_phi_t"]["versal"], true);
        let back: SingularityReport<f64> = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}
