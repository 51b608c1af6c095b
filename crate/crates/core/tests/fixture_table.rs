// The named fixtures through the full report in both precisions.

use wavefront::curvature::Sheet;
use wavefront::fixtures::fixture;
use wavefront::report::analyze_focal;
use wavefront::{GermClass, Real, SingularityType};

const TABLE: [(&str, SingularityType, GermClass); 8] = [
    ("S-A2", SingularityType::CuspidalEdge, GermClass::A2),
    ("S-SW", SingularityType::Swallowtail, GermClass::A3),
    ("S-CBF", SingularityType::CuspidalButterfly, GermClass::A4),
    ("S-LIPS", SingularityType::CuspidalLips, GermClass::A3),
    ("S-BKS", SingularityType::CuspidalBeaks, GermClass::A3),
    ("S-ELL", SingularityType::D4Minus3D, GermClass::D4Minus),
    ("S-HYP", SingularityType::D4Plus3D, GermClass::D4Plus),
    ("S-HYPRA", SingularityType::D4Plus3D, GermClass::D4Plus),
];

fn check<T: Real>() {
    for (name, kind, germ) in TABLE {
        let s = fixture::<T>(name).unwrap();
        let r = analyze_focal(&s, [T::zero(), T::zero()], Sheet::Blue).unwrap();
        assert_eq!(r.kind, kind, "{name}: {:?}", r.evidence.failures);
        assert!(r.evidence.failures.is_empty(), "{name}: {:?}", r.evidence.failures);
        assert!(r.evidence.geometric.is_some() && r.evidence.front.is_some(), "{name}");
        assert_eq!(r.evidence.germ.as_ref().map(|g| g.label), Some(germ), "{name}");
    }
}

#[test]
fn fixtures_f64() {
    check::<f64>();
}

#[test]
fn fixtures_f32() {
    check::<f32>();
}
