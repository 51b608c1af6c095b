pub mod curvature;
pub mod error;
pub mod export;
pub mod fixtures;
pub mod front;
pub mod geom;
pub mod germ;
pub mod linalg;
pub mod loci;
pub mod monge;
pub mod report;
pub mod scalar;
pub mod series;
pub mod sweep;
pub mod trace;
pub mod vec3;
pub mod verify;
pub mod versality;

pub use curvature::Sheet;
pub use error::{Error, Result};
pub use front::{SheetMatch, SingularityType};
pub use geom::Region;
pub use germ::GermClass;
pub use scalar::{Estimate, Real};
pub use versality::Family;

pub type Surface64 = geom::SurfaceModel<f64>;
pub type Surface32 = geom::SurfaceModel<f32>;
pub type MongeJet64 = monge::MongeJet<f64>;
pub type MongeJet32 = monge::MongeJet<f32>;
pub type GermJet64 = germ::GermJet<f64>;
pub type GermJet32 = germ::GermJet<f32>;
pub type Report64 = report::SingularityReport<f64>;
pub type Report32 = report::SingularityReport<f32>;
pub type Region64 = geom::Region<f64>;
pub type Region32 = geom::Region<f32>;
