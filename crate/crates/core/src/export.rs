//! Plain-text exports: Wavefront OBJ meshes of parallel surfaces and CSV polylines.

use std::fmt::Write;

use crate::error::Result;
use crate::front::parallel_point;
use crate::geom::{Region, SurfaceModel};
use crate::scalar::Real;
use crate::trace::TraceResult;

/// Mesh of `g^t` over an `n x n` vertex grid; triangles are counter-clockwise in the `(u, v)` chart.
pub fn obj_mesh<T: Real>(surface: &SurfaceModel<T>, region: &Region<T>, n: usize, t: T) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(out, "# parallel surface t={}", t.to_f64_lossy());
    for j in 0..n {
        for i in 0..n {
            let p = parallel_point(surface, region.node(i, j, n), t)?;
            let _ = writeln!(out, "v {} {} {}", p[0].to_f64_lossy(), p[1].to_f64_lossy(), p[2].to_f64_lossy());
        }
    }
    let id = |i: usize, j: usize| j * n + i + 1;
    for j in 0..n.saturating_sub(1) {
        for i in 0..n - 1 {
            let _ = writeln!(out, "f {} {} {}", id(i, j), id(i + 1, j), id(i + 1, j + 1));
            let _ = writeln!(out, "f {} {} {}", id(i, j), id(i + 1, j + 1), id(i, j + 1));
        }
    }
    Ok(out)
}

/// Polylines as `u,v,branch_id,color,topology` rows; closed lines repeat their first point.
pub fn trace_csv<T: Real>(trace: &TraceResult<T>) -> String {
    let mut out = String::from("u,v,branch_id,color,topology\n");
    for (id, line) in trace.polylines.iter().enumerate() {
        let color = line.color.map_or("both", |s| s.name());
        let first = line.points.first().copied().filter(|_| line.closed);
        for p in line.points.iter().chain(first.as_ref()) {
            let _ = writeln!(out, "{},{},{},{},{}", p[0].to_f64_lossy(), p[1].to_f64_lossy(), id, color, line.topology.name());
        }
    }
    out
}
