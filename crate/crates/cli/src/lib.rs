//! Commands behind the `wavefront` binary.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use wavefront::curvature::{LocalCurvature, Sheet};
use wavefront::export::{obj_mesh, trace_csv};
use wavefront::loci::{classify_umbilic, ridge_info, subparabolic_info, RidgeInfo, SubparabolicInfo, UmbilicReport};
use wavefront::monge::to_monge;
use wavefront::report::analyze_focal;
use wavefront::sweep::{parse_range, singular_sweep, SweepFrame, UmbilicSite};
use wavefront::trace::{trace_locus, Locus};
use wavefront::verify::{run_all, BatteryResult};
use wavefront::versality::VersalityVerdict;
use wavefront::{Error, GermClass, Region64, Report64, SingularityType, Surface64};

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags, unreadable or malformed files (exit 2).
    Usage(String),
    /// The point or surface fails a geometric check (exit 3).
    Domain(String),
    /// A verification battery failed (exit 1).
    Verify(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Verify(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) | CliError::Verify(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_domain() {
            CliError::Domain(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn load_surface(path: &Path) -> CliResult<Surface64> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Surface64::from_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn parse_point(text: &str) -> CliResult<[f64; 2]> {
    let bad = || CliError::Usage(format!("expected u,v, got {text:?}"));
    let (u, v) = text.split_once(',').ok_or_else(bad)?;
    let u: f64 = u.trim().parse().map_err(|_| bad())?;
    let v: f64 = v.trim().parse().map_err(|_| bad())?;
    if !u.is_finite() || !v.is_finite() {
        return Err(bad());
    }
    Ok([u, v])
}

pub fn parse_sheet(text: &str) -> CliResult<Sheet> {
    match text.trim().to_ascii_lowercase().as_str() {
        "1" | "blue" => Ok(Sheet::Blue),
        "2" | "red" => Ok(Sheet::Red),
        _ => Err(CliError::Usage(format!("sheet must be 1, 2, blue or red, got {text:?}"))),
    }
}

pub fn parse_region(text: &str) -> CliResult<Region64> {
    Region64::parse(text).map_err(|e| CliError::Usage(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curvatures {
    pub k1: f64,
    pub k2: f64,
    pub gaussian: f64,
    pub mean: f64,
    pub umbilic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub point: [f64; 2],
    pub sheet: Sheet,
    pub curvatures: Curvatures,
    pub ridges: Vec<RidgeInfo<f64>>,
    /// Entry for sheet `i` tests `v_i kappa_j = 0`.
    pub subparabolic: Vec<SubparabolicInfo<f64>>,
    pub umbilic: Option<UmbilicReport<f64>>,
    pub germ: Option<GermClass>,
    pub versality: Vec<VersalityVerdict>,
    #[serde(rename = "type")]
    pub kind: SingularityType,
    pub report: Report64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisDocument {
    pub surface: Value,
    pub points: Vec<PointRecord>,
}

pub fn analyze(surface: &Surface64, point: [f64; 2], sheet: Sheet) -> CliResult<AnalysisDocument> {
    let lc = LocalCurvature::at(surface, point)?;
    let curvatures = Curvatures {
        k1: lc.kappa(Sheet::Blue),
        k2: lc.kappa(Sheet::Red),
        gaussian: lc.forms.gaussian(),
        mean: lc.forms.mean(),
        umbilic: lc.principal.umbilic,
    };
    let umbilic = if lc.principal.umbilic { Some(classify_umbilic(&to_monge(surface, point)?)?) } else { None };
    let report = analyze_focal(surface, point, sheet)?;
    let ridges = [Sheet::Blue, Sheet::Red].iter().filter_map(|&s| ridge_info(surface, point, s).ok()).collect();
    let subparabolic = [Sheet::Blue, Sheet::Red].iter().filter_map(|&s| subparabolic_info(surface, point, s).ok()).collect();
    let germ = report.evidence.germ.as_ref();
    let record = PointRecord {
        point,
        sheet,
        curvatures,
        ridges,
        subparabolic,
        umbilic,
        germ: germ.map(|g| g.label),
        versality: germ.map(|g| g.versal_phi_t.iter().chain(&g.versal_phi).cloned().collect()).unwrap_or_default(),
        kind: report.kind,
        report,
    };
    Ok(AnalysisDocument { surface: surface.to_json(), points: vec![record] })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum What {
    Cpc,
    Ridge,
    Subparabolic,
}

impl std::str::FromStr for What {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "cpc" => Ok(What::Cpc),
            "ridge" => Ok(What::Ridge),
            "subparabolic" => Ok(What::Subparabolic),
            _ => Err(format!("expected cpc, ridge or subparabolic, got {s:?}")),
        }
    }
}

/// Traced polylines as CSV text; `value` is the curvature level for `cpc` and the sheet otherwise.
pub fn trace(surface: &Surface64, what: What, value: &str, region: &Region64, grid: usize) -> CliResult<(String, usize)> {
    if grid < 2 {
        return Err(CliError::Usage("grid must be at least 2".into()));
    }
    let locus = match what {
        What::Cpc => {
            let c: f64 = value.trim().parse().map_err(|_| CliError::Usage(format!("cpc value must be a number, got {value:?}")))?;
            Locus::Cpc(c)
        }
        What::Ridge => Locus::Ridge(parse_sheet(value)?),
        What::Subparabolic => Locus::Subparabolic(parse_sheet(value)?),
    };
    let result = trace_locus(surface, locus, region, grid);
    Ok((trace_csv(&result), result.polylines.len()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameSummary {
    pub t: f64,
    pub mesh: String,
    pub counts: std::collections::BTreeMap<SingularityType, usize>,
    pub near_umbilic: std::collections::BTreeMap<SingularityType, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub surface: Value,
    pub region: Region64,
    pub grid: usize,
    pub umbilics: Vec<UmbilicSite<f64>>,
    pub frames: Vec<FrameSummary>,
}

/// Writes `t_NNN.obj` and `t_NNN.json` per offset plus `summary.json` into `out`.
pub fn sweep(surface: &Surface64, t_range: &str, region: &Region64, grid: usize, out: &Path) -> CliResult<SweepSummary> {
    if grid < 2 {
        return Err(CliError::Usage("grid must be at least 2".into()));
    }
    let ts: Vec<f64> = parse_range(t_range).map_err(|e| CliError::Usage(e.to_string()))?;
    let meshes = ts.iter().map(|&t| obj_mesh(surface, region, grid, t)).collect::<wavefront::Result<Vec<_>>>()?;
    let result = singular_sweep(surface, region, &ts, grid);
    fs::create_dir_all(out).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", out.display())))?;
    let write = |name: &str, text: &str| {
        fs::write(out.join(name), text).map_err(|e| CliError::Usage(format!("cannot write {name}: {e}")))
    };
    let mut frames = Vec::new();
    for (k, (frame, mesh)) in result.frames.iter().zip(&meshes).enumerate() {
        let mesh_name = format!("t_{k:03}.obj");
        write(&mesh_name, mesh)?;
        write(&format!("t_{k:03}.json"), &to_json::<SweepFrame<f64>>(frame))?;
        frames.push(FrameSummary { t: frame.t, mesh: mesh_name, counts: frame.counts.clone(), near_umbilic: frame.near_umbilic.clone() });
    }
    let summary = SweepSummary { surface: surface.to_json(), region: *region, grid, umbilics: result.umbilics, frames };
    write("summary.json", &to_json(&summary))?;
    Ok(summary)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Battery report lines and overall verdict.
pub fn verify(n: usize, seed: u64) -> (Vec<BatteryResult>, String) {
    let results = run_all(n, seed);
    let mut text = String::new();
    for b in &results {
        text.push_str(&b.line());
        text.push('\n');
        for f in &b.failures {
            text.push_str("  ");
            text.push_str(f);
            text.push('\n');
        }
    }
    let ok = results.iter().all(BatteryResult::ok);
    text.push_str(if ok { "verify: pass\n" } else { "verify: FAIL\n" });
    (results, text)
}
