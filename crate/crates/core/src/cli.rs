//! Command-line front end: scene loading, the five subcommands, JSON reports
//! and exit codes (0 success, 1 input error, 2 invariant violated).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use crate::congruence::{
    direction_pair_mismatch, equiaffine_rescale, pqr, pqr_directions, shape_directions,
    tau_exactness, developability_residual, Mu, TauPotential,
};
use crate::error::{Error, Result};
use crate::expr::parse_with;
use crate::foliation::{self, DirectionField, LineOptions, PortraitOptions, Termination, UmbilicMarker};
use crate::geometry::{self, AffinePointData, SurfaceScene};
use crate::par::{self, Execution};
use crate::rotational::{
    axis_umbilic_check, reparameterize_yprime_eq_x, rotational_blaschke, umbilical_parallels, AxisReport,
    DefectScan, ParallelReport, RotationalBlaschke,
};
use crate::scene_file::{load_scene, Scene};
use crate::umbilics::{
    b_field_sample, classify_umbilic, shape_floor, find_umbilics, umbilic_census, ClassifyOptions, SearchOptions,
    UmbilicRegion, UmbilicReport, LOCATED_ORDER_TOL,
};

/// Bound on `|τ|` below which a field counts as equiaffine.
pub const EQUIAFFINE_TOL: f64 = 1e-8;
const RECONSTRUCTION_TOL: f64 = 1e-10;
const ISO_TOL: f64 = 1e-9;
const BLASCHKE_VOLUME_TOL: f64 = 1e-7;
const JET_IDENTITY_TOL: f64 = 1e-8;
const P_AT_UMBILIC_TOL: f64 = 1e-10;
const DIRECTION_TOL: f64 = 1e-8;
const DEVELOPABILITY_TOL: f64 = 1e-6;
const ORTHOGONALITY_TOL: f64 = 1e-8;
const REPARAM_TOL: f64 = 1e-8;
const CERTIFICATE_TOL: f64 = 1e-8;
const POTENTIAL_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "equiaffine", version, about = "Umbilics and curvature lines of transversal fields on surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Affine structure on a grid, equiaffinity and isothermal identities.
    Analyze(#[command(flatten)] Flags),
    /// Locate and classify umbilics; census over an atlas.
    Umbilics(#[command(flatten)] Flags),
    /// Curvature-line portrait (SVG) and samples of the umbilic field (CSV).
    Foliate(#[command(flatten)] Flags),
    /// Line-congruence checks: curvature directions, exactness of τ, rescaling.
    Congruence(#[command(flatten)] Flags),
    /// Surface-of-revolution pipeline for a profile curve.
    Rotational(#[command(flatten)] Flags),
}

#[derive(Debug, Clone, PartialEq, clap::Args)]
pub struct Flags {
    /// Scene file (JSON).
    pub scene: PathBuf,
    /// Grid nodes per axis.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Main tolerance of the command.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Highest umbilic order probed.
    #[arg(long = "max-k")]
    pub max_k: Option<usize>,
    /// Directory for the report and any SVG/CSV output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the curvature-line portrait.
    #[arg(long)]
    pub svg: bool,
    /// Write the umbilic field samples.
    #[arg(long)]
    pub csv: bool,
    /// Disable data parallelism.
    #[arg(long)]
    pub sequential: bool,
    /// Multiply every invariant bound by this factor.
    #[arg(long = "check-scale", default_value_t = 1.0)]
    pub check_scale: f64,
}

impl Command {
    pub fn flags(&self) -> &Flags {
        match self {
            Command::Analyze(f)
            | Command::Umbilics(f)
            | Command::Foliate(f)
            | Command::Congruence(f)
            | Command::Rotational(f) => f,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze(_) => "analyze",
            Command::Umbilics(_) => "umbilics",
            Command::Foliate(_) => "foliate",
            Command::Congruence(_) => "congruence",
            Command::Rotational(_) => "rotational",
        }
    }
}

/// Resolved settings: flag, then scene option, then default.
#[derive(Debug, Clone)]
pub struct Settings {
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub max_k: Option<usize>,
    pub svg: bool,
    pub csv: bool,
    pub exec: Execution,
    pub check_scale: f64,
}

impl Settings {
    pub fn from_flags(f: &Flags) -> Self {
        Settings {
            grid: f.grid,
            tol: f.tol,
            max_k: f.max_k,
            svg: f.svg,
            csv: f.csv,
            check_scale: f.check_scale,
            exec: if f.sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            },
        }
    }

    fn grid(&self, scene: &Scene, default: usize) -> usize {
        self.grid.or(scene.options.grid).unwrap_or(default).max(2)
    }

    fn tol(&self, scene: &Scene, default: f64) -> f64 {
        self.tol.or(scene.options.tol).unwrap_or(default)
    }

    fn max_k(&self, scene: &Scene) -> usize {
        self.max_k.or(scene.options.max_k).unwrap_or(3)
    }
}

/// Result of one command: the JSON report, summary lines, violated
/// invariants and auxiliary files.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Value,
    /// Factor applied to every invariant bound.
    pub check_scale: f64,
    pub summary: Vec<String>,
    pub violations: Vec<String>,
    pub files: Vec<(String, String)>,
}

impl Outcome {
    fn new(report: impl Serialize) -> Result<Self> {
        Ok(Outcome {
            report: serde_json::to_value(report).map_err(|e| Error::PreconditionFailed(e.to_string()))?,
            check_scale: 1.0,
            summary: Vec::new(),
            violations: Vec::new(),
            files: Vec::new(),
        })
    }

    fn check(&mut self, ok: bool, message: impl FnOnce() -> String) {
        if !ok {
            self.violations.push(message());
        }
    }

    fn with_scale(mut self, check_scale: f64) -> Self {
        self.check_scale = check_scale;
        self
    }

    /// Requires `value < limit × check_scale`; NaN fails.
    fn bound(&mut self, what: &str, value: f64, limit: f64) {
        let limit = limit * self.check_scale;
        if !(value < limit) {
            self.violations.push(format!("{what} = {value:e} (bound {limit:e})"));
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() {
            0
        } else {
            2
        }
    }

    /// The full report document.
    pub fn document(&self, command: &str, scene: &str) -> Value {
        serde_json::json!({
            "command": command,
            "scene": scene,
            "violations": self.violations,
            "report": self.report,
        })
    }
}

/// Errors that stand for a violated invariant rather than bad input.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::IndexSumMismatch { .. } => 2,
        _ => 1,
    }
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

// ---------------------------------------------------------------- analyze

#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    pub grid: usize,
    pub max_reconstruction_residual: f64,
    pub max_conormal_residual: f64,
    pub max_tau: f64,
    pub equiaffine: bool,
    pub blaschke: bool,
    pub all_umbilic: bool,
    /// `max |𝓑|` relative to the largest orthonormal shape operator.
    pub max_b_relative: f64,
    pub isothermal_points: usize,
    pub max_iso_residual: Option<f64>,
    pub max_blaschke_volume_residual: Option<f64>,
    pub points: Vec<AffinePointData>,
}

pub fn cmd_analyze(scene: &Scene, s: &Settings) -> Result<Outcome> {
    let surf = scene.require_surface()?;
    let n = s.grid(scene, 9);
    let tol = s.tol(scene, 1e-9);
    let nodes = surf.domain.grid(n);
    let rows = par::map(s.exec, &nodes, |&(u, v)| {
        let data = surf.decompose(u, v)?;
        let (b, shape) = b_field_sample(surf, u, v)?;
        let tau = data.tau[0].abs() + data.tau[1].abs();
        let iso = if geometry::isothermal_check(&data).is_some() && tau < EQUIAFFINE_TOL {
            Some(geometry::verify_iso_identities(surf, u, v)?)
        } else {
            None
        };
        let volume = if surf.xi.is_blaschke() {
            Some(geometry::blaschke_volume_residual(surf, u, v)?)
        } else {
            None
        };
        Ok::<_, Error>((data, b[0].hypot(b[1]), shape, iso, volume))
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let max_b = max_of(rows.iter().map(|r| r.1));
    let shape = max_of(rows.iter().map(|r| r.2)).max(shape_floor(surf)?);
    let isos: Vec<_> = rows.iter().filter_map(|r| r.3.as_ref()).collect();
    let max_iso = (!isos.is_empty()).then(|| {
        max_of(isos.iter().map(|i| i.max_identity_residual().max(i.blaschke.unwrap_or(0.0))))
    });
    let volume = surf.xi.is_blaschke().then(|| max_of(rows.iter().filter_map(|r| r.4)));
    let max_tau = max_of(rows.iter().map(|r| r.0.tau[0].abs() + r.0.tau[1].abs()));
    let report = AnalyzeReport {
        grid: n,
        max_reconstruction_residual: max_of(rows.iter().map(|r| r.0.reconstruction_residual)),
        max_conormal_residual: max_of(rows.iter().map(|r| r.0.conormal_residual)),
        max_tau,
        equiaffine: max_tau < EQUIAFFINE_TOL,
        blaschke: surf.xi.is_blaschke(),
        all_umbilic: max_b <= tol * shape,
        max_b_relative: if shape > 0.0 { max_b / shape } else { 0.0 },
        isothermal_points: isos.len(),
        max_iso_residual: max_iso,
        max_blaschke_volume_residual: volume,
        points: rows.into_iter().map(|r| r.0).collect(),
    };
    let mut out = Outcome::new(&report)?.with_scale(s.check_scale);
    out.summary.push(format!(
        "{}: {} points, max |tau| = {:e}, reconstruction residual {:e}{}",
        scene.name,
        n * n,
        report.max_tau,
        report.max_reconstruction_residual,
        if report.all_umbilic { ", AllUmbilic" } else { "" }
    ));
    if let Some(r) = max_iso {
        out.summary.push(format!("isothermal identities at {} points: max residual {r:e}", report.isothermal_points));
    }
    out.bound("frame reconstruction residual", report.max_reconstruction_residual, RECONSTRUCTION_TOL);
    out.bound("co-normal residual", report.max_conormal_residual, RECONSTRUCTION_TOL);
    if report.blaschke {
        out.bound("|tau| of the Blaschke normal", report.max_tau, EQUIAFFINE_TOL);
    }
    if let Some(r) = max_iso {
        out.bound("isothermal identity residual", r, ISO_TOL);
    }
    if let Some(r) = volume {
        out.bound("Blaschke volume residual", r, BLASCHKE_VOLUME_TOL);
    }
    Ok(out)
}

// --------------------------------------------------------------- umbilics

#[derive(Debug, Serialize)]
pub struct LocatedUmbilic {
    pub chart: usize,
    #[serde(flatten)]
    pub report: UmbilicReport,
}

#[derive(Debug, Serialize)]
pub struct UmbilicsReport {
    pub charts: usize,
    pub all_umbilic: bool,
    pub count: usize,
    pub umbilics: Vec<LocatedUmbilic>,
    pub regions: Vec<(usize, UmbilicRegion)>,
    pub unresolved: Vec<(usize, [f64; 2])>,
    /// Sum of foliation indices; only for a complete census of a closed
    /// surface.
    pub index_sum: Option<f64>,
}

fn search_options(scene: &Scene, s: &Settings) -> SearchOptions {
    SearchOptions {
        grid: s.grid(scene, 48),
        tol: s.tol(scene, 1e-9),
        exec: s.exec,
    }
}

fn classify_options(scene: &Scene, s: &Settings) -> ClassifyOptions {
    let o = &scene.options;
    ClassifyOptions {
        max_k: s.max_k(scene),
        order_tol: o.order_tol.unwrap_or(LOCATED_ORDER_TOL),
        semi_tol: o.semi_tol.unwrap_or(1e-6),
        radius: o.radius.unwrap_or(0.05),
        floor: 0.0,
    }
}

/// Umbilics of a single chart, away from its non-periodic edges.
pub fn chart_umbilics(
    surf: &SurfaceScene,
    search: &SearchOptions,
    classify: &ClassifyOptions,
) -> Result<(crate::umbilics::UmbilicSearch, Vec<UmbilicReport>)> {
    let found = find_umbilics(surf, search)?;
    let opts = ClassifyOptions {
        radius: classify.radius.min(0.5 * found.step),
        floor: search.tol * found.scale,
        ..*classify
    };
    let interior: Vec<[f64; 2]> = found
        .points
        .iter()
        .map(|p| p.location)
        .filter(|x| surf.domain.edge_distance(x[0], x[1]) >= found.step)
        .collect();
    let reports = par::map(search.exec, &interior, |x| classify_umbilic(surf, x[0], x[1], &opts))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok((found, reports))
}

fn check_umbilic(out: &mut Outcome, chart: usize, r: &UmbilicReport) {
    if r.tau >= EQUIAFFINE_TOL {
        return;
    }
    let at = format!("umbilic at {:?} (chart {chart})", r.location);
    if r.semi_homogeneous == Some(true) {
        if let Some(i) = r.foliation_index {
            out.check(i <= 1.0, || format!("{at}: semi-homogeneous with foliation index {i} > 1"));
        }
    }
    if let (Some(a), Some(b)) = (r.order, r.characterized_order) {
        out.check(a == b, || format!("{at}: order {a} but jet characterization gives {b}"));
    }
    if let Some(j) = r.jet_identity_residual {
        out.bound(&format!("{at}: jet identity residual"), j, JET_IDENTITY_TOL);
    }
    if let Some(p) = r.p_at_umbilic {
        out.bound(&format!("{at}: support field"), p, P_AT_UMBILIC_TOL);
    }
}

pub fn cmd_umbilics(scene: &Scene, s: &Settings) -> Result<Outcome> {
    let atlas = scene.atlas();
    if atlas.is_empty() {
        scene.require_surface()?;
    }
    let search = search_options(scene, s);
    let classify = classify_options(scene, s);
    let report = if atlas.len() > 1 {
        let c = umbilic_census(&atlas, &search, &classify)?;
        UmbilicsReport {
            charts: atlas.len(),
            all_umbilic: c.all_umbilic,
            count: c.count,
            umbilics: c
                .umbilics
                .into_iter()
                .map(|u| LocatedUmbilic { chart: u.chart, report: u.report })
                .collect(),
            regions: c.regions.into_iter().map(|r| (r.chart, r.region)).collect(),
            unresolved: c.unresolved,
            index_sum: c.index_sum,
        }
    } else {
        let (found, reports) = chart_umbilics(&atlas[0], &search, &classify)?;
        UmbilicsReport {
            charts: 1,
            all_umbilic: found.all_umbilic,
            count: reports.len(),
            umbilics: reports.into_iter().map(|report| LocatedUmbilic { chart: 0, report }).collect(),
            regions: found.regions.into_iter().map(|r| (0, r)).collect(),
            unresolved: found.unresolved.into_iter().map(|x| (0, x)).collect(),
            index_sum: None,
        }
    };
    let mut out = Outcome::new(&report)?.with_scale(s.check_scale);
    if report.all_umbilic {
        out.summary.push(format!("{}: AllUmbilic", scene.name));
    } else {
        out.summary.push(format!(
            "{}: {} umbilics, {} regions, {} unresolved{}",
            scene.name,
            report.count,
            report.regions.len(),
            report.unresolved.len(),
            report.index_sum.map(|s| format!(", index sum {s}")).unwrap_or_default()
        ));
        for u in &report.umbilics {
            out.summary.push(format!(
                "  chart {} ({:.6}, {:.6}): order {}, index {}",
                u.chart,
                u.report.location[0],
                u.report.location[1],
                u.report.order.map_or("?".into(), |k| k.to_string()),
                foliation::index_label(u.report.foliation_index)
            ));
        }
    }
    for u in &report.umbilics {
        check_umbilic(&mut out, u.chart, &u.report);
    }
    Ok(out)
}

// ---------------------------------------------------------------- foliate

#[derive(Debug, Serialize)]
pub struct LineSummary {
    pub family: usize,
    pub seed: [f64; 2],
    pub points: usize,
    pub length: f64,
    pub termination: Termination,
    pub developability: f64,
}

#[derive(Debug, Serialize)]
pub struct FoliateReport {
    pub all_umbilic: bool,
    pub umbilics: Vec<UmbilicMarker>,
    pub lines: Vec<LineSummary>,
    pub max_developability: f64,
    /// Largest `|h(e0, e1)| / (|e0|_h |e1|_h)` over the grid.
    pub max_h_orthogonality: f64,
    pub svg: Option<String>,
    pub csv: Option<String>,
}

pub fn cmd_foliate(scene: &Scene, s: &Settings) -> Result<Outcome> {
    let surf = scene.require_surface()?;
    let o = &scene.options;
    let field = match DirectionField::new(surf, 1e-12) {
        Ok(f) => f,
        Err(Error::AllUmbilic) => {
            let report = FoliateReport {
                all_umbilic: true,
                umbilics: vec![],
                lines: vec![],
                max_developability: 0.0,
                max_h_orthogonality: 0.0,
                svg: None,
                csv: None,
            };
            let mut out = Outcome::new(&report)?.with_scale(s.check_scale);
            out.summary.push(format!("{}: AllUmbilic, no curvature lines", scene.name));
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    let (_, reports) = chart_umbilics(surf, &search_options(scene, s), &classify_options(scene, s))?;
    let markers: Vec<UmbilicMarker> = reports
        .iter()
        .map(|r| UmbilicMarker {
            location: r.location,
            index: r.foliation_index,
        })
        .collect();
    let defaults = LineOptions::default();
    let line = LineOptions {
        max_length: o.max_length.unwrap_or(defaults.max_length),
        max_step: o.max_step.unwrap_or(defaults.max_step),
        stop_radius: o.stop_radius.unwrap_or(defaults.stop_radius),
        closure_tol: o.closure_tol.unwrap_or(defaults.closure_tol),
        ..defaults
    };
    let popts = PortraitOptions {
        seeds: o.seeds.unwrap_or(6),
        line,
        exec: s.exec,
    };
    let portrait = foliation::portrait(&field, &markers, &popts)?;
    let devs = par::map(s.exec, &portrait.lines, |l| developability_residual(surf, &l.points))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let n = s.grid(scene, 12);
    let orth = par::map(s.exec, &surf.domain.grid(n), |&(u, v)| foliation::h_orthogonality(&field, u, v))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let lines: Vec<LineSummary> = portrait
        .lines
        .iter()
        .zip(&devs)
        .map(|(l, &d)| LineSummary {
            family: l.family,
            seed: l.points[0],
            points: l.points.len(),
            length: l.length,
            termination: l.termination,
            developability: d,
        })
        .collect();
    let mut out_files = Vec::new();
    let svg = s.svg.then(|| format!("{}.svg", scene.name));
    if let Some(name) = &svg {
        out_files.push((name.clone(), foliation::render_svg(&portrait)));
    }
    let csv = s.csv.then(|| format!("{}.csv", scene.name));
    if let Some(name) = &csv {
        out_files.push((name.clone(), foliation::dump_csv(surf, o.csv_grid.unwrap_or(50), s.exec)?));
    }
    let report = FoliateReport {
        all_umbilic: false,
        umbilics: markers,
        max_developability: max_of(devs.iter().copied()),
        max_h_orthogonality: max_of(orth.into_iter().flatten()),
        lines,
        svg,
        csv,
    };
    let mut out = Outcome::new(&report)?.with_scale(s.check_scale);
    out.files = out_files;
    let closed = report.lines.iter().filter(|l| matches!(l.termination, Termination::Closed { .. })).count();
    out.summary.push(format!(
        "{}: {} lines ({} closed), {} umbilics, max developability {:e}",
        scene.name,
        report.lines.len(),
        closed,
        report.umbilics.len(),
        report.max_developability
    ));
    out.bound("developability residual", report.max_developability, DEVELOPABILITY_TOL);
    out.bound("h-orthogonality of the curvature directions", report.max_h_orthogonality, ORTHOGONALITY_TOL);
    Ok(out)
}

// ------------------------------------------------------------- congruence

#[derive(Debug, Serialize)]
pub struct Exactness {
    pub exact: bool,
    pub curl_residual: f64,
    pub max_tau: f64,
    /// Period integrals of τ on a non-simply-connected domain.
    pub holonomy: Option<[f64; 2]>,
    /// Largest `|μ - μ_expected - c|` when an expected potential is given.
    pub potential_deviation: Option<f64>,
    /// `sup |τ̃|` after rescaling by the recovered potential.
    pub rescaled_tau: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct CongruenceReport {
    pub grid: usize,
    pub compared_points: usize,
    /// Largest angle between the developable directions and the
    /// eigen-directions of B.
    pub max_direction_mismatch: f64,
    pub exactness: Exactness,
    pub shifted: Option<Exactness>,
}

fn exactness(
    surf: &SurfaceScene,
    n: usize,
    tol: f64,
    expected: Option<&crate::expr::Expr>,
    exec: Execution,
) -> Result<Exactness> {
    match tau_exactness(surf, n, tol, exec) {
        Ok(t) => {
            let potential_deviation = match (t.exact, expected) {
                (true, Some(e)) => {
                    let e0 = e.eval(&t.base)?;
                    let diffs = t
                        .mu
                        .iter()
                        .map(|m| Ok(m[2] - (e.eval(&[m[0], m[1]])? - e0)))
                        .collect::<Result<Vec<f64>>>()?;
                    Some(max_of(diffs.iter().map(|d| d.abs())))
                }
                _ => None,
            };
            let rescaled_tau = if t.exact && t.max_tau > 0.0 {
                let mu = Mu::Potential(TauPotential {
                    scene: surf.clone(),
                    base: t.base,
                });
                Some(equiaffine_rescale(surf, &mu, n.min(8), exec)?.max_tau)
            } else {
                None
            };
            Ok(Exactness {
                exact: t.exact,
                curl_residual: t.curl_residual,
                max_tau: t.max_tau,
                holonomy: None,
                potential_deviation,
                rescaled_tau,
            })
        }
        Err(Error::NonSimplyConnectedDomain { holonomy }) => Ok(Exactness {
            exact: false,
            curl_residual: f64::NAN,
            max_tau: f64::NAN,
            holonomy: Some(holonomy),
            potential_deviation: None,
            rescaled_tau: None,
        }),
        Err(e) => Err(e),
    }
}

pub fn cmd_congruence(scene: &Scene, s: &Settings) -> Result<Outcome> {
    let surf = scene.require_surface()?;
    let n = s.grid(scene, 12);
    let tol = s.tol(scene, 1e-8);
    let nodes = surf.domain.grid(n);
    let mism = par::map(s.exec, &nodes, |&(u, v)| {
        let c = pqr(surf, u, v)?;
        let b = surf.structure(u, v, 0)?.b_values();
        // directions are compared only where they are well separated
        Ok::<_, Error>(match (pqr_directions(&c, 1e-3), shape_directions(b, 1e-3)) {
            (Some(a), Some(b)) => Some(direction_pair_mismatch(a, b)),
            _ => None,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let compared: Vec<f64> = mism.into_iter().flatten().collect();
    let params: Vec<&str> = surf.f.params.iter().map(String::as_str).collect();
    let expected = match &scene.options.mu {
        Some(src) => Some(parse_with(src, &params).map_err(|e| Error::Scene {
            pointer: "/options/mu".into(),
            message: e.to_string(),
        })?),
        None => None,
    };
    let ex = exactness(surf, n, tol, expected.as_ref(), s.exec)?;
    let shifted = match &scene.options.shift {
        Some(src) => {
            let lambda = parse_with(src, &params).map_err(|e| Error::Scene {
                pointer: "/options/shift".into(),
                message: e.to_string(),
            })?;
            let shifted_scene = SurfaceScene {
                shift: Some(lambda),
                ..surf.clone()
            };
            Some(exactness(&shifted_scene, n, tol, None, s.exec)?)
        }
        None => None,
    };
    let report = CongruenceReport {
        grid: n,
        compared_points: compared.len(),
        max_direction_mismatch: max_of(compared.iter().copied()),
        exactness: ex,
        shifted,
    };
    let mut out = Outcome::new(&report)?.with_scale(s.check_scale);
    let e = &report.exactness;
    out.summary.push(format!(
        "{}: direction mismatch {:e} at {} points; tau {}",
        scene.name,
        report.max_direction_mismatch,
        report.compared_points,
        match (e.exact, e.holonomy) {
            (_, Some(h)) => format!("has period integrals {h:?}"),
            (true, _) => format!("exact (curl {:e})", e.curl_residual),
            (false, _) => format!("not closed (curl {:e})", e.curl_residual),
        }
    ));
    if let Some(r) = e.rescaled_tau {
        out.summary.push(format!("rescaled field: max |tau| = {r:e}"));
    }
    out.bound("angle between developable and B eigen-directions", report.max_direction_mismatch, DIRECTION_TOL);
    if let Some(r) = e.rescaled_tau {
        out.bound("|tau| of the rescaled field", r, EQUIAFFINE_TOL);
    }
    if let Some(d) = e.potential_deviation {
        out.bound("deviation of the recovered potential", d, POTENTIAL_TOL);
    }
    Ok(out)
}

// ------------------------------------------------------------- rotational

#[derive(Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    AllUmbilic,
    UmbilicalParallels,
    NoUmbilicalParallel,
}

#[derive(Debug, Serialize)]
pub struct RotationalReport {
    /// `[min x, min y', min [γ', γ'']]`.
    pub convexity: [f64; 3],
    /// `max |y'(t) - x(t)|` after reparameterization.
    pub reparameterization_residual: f64,
    pub verdict: Verdict,
    pub parallels: Option<ParallelReport>,
    /// Umbilical parallels of the field with the scene's normalization.
    pub defect_scan: Option<DefectScan>,
    pub samples: Vec<RotationalBlaschke>,
    pub axis: Option<AxisReport>,
}

pub fn cmd_rotational(scene: &Scene, s: &Settings) -> Result<Outcome> {
    let p = scene.require_profile()?;
    let scan = scene.options.scan.unwrap_or(400);
    let tol = s.tol(scene, 1e-9);
    let convexity = p.curve.convexity(scan)?;
    let rep = reparameterize_yprime_eq_x(&p.curve)?;
    let residual = rep.verify(scan)?;
    let parallels = match umbilical_parallels(&rep, scan, tol) {
        Ok(r) => Some(r),
        Err(Error::NoSignChange) => None,
        Err(e) => return Err(e),
    };
    let verdict = match &parallels {
        Some(r) if r.all_umbilic => Verdict::AllUmbilic,
        Some(_) => Verdict::UmbilicalParallels,
        None => Verdict::NoUmbilicalParallel,
    };
    let defect_scan = if convexity.iter().all(|&c| c > 0.0) {
        Some(crate::rotational::umbilic_defect_scan(&p.curve, p.normalization, scan, tol)?)
    } else {
        None
    };
    let [a, b] = p.curve.range;
    let samples = (1..10)
        .filter_map(|k| rotational_blaschke(&p.curve, a + (b - a) * k as f64 / 10.0, p.normalization).ok())
        .collect();
    let axis = match &p.axis {
        Some(f) => Some(axis_umbilic_check(f, 0.5)?),
        None => None,
    };
    let report = RotationalReport {
        convexity,
        reparameterization_residual: residual,
        verdict,
        parallels,
        defect_scan,
        samples,
        axis,
    };
    let mut out = Outcome::new(&report)?.with_scale(s.check_scale);
    out.summary.push(format!(
        "{}: |y' - x| <= {:e}, verdict {}",
        scene.name,
        residual,
        serde_json::to_value(&report.verdict).map(|v| v.as_str().unwrap_or("").to_string()).unwrap_or_default()
    ));
    if let Some(r) = &report.parallels {
        for root in &r.ypp_roots {
            out.summary.push(format!(
                "  y'' root t = {:.12}, s = {:.12}, certificate {:e}",
                root.t, root.s, root.certificate
            ));
        }
    }
    if let Some(d) = &report.defect_scan {
        out.summary.push(format!("  {:?} umbilical parallels at t = {:?}", d.normalization, d.roots));
    }
    if let Some(ax) = &report.axis {
        out.summary.push(format!("  axis: alpha = {}, order {:?}", ax.alpha, ax.order));
    }
    out.bound("|y' - x| after reparameterization", residual, REPARAM_TOL);
    if let Some(r) = &report.parallels {
        for root in &r.ypp_roots {
            out.bound(&format!("a/x - b'/y' at the parallel t = {}", root.t), root.certificate, CERTIFICATE_TOL);
        }
    }
    Ok(out)
}

// ----------------------------------------------------------------- driver

pub fn run(command: &Command, scene: &Scene) -> Result<Outcome> {
    let s = Settings::from_flags(command.flags());
    match command {
        Command::Analyze(_) => cmd_analyze(scene, &s),
        Command::Umbilics(_) => cmd_umbilics(scene, &s),
        Command::Foliate(_) => cmd_foliate(scene, &s),
        Command::Congruence(_) => cmd_congruence(scene, &s),
        Command::Rotational(_) => cmd_rotational(scene, &s),
    }
}

fn write_outputs(dir: &Path, files: &[(String, String)]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, body) in files {
        std::fs::write(dir.join(name), body)?;
    }
    Ok(())
}

/// Runs the CLI on the given arguments and returns the exit code. The JSON
/// report goes to stdout (or `--out`), the summary to stderr.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let flags = cli.command.flags();
    let scene = match load_scene(&flags.scene) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let outcome = match run(&cli.command, &scene) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return error_exit_code(&e);
        }
    };
    let doc = outcome.document(cli.command.name(), &scene.name);
    let text = match serde_json::to_string_pretty(&doc) {
        Ok(t) => t + "\n",
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let mut files = outcome.files.clone();
    let written = match &flags.out {
        Some(dir) => {
            files.push((format!("{}.{}.json", scene.name, cli.command.name()), text));
            write_outputs(dir, &files)
        }
        None => {
            print!("{text}");
            write_outputs(Path::new("."), &files)
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 1;
    }
    for line in &outcome.summary {
        eprintln!("{line}");
    }
    for v in &outcome.violations {
        eprintln!("violated: {v}");
    }
    outcome.exit_code()
}
