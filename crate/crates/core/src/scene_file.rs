//! JSON scene files.
//!
//! Unknown keys are rejected everywhere; every error carries the JSON
//! pointer of the offending value.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::expr::{parse_with, Expr, VectorExpr};
use crate::geometry::{Domain, SurfaceScene, XiSpec};
use crate::rotational::{Normalization, ProfileCurve};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub surface: Option<SurfaceFile>,
    #[serde(default)]
    pub xi: Option<XiFile>,
    #[serde(default)]
    pub domain: Option<DomainFile>,
    /// Further charts; together with the main surface they form an atlas of
    /// a closed surface.
    #[serde(default)]
    pub charts: Vec<ChartFile>,
    #[serde(default)]
    pub profile: Option<ProfileFile>,
    #[serde(default)]
    pub options: Options,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceFile {
    pub x: String,
    pub y: String,
    pub z: String,
    /// Two whitespace-separated parameter names.
    #[serde(default = "default_surface_params")]
    pub params: String,
}

fn default_surface_params() -> String {
    "u v".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XiKind {
    User,
    Euclidean,
    Blaschke,
    Rescaled,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XiFile {
    pub kind: XiKind,
    #[serde(default)]
    pub components: Option<[String; 3]>,
    /// Exponent of the rescaling `exp(μ) · base`.
    #[serde(default)]
    pub mu: Option<String>,
    /// Field being rescaled; defaults to `components` when those are given.
    #[serde(default)]
    pub base: Option<Box<XiFile>>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainFile {
    pub u: [f64; 2],
    pub v: [f64; 2],
    #[serde(default)]
    pub periodic: [bool; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartFile {
    pub surface: SurfaceFile,
    /// Defaults to the scene's `xi`.
    #[serde(default)]
    pub xi: Option<XiFile>,
    pub domain: DomainFile,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileFile {
    pub x: String,
    pub y: String,
    pub range: [f64; 2],
    #[serde(default = "default_profile_param")]
    pub param: String,
    #[serde(default)]
    pub normalization: Normalization,
    /// `F(w)` of a rotational graph `z = F(x² + y²)` for the axis check.
    #[serde(default)]
    pub axis: Option<String>,
}

fn default_profile_param() -> String {
    "t".into()
}

/// Analysis options. Every field is optional; command-line flags override
/// `grid`, `tol` and `max_k`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub max_k: Option<usize>,
    pub order_tol: Option<f64>,
    pub semi_tol: Option<f64>,
    /// Starting radius of the index loops.
    pub radius: Option<f64>,
    /// Portrait seeds per axis.
    pub seeds: Option<usize>,
    pub max_length: Option<f64>,
    pub max_step: Option<f64>,
    pub stop_radius: Option<f64>,
    pub closure_tol: Option<f64>,
    /// Nodes per axis of the CSV field dump.
    pub csv_grid: Option<usize>,
    /// Expected potential of τ (congruence), compared up to a constant.
    pub mu: Option<String>,
    /// Reference shift `λ` of `f + λ ξ` (congruence).
    pub shift: Option<String>,
    /// Scan points along a profile.
    pub scan: Option<usize>,
}

/// A validated scene.
#[derive(Debug, Clone)]
pub struct Scene {
    pub name: String,
    pub surface: Option<SurfaceScene>,
    /// Extra charts beyond `surface`.
    pub charts: Vec<SurfaceScene>,
    pub profile: Option<Profile>,
    pub options: Options,
}

#[derive(Debug, Clone)]
pub struct Profile {
    pub curve: ProfileCurve,
    pub normalization: Normalization,
    pub axis: Option<Expr>,
}

impl Scene {
    /// The main surface followed by the extra charts.
    pub fn atlas(&self) -> Vec<SurfaceScene> {
        self.surface.iter().cloned().chain(self.charts.iter().cloned()).collect()
    }

    pub fn require_surface(&self) -> Result<&SurfaceScene> {
        self.surface.as_ref().ok_or_else(|| scene_err("/surface", "missing surface (or profile)"))
    }

    pub fn require_profile(&self) -> Result<&Profile> {
        self.profile.as_ref().ok_or_else(|| scene_err("/profile", "missing profile"))
    }
}

fn scene_err(pointer: &str, message: impl Into<String>) -> Error {
    Error::Scene {
        pointer: pointer.into(),
        message: message.into(),
    }
}

fn escape(token: &str) -> String {
    token.replace('~', "~0").replace('/', "~1")
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", escape(key))),
            Segment::Enum { variant } => out.push_str(&format!("/{}", escape(variant))),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

fn expr(src: &str, params: &[&str], pointer: &str) -> Result<Expr> {
    parse_with(src, params).map_err(|e| scene_err(pointer, e.to_string()))
}

fn surface_params(s: &SurfaceFile, at: &str) -> Result<Vec<String>> {
    let p: Vec<String> = s.params.split_whitespace().map(String::from).collect();
    if p.len() != 2 || p[0] == p[1] {
        return Err(scene_err(&format!("{at}/params"), "expected two distinct parameter names"));
    }
    Ok(p)
}

fn vector(srcs: [&str; 3], params: &[String], at: &str, keys: [&str; 3]) -> Result<VectorExpr> {
    let names: Vec<&str> = params.iter().map(String::as_str).collect();
    let mut comps = Vec::with_capacity(3);
    for (src, key) in srcs.iter().zip(keys) {
        comps.push(expr(src, &names, &format!("{at}/{key}"))?);
    }
    let [a, b, c]: [Expr; 3] = comps.try_into().expect("three components");
    Ok(VectorExpr {
        components: [a, b, c],
        params: params.to_vec(),
    })
}

fn xi_spec(x: &XiFile, params: &[String], at: &str) -> Result<XiSpec> {
    let names: Vec<&str> = params.iter().map(String::as_str).collect();
    let user = |at: &str| -> Result<XiSpec> {
        let c = x
            .components
            .as_ref()
            .ok_or_else(|| scene_err(&format!("{at}/components"), "missing components"))?;
        Ok(XiSpec::User(vector(
            [&c[0], &c[1], &c[2]],
            params,
            &format!("{at}/components"),
            ["0", "1", "2"],
        )?))
    };
    match x.kind {
        XiKind::User => user(at),
        XiKind::Euclidean => Ok(XiSpec::EuclideanNormal),
        XiKind::Blaschke => Ok(XiSpec::BlaschkeNormal),
        XiKind::Rescaled => {
            let mu = x
                .mu
                .as_ref()
                .ok_or_else(|| scene_err(&format!("{at}/mu"), "missing mu"))?;
            let mu = expr(mu, &names, &format!("{at}/mu"))?;
            let base = match (&x.base, &x.components) {
                (Some(b), _) => xi_spec(b, params, &format!("{at}/base"))?,
                (None, Some(_)) => user(at)?,
                (None, None) => {
                    return Err(scene_err(&format!("{at}/base"), "rescaled field needs base or components"))
                }
            };
            Ok(XiSpec::Rescaled {
                base: Box::new(base),
                mu,
            })
        }
    }
}

fn domain(d: &DomainFile, at: &str) -> Result<Domain> {
    for (k, r) in [("u", d.u), ("v", d.v)] {
        if !(r[0].is_finite() && r[1].is_finite() && r[0] < r[1]) {
            return Err(scene_err(&format!("{at}/{k}"), "expected a finite interval [a, b] with a < b"));
        }
    }
    Ok(Domain::new(d.u, d.v).with_periodic(d.periodic[0], d.periodic[1]))
}

fn build_surface(s: &SurfaceFile, xi: &XiFile, xi_at: &str, d: &DomainFile, at: &str, d_at: &str) -> Result<SurfaceScene> {
    let params = surface_params(s, at)?;
    let f = vector([&s.x, &s.y, &s.z], &params, at, ["x", "y", "z"])?;
    Ok(SurfaceScene::new(f, xi_spec(xi, &params, xi_at)?, domain(d, d_at)?))
}

/// Parses and validates a scene document.
pub fn parse_scene(text: &str, fallback_name: &str) -> Result<Scene> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: SceneFile = serde_path_to_error::deserialize(de).map_err(|e| Error::Scene {
        pointer: pointer_of(e.path()),
        message: e.inner().to_string(),
    })?;
    build(file, fallback_name)
}

/// Reads a scene file; the name defaults to the file stem.
pub fn load_scene(path: &std::path::Path) -> Result<Scene> {
    let text = std::fs::read_to_string(path)?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scene");
    parse_scene(&text, stem)
}

fn build(file: SceneFile, fallback_name: &str) -> Result<Scene> {
    let profile = match &file.profile {
        Some(p) => {
            let names = [p.param.as_str()];
            if p.param.split_whitespace().count() != 1 {
                return Err(scene_err("/profile/param", "expected one parameter name"));
            }
            let [a, b] = p.range;
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(scene_err("/profile/range", "expected a finite interval [a, b] with a < b"));
            }
            let axis = match &p.axis {
                Some(src) => Some(expr(src, &["w"], "/profile/axis")?),
                None => None,
            };
            Some(Profile {
                curve: ProfileCurve::new(
                    expr(&p.x, &names, "/profile/x")?,
                    expr(&p.y, &names, "/profile/y")?,
                    p.range,
                ),
                normalization: p.normalization,
                axis,
            })
        }
        None => None,
    };
    let euclid = XiFile {
        kind: XiKind::Euclidean,
        components: None,
        mu: None,
        base: None,
    };
    let surface = match (&file.surface, &profile) {
        (Some(s), _) => {
            let xi = file.xi.as_ref().ok_or_else(|| scene_err("/xi", "missing xi"))?;
            let d = file.domain.as_ref().ok_or_else(|| scene_err("/domain", "missing domain"))?;
            Some(build_surface(s, xi, "/xi", d, "/surface", "/domain")?)
        }
        (None, Some(p)) => {
            if file.domain.is_some() {
                return Err(scene_err("/domain", "a profile scene takes its domain from the profile range"));
            }
            let params = ["u".to_string(), "v".to_string()];
            let xi = match &file.xi {
                Some(x) => xi_spec(x, &params, "/xi")?,
                None => XiSpec::BlaschkeNormal,
            };
            let [a, b] = p.curve.range;
            Some(p.curve.revolution_scene(xi, 0.02 * (b - a)))
        }
        (None, None) => return Err(scene_err("/surface", "a scene needs a surface or a profile")),
    };
    let mut charts = Vec::with_capacity(file.charts.len());
    for (i, c) in file.charts.iter().enumerate() {
        let at = format!("/charts/{i}");
        let (xi, xi_at) = match (&c.xi, &file.xi) {
            (Some(x), _) => (x, format!("{at}/xi")),
            (None, Some(x)) => (x, "/xi".to_string()),
            (None, None) => (&euclid, "/xi".to_string()),
        };
        charts.push(build_surface(
            &c.surface,
            xi,
            &xi_at,
            &c.domain,
            &format!("{at}/surface"),
            &format!("{at}/domain"),
        )?);
    }
    Ok(Scene {
        name: file.name.unwrap_or_else(|| fallback_name.to_string()),
        surface,
        charts,
        profile,
        options: file.options,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pointer(text: &str) -> String {
        match parse_scene(text, "t") {
            Err(Error::Scene { pointer, .. }) => pointer,
            other => panic!("expected a scene error, got {other:?}"),
        }
    }

    const SURFACE: &str = r#""surface": {"x": "u", "y": "v", "z": "(u^2+v^2)/2"},
        "domain": {"u": [-1, 1], "v": [-1, 1]}"#;

    #[test]
    fn minimal_graph() {
        let s = parse_scene(&format!(r#"{{{SURFACE}, "xi": {{"kind": "blaschke"}}}}"#), "g").unwrap();
        assert_eq!(s.name, "g");
        let surf = s.surface.unwrap();
        assert!(surf.xi.is_blaschke());
        assert_eq!(surf.domain.periodic, [false, false]);
    }

    #[test]
    fn pointers() {
        assert_eq!(pointer(&format!(r#"{{{SURFACE}, "xi": {{"kind": "affine"}}}}"#)), "/xi/kind");
        assert_eq!(pointer(&format!(r#"{{{SURFACE}, "xi": {{"kind": "user"}}}}"#)), "/xi/components");
        assert_eq!(
            pointer(&format!(r#"{{{SURFACE}, "xi": {{"kind": "user", "components": ["1", "2", "u+"]}}}}"#)),
            "/xi/components/2"
        );
        assert_eq!(pointer(r#"{"surface": {"x": "u", "y": "w", "z": "0"}, "xi": {"kind": "euclidean"}, "domain": {"u": [0, 1], "v": [0, 1]}}"#), "/surface/y");
        assert_eq!(pointer(&format!(r#"{{{SURFACE}, "xi": {{"kind": "euclidean"}}, "options": {{"grid": "x"}}}}"#)), "/options/grid");
        assert_eq!(pointer(r#"{"surface": {"x": "u", "y": "v", "z": "0"}, "xi": {"kind": "euclidean"}, "domain": {"u": [1, 0], "v": [0, 1]}}"#), "/domain/u");
        assert_eq!(pointer(r#"{"profile": {"x": "t", "y": "t^2/2", "range": [0.5, 1]}, "charts": [{"surface": {"x": "u", "y": "v", "z": "0"}, "domain": {"u": [0, 1], "v": [0, 1], "extra": 1}}]}"#), "/charts/0/domain/extra");
    }

    #[test]
    fn unknown_top_level_key() {
        let p = pointer(&format!(r#"{{{SURFACE}, "xi": {{"kind": "euclidean"}}, "colour": 1}}"#));
        assert_eq!(p, "/colour");
    }

    #[test]
    fn rescaled_from_components() {
        let s = parse_scene(
            &format!(r#"{{{SURFACE}, "xi": {{"kind": "rescaled", "components": ["0", "0", "1"], "mu": "u*v"}}}}"#),
            "r",
        )
        .unwrap();
        assert!(matches!(s.surface.unwrap().xi, XiSpec::Rescaled { ref base, .. } if matches!(**base, XiSpec::User(_))));
    }

    #[test]
    fn profile_scene_defaults_to_blaschke_revolution() {
        let s = parse_scene(r#"{"profile": {"x": "sin(t)", "y": "-cos(t)", "range": [0.2, 2.9]}}"#, "p").unwrap();
        let surf = s.surface.unwrap();
        assert!(surf.xi.is_blaschke());
        assert!(surf.domain.periodic[0]);
        assert!(s.profile.unwrap().axis.is_none());
    }

    #[test]
    fn pointer_escaping() {
        assert_eq!(escape("a/b~c"), "a~1b~0c");
    }
}
