//! Scene files and manifold presets.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dax::{DaxContext, Mode};
use crate::error::{Error, Result};
use crate::group::{parse_group_spec, GroupSpec, SpecRef, Word};
use crate::pairing::{PairingTable, SphereClass};
use crate::quotient::{build_rel_3mfd, build_rel_arcs, build_rel_circles, default_centralizer, RelationSet, Whisker};
use crate::ring::RingElem;
use crate::trace::{HomotopyTrace, KnotRecord};

pub const PRESETS: &[&str] = &[
    "disk_d",
    "solid_torus_arcs",
    "solid_torus_circles",
    "s1_x_sphere",
    "aspherical",
    "three_mfd",
    "product_DkY",
];

const DEFAULT_WINDOW: u32 = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub dimension: u32,
    pub mode: Mode,
    pub group: SpecRef,
    pub u_class: Word,
    pub s_class: Word,
    pub sphere_generators: Vec<SphereClass>,
    pub whisker: Whisker,
    pub centralizer: Option<Vec<Word>>,
    pub window: u32,
    pub sweep: Option<Vec<u32>>,
    pub preset: Option<String>,
    pub preset_params: BTreeMap<String, String>,
    /// Free summands of the target not seen by the group-ring quotient.
    pub extra_free_rank: u32,
    pub notes: Vec<String>,
    pub knots: Vec<KnotRecord>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScene {
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dimension: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    group: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    u_class: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s_class: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    window: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "is_zero")]
    extra_free_rank: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    centralizer: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    preset_params: BTreeMap<String, toml::Value>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    whisker: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    sphere_generators: Vec<RawClass>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    knots: Vec<RawKnot>,
}

fn is_zero(x: &u32) -> bool {
    *x == 0
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClass {
    name: String,
    #[serde(default)]
    embedded: bool,
    #[serde(default = "default_true")]
    equivariant: bool,
    #[serde(default = "zero_str")]
    base_dax: String,
    #[serde(default = "zero_str")]
    lambda_u: String,
    #[serde(default)]
    lambda_gen: BTreeMap<String, String>,
}

fn zero_str() -> String {
    "0".into()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKnot {
    name: String,
    #[serde(default)]
    trace: Vec<(String, String)>,
}

fn scene_err(context: &str, e: Error) -> Error {
    match e {
        Error::Scene(m) => Error::Scene(format!("{context}: {m}")),
        other => Error::Scene(format!("{context}: {other}")),
    }
}

impl Scene {
    pub fn parse(text: &str) -> Result<Scene> {
        let raw: RawScene = toml::from_str(text).map_err(|e| Error::Scene(e.to_string()))?;
        Scene::from_raw(raw)
    }

    pub fn load(path: &std::path::Path) -> Result<Scene> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Scene(format!("{}: {e}", path.display())))?;
        Scene::parse(&text)
    }

    fn from_raw(raw: RawScene) -> Result<Scene> {
        let params: BTreeMap<String, String> = raw
            .preset_params
            .iter()
            .map(|(k, v)| {
                let s = match v {
                    toml::Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                (k.clone(), s)
            })
            .collect();
        // A preset name without an explicit group is expanded; with a group
        // it is only a label.
        let mut scene = match (&raw.preset, &raw.group) {
            (Some(name), None) => preset_expand(name, &params)?,
            _ => {
                let group = raw.group.as_deref().ok_or_else(|| Error::Scene("missing `group`".into()))?;
                let group: SpecRef = Arc::new(parse_group_spec(group).map_err(|e| scene_err("group", e))?);
                let dimension = raw.dimension.ok_or_else(|| Error::Scene("missing `dimension`".into()))?;
                let mode = raw.mode.unwrap_or(Mode::Arcs);
                let s_class = match (&raw.s_class, mode) {
                    (Some(s), _) => Word::parse(&group, s).map_err(|e| scene_err("s_class", e))?,
                    (None, Mode::Arcs) => Word::identity(&group),
                    (None, Mode::Circles) => return Err(Error::Scene("circles mode requires `s_class`".into())),
                };
                let u_class = match (&raw.u_class, mode) {
                    (Some(u), _) => Word::parse(&group, u).map_err(|e| scene_err("u_class", e))?,
                    (None, Mode::Circles) => s_class.clone(),
                    (None, Mode::Arcs) => return Err(Error::Scene("arcs mode requires `u_class`".into())),
                };
                Scene {
                    dimension,
                    mode,
                    group,
                    u_class,
                    s_class,
                    sphere_generators: Vec::new(),
                    whisker: Whisker::new(),
                    centralizer: None,
                    window: DEFAULT_WINDOW,
                    sweep: None,
                    preset: raw.preset.clone(),
                    preset_params: params.clone(),
                    extra_free_rank: 0,
                    notes: Vec::new(),
                    knots: Vec::new(),
                }
            }
        };
        let g = scene.group.clone();
        if let Some(w) = raw.window {
            scene.window = w;
        }
        if raw.sweep.is_some() {
            scene.sweep = raw.sweep;
        }
        scene.extra_free_rank = scene.extra_free_rank.max(raw.extra_free_rank);
        for n in raw.notes {
            if !scene.notes.contains(&n) {
                scene.notes.push(n);
            }
        }
        if let Some(c) = raw.centralizer {
            let words = c
                .iter()
                .map(|w| Word::parse(&g, w).map_err(|e| scene_err("centralizer", e)))
                .collect::<Result<Vec<_>>>()?;
            scene.centralizer = Some(words);
        }
        for (k, v) in raw.whisker {
            let key = Word::parse(&g, &k).map_err(|e| scene_err(&format!("whisker key `{k}`"), e))?;
            let val = RingElem::parse(&g, &v).map_err(|e| scene_err(&format!("whisker `{k}`"), e))?;
            scene.whisker.insert(key, val);
        }
        for c in raw.sphere_generators {
            let class = class_from_raw(&g, c)?;
            if scene.sphere_generators.iter().any(|x| x.name == class.name) {
                return Err(Error::Scene(format!("duplicate sphere class `{}`", class.name)));
            }
            scene.sphere_generators.push(class);
        }
        for k in raw.knots {
            let trace = HomotopyTrace::parse(&g, &k.trace).map_err(|e| scene_err(&format!("knot `{}`", k.name), e))?;
            scene.knots.push(KnotRecord { name: k.name, trace });
        }
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<()> {
        self.context().map(|_| ())
    }

    pub fn context(&self) -> Result<DaxContext> {
        let table = PairingTable::new(self.dimension, self.sphere_generators.clone(), self.u_class.clone())?;
        DaxContext::new(table, self.mode, self.s_class.clone())
    }

    /// Relation set for the scene at `window`.
    pub fn relations(&self, window: u32) -> Result<RelationSet> {
        let ctx = self.context()?;
        if self.dimension == 3 {
            return build_rel_3mfd(&ctx, window, self.mode == Mode::Circles, &self.whisker);
        }
        match self.mode {
            Mode::Arcs if !self.whisker.is_empty() => Err(Error::InvalidWhisker("whiskers need circles mode".into())),
            Mode::Arcs => build_rel_arcs(&ctx, window),
            Mode::Circles => build_rel_circles(&ctx, &self.whisker, window),
        }
    }

    pub fn centralizer_or_default(&self) -> Result<Vec<Word>> {
        match &self.centralizer {
            Some(c) => Ok(c.clone()),
            None => Ok(default_centralizer(&self.context()?, &self.whisker)),
        }
    }

    /// Canonical serialization; `Scene::parse(&s.emit())` gives back `s`.
    pub fn emit(&self) -> String {
        let classes = self
            .sphere_generators
            .iter()
            .map(|c| RawClass {
                name: c.name.clone(),
                embedded: c.embedded,
                equivariant: c.equivariant,
                base_dax: c.base_dax.to_string(),
                lambda_u: c.lambda_u.to_string(),
                lambda_gen: self
                    .group
                    .generator_names()
                    .iter()
                    .zip(&c.lambda_gen)
                    .map(|(n, r)| (n.to_string(), r.to_string()))
                    .collect(),
            })
            .collect();
        let raw = RawScene {
            preset: self.preset.clone(),
            dimension: Some(self.dimension),
            mode: Some(self.mode),
            group: Some(self.group.to_string()),
            u_class: Some(self.u_class.to_string()),
            s_class: Some(self.s_class.to_string()),
            window: Some(self.window),
            sweep: self.sweep.clone(),
            extra_free_rank: self.extra_free_rank,
            notes: self.notes.clone(),
            centralizer: self.centralizer.as_ref().map(|c| c.iter().map(|w| w.to_string()).collect()),
            preset_params: self
                .preset_params
                .iter()
                .map(|(k, v)| (k.clone(), toml::Value::String(v.clone())))
                .collect(),
            whisker: self.whisker.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            sphere_generators: classes,
            knots: self
                .knots
                .iter()
                .map(|k| RawKnot {
                    name: k.name.clone(),
                    trace: k
                        .trace
                        .events()
                        .iter()
                        .map(|(s, w)| ((if *s > 0 { "+" } else { "-" }).to_string(), w.to_string()))
                        .collect(),
                })
                .collect(),
        };
        toml::to_string(&raw).expect("scene serializes")
    }
}

fn class_from_raw(g: &SpecRef, c: RawClass) -> Result<SphereClass> {
    let ctx = format!("sphere class `{}`", c.name);
    let parse = |s: &str| RingElem::parse(g, s).map_err(|e| scene_err(&ctx, e));
    let mut rows = vec![RingElem::zero(g); g.num_generators()];
    for (name, v) in &c.lambda_gen {
        let w = Word::generator(g, name).map_err(|e| scene_err(&ctx, e))?;
        let idx = w.letters()[0].0;
        rows[idx] = parse(v)?;
    }
    SphereClass::new(c.name.clone(), c.embedded, c.equivariant, parse(&c.base_dax)?, parse(&c.lambda_u)?, rows)
        .map_err(|e| scene_err(&ctx, e))
}

struct Params<'a> {
    preset: &'a str,
    map: &'a BTreeMap<String, String>,
}

impl Params<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.raw(key)
            .ok_or_else(|| Error::Scene(format!("preset `{}` needs parameter `{key}`", self.preset)))
    }

    fn int<T: std::str::FromStr>(&self, key: &str, default: Option<T>) -> Result<T> {
        match (self.raw(key), default) {
            (Some(v), _) => v
                .trim()
                .parse()
                .map_err(|_| Error::Scene(format!("parameter `{key}` must be an integer, got `{v}`"))),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(Error::Scene(format!("preset `{}` needs parameter `{key}`", self.preset))),
        }
    }

    fn flag(&self, key: &str, default: bool) -> Result<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some("true") | Some("1") | Some("yes") => Ok(true),
            Some("false") | Some("0") | Some("no") => Ok(false),
            Some(v) => Err(Error::Scene(format!("parameter `{key}` must be a boolean, got `{v}`"))),
        }
    }

    fn mode(&self, default: Mode) -> Result<Mode> {
        match self.raw("mode") {
            None => Ok(default),
            Some("arcs") => Ok(Mode::Arcs),
            Some("circles") => Ok(Mode::Circles),
            Some(v) => Err(Error::Scene(format!("unknown mode `{v}`"))),
        }
    }
}

fn z_t() -> SpecRef {
    Arc::new(GroupSpec::FreeAbelian(vec!["t".into()]))
}

fn t_pow(z: &SpecRef, k: i64) -> Word {
    Word::generator_at(z, 0).pow(&k.into())
}

/// Class with `λ(Φ, x) = 1 - x̄` on every generator and `λ(Φ, u) = 1 - ū`.
pub fn boundary_class(g: &SpecRef, u: &Word) -> SphereClass {
    let one = RingElem::one(g);
    let rows = (0..g.num_generators())
        .map(|i| &one - &RingElem::from_word(&Word::generator_at(g, i).inv()))
        .collect();
    SphereClass::new("Phi", true, true, RingElem::zero(g), &one - &RingElem::from_word(&u.inv()), rows)
        .expect("principal crossed homomorphism")
}

/// Expands a named preset into an explicit scene.
pub fn preset_expand(name: &str, params: &BTreeMap<String, String>) -> Result<Scene> {
    let p = Params { preset: name, map: params };
    let known: &[&str] = match name {
        "disk_d" => &["d", "window"],
        "solid_torus_arcs" => &["d", "u", "window"],
        "solid_torus_circles" => &["d", "k0", "window"],
        "s1_x_sphere" => &["d", "W0", "window"],
        "aspherical" => &["d", "group", "mode", "u", "s", "window"],
        "three_mfd" => &["group", "mode", "u", "s", "boundary_sphere", "window"],
        "product_DkY" => &["d", "k", "group", "u", "window"],
        other => return Err(Error::Scene(format!("unknown preset `{other}` (known: {})", PRESETS.join(", ")))),
    };
    if let Some(k) = params.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(Error::Scene(format!("preset `{name}` has no parameter `{k}`")));
    }
    let d: u32 = if name == "three_mfd" { 3 } else { p.int("d", None)? };
    if d < 3 {
        return Err(Error::InvalidDimension(d));
    }
    let parse_group = |s: &str| -> Result<SpecRef> { Ok(Arc::new(parse_group_spec(s).map_err(|e| scene_err("group", e))?)) };
    let word = |g: &SpecRef, key: &str| -> Result<Word> {
        match p.raw(key) {
            Some(s) => Word::parse(g, s).map_err(|e| scene_err(key, e)),
            None => Ok(Word::identity(g)),
        }
    };

    let mut notes = Vec::new();
    let mut extra_free_rank = 0;
    let mut classes = Vec::new();
    let (group, mode, u_class, s_class, min_window) = match name {
        "disk_d" => {
            let g: SpecRef = Arc::new(GroupSpec::Trivial);
            let one = Word::identity(&g);
            (g, Mode::Arcs, one.clone(), one, 1)
        }
        "solid_torus_arcs" => {
            let g = z_t();
            let u = t_pow(&g, p.int("u", Some(0))?);
            (g.clone(), Mode::Arcs, u, Word::identity(&g), 1)
        }
        "solid_torus_circles" => {
            let g = z_t();
            let k0: i64 = p.int("k0", None)?;
            let s = t_pow(&g, k0);
            (g, Mode::Circles, s.clone(), s, k0.unsigned_abs() as u32 + 2)
        }
        "s1_x_sphere" => {
            if d < 4 {
                return Err(Error::Scene("s1_x_sphere needs d >= 4".into()));
            }
            let g = z_t();
            let w0: i64 = p.int("W0", None)?;
            let s = t_pow(&g, w0);
            let i2 = SphereClass::new("i2", true, false, RingElem::zero(&g), RingElem::zero(&g), vec![RingElem::one(&g)])?;
            let lambda_u = i2.lambda_word(&s)?;
            classes.push(SphereClass { lambda_u, ..i2 });
            if d == 4 {
                extra_free_rank = 1;
                notes.push("d = 4: the full target is this quotient plus one extra free Z summand".to_string());
            }
            (g, Mode::Circles, s.clone(), s, w0.unsigned_abs() as u32 + 2)
        }
        "aspherical" => {
            let g = parse_group(p.required("group")?)?;
            let mode = p.mode(Mode::Arcs)?;
            let s = word(&g, "s")?;
            let u = if mode == Mode::Circles && p.raw("u").is_none() { s.clone() } else { word(&g, "u")? };
            (g, mode, u, s, 1)
        }
        "three_mfd" => {
            let g = parse_group(p.required("group")?)?;
            let mode = p.mode(Mode::Arcs)?;
            let s = word(&g, "s")?;
            let u = if mode == Mode::Circles && p.raw("u").is_none() { s.clone() } else { word(&g, "u")? };
            if mode == Mode::Arcs && p.flag("boundary_sphere", false)? {
                classes.push(boundary_class(&g, &u));
            }
            (g, mode, u, s, 1)
        }
        "product_DkY" => {
            let k: u32 = p.int("k", None)?;
            if k == 0 || k >= d {
                return Err(Error::Scene(format!("product_DkY needs 1 <= k < d, got k = {k}")));
            }
            let g = parse_group(p.required("group")?)?;
            let u = word(&g, "u")?;
            (g.clone(), Mode::Arcs, u, Word::identity(&g), 1)
        }
        _ => unreachable!(),
    };
    let window = p.int("window", Some(DEFAULT_WINDOW.max(min_window)))?;
    let scene = Scene {
        dimension: d,
        mode,
        group,
        u_class,
        s_class,
        sphere_generators: classes,
        whisker: Whisker::new(),
        centralizer: None,
        window,
        sweep: None,
        preset: Some(name.to_string()),
        preset_params: params.clone(),
        extra_free_rank,
        notes,
        knots: Vec::new(),
    };
    scene.validate()?;
    Ok(scene)
}
