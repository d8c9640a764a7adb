//! Command execution on scenes and report rendering.

use std::fmt::Write as _;

use serde::Serialize;

use crate::dax::Mode;
use crate::error::{Error, Result};
use crate::quotient::{concordance_quotient, profile, quotient_structure, AbelianStructure, Profile, Provenance, RelationSet};
use crate::ring::RingElem;
use crate::scene::Scene;
use crate::trace::{dax_of_knot, eval_dax_trace, mu2_reduce};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Target,
    Eval,
    Concordance,
    Orbit,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Target => "target",
            Command::Eval => "eval",
            Command::Concordance => "concordance",
            Command::Orbit => "orbit",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationOut {
    pub value: String,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Serialize)]
pub struct KnotOut {
    pub name: String,
    pub raw: String,
    pub representative: String,
    pub coordinates: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu2: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub preset: Option<String>,
    pub dimension: u32,
    pub mode: Mode,
    pub group: String,
    pub u_class: String,
    pub s_class: String,
    pub window: u32,
    pub generators: Vec<String>,
    pub relations: Vec<RelationOut>,
    pub free_rank: usize,
    pub torsion: Vec<String>,
    pub extra_free_rank: u32,
    pub stable: bool,
    pub profile: Profile,
    pub moduli: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub centralizer: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub knots: Vec<KnotOut>,
    pub notes: Vec<String>,
}

fn strings<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

/// Sweep windows: the scene's list if given; otherwise `{4, 6, 8, 10}`
/// for abelian groups and the last three radii for others. The scene
/// window is always included.
pub fn sweep_windows(scene: &Scene) -> Vec<u32> {
    let w = scene.window;
    let mut out = match &scene.sweep {
        Some(s) => s.clone(),
        None if scene.group.is_abelian() => vec![4, 6, 8, 10],
        None => (w.saturating_sub(2).max(1)..=w).collect(),
    };
    out.push(w);
    out.sort_unstable();
    out.dedup();
    out
}

fn sweep(scene: &Scene, notes: &mut Vec<String>, transform: impl Fn(&RelationSet) -> RelationSet) -> Result<Profile> {
    let mut points: Vec<AbelianStructure> = Vec::new();
    for w in sweep_windows(scene) {
        match scene.relations(w) {
            Ok(rs) => points.push(quotient_structure(&transform(&rs))),
            Err(Error::WindowOverflow { .. }) if w != scene.window => {
                notes.push(format!("sweep window {w} skipped: too small for the scene data"));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(profile(points))
}

/// Runs `command` on the scene at its window.
pub fn run_scene(scene: &Scene, command: Command) -> Result<Report> {
    let base = scene.relations(scene.window)?;
    let concordance = command == Command::Concordance;
    let rs = if concordance { concordance_quotient(&base) } else { base.clone() };
    let structure = quotient_structure(&rs);
    let mut notes = scene.notes.clone();
    let transform = |r: &RelationSet| if concordance { concordance_quotient(r) } else { r.clone() };
    let prof = sweep(scene, &mut notes, transform)?;
    let stable = structure.stable && prof.torsion_constant;

    let mut centralizer = Vec::new();
    let mut knots = Vec::new();
    match command {
        Command::Target => {}
        Command::Eval => {
            for k in &scene.knots {
                let v = dax_of_knot(k, &rs, None)?;
                knots.push(KnotOut {
                    name: k.name.clone(),
                    raw: v.raw.to_string(),
                    representative: v.representative.to_string(),
                    coordinates: strings(&v.coordinates),
                    mu2: None,
                    orbit: None,
                });
            }
        }
        Command::Concordance => {
            for k in &scene.knots {
                let raw = eval_dax_trace(&k.trace);
                let folded = mu2_reduce(&raw);
                knots.push(KnotOut {
                    name: k.name.clone(),
                    raw: raw.to_string(),
                    representative: rs.reduce(&raw)?.to_string(),
                    coordinates: strings(&rs.coordinates(&raw)?),
                    mu2: Some(folded.to_string()),
                    orbit: None,
                });
            }
        }
        Command::Orbit => {
            if scene.dimension != 3 || scene.mode != Mode::Circles {
                return Err(Error::WrongMode("orbit needs a d = 3 circles scene".into()));
            }
            let cent = scene.centralizer_or_default()?;
            for k in &scene.knots {
                let v = dax_of_knot(k, &rs, Some((&cent, &scene.whisker)))?;
                knots.push(KnotOut {
                    name: k.name.clone(),
                    raw: v.raw.to_string(),
                    representative: v.representative.to_string(),
                    coordinates: strings(&v.coordinates),
                    mu2: None,
                    orbit: v.orbit.as_ref().map(RingElem::to_string),
                });
            }
            centralizer = strings(&cent);
        }
    }

    Ok(Report {
        command: command.name(),
        preset: scene.preset.clone(),
        dimension: scene.dimension,
        mode: scene.mode,
        group: scene.group.to_string(),
        u_class: scene.u_class.to_string(),
        s_class: scene.s_class.to_string(),
        window: scene.window,
        generators: strings(rs.generators()),
        relations: rs
            .relations()
            .iter()
            .map(|r| RelationOut {
                value: r.value.to_string(),
                provenance: r.provenance,
            })
            .collect(),
        free_rank: structure.free_rank,
        torsion: strings(&structure.torsion),
        extra_free_rank: scene.extra_free_rank,
        stable,
        profile: prof,
        moduli: strings(&rs.smith().moduli()),
        centralizer,
        knots,
        notes,
    })
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command: {}", self.command);
        if let Some(p) = &self.preset {
            let _ = writeln!(s, "preset: {p}");
        }
        let _ = writeln!(s, "dimension: {}  mode: {}  group: {}", self.dimension, self.mode, self.group);
        let _ = writeln!(s, "u: {}  s: {}  window: {}", self.u_class, self.s_class, self.window);
        let _ = writeln!(s, "generators ({}): {}", self.generators.len(), self.generators.join(", "));
        let _ = writeln!(s, "relations ({}):", self.relations.len());
        for r in &self.relations {
            let tag = serde_json::to_value(r.provenance).expect("tag");
            let _ = writeln!(s, "  {}  [{}]", r.value, tag.as_str().unwrap_or_default());
        }
        let mut summands = Vec::new();
        if self.free_rank > 0 {
            summands.push(format!("Z^{}", self.free_rank));
        }
        summands.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        let group = if summands.is_empty() { "0".to_string() } else { summands.join(" + ") };
        let _ = writeln!(s, "quotient: {group}");
        if self.extra_free_rank > 0 {
            let _ = writeln!(s, "extra free summands: Z^{}", self.extra_free_rank);
        }
        let _ = writeln!(s, "stable: {}", self.stable);
        let pts: Vec<String> = self
            .profile
            .points
            .iter()
            .map(|p| {
                let tors: Vec<String> = p.torsion.iter().map(|t| t.to_string()).collect();
                format!("W={} free={} torsion=[{}]", p.window, p.free_rank, tors.join(","))
            })
            .collect();
        let _ = writeln!(s, "profile: {}", pts.join("; "));
        let _ = writeln!(
            s,
            "growth: free_rank(W) = {} W + {}  (linear: {})",
            self.profile.alpha, self.profile.beta, self.profile.linear
        );
        if !self.centralizer.is_empty() {
            let _ = writeln!(s, "centralizer: {}", self.centralizer.join(", "));
        }
        for k in &self.knots {
            let _ = write!(s, "knot {}: dax = {}  class = {}  coords = [{}]", k.name, k.raw, k.representative, k.coordinates.join(", "));
            if let Some(m) = &k.mu2 {
                let _ = write!(s, "  mu2 = {m}");
            }
            if let Some(o) = &k.orbit {
                let _ = write!(s, "  orbit = {o}");
            }
            s.push('\n');
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::WindowOverflow { .. } | Error::OrbitEscapesWindow { .. } => 3,
        Error::Syntax { .. }
        | Error::UndecidableClass(_)
        | Error::InvalidGroup(_)
        | Error::UnknownGenerator(_)
        | Error::SpecMismatch
        | Error::InvalidPairing { .. }
        | Error::InvalidDimension(_)
        | Error::InvalidWhisker(_)
        | Error::Scene(_) => 2,
        Error::WrongMode(_) => 1,
    }
}
