//! Relation sets on a finite window of the group ring and the abelian
//! groups they present.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::dax::{dax_boundary_sphere, dax_u_general, DaxContext, Mode};
use crate::error::{Error, Result};
use crate::group::{same_spec, GroupElem, SpecRef, Word};
use crate::ring::RingElem;
use crate::snf::Smith;

/// Dax values of centralizer whiskers, keyed by centralizer element.
pub type Whisker = BTreeMap<Word, RingElem>;

/// Closure steps allowed in orbit reduction.
pub const ORBIT_ITERATION_CAP: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    DaxImage,
    Whisker,
    BoundarySphere,
    Concordance,
    Sphere3mfd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub value: RingElem,
    pub provenance: Provenance,
}

#[derive(Debug, Clone)]
pub struct RelationSet {
    spec: SpecRef,
    window: u32,
    generators: Vec<Word>,
    index: Arc<HashMap<GroupElem, usize>>,
    relations: Vec<Relation>,
    smith: OnceLock<Arc<Smith>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianStructure {
    pub free_rank: usize,
    #[serde(serialize_with = "ser_bigints")]
    pub torsion: Vec<BigInt>,
    pub window: u32,
    pub stable: bool,
}

fn ser_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl RelationSet {
    /// Window generators: the ball of radius `window` minus the identity.
    pub fn empty(spec: &SpecRef, window: u32) -> RelationSet {
        let generators: Vec<Word> = spec.ball(window).into_iter().filter(|w| !w.is_identity()).collect();
        let index = generators.iter().enumerate().map(|(i, w)| (w.elem().clone(), i)).collect();
        RelationSet {
            spec: spec.clone(),
            window,
            generators,
            index: Arc::new(index),
            relations: Vec::new(),
            smith: OnceLock::new(),
        }
    }

    pub fn spec(&self) -> &SpecRef {
        &self.spec
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn fits(&self, v: &RingElem) -> bool {
        v.support().iter().all(|w| self.index.contains_key(w.elem()))
    }

    /// Appends a relation, refusing ones that leave the window. Zero and
    /// repeated values are skipped.
    pub fn push(&mut self, value: RingElem, provenance: Provenance) -> Result<()> {
        if !same_spec(&self.spec, value.spec()) {
            return Err(Error::SpecMismatch);
        }
        if !self.fits(&value) {
            return Err(Error::WindowOverflow {
                window: self.window,
                relation: value.to_string(),
            });
        }
        if value.is_zero() || self.relations.iter().any(|r| r.value == value) {
            return Ok(());
        }
        self.smith = OnceLock::new();
        self.relations.push(Relation { value, provenance });
        Ok(())
    }

    /// Coefficient vector over the window generators; the identity
    /// coefficient is ignored.
    pub fn vector(&self, v: &RingElem) -> Result<Vec<BigInt>> {
        let mut out = vec![BigInt::zero(); self.generators.len()];
        for (w, c) in v.bar_reduce().terms() {
            let i = self.index.get(w.elem()).ok_or_else(|| Error::WindowOverflow {
                window: self.window,
                relation: v.to_string(),
            })?;
            out[*i] = c.clone();
        }
        Ok(out)
    }

    pub fn element(&self, x: &[BigInt]) -> RingElem {
        let mut r = RingElem::zero(&self.spec);
        for (w, c) in self.generators.iter().zip(x) {
            if !c.is_zero() {
                r = &r + &RingElem::monomial(w, c.clone());
            }
        }
        r
    }

    pub fn matrix(&self) -> Vec<Vec<BigInt>> {
        self.relations
            .iter()
            .map(|r| self.vector(&r.value).expect("relations fit the window"))
            .collect()
    }

    pub fn smith(&self) -> Arc<Smith> {
        self.smith
            .get_or_init(|| Arc::new(Smith::compute(&self.matrix(), self.generators.len())))
            .clone()
    }

    /// Quotient coordinates of `v` (see [`Smith::moduli`]).
    pub fn coordinates(&self, v: &RingElem) -> Result<Vec<BigInt>> {
        Ok(self.smith().coordinates(&self.vector(v)?))
    }

    /// The canonical representative of the class of `v`.
    pub fn reduce(&self, v: &RingElem) -> Result<RingElem> {
        Ok(self.element(&self.smith().canonical_lift(&self.vector(v)?)))
    }

    pub fn contains(&self, v: &RingElem) -> Result<bool> {
        Ok(self.smith().in_rowspace(&self.vector(v)?))
    }
}

/// Quotient of the smaller window by the part of the relation lattice it
/// contains. Depends on the lattice only, not on the chosen relations.
fn sub_window_structure(rs: &RelationSet, window: u32) -> (usize, Vec<BigInt>) {
    let inner: Vec<usize> = rs
        .generators
        .iter()
        .enumerate()
        .filter(|(_, g)| g.length() <= window.into())
        .map(|(i, _)| i)
        .collect();
    let outer: Vec<usize> = (0..rs.generators.len()).filter(|i| !inner.contains(i)).collect();
    let m = rs.matrix();
    let m_out: Vec<Vec<BigInt>> = m.iter().map(|r| outer.iter().map(|&j| r[j].clone()).collect()).collect();
    let kernel = Smith::compute(&m_out, outer.len()).left_kernel();
    let rows: Vec<Vec<BigInt>> = kernel
        .iter()
        .map(|x| {
            inner
                .iter()
                .map(|&j| x.iter().zip(&m).map(|(c, r)| c * &r[j]).sum())
                .collect()
        })
        .collect();
    let s = Smith::compute(&rows, inner.len());
    (s.free_rank(), s.torsion())
}

/// Smith normal form of the relation matrix. The structure is stable when
/// the torsion agrees with that of the next smaller window, cut out of the
/// same relation lattice.
pub fn quotient_structure(rs: &RelationSet) -> AbelianStructure {
    let s = rs.smith();
    let (free_rank, torsion) = (s.free_rank(), s.torsion());
    let stable = rs.window > 0 && sub_window_structure(rs, rs.window - 1).1 == torsion;
    AbelianStructure {
        free_rank,
        torsion,
        window: rs.window,
        stable,
    }
}

/// Free-rank growth `free_rank(W) = alpha W + beta` fitted on the last two
/// windows; `linear` says whether every point lies on that line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profile {
    pub points: Vec<AbelianStructure>,
    pub alpha: f64,
    pub beta: f64,
    pub linear: bool,
    pub torsion_constant: bool,
}

pub fn profile(points: Vec<AbelianStructure>) -> Profile {
    let n = points.len();
    let (alpha, beta, linear) = if n >= 2 {
        let (a, b) = (&points[n - 2], &points[n - 1]);
        let dw = i64::from(b.window) - i64::from(a.window);
        let df = b.free_rank as i64 - a.free_rank as i64;
        let alpha = if dw == 0 { 0.0 } else { df as f64 / dw as f64 };
        let beta = b.free_rank as f64 - alpha * f64::from(b.window);
        let linear = dw != 0
            && points.iter().all(|p| {
                (p.free_rank as i64 - b.free_rank as i64) * dw == df * (i64::from(p.window) - i64::from(b.window))
            });
        (alpha, beta, linear)
    } else if n == 1 {
        (0.0, points[0].free_rank as f64, true)
    } else {
        (0.0, 0.0, true)
    };
    let torsion_constant = points.windows(2).all(|w| w[0].torsion == w[1].torsion);
    Profile {
        points,
        alpha,
        beta,
        linear,
        torsion_constant,
    }
}

/// Longest word appearing in the context data.
pub fn scene_reach(ctx: &DaxContext) -> u32 {
    let len = |w: &Word| w.length().to_u32().unwrap_or(u32::MAX);
    let mut reach = len(ctx.table().u_class()).max(len(ctx.s_class()));
    for a in ctx.table().classes() {
        for r in std::iter::once(&a.base_dax)
            .chain(std::iter::once(&a.lambda_u))
            .chain(a.lambda_gen.iter())
        {
            for w in r.support() {
                reach = reach.max(len(&w));
            }
        }
    }
    reach.max(1)
}

/// Translate values over a window of group elements: one entry per class
/// and element, plus boundary-sphere entries when `boundary`.
fn translate_values(
    ctx: &DaxContext,
    enumeration: &[Word],
    class_tag: Provenance,
    boundary: bool,
) -> Result<Vec<(bool, RingElem, Provenance)>> {
    let mut jobs: Vec<(&Word, Option<usize>)> = Vec::new();
    for g in enumeration {
        for (i, a) in ctx.table().classes().iter().enumerate() {
            if a.equivariant || g.is_identity() {
                jobs.push((g, Some(i)));
            }
        }
        if boundary {
            jobs.push((g, None));
        }
    }
    jobs.par_iter()
        .map(|(g, i)| {
            Ok(match i {
                Some(i) => (g.is_identity(), dax_u_general(g, &ctx.table().classes()[*i], ctx)?, class_tag),
                None => (g.is_identity(), dax_boundary_sphere(g, ctx)?, Provenance::BoundarySphere),
            })
        })
        .collect()
}

/// Keeps translate relations that fit the window; the untranslated ones
/// must fit or the window is too small.
fn fill(rs: &mut RelationSet, values: Vec<(bool, RingElem, Provenance)>) -> Result<()> {
    for (core, v, tag) in values {
        if rs.fits(&v) {
            rs.push(v, tag)?;
        } else if core {
            return Err(Error::WindowOverflow {
                window: rs.window,
                relation: v.to_string(),
            });
        }
    }
    Ok(())
}

fn enumeration(ctx: &DaxContext, window: u32) -> Vec<Word> {
    ctx.spec().ball(window.saturating_add(scene_reach(ctx)))
}

pub fn build_rel_arcs(ctx: &DaxContext, window: u32) -> Result<RelationSet> {
    if ctx.mode() != Mode::Arcs {
        return Err(Error::WrongMode("arc relations need arcs mode".into()));
    }
    let mut rs = RelationSet::empty(ctx.spec(), window);
    let values = translate_values(ctx, &enumeration(ctx, window), Provenance::DaxImage, false)?;
    fill(&mut rs, values)?;
    Ok(rs)
}

pub fn build_rel_circles(ctx: &DaxContext, whisker: &Whisker, window: u32) -> Result<RelationSet> {
    if ctx.mode() != Mode::Circles {
        return Err(Error::WrongMode("circle relations need circles mode".into()));
    }
    let mut rs = RelationSet::empty(ctx.spec(), window);
    let values = translate_values(ctx, &enumeration(ctx, window), Provenance::DaxImage, true)?;
    fill(&mut rs, values)?;
    validate_whisker(ctx, whisker, &rs)?;
    for v in whisker.values() {
        rs.push(v.bar_reduce(), Provenance::Whisker)?;
    }
    Ok(rs)
}

/// Relations for `d = 3`. In circles mode the whisker values are not
/// relations; they enter through the centralizer action only.
pub fn build_rel_3mfd(ctx: &DaxContext, window: u32, circles: bool, whisker: &Whisker) -> Result<RelationSet> {
    if ctx.d() != 3 {
        return Err(Error::InvalidDimension(ctx.d()));
    }
    let want = if circles { Mode::Circles } else { Mode::Arcs };
    if ctx.mode() != want {
        return Err(Error::WrongMode(format!("expected {want} mode")));
    }
    let mut rs = RelationSet::empty(ctx.spec(), window);
    let values = translate_values(ctx, &enumeration(ctx, window), Provenance::Sphere3mfd, circles)?;
    fill(&mut rs, values)?;
    if circles {
        validate_whisker(ctx, whisker, &rs)?;
    } else if !whisker.is_empty() {
        return Err(Error::InvalidWhisker("whiskers need circles mode".into()));
    }
    Ok(rs)
}

/// Appends `ḡ - g` for every window generator.
pub fn concordance_quotient(rs: &RelationSet) -> RelationSet {
    let mut out = rs.clone();
    let mut seen = HashSet::new();
    for g in &rs.generators {
        let v = &RingElem::from_word(&g.inv()) - &RingElem::from_word(g);
        if v.is_zero() || seen.contains(&-v.clone()) {
            continue;
        }
        seen.insert(v.clone());
        out.push(v, Provenance::Concordance).expect("window is closed under inverse");
    }
    out
}

/// Whisker value of an action element; elements without an entry act by
/// plain conjugation.
fn whisker_at(whisker: &Whisker, b: &Word) -> RingElem {
    whisker.get(b).cloned().unwrap_or_else(|| RingElem::zero(b.spec()))
}

/// `b r b̄ + w(b)`.
fn act(b: &Word, w: &RingElem, r: &RingElem) -> RingElem {
    &r.conj(b) + w
}

/// Action elements: whisker keys, supplied centralizer elements, and their
/// inverses, each with its whisker value.
fn action_elements(centralizer: &[Word], whisker: &Whisker) -> Vec<(Word, RingElem)> {
    let mut set: BTreeSet<Word> = whisker.keys().cloned().collect();
    set.extend(centralizer.iter().cloned());
    let mut out = Vec::new();
    for b in set.into_iter().filter(|b| !b.is_identity()) {
        let w = whisker_at(whisker, &b);
        // w(b⁻¹) = -b̄ w(b) b
        let w_inv = -w.conj(&b.inv());
        out.push((b.inv(), w_inv));
        out.push((b, w));
    }
    out
}

/// Default centralizer generators for orbit reduction: group generators
/// commuting with `s`, `s` itself, and the whisker keys.
pub fn default_centralizer(ctx: &DaxContext, whisker: &Whisker) -> Vec<Word> {
    let spec = ctx.spec();
    let s = ctx.s_class();
    let mut out: BTreeSet<Word> = (0..spec.num_generators())
        .map(|i| Word::generator_at(spec, i))
        .filter(|g| g.commutes_with(s))
        .collect();
    if !s.is_identity() {
        out.insert(s.clone());
    }
    out.extend(whisker.keys().cloned());
    out.into_iter().collect()
}

/// Checks a whisker table against the crossed-homomorphism rules of the
/// centralizer action, modulo `rs`.
pub fn validate_whisker(ctx: &DaxContext, whisker: &Whisker, rs: &RelationSet) -> Result<()> {
    let s = ctx.s_class();
    let bad = |m: String| Err(Error::InvalidWhisker(m));
    let zero_mod = |v: &RingElem| -> Result<bool> {
        if !rs.fits(&v.bar_reduce()) {
            return Err(Error::WindowOverflow {
                window: rs.window,
                relation: v.to_string(),
            });
        }
        rs.contains(v)
    };
    for (b, w) in whisker {
        if !same_spec(b.spec(), ctx.spec()) || !same_spec(w.spec(), ctx.spec()) {
            return Err(Error::SpecMismatch);
        }
        if b.conj(s) != *b {
            return bad(format!("key `{b}` does not commute with `{s}`"));
        }
        if s.is_identity() && !w.bar_reduce().is_zero() {
            return bad(format!("nonzero entry for `{b}` with trivial circle class"));
        }
        if !s.is_identity() && is_power_of(b, s) && !zero_mod(w)? {
            return bad(format!("entry for power `{b}` of the circle class is nonzero"));
        }
        if let Some(m) = element_order(b) {
            // Σ_{i<m} b^i w(b) b^-i must vanish
            let mut acc = RingElem::zero(ctx.spec());
            let mut p = Word::identity(ctx.spec());
            for _ in 0..m {
                acc = &acc + &w.conj(&p);
                p = p.mul_unchecked(b);
            }
            if !zero_mod(&acc)? {
                return bad(format!("entry for `{b}` is incompatible with its finite order"));
            }
        }
    }
    // (b1 b2) ⋆ r = b1 ⋆ (b2 ⋆ r) forces w(b1 b2) = w(b1) + b1 w(b2) b̄1
    let keys: Vec<&Word> = whisker.keys().collect();
    for b1 in &keys {
        for b2 in &keys {
            let prod = b1.mul_unchecked(b2);
            let composed = &whisker[*b1] + &whisker[*b2].conj(b1);
            if let Some(wp) = whisker.get(&prod) {
                if !zero_mod(&(wp - &composed))? {
                    return bad(format!("action axiom fails for `{b1}` and `{b2}`"));
                }
            }
            if b1 < b2 && prod == b2.mul_unchecked(b1) {
                let other = &whisker[*b2] + &whisker[*b1].conj(b2);
                if !zero_mod(&(&composed - &other))? {
                    return bad(format!("entries for commuting `{b1}` and `{b2}` disagree"));
                }
            }
        }
    }
    Ok(())
}

fn is_power_of(b: &Word, s: &Word) -> bool {
    let bound = b.length().to_i64().unwrap_or(i64::MAX).saturating_add(64);
    let mut p = Word::identity(s.spec());
    let mut q = Word::identity(s.spec());
    for _ in 0..=bound.min(4096) {
        if p == *b || q == *b {
            return true;
        }
        p = p.mul_unchecked(s);
        q = q.mul_unchecked(&s.inv());
    }
    false
}

/// Order of `b` when finite and small.
fn element_order(b: &Word) -> Option<u64> {
    if b.is_identity() {
        return Some(1);
    }
    if b.letters().is_empty() {
        return None;
    }
    // only products of cyclic factors have finite order
    let spec = b.spec();
    let all_torsion = b.letters().iter().all(|(g, _)| spec.generator_order(*g).is_some());
    if !all_torsion {
        return None;
    }
    let mut p = b.clone();
    for n in 1..=1_000_000u64 {
        if p.is_identity() {
            return Some(n);
        }
        p = p.mul_unchecked(b);
    }
    None
}

/// Canonical representative of the orbit of `value` modulo `rs` under the
/// centralizer action `b ⋆ r = b r b̄ + w(b)`.
pub fn centralizer_orbit_reduce(
    value: &RingElem,
    rs: &RelationSet,
    centralizer: &[Word],
    whisker: &Whisker,
) -> Result<RingElem> {
    let escape = |v: &RingElem| Error::OrbitEscapesWindow { value: v.to_string() };
    let start = rs.reduce(value).map_err(|_| escape(value))?;
    let actions = action_elements(centralizer, whisker);
    let mut seen: BTreeSet<RingElem> = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    let mut steps = 0usize;
    while let Some(r) = queue.pop_front() {
        for (b, w) in &actions {
            steps += 1;
            if steps > ORBIT_ITERATION_CAP {
                return Err(escape(value));
            }
            let next = act(b, w, &r).bar_reduce();
            if !rs.fits(&next) {
                return Err(escape(&next));
            }
            let next = rs.reduce(&next)?;
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Ok(seen.into_iter().next().expect("orbit contains the start"))
}
