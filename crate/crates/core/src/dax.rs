//! Dax values of sphere classes and their translates.
//!
//! All public results are reduced (identity coefficient dropped). Pairing
//! values stay unreduced until the final step of each formula, since
//! reduction does not commute with left multiplication.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{same_spec, SpecRef, Word};
use crate::pairing::{lambda_flip, PairingTable, SphereClass};
use crate::ring::RingElem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Arcs,
    Circles,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Arcs => "arcs",
            Mode::Circles => "circles",
        })
    }
}

#[derive(Debug, Clone)]
pub struct DaxContext {
    table: PairingTable,
    mode: Mode,
    s_class: Word,
}

impl DaxContext {
    pub fn new(table: PairingTable, mode: Mode, s_class: Word) -> Result<Self> {
        if !same_spec(table.spec(), s_class.spec()) {
            return Err(Error::SpecMismatch);
        }
        if mode == Mode::Arcs && !s_class.is_identity() {
            return Err(Error::WrongMode("arcs mode needs a trivial circle class".into()));
        }
        Ok(DaxContext { table, mode, s_class })
    }

    pub fn arcs(table: PairingTable) -> Self {
        let s_class = Word::identity(table.spec());
        DaxContext {
            table,
            mode: Mode::Arcs,
            s_class,
        }
    }

    pub fn table(&self) -> &PairingTable {
        &self.table
    }

    pub fn d(&self) -> u32 {
        self.table.dimension()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn s_class(&self) -> &Word {
        &self.s_class
    }

    pub fn spec(&self) -> &SpecRef {
        self.table.spec()
    }

    /// Same context seen from the basepoint arc `g u`.
    pub fn rebased(&self, g: &Word) -> Result<DaxContext> {
        Ok(DaxContext {
            table: self.table.rebased(g)?,
            mode: self.mode,
            s_class: self.s_class.clone(),
        })
    }
}

/// `dax_u(a) = dax(a) + λ̄(a, u)`.
pub fn dax_rebase(a: &SphereClass, _ctx: &DaxContext) -> RingElem {
    &a.base_dax + &a.lambda_u.bar_reduce()
}

/// `λ(ga, g) = g λ(a, g)`, unreduced.
fn lambda_translate_self(g: &Word, a: &SphereClass) -> Result<RingElem> {
    Ok(a.lambda_word(g)?.left_mul_word(g))
}

/// `dax(ga) = g dax(a) ḡ - λ̄(ga, g) + λ̄(g, ga)`.
pub fn dax_translate(g: &Word, a: &SphereClass, ctx: &DaxContext) -> Result<RingElem> {
    let l = lambda_translate_self(g, a)?;
    let flipped = lambda_flip(&l, ctx.d());
    Ok(&(&a.base_dax.checked_conj(g)? - &l.bar_reduce()) + &flipped.bar_reduce())
}

/// `dax_u(ga) = g dax_u(a) ḡ + λ̄(ga, u) - λ̄(ga, g u) + λ̄(g, ga)`.
pub fn dax_u_general(g: &Word, a: &SphereClass, ctx: &DaxContext) -> Result<RingElem> {
    let conj = dax_rebase(a, ctx).checked_conj(g)?;
    let at_u = a.lambda_u.left_mul_word(g);
    let at_gu = a.lambda_arc(g, true)?.left_mul_word(g);
    let flipped = lambda_flip(&lambda_translate_self(g, a)?, ctx.d());
    Ok(&(&(&conj + &at_u.bar_reduce()) - &at_gu.bar_reduce()) + &flipped.bar_reduce())
}

/// `dax_u(ga) = λ̄(ga, u) - λ̄(ga, g) + λ̄(g, ga)`, valid for embedded `a`.
pub fn dax_u_embedded(g: &Word, a: &SphereClass, ctx: &DaxContext) -> Result<RingElem> {
    if !a.embedded {
        return Err(Error::InvalidPairing {
            class: a.name.clone(),
            message: "class has no embedded representative".into(),
        });
    }
    if !same_spec(g.spec(), a.spec()) {
        return Err(Error::SpecMismatch);
    }
    let at_u = a.lambda_u.left_mul_word(g).bar_reduce();
    let l = lambda_translate_self(g, a)?;
    let flipped = lambda_flip(&l, ctx.d());
    Ok(&(&at_u - &l.bar_reduce()) + &flipped.bar_reduce())
}

/// Closed form for translates of the removed-ball boundary sphere:
/// `(-1)^(d-1) ḡ - g s̄`, reduced.
pub fn dax_boundary_sphere(g: &Word, ctx: &DaxContext) -> Result<RingElem> {
    if ctx.mode != Mode::Circles {
        return Err(Error::WrongMode("boundary sphere needs circles mode".into()));
    }
    if !same_spec(g.spec(), ctx.spec()) {
        return Err(Error::SpecMismatch);
    }
    let gbar = RingElem::from_word(&g.inv());
    let first = if ctx.d() % 2 == 0 { -gbar } else { gbar };
    let second = RingElem::from_word(&g.mul_unchecked(&ctx.s_class.inv()));
    Ok((&first - &second).bar_reduce())
}

/// The class `h a` as a stand-alone sphere class.
pub fn translate_class(h: &Word, a: &SphereClass, ctx: &DaxContext) -> Result<SphereClass> {
    let base = dax_translate(h, a, ctx)?;
    Ok(a.translate_rows(h, format!("{h}*{}", a.name), base))
}

/// Dax values of the class translates over `enumeration`, plus the boundary
/// sphere translates in circles mode. Zeros are dropped and duplicates
/// removed, keeping first occurrence. Classes that are not equivariant only
/// contribute their untranslated value.
pub fn dax_image(ctx: &DaxContext, enumeration: &[Word]) -> Result<Vec<RingElem>> {
    let mut jobs: Vec<(&Word, Option<&SphereClass>)> = Vec::new();
    for g in enumeration {
        for a in ctx.table.classes() {
            if a.equivariant || g.is_identity() {
                jobs.push((g, Some(a)));
            }
        }
        if ctx.mode == Mode::Circles {
            jobs.push((g, None));
        }
    }
    let values = jobs
        .par_iter()
        .map(|(g, a)| match a {
            Some(a) => dax_u_general(g, a, ctx),
            None => dax_boundary_sphere(g, ctx),
        })
        .collect::<Result<Vec<_>>>()?;
    let mut seen = HashSet::new();
    Ok(values
        .into_iter()
        .filter(|v| !v.is_zero() && seen.insert(v.clone()))
        .collect())
}
