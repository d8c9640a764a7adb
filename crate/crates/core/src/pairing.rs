//! The equivariant intersection pairing.
//!
//! Values are stored only on sphere-class generators, against the group
//! generators and against the basepoint arc. Everything else is derived:
//!
//! * left `Z[G]`-linearity: `λ(g a, k) = g λ(a, k)`,
//! * the Fox rule in the arc slot: `λ(a, g k) = λ(a, g) + λ(a, k) ḡ`,
//! * the flipped pairing `λ(k, a) = (-1)^(d-1) conj(λ(a, k))`.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::{same_spec, SpecRef, Word};
use crate::ring::RingElem;

/// Exponents beyond this are refused when expanding Fox sums.
const MAX_EXPANSION: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereClass {
    pub name: String,
    /// Has an embedded representative compatible with the basepoint arc,
    /// so its base dax value vanishes.
    pub embedded: bool,
    /// When false the class spans only a `Z` summand of `π_{d-1}`; its
    /// `π_1`-translates are not separate generators.
    pub equivariant: bool,
    pub base_dax: RingElem,
    pub lambda_u: RingElem,
    /// Indexed by global generator index.
    pub lambda_gen: Vec<RingElem>,
}

impl SphereClass {
    pub fn new(
        name: impl Into<String>,
        embedded: bool,
        equivariant: bool,
        base_dax: RingElem,
        lambda_u: RingElem,
        lambda_gen: Vec<RingElem>,
    ) -> Result<Self> {
        let class = SphereClass {
            name: name.into(),
            embedded,
            equivariant,
            base_dax,
            lambda_u,
            lambda_gen,
        };
        class.validate()?;
        Ok(class)
    }

    fn invalid(&self, message: impl Into<String>) -> Error {
        Error::InvalidPairing {
            class: self.name.clone(),
            message: message.into(),
        }
    }

    pub fn spec(&self) -> &SpecRef {
        self.base_dax.spec()
    }

    pub fn validate(&self) -> Result<()> {
        let spec = self.spec();
        if !same_spec(spec, self.lambda_u.spec())
            || self.lambda_gen.iter().any(|r| !same_spec(spec, r.spec()))
        {
            return Err(Error::SpecMismatch);
        }
        if self.lambda_gen.len() != spec.num_generators() {
            return Err(self.invalid(format!(
                "expected {} generator rows, got {}",
                spec.num_generators(),
                self.lambda_gen.len()
            )));
        }
        if self.embedded && !self.base_dax.is_zero() {
            return Err(self.invalid("embedded class must have zero base dax"));
        }
        if !self.base_dax.identity_coeff().is_zero() {
            return Err(self.invalid("base dax must have zero identity coefficient"));
        }
        self.check_cocycle()
    }

    /// The generator rows must extend to a crossed homomorphism, i.e. be
    /// compatible with every defining relator of the presentation.
    fn check_cocycle(&self) -> Result<()> {
        let spec = self.spec().clone();
        let n = spec.num_generators();
        let one = RingElem::one(&spec);
        let gens: Vec<Word> = (0..n).map(|i| Word::generator_at(&spec, i)).collect();
        for i in 0..n {
            for j in (i + 1)..n {
                if !spec.generators_commute(i, j) {
                    continue;
                }
                // xy = yx  =>  λ(x)(1 - ȳ) = λ(y)(1 - x̄)
                let lhs = &self.lambda_gen[i] * &(&one - &RingElem::from_word(&gens[j].inv()));
                let rhs = &self.lambda_gen[j] * &(&one - &RingElem::from_word(&gens[i].inv()));
                if lhs != rhs {
                    return Err(self.invalid(format!(
                        "rows for `{}` and `{}` violate their commutation relator",
                        gens[i], gens[j]
                    )));
                }
            }
            if let Some(order) = spec.generator_order(i) {
                // x^m = 1  =>  λ(x)(1 + x̄ + ... + x̄^(m-1)) = 0
                let norm = geometric(&gens[i].inv(), order)?;
                if !(&self.lambda_gen[i] * &norm).is_zero() {
                    return Err(self.invalid(format!(
                        "row for `{}` violates its torsion relator",
                        gens[i]
                    )));
                }
            }
        }
        Ok(())
    }

    /// `λ(a, k)` for a group element `k`, by the Fox rule along the normal
    /// form of `k`.
    pub fn lambda_word(&self, k: &Word) -> Result<RingElem> {
        let spec = self.spec();
        if !same_spec(spec, k.spec()) {
            return Err(Error::SpecMismatch);
        }
        let mut acc = RingElem::zero(spec);
        let mut prefix = Word::identity(spec);
        for (gen, exp) in k.letters() {
            let x = Word::generator_at(spec, gen);
            let piece = fox_power(&self.lambda_gen[gen], &x, &exp)?;
            acc = &acc + &piece.right_mul_word(&prefix.inv());
            prefix = prefix.mul_unchecked(&x.pow(&exp));
        }
        Ok(acc)
    }

    /// `λ(a, g k)` where `k` is the basepoint arc when `use_u`, else the
    /// trivial arc.
    pub fn lambda_arc(&self, g: &Word, use_u: bool) -> Result<RingElem> {
        let mut v = self.lambda_word(g)?;
        if use_u {
            v = &v + &self.lambda_u.right_mul_word(&g.inv());
        }
        Ok(v)
    }

    /// `λ(h a, k)` rows for the translate `h a`: every row left-multiplied
    /// by `h`. The translate is not flagged as embedded.
    pub(crate) fn translate_rows(&self, h: &Word, name: String, base_dax: RingElem) -> SphereClass {
        SphereClass {
            name,
            embedded: false,
            equivariant: self.equivariant,
            base_dax,
            lambda_u: self.lambda_u.left_mul_word(h),
            lambda_gen: self.lambda_gen.iter().map(|r| r.left_mul_word(h)).collect(),
        }
    }
}

/// `1 + x + ... + x^(n-1)`.
fn geometric(x: &Word, n: &BigInt) -> Result<RingElem> {
    let count = n
        .to_u64()
        .filter(|&c| c <= MAX_EXPANSION)
        .ok_or_else(|| Error::InvalidPairing {
            class: String::new(),
            message: format!("exponent {n} too large to expand"),
        })?;
    let mut acc = RingElem::zero(x.spec());
    let mut p = Word::identity(x.spec());
    for _ in 0..count {
        acc = &acc + &RingElem::from_word(&p);
        p = p.mul_unchecked(x);
    }
    Ok(acc)
}

/// `λ(a, x^e)` from `λ(a, x)`.
fn fox_power(row: &RingElem, x: &Word, e: &BigInt) -> Result<RingElem> {
    if e.is_zero() || row.is_zero() {
        return Ok(RingElem::zero(x.spec()));
    }
    if e.is_positive() {
        // λ(x)(1 + x̄ + ... + x̄^(e-1))
        Ok(row * &geometric(&x.inv(), e)?)
    } else {
        // -λ(x)(x + x^2 + ... + x^|e|)
        let sum = geometric(x, &-e)?.left_mul_word(x);
        Ok(-(row * &sum))
    }
}

#[derive(Debug, Clone)]
pub struct PairingTable {
    d: u32,
    classes: Vec<SphereClass>,
    u_class: Word,
}

impl PairingTable {
    pub fn new(d: u32, classes: Vec<SphereClass>, u_class: Word) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidDimension(d));
        }
        for c in &classes {
            if !same_spec(c.spec(), u_class.spec()) {
                return Err(Error::SpecMismatch);
            }
            c.validate()?;
        }
        Ok(PairingTable { d, classes, u_class })
    }

    pub fn dimension(&self) -> u32 {
        self.d
    }

    pub fn classes(&self) -> &[SphereClass] {
        &self.classes
    }

    pub fn u_class(&self) -> &Word {
        &self.u_class
    }

    pub fn spec(&self) -> &SpecRef {
        self.u_class.spec()
    }

    pub fn class(&self, name: &str) -> Option<&SphereClass> {
        self.classes.iter().find(|c| c.name == name)
    }

    /// The same data seen from the basepoint arc `g u`.
    pub fn rebased(&self, g: &Word) -> Result<PairingTable> {
        let classes = self
            .classes
            .iter()
            .map(|c| {
                Ok(SphereClass {
                    lambda_u: c.lambda_arc(g, true)?,
                    ..c.clone()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PairingTable {
            d: self.d,
            classes,
            u_class: g.mul(&self.u_class)?,
        })
    }
}

/// `Σ g_i λ(a_i, k 𝒌)`.
pub fn lambda_linear(coeffs: &[(Word, &SphereClass)], k: &Word, use_u: bool) -> Result<RingElem> {
    let mut acc = RingElem::zero(k.spec());
    for (g, a) in coeffs {
        if !same_spec(g.spec(), k.spec()) {
            return Err(Error::SpecMismatch);
        }
        acc = acc.checked_add(&a.lambda_arc(k, use_u)?.left_mul_word(g))?;
    }
    Ok(acc)
}

/// `λ(k, a)` from `v = λ(a, k)`.
pub fn lambda_flip(v: &RingElem, d: u32) -> RingElem {
    let r = v.involute();
    if d % 2 == 0 {
        -r
    } else {
        r
    }
}

/// Right-hand side of `λ̄(ga, g𝒌) = λ̄(ga, g) + g λ̄(a, 𝒌) ḡ`.
pub fn lambdabar_conj_shift(a: &SphereClass, g: &Word, k_is_u: bool) -> Result<RingElem> {
    let first = a.lambda_word(g)?.left_mul_word(g).bar_reduce();
    let second = if k_is_u {
        a.lambda_u.bar_reduce().conj(g)
    } else {
        RingElem::zero(g.spec())
    };
    Ok(&first + &second)
}
