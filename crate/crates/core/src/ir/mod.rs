//! Formal noncommutative *-algebra IR.
//!
//! An [`Expr`] is a finite sum of [`Term`]s; each term is an exact rational
//! coefficient, a multiset of opaque scalar factors (`w(...)`, `v(...)`
//! applied to words), and a noncommutative word of [`Atom`]s.  Atoms are
//! tagged generators (`a3`, `b0*`) or formal map applications (`r(...)`,
//! `R(...)`, `p[t](...)`).  Times and coefficients are exact rationals; no
//! floating point enters symbolic results.
//!
//! [`Expr::normalize`] rewrites to the canonical form used for bit-exact
//! regression: multilinear expansion of sums and scalars inside map and
//! functional arguments, `r(1) = p[t](1) = 1`, `w(1) = v(1) = 1`,
//! `p[0](x) = x`, pure nesting `p[s](p[t](x)) = p[s+t](x)`, like-term
//! merging, zero elimination, and a total term order.

mod numeric;
mod parse;
mod render;

pub use numeric::{EvalError, InterpretationContext};
pub use parse::{parse, parse_rat, ParseError};
pub use render::{canonical_text, latex_text, render_rat};

use std::cmp::Ordering;

pub type Rat = num_rational::Ratio<i64>;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

/// Which side of the liberation pair a generator belongs to.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum AlgebraTag {
    A,
    B,
}

/// Formal map symbols: `r` is the liberation map ρ, `R` the strong-centering
/// map of chapter-6 style recursions, `p[t]` the semigroup map at time t.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum MapSymbol {
    Rho,
    CapR,
    Phi(Rat),
}

impl MapSymbol {
    pub fn phi(t: Rat) -> MapSymbol {
        assert!(t >= Rat::from_integer(0), "phi time must be nonnegative, got {t}");
        MapSymbol::Phi(t)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Atom {
    Gen { tag: AlgebraTag, id: u32, adjoint: bool },
    Map { sym: MapSymbol, arg: Expr },
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum ScalarKind {
    Omega,
    Nu,
}

/// An opaque scalar factor `w(arg)` or `v(arg)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct ScalarFactor {
    pub kind: ScalarKind,
    pub arg: Expr,
}

#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Term {
    pub coeff: Rat,
    pub scalars: Vec<ScalarFactor>,
    pub word: Vec<Atom>,
}

impl Term {
    fn canonical_key(&self) -> (usize, &[Atom], &[ScalarFactor]) {
        (self.word.len(), &self.word, &self.scalars)
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_key()
            .cmp(&other.canonical_key())
            .then_with(|| self.coeff.cmp(&other.coeff))
    }
}

/// A formal finite sum of terms.  Raw construction does not canonicalize;
/// call [`Expr::normalize`] for the canonical form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Default)]
pub struct Expr {
    pub terms: Vec<Term>,
}

impl Expr {
    pub fn zero() -> Expr {
        Expr { terms: Vec::new() }
    }

    pub fn one() -> Expr {
        Expr::rational(Rat::from_integer(1))
    }

    pub fn rational(c: Rat) -> Expr {
        if c == Rat::from_integer(0) {
            return Expr::zero();
        }
        Expr { terms: vec![Term { coeff: c, scalars: Vec::new(), word: Vec::new() }] }
    }

    pub fn gen(tag: AlgebraTag, id: u32) -> Expr {
        Expr::from_atom(Atom::Gen { tag, id, adjoint: false })
    }

    pub fn gen_adj(tag: AlgebraTag, id: u32) -> Expr {
        Expr::from_atom(Atom::Gen { tag, id, adjoint: true })
    }

    pub fn from_atom(a: Atom) -> Expr {
        Expr { terms: vec![Term { coeff: Rat::from_integer(1), scalars: Vec::new(), word: vec![a] }] }
    }

    fn from_word(word: Vec<Atom>) -> Expr {
        Expr { terms: vec![Term { coeff: Rat::from_integer(1), scalars: Vec::new(), word }] }
    }

    /// Formal map application `sym(arg)`; not normalized.
    pub fn map(sym: MapSymbol, arg: &Expr) -> Expr {
        Expr::from_atom(Atom::Map { sym, arg: arg.clone() })
    }

    pub fn rho(arg: &Expr) -> Expr {
        Expr::map(MapSymbol::Rho, arg)
    }

    pub fn cap_r(arg: &Expr) -> Expr {
        Expr::map(MapSymbol::CapR, arg)
    }

    pub fn phi(t: Rat, arg: &Expr) -> Expr {
        Expr::map(MapSymbol::phi(t), arg)
    }

    /// The scalar `w(arg)` or `v(arg)` as an Expr (empty word).
    pub fn scalar(kind: ScalarKind, arg: &Expr) -> Expr {
        Expr {
            terms: vec![Term {
                coeff: Rat::from_integer(1),
                scalars: vec![ScalarFactor { kind, arg: arg.clone() }],
                word: Vec::new(),
            }],
        }
    }

    pub fn omega(arg: &Expr) -> Expr {
        Expr::scalar(ScalarKind::Omega, arg)
    }

    pub fn nu(arg: &Expr) -> Expr {
        Expr::scalar(ScalarKind::Nu, arg)
    }

    pub fn is_zero(&self) -> bool {
        self.normalize().terms.is_empty()
    }

    pub fn add(&self, other: &Expr) -> Expr {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Expr { terms }
    }

    pub fn neg(&self) -> Expr {
        Expr {
            terms: self
                .terms
                .iter()
                .map(|t| Term { coeff: -t.coeff, scalars: t.scalars.clone(), word: t.word.clone() })
                .collect(),
        }
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: Rat) -> Expr {
        if c == Rat::from_integer(0) {
            return Expr::zero();
        }
        Expr {
            terms: self
                .terms
                .iter()
                .map(|t| Term { coeff: t.coeff * c, scalars: t.scalars.clone(), word: t.word.clone() })
                .collect(),
        }
    }

    /// Bilinear product; words concatenate, scalar multisets merge.
    pub fn mul(&self, other: &Expr) -> Expr {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for s in &self.terms {
            for t in &other.terms {
                let mut scalars = s.scalars.clone();
                scalars.extend(t.scalars.iter().cloned());
                let mut word = s.word.clone();
                word.extend(t.word.iter().cloned());
                terms.push(Term { coeff: s.coeff * t.coeff, scalars, word });
            }
        }
        Expr { terms }
    }

    /// Product of a sequence of factors, `1` on empty input.
    pub fn product<'a, I: IntoIterator<Item = &'a Expr>>(factors: I) -> Expr {
        let mut acc = Expr::one();
        for f in factors {
            acc = acc.mul(f);
        }
        acc
    }

    /// Centered copy `self - w(self)·1` or `self - v(self)·1`.
    pub fn centered(&self, kind: ScalarKind) -> Expr {
        self.sub(&Expr::scalar(kind, self))
    }

    /// Rewrites to canonical normal form (idempotent).
    pub fn normalize(&self) -> Expr {
        let mut acc = Expr::zero();
        for t in &self.terms {
            acc.terms.extend(normalize_term(t).terms);
        }
        canonicalize(acc)
    }

    /// The antilinear involution: reverses words, toggles adjoint marks,
    /// pushes * into map applications and scalar arguments.  Coefficients
    /// are rational, so conjugation fixes them.  Result is normalized.
    pub fn star(&self) -> Expr {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coeff: t.coeff,
                scalars: t.scalars.iter().map(|s| ScalarFactor { kind: s.kind, arg: s.arg.star() }).collect(),
                word: t.word.iter().rev().map(star_atom).collect(),
            })
            .collect();
        Expr { terms }.normalize()
    }
}

fn star_atom(a: &Atom) -> Atom {
    match a {
        Atom::Gen { tag, id, adjoint } => Atom::Gen { tag: *tag, id: *id, adjoint: !adjoint },
        Atom::Map { sym, arg } => Atom::Map { sym: sym.clone(), arg: arg.star() },
    }
}

fn canonicalize(mut e: Expr) -> Expr {
    for t in &mut e.terms {
        t.scalars.sort();
    }
    e.terms.sort();
    let mut out: Vec<Term> = Vec::with_capacity(e.terms.len());
    for t in e.terms {
        if let Some(last) = out.last_mut() {
            if last.canonical_key() == t.canonical_key() {
                last.coeff += t.coeff;
                continue;
            }
        }
        out.push(t);
    }
    out.retain(|t| t.coeff != Rat::from_integer(0));
    Expr { terms: out }
}

fn normalize_term(t: &Term) -> Expr {
    let mut acc = Expr::rational(t.coeff);
    for s in &t.scalars {
        acc = acc.mul(&normalize_scalar(s));
        if acc.terms.is_empty() {
            return acc;
        }
    }
    for a in &t.word {
        acc = acc.mul(&normalize_atom(a));
        if acc.terms.is_empty() {
            return acc;
        }
    }
    acc
}

/// Linearity of the functionals: coefficients and scalar factors pull out of
/// the argument, sums split, and `w(1) = v(1) = 1`.
fn normalize_scalar(s: &ScalarFactor) -> Expr {
    let argn = s.arg.normalize();
    let mut out = Expr::zero();
    for t in &argn.terms {
        let mut piece = Term { coeff: t.coeff, scalars: t.scalars.clone(), word: Vec::new() };
        if !t.word.is_empty() {
            piece.scalars.push(ScalarFactor { kind: s.kind, arg: Expr::from_word(t.word.clone()) });
        }
        out.terms.push(piece);
    }
    out
}

fn normalize_atom(a: &Atom) -> Expr {
    match a {
        Atom::Gen { .. } => Expr::from_atom(a.clone()),
        Atom::Map { sym, arg } => {
            let argn = arg.normalize();
            let mut out = Expr::zero();
            for t in &argn.terms {
                // sym(c · w(x) · word) = c · w(x) · sym(word)
                let prefix = Term { coeff: t.coeff, scalars: t.scalars.clone(), word: Vec::new() };
                let body = apply_map_to_word(sym, &t.word);
                out.terms.extend(Expr { terms: vec![prefix] }.mul(&body).terms);
            }
            out
        }
    }
}

fn apply_map_to_word(sym: &MapSymbol, word: &[Atom]) -> Expr {
    if word.is_empty() {
        // r and p[t] are unital; R is an arbitrary linear map, R(1) stays formal.
        return match sym {
            MapSymbol::Rho | MapSymbol::Phi(_) => Expr::one(),
            MapSymbol::CapR => Expr::from_atom(Atom::Map { sym: MapSymbol::CapR, arg: Expr::one() }),
        };
    }
    if let MapSymbol::Phi(t) = sym {
        if *t == Rat::from_integer(0) {
            // p[0] is the identity map.
            return Expr::from_word(word.to_vec());
        }
        if word.len() == 1 {
            if let Atom::Map { sym: MapSymbol::Phi(u), arg } = &word[0] {
                // Pure nesting only: the inner application is the whole argument.
                return Expr::from_atom(Atom::Map { sym: MapSymbol::Phi(*t + *u), arg: arg.clone() });
            }
        }
    }
    Expr::from_atom(Atom::Map { sym: sym.clone(), arg: Expr::from_word(word.to_vec()) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(id: u32) -> Expr {
        Expr::gen(AlgebraTag::A, id)
    }
    fn b(id: u32) -> Expr {
        Expr::gen(AlgebraTag::B, id)
    }

    #[test]
    fn distributivity_is_forced() {
        let e = parse("a1 ( b1 + b2 )").unwrap();
        let expect = a(1).mul(&b(1)).add(&a(1).mul(&b(2))).normalize();
        assert_eq!(e, expect);
    }

    #[test]
    fn omega_is_unital() {
        let e = parse("w(1) a1").unwrap();
        assert_eq!(e, a(1).normalize());
    }

    #[test]
    fn phi_nesting_composes_exactly() {
        let e = parse("p[1/2](p[1/2](a1))").unwrap();
        let expect = Expr::phi(Rat::from_integer(1), &a(1)).normalize();
        assert_eq!(e, expect);
        // Not a whole-argument nesting: left alone.
        let f = parse("p[1](p[1](a1) b1)").unwrap();
        assert_eq!(canonical_text(&f), "p[1](p[1](a1) b1)");
    }

    #[test]
    fn phi_zero_is_identity() {
        let e = Expr::phi(Rat::from_integer(0), &a(1).mul(&b(2))).normalize();
        assert_eq!(e, a(1).mul(&b(2)).normalize());
    }

    #[test]
    fn cap_r_of_unit_stays_formal() {
        let e = Expr::cap_r(&Expr::one()).normalize();
        assert_eq!(canonical_text(&e), "R(1)");
    }

    #[test]
    fn scalar_linearity_kills_centered_args() {
        // w(x - w(x) 1) = w(x) - w(x) = 0
        let x = a(1).mul(&b(2));
        let e = Expr::omega(&x.centered(ScalarKind::Omega)).normalize();
        assert!(e.terms.is_empty());
    }

    #[test]
    fn map_linearity_over_zero() {
        let e = Expr::rho(&Expr::zero()).normalize();
        assert!(e.terms.is_empty());
    }

    #[test]
    fn star_reverses_and_marks() {
        let e = a(1).mul(&b(1));
        let s = e.star();
        assert_eq!(canonical_text(&s), "b1* a1*");
        let r = Expr::rho(&a(1)).star();
        assert_eq!(canonical_text(&r), "r(a1*)");
    }

    #[test]
    fn centered_rendering() {
        let e = b(1).centered(ScalarKind::Nu).normalize();
        assert_eq!(canonical_text(&e), "- v(b1) + b1");
    }
}
