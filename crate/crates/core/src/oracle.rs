//! Independent brute-force center-expand-simplify rewriting engine; the
//! oracle every moment recursion is checked against.
//!
//! The engine works on alternating slot words with explicit centering marks
//! and follows the three-phase discipline: center the functional-side slots,
//! center the map-side slots (the fully centered standard-form word
//! vanishes), un-center the survivors back to plain words and recurse.  Each
//! recursion step strictly reduces the number of map-side slots; a step
//! budget guards against rule bugs.
//!
//! This module shares the expression IR with the moment modules but none of
//! their recursion code.

use crate::dilation::TimedWord;
use crate::free::{FreeError, IndexTuple};
use crate::ir::{canonical_text, Expr, Rat, ScalarKind};
use crate::liberation::{LWord, RWord};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("rewrite budget exceeded ({0} steps): rule bug")]
    NonTermination(u64),
}

/// One recorded rewrite step.
#[derive(Debug, Clone, Serialize)]
pub struct TraceStep {
    pub rule: &'static str,
    pub before: String,
    pub after: Vec<String>,
}

/// Rewrite trace; serializable as JSON lines for debugging.
#[derive(Debug, Default)]
pub struct RewriteTrace {
    pub steps: Vec<TraceStep>,
    pub result: Option<Expr>,
}

impl RewriteTrace {
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&serde_json::to_string(s).unwrap());
            out.push('\n');
        }
        out
    }
}

const STEP_BUDGET: u64 = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CentKind {
    Rho,
    CapR,
}

/// An abstract map-side letter: an `Expr` for liberation words, a timed
/// sub-word for dilation words.
trait ALetter: Clone + std::fmt::Debug {
    fn merge(&self, other: &Self) -> Self;
    fn display(&self) -> String;
}

impl ALetter for Expr {
    fn merge(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn display(&self) -> String {
        canonical_text(self)
    }
}

#[derive(Debug, Clone)]
enum Slot<A> {
    B { e: Expr, cent: bool },
    A { a: A, cent: Option<CentKind> },
}

struct Engine<'p, A, P: Policy<A>> {
    policy: &'p P,
    /// true: words start and end with B-slots (right/strong/dilation);
    /// false: with A-slots (left liberation).
    bimodule_b: bool,
    strong: bool,
    steps: u64,
    trace: Option<RewriteTrace>,
    _marker: std::marker::PhantomData<A>,
}

/// Mode-specific pieces: how a map-side letter collapses to the bimodule
/// side, which functional extracts scalars, and how a bare map-side letter
/// is emitted (left words only).
trait Policy<A> {
    fn collapse(&self, a: &A, kind: CentKind) -> Expr;
    fn scalar_kind(&self) -> ScalarKind;
    fn emit_a(&self, a: &A) -> Expr;
}

#[derive(Debug, Clone)]
struct Item<A> {
    coef: Expr,
    lmul: Expr,
    slots: Vec<Slot<A>>,
}

impl<'p, A: ALetter, P: Policy<A>> Engine<'p, A, P> {
    fn new(policy: &'p P, bimodule_b: bool, strong: bool, trace: bool) -> Self {
        Engine {
            policy,
            bimodule_b,
            strong,
            steps: 0,
            trace: if trace { Some(RewriteTrace::default()) } else { None },
            _marker: std::marker::PhantomData,
        }
    }

    fn record(&mut self, rule: &'static str, before: &[Slot<A>], after: &[&[Slot<A>]]) {
        if let Some(tr) = self.trace.as_mut() {
            let before = Self::display_static(before);
            let after = after.iter().map(|w| Self::display_static(w)).collect();
            tr.steps.push(TraceStep { rule, before, after });
        }
    }

    fn display_static(slots: &[Slot<A>]) -> String {
        let mut parts = Vec::new();
        for s in slots {
            match s {
                Slot::B { e, cent } => {
                    let body = canonical_text(e);
                    parts.push(if *cent { format!("{{{body}}}°") } else { body });
                }
                Slot::A { a, cent } => {
                    let body = a.display();
                    parts.push(match cent {
                        None => format!("[{body}]"),
                        Some(CentKind::Rho) => format!("[{body}]°"),
                        Some(CentKind::CapR) => format!("[{body}]~"),
                    });
                }
            }
        }
        parts.join(" | ")
    }

    /// Merges adjacent like slots.  B·B products lose centering; adjacent
    /// A-slots only merge while plain (the phase discipline guarantees it).
    fn merge(&self, slots: Vec<Slot<A>>) -> Vec<Slot<A>> {
        let mut out: Vec<Slot<A>> = Vec::with_capacity(slots.len());
        for s in slots {
            match (out.last_mut(), s) {
                (Some(Slot::B { e, cent }), Slot::B { e: f, .. }) => {
                    *e = e.mul(&f).normalize();
                    *cent = false;
                }
                (Some(Slot::A { a, cent }), Slot::A { a: b, cent: c2 }) => {
                    assert!(cent.is_none() && c2.is_none(), "merged centered A-slots: rule bug");
                    *a = a.merge(&b);
                }
                (_, s) => out.push(s),
            }
        }
        out
    }

    fn a_count(slots: &[Slot<A>]) -> usize {
        slots.iter().filter(|s| matches!(s, Slot::A { .. })).count()
    }

    fn b_count(slots: &[Slot<A>]) -> usize {
        slots.iter().filter(|s| matches!(s, Slot::B { .. })).count()
    }

    /// Index of slots eligible for ν-centering: interior B-slots in
    /// right-type words, all B-slots in left-type words.
    fn b_targets(&self, slots: &[Slot<A>]) -> Vec<usize> {
        let n = slots.len();
        slots
            .iter()
            .enumerate()
            .filter(|(i, s)| {
                matches!(s, Slot::B { .. }) && (!self.bimodule_b || (*i > 0 && *i + 1 < n))
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// A-slots eligible for ρ/R-centering: all in right-type words, interior
    /// in left-type words.
    fn a_targets(&self, slots: &[Slot<A>]) -> Vec<usize> {
        let n = slots.len();
        slots
            .iter()
            .enumerate()
            .filter(|(i, s)| {
                matches!(s, Slot::A { .. }) && (self.bimodule_b || (*i > 0 && *i + 1 < n))
            })
            .map(|(i, _)| i)
            .collect()
    }

    fn is_standard_vanishing(&self, slots: &[Slot<A>]) -> bool {
        let bt = self.b_targets(slots);
        let at = self.a_targets(slots);
        if self.bimodule_b {
            if Self::a_count(slots) == 0 {
                return false;
            }
        } else if Self::b_count(slots) == 0 {
            return false;
        }
        for i in bt {
            if let Slot::B { cent, .. } = &slots[i] {
                if !cent {
                    return false;
                }
            }
        }
        let mut first_a = true;
        for i in at {
            if let Slot::A { cent, .. } = &slots[i] {
                match cent {
                    None => return false,
                    Some(CentKind::CapR) => {
                        if !(self.strong && first_a) {
                            return false;
                        }
                    }
                    Some(CentKind::Rho) => {
                        if self.strong && first_a {
                            return false;
                        }
                    }
                }
            }
            first_a = false;
        }
        // In strong mode every A-slot is a target, and the head must be
        // R-centered; in plain right mode all-ρ suffices; in left mode the
        // interior a's are ρ-centered and all b's are ν-centered.
        true
    }

    fn run(&mut self, start: Vec<Slot<A>>) -> Result<Expr, OracleError> {
        let mut acc = Expr::zero();
        let mut work: Vec<Item<A>> = vec![Item { coef: Expr::one(), lmul: Expr::one(), slots: start }];
        while let Some(item) = work.pop() {
            self.steps += 1;
            if self.steps > STEP_BUDGET {
                return Err(OracleError::NonTermination(self.steps));
            }
            let Item { coef, lmul, slots } = item;
            let slots = self.merge(slots);
            if coef.normalize().terms.is_empty() {
                continue;
            }

            // R0: standard-form vanishing.
            if self.is_standard_vanishing(&slots) {
                self.record("vanish", &slots, &[]);
                continue;
            }

            // R1: emission — no map-side slots left.
            let done = if self.bimodule_b { Self::a_count(&slots) == 0 } else { Self::b_count(&slots) == 0 };
            if done {
                let mut prod = lmul.clone();
                for s in &slots {
                    match s {
                        Slot::B { e, .. } => prod = prod.mul(e),
                        Slot::A { a, cent } => {
                            assert!(cent.is_none(), "emitting centered A-slot: rule bug");
                            prod = prod.mul(&self.policy.emit_a(a));
                        }
                    }
                }
                self.record("emit", &slots, &[]);
                acc = acc.add(&coef.mul(&prod));
                continue;
            }

            let has_acent = slots.iter().any(|s| matches!(s, Slot::A { cent: Some(_), .. }));
            let uncent_b: Option<usize> = self
                .b_targets(&slots)
                .into_iter()
                .find(|&i| matches!(&slots[i], Slot::B { cent: false, .. }));

            // R3: center a functional-side slot (only while no A-slot is
            // centered, i.e. in type-I words).
            if let (Some(i), false) = (uncent_b, has_acent) {
                let b = match &slots[i] {
                    Slot::B { e, .. } => e.clone(),
                    _ => unreachable!(),
                };
                // branch 1: centered mark
                let kind = self.policy.scalar_kind();
                let mut w1 = slots.clone();
                w1[i] = Slot::B { e: b.centered(kind).normalize(), cent: true };
                // branch 2: scalar extraction, slot deleted
                let mut w2 = slots.clone();
                w2.remove(i);
                let c2 = coef.mul(&Expr::scalar(kind, &b));
                self.record("center-b", &slots, &[&w1, &w2]);
                work.push(Item { coef: coef.clone(), lmul: lmul.clone(), slots: w1 });
                work.push(Item { coef: c2, lmul, slots: w2 });
                continue;
            }

            // R4: center a map-side slot (all functional targets centered).
            if uncent_b.is_none() {
                let target = self
                    .a_targets(&slots)
                    .into_iter()
                    .find(|&i| matches!(&slots[i], Slot::A { cent: None, .. }));
                if let Some(i) = target {
                    let a = match &slots[i] {
                        Slot::A { a, .. } => a.clone(),
                        _ => unreachable!(),
                    };
                    let first_a = self.bimodule_b && i == 1;
                    let kind = if self.strong && first_a { CentKind::CapR } else { CentKind::Rho };
                    let mut w1 = slots.clone();
                    w1[i] = Slot::A { a: a.clone(), cent: Some(kind) };
                    if self.strong && first_a {
                        // b0 R(a1) is a left-module prefix; the tail restarts.
                        let b0 = match &slots[0] {
                            Slot::B { e, .. } => e.clone(),
                            _ => unreachable!(),
                        };
                        let rest: Vec<Slot<A>> = slots[2..].to_vec();
                        let pre = lmul.mul(&b0).mul(&self.policy.collapse(&a, CentKind::CapR));
                        self.record("center-a-strong", &slots, &[&w1, &rest]);
                        work.push(Item { coef: coef.clone(), lmul: lmul.clone(), slots: w1 });
                        work.push(Item { coef, lmul: pre, slots: rest });
                    } else {
                        let mut w2 = slots.clone();
                        w2[i] = Slot::B { e: self.policy.collapse(&a, CentKind::Rho).normalize(), cent: false };
                        self.record("center-a", &slots, &[&w1, &w2]);
                        work.push(Item { coef: coef.clone(), lmul: lmul.clone(), slots: w1 });
                        work.push(Item { coef, lmul, slots: w2 });
                    }
                    continue;
                }
                unreachable!("all targets centered but word neither vanished nor emitted: rule bug");
            }

            // R5: un-center one A-slot (a centered A coexists with an
            // uncentered functional target): restore type I.
            let i = slots
                .iter()
                .position(|s| matches!(s, Slot::A { cent: Some(_), .. }))
                .expect("has_acent");
            let (a, kind) = match &slots[i] {
                Slot::A { a, cent } => (a.clone(), cent.unwrap()),
                _ => unreachable!(),
            };
            let mut w1 = slots.clone();
            w1[i] = Slot::A { a: a.clone(), cent: None };
            match kind {
                CentKind::Rho => {
                    let mut w2 = slots.clone();
                    w2[i] = Slot::B { e: self.policy.collapse(&a, CentKind::Rho).normalize(), cent: false };
                    self.record("uncenter-a", &slots, &[&w1, &w2]);
                    work.push(Item { coef: coef.neg(), lmul: lmul.clone(), slots: w2 });
                    work.push(Item { coef, lmul, slots: w1 });
                }
                CentKind::CapR => {
                    debug_assert!(self.strong && i == 1);
                    let b0 = match &slots[0] {
                        Slot::B { e, .. } => e.clone(),
                        _ => unreachable!(),
                    };
                    let rest: Vec<Slot<A>> = slots[2..].to_vec();
                    let pre = lmul.mul(&b0).mul(&self.policy.collapse(&a, CentKind::CapR));
                    self.record("uncenter-a-strong", &slots, &[&w1, &rest]);
                    work.push(Item { coef: coef.neg(), lmul: pre, slots: rest });
                    work.push(Item { coef, lmul, slots: w1 });
                }
            }
        }
        let result = acc.normalize();
        if let Some(tr) = self.trace.as_mut() {
            tr.result = Some(result.clone());
        }
        Ok(result)
    }
}

// --- Liberation policies ----------------------------------------------------

struct LibPolicy;

impl Policy<Expr> for LibPolicy {
    fn collapse(&self, a: &Expr, kind: CentKind) -> Expr {
        match kind {
            CentKind::Rho => Expr::rho(a),
            CentKind::CapR => Expr::cap_r(a),
        }
    }
    fn scalar_kind(&self) -> ScalarKind {
        ScalarKind::Nu
    }
    fn emit_a(&self, a: &Expr) -> Expr {
        a.clone()
    }
}

fn rword_slots(x: &RWord, mark_centered: bool, strong: bool) -> Vec<Slot<Expr>> {
    let mut slots = Vec::with_capacity(2 * x.len() + 1);
    let l = x.len();
    for k in 0..=l {
        let interior = k > 0 && k < l;
        slots.push(Slot::B { e: x.b[k].clone(), cent: mark_centered && interior });
        if k < l {
            let kind = if strong && k == 0 { CentKind::CapR } else { CentKind::Rho };
            slots.push(Slot::A { a: x.a[k].clone(), cent: if mark_centered { Some(kind) } else { None } });
        }
    }
    slots
}

fn lword_slots(y: &LWord) -> Vec<Slot<Expr>> {
    let mut slots = Vec::with_capacity(2 * y.len() + 1);
    let l = y.len();
    for k in 0..=l {
        slots.push(Slot::A { a: y.a[k].clone(), cent: None });
        if k < l {
            slots.push(Slot::B { e: y.b[k].clone(), cent: false });
        }
    }
    slots
}

/// E-value of a right-liberation word by literal center-expand-simplify.
pub fn expand_right_lib(x: &RWord) -> Expr {
    expand_right_lib_guarded(x).expect("rewrite budget exceeded")
}

pub fn expand_right_lib_guarded(x: &RWord) -> Result<Expr, OracleError> {
    let p = LibPolicy;
    Engine::new(&p, true, false, false).run(rword_slots(x, false, false))
}

/// Same computation with a recorded trace.
pub fn expand_right_lib_traced(x: &RWord) -> Result<(Expr, RewriteTrace), OracleError> {
    let p = LibPolicy;
    let mut eng = Engine::new(&p, true, false, true);
    let e = eng.run(rword_slots(x, false, false))?;
    Ok((e, eng.trace.take().unwrap()))
}

/// E-value of the word with interior b's ν-centered and all a's ρ-centered;
/// vanishes by the definitional property.
pub fn expand_right_lib_centered(x: &RWord) -> Expr {
    let p = LibPolicy;
    Engine::new(&p, true, false, false).run(rword_slots(x, true, false)).expect("budget")
}

pub fn expand_left_lib(y: &LWord) -> Expr {
    let p = LibPolicy;
    Engine::new(&p, false, false, false).run(lword_slots(y)).expect("budget")
}

pub fn expand_strong_right(x: &RWord) -> Expr {
    let p = LibPolicy;
    Engine::new(&p, true, true, false).run(rword_slots(x, false, true)).expect("budget")
}

/// Strong word with R-centered head, ρ-centered tail letters, ν-centered
/// interior b's; vanishes by the strong-liberation definition.
pub fn expand_strong_right_centered(x: &RWord) -> Expr {
    let p = LibPolicy;
    Engine::new(&p, true, true, false).run(rword_slots(x, true, true)).expect("budget")
}

// --- Dilation policy ---------------------------------------------------------

/// Timed letter runs with paired (structure, value) times.
#[derive(Debug, Clone)]
struct Run {
    letters: Vec<(Rat, Rat, Expr)>,
}

impl ALetter for Run {
    fn merge(&self, other: &Self) -> Self {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        Run { letters }
    }
    fn display(&self) -> String {
        self.letters
            .iter()
            .map(|(s, _, a)| format!("{}@{}", canonical_text(a), crate::ir::render_rat(s)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

struct DilPolicy;

impl Policy<Run> for DilPolicy {
    fn collapse(&self, a: &Run, kind: CentKind) -> Expr {
        debug_assert!(kind == CentKind::Rho);
        expand_dilation_run(&a.letters)
    }
    fn scalar_kind(&self) -> ScalarKind {
        ScalarKind::Omega
    }
    fn emit_a(&self, _a: &Run) -> Expr {
        unreachable!("dilation words are right-type; A-runs are never emitted")
    }
}

fn merge_run(letters: &[(Rat, Rat, Expr)]) -> Vec<(Rat, Rat, Expr)> {
    let mut out: Vec<(Rat, Rat, Expr)> = Vec::with_capacity(letters.len());
    for (s, v, a) in letters {
        if let Some((ps, _, pa)) = out.last_mut() {
            if ps == s {
                *pa = pa.mul(a);
                continue;
            }
        }
        out.push((*s, *v, a.clone()));
    }
    out
}

/// The two-case strategy on a paired-time word: strip the minimum positive
/// time, or split at the zero-time letters and run the right-liberation
/// engine with the recursively expanded positive runs playing the A-side.
fn expand_dilation_run(letters: &[(Rat, Rat, Expr)]) -> Expr {
    let w = merge_run(letters);
    if w.is_empty() {
        return Expr::one();
    }
    if w.len() == 1 {
        return Expr::phi(w[0].1, &w[0].2).normalize();
    }
    let zero = Rat::from_integer(0);
    if w.iter().all(|(s, _, _)| *s > zero) {
        let smin = w.iter().map(|(s, _, _)| *s).min().unwrap();
        let vmin = w.iter().find(|(s, _, _)| *s == smin).map(|(_, v, _)| *v).unwrap();
        let shifted: Vec<(Rat, Rat, Expr)> =
            w.iter().map(|(s, v, a)| (*s - smin, *v - vmin, a.clone())).collect();
        return Expr::phi(vmin, &expand_dilation_run(&shifted)).normalize();
    }
    if w.iter().all(|(s, _, _)| *s == zero) {
        return Expr::product(w.iter().map(|(_, _, a)| a)).normalize();
    }
    // Mixed word: zero-time letters are the B-side, maximal positive runs the
    // A-side.  Pad with unit B-slots at the ends so the word is right-type.
    let mut slots: Vec<Slot<Run>> = Vec::new();
    let mut k = 0usize;
    if w[0].0 != zero {
        slots.push(Slot::B { e: Expr::one(), cent: false });
    }
    while k < w.len() {
        if w[k].0 == zero {
            slots.push(Slot::B { e: w[k].2.clone(), cent: false });
            k += 1;
        } else {
            let s = k;
            while k < w.len() && w[k].0 != zero {
                k += 1;
            }
            slots.push(Slot::A { a: Run { letters: w[s..k].to_vec() }, cent: None });
            if k == w.len() {
                slots.push(Slot::B { e: Expr::one(), cent: false });
            }
        }
    }
    let p = DilPolicy;
    Engine::new(&p, true, false, false).run(slots).expect("budget")
}

/// E-value of a timed word by the iterated two-case strategy.
pub fn expand_dilation(tw: &TimedWord) -> Expr {
    let letters: Vec<(Rat, Rat, Expr)> =
        tw.times.0.iter().zip(tw.letters.iter()).map(|(t, a)| (*t, *t, a.clone())).collect();
    expand_dilation_run(&letters)
}

/// Structured variant: branching by `structure`, φ subscripts from `values`.
pub fn expand_dilation_structured(structure: &[Rat], values: &[Rat], letters: &[Expr]) -> Expr {
    assert_eq!(structure.len(), values.len());
    assert_eq!(structure.len(), letters.len());
    let w: Vec<(Rat, Rat, Expr)> = structure
        .iter()
        .zip(values.iter())
        .zip(letters.iter())
        .map(|((s, v), a)| (*s, *v, a.clone()))
        .collect();
    expand_dilation_run(&w)
}

// --- Free-moment oracle -------------------------------------------------------

/// φ(a_{i1} ⋯ a_{in}) by literal center-expand-simplify with the freeness
/// vanishing rule.
pub fn expand_free(iota: &IndexTuple, entries: &[Expr]) -> Result<Expr, FreeError> {
    if iota.len() != entries.len() {
        return Err(FreeError::LengthMismatch { indices: iota.len(), entries: entries.len() });
    }
    let tagged: Vec<(u32, Expr)> = iota.0.iter().copied().zip(entries.iter().cloned()).collect();
    Ok(phi_word(&tagged))
}

fn phi_word(letters: &[(u32, Expr)]) -> Expr {
    // Merge neighbors from the same subalgebra.
    let mut w: Vec<(u32, Expr)> = Vec::with_capacity(letters.len());
    for (i, a) in letters {
        if let Some((pi, pa)) = w.last_mut() {
            if pi == i {
                *pa = pa.mul(a);
                continue;
            }
        }
        w.push((*i, a.clone()));
    }
    let n = w.len();
    if n == 0 {
        return Expr::one();
    }
    if n == 1 {
        return Expr::omega(&w[0].1).normalize();
    }
    let mut acc = Expr::zero();
    for mask in 0..((1u32 << n) - 1) {
        // The full set is the alternating centered word: it vanishes.
        let mut kept: Vec<(u32, Expr)> = Vec::new();
        let mut scalar = Expr::one();
        for (k, (i, a)) in w.iter().enumerate() {
            if mask & (1 << k) != 0 {
                kept.push((*i, a.centered(ScalarKind::Omega).normalize()));
            } else {
                scalar = scalar.mul(&Expr::omega(a));
            }
        }
        let stammers = kept.windows(2).any(|p| p[0].0 == p[1].0);
        if !kept.is_empty() && !stammers {
            // Alternating word of centered letters: φ vanishes on it.
            continue;
        }
        let inner = phi_word(&kept);
        acc = acc.add(&scalar.mul(&inner));
    }
    acc.normalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{parse, AlgebraTag};
    use crate::liberation::{generic_lword, generic_rword};

    fn assert_expr(e: &Expr, s: &str) {
        let want = parse(s).unwrap();
        assert_eq!(e, &want, "got `{}`, want `{}`", canonical_text(e), s);
    }

    #[test]
    fn right_lib_base_cases() {
        let x0 = RWord::new(vec![Expr::gen(AlgebraTag::B, 0)], vec![]).unwrap();
        assert_expr(&expand_right_lib(&x0), "b0");
        assert_expr(&expand_right_lib(&generic_rword(1)), "b0 r(a1) b1");
    }

    #[test]
    fn right_lib_x2_matches_table() {
        assert_expr(
            &expand_right_lib(&generic_rword(2)),
            "v(b1) * b0 ( r(a1 a2) - r(a1) r(a2) ) b2 + b0 r(a1) b1 r(a2) b2",
        );
    }

    #[test]
    fn left_lib_y1_matches_table() {
        assert_expr(&expand_left_lib(&generic_lword(1)), "v(b1) * a0 a1");
    }

    #[test]
    fn strong_x1() {
        assert_expr(&expand_strong_right(&generic_rword(1)), "b0 R(a1) b1");
    }

    #[test]
    fn centered_words_vanish() {
        for l in 1..=3 {
            assert!(expand_right_lib_centered(&generic_rword(l)).terms.is_empty());
            assert!(expand_strong_right_centered(&generic_rword(l)).terms.is_empty());
        }
    }

    #[test]
    fn dilation_matches_appendix_101() {
        use crate::dilation::{TimeVec, TimedWord};
        let tw = TimedWord::new(
            TimeVec::new(vec![Rat::from_integer(1), Rat::from_integer(0), Rat::from_integer(1)]).unwrap(),
            (1..=3).map(|k| Expr::gen(AlgebraTag::A, k)).collect(),
        )
        .unwrap();
        assert_expr(
            &expand_dilation(&tw),
            "p[1](a1) a2 p[1](a3) + w(a2) * ( p[1](a1 a3) - p[1](a1) p[1](a3) )",
        );
    }

    #[test]
    fn free_oracle_base_and_vanishing() {
        let g = |k: u32| Expr::gen(AlgebraTag::A, k);
        let iota = IndexTuple::new(vec![1]).unwrap();
        assert_expr(&expand_free(&iota, &[g(1)]).unwrap(), "w(a1)");
        let iota3 = IndexTuple::new(vec![1, 2, 1]).unwrap();
        let centered: Vec<Expr> = (1..=3).map(|k| g(k).centered(ScalarKind::Omega)).collect();
        assert!(expand_free(&iota3, &centered).unwrap().terms.is_empty());
    }

    #[test]
    fn trace_records_steps() {
        let (e, tr) = expand_right_lib_traced(&generic_rword(1)).unwrap();
        assert_expr(&e, "b0 r(a1) b1");
        assert!(!tr.steps.is_empty());
        assert!(tr.to_json_lines().contains("rule"));
    }
}
