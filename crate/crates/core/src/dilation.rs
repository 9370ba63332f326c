//! Dilation moment polynomials Ss/DRM/DUM with diachronic collapses
//! DLC/DRC/DUC, standard decompositions, boundary reductions, and structured
//! (non-crossing limit) evaluation.
//!
//! Times are exact nonnegative rationals; φ subscripts always store the
//! already-subtracted difference.  The recursion carries paired times
//! (structure, value): all branching — minima, zero tests, block splits —
//! reads the structure component, while emitted `p[·]` subscripts read the
//! value component.  Plain evaluation pairs each time with itself, so
//! structured evaluation with structure = values coincides with it.

use crate::ir::{Expr, Rat, ScalarKind};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DilationError {
    #[error("times ({times}) and letters ({letters}) differ in length")]
    LengthMismatch { times: usize, letters: usize },
    #[error("time vector must be nonempty")]
    Empty,
    #[error("negative time {0}")]
    NegativeTime(String),
    #[error("collapse index {0} out of range (valid 1..={1})")]
    IndexRange(usize, usize),
    #[error("collapse needs alternation number >= 1")]
    NoAlternation,
}

/// Nonempty vector of nonnegative rational times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeVec(pub Vec<Rat>);

impl TimeVec {
    pub fn new(entries: Vec<Rat>) -> Result<Self, DilationError> {
        if entries.is_empty() {
            return Err(DilationError::Empty);
        }
        if let Some(t) = entries.iter().find(|t| **t < Rat::from_integer(0)) {
            return Err(DilationError::NegativeTime(crate::ir::render_rat(t)));
        }
        Ok(TimeVec(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// ψ_n: splits off the minimum, t ↦ (min t, t − min t).
pub fn psi_n(t: &TimeVec) -> (Rat, TimeVec) {
    let tau = *t.0.iter().min().expect("nonempty");
    (tau, TimeVec(t.0.iter().map(|x| *x - tau).collect()))
}

/// Zero/nonzero block structure of ψ_n(t): `zero_blocks` are the N-blocks
/// (m+1 of them, first and last possibly empty), `pos_blocks` the S-blocks
/// (m of them); `m` is the alternation number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardDecomposition {
    pub tau: Rat,
    pub zero_blocks: Vec<(usize, usize)>,
    pub pos_blocks: Vec<(usize, usize)>,
    pub m: usize,
}

fn decompose_zero_pattern(is_zero: &[bool]) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let n = is_zero.len();
    let mut zeros = Vec::new();
    let mut pos = Vec::new();
    let mut k = 0usize;
    // Leading zero block, possibly empty.
    let start = k;
    while k < n && is_zero[k] {
        k += 1;
    }
    zeros.push((start, k));
    while k < n {
        let s = k;
        while k < n && !is_zero[k] {
            k += 1;
        }
        pos.push((s, k));
        let z = k;
        while k < n && is_zero[k] {
            k += 1;
        }
        zeros.push((z, k));
    }
    (zeros, pos)
}

/// Timed word (t⃗; a⃗): equal-length times and letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedWord {
    pub times: TimeVec,
    pub letters: Vec<Expr>,
}

impl TimedWord {
    pub fn new(times: TimeVec, letters: Vec<Expr>) -> Result<Self, DilationError> {
        if times.len() != letters.len() {
            return Err(DilationError::LengthMismatch { times: times.len(), letters: letters.len() });
        }
        Ok(TimedWord { times, letters })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }
}

pub fn standard_decomposition(tw: &TimedWord) -> StandardDecomposition {
    let (tau, s) = psi_n(&tw.times);
    let is_zero: Vec<bool> = s.0.iter().map(|x| *x == Rat::from_integer(0)).collect();
    let (zero_blocks, pos_blocks) = decompose_zero_pattern(&is_zero);
    let m = pos_blocks.len();
    StandardDecomposition { tau, zero_blocks, pos_blocks, m }
}

// ---------------------------------------------------------------------------
// Paired-time machinery
// ---------------------------------------------------------------------------

/// A time with separate branching (structure) and substitution (value)
/// components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct PT {
    s: Rat,
    v: Rat,
}

type PWord = Vec<(PT, Expr)>;

fn pair_plain(tw: &TimedWord) -> PWord {
    tw.times.0.iter().zip(tw.letters.iter()).map(|(t, a)| (PT { s: *t, v: *t }, a.clone())).collect()
}

fn phi_wrap(v: Rat, e: &Expr) -> Expr {
    Expr::phi(v, e)
}

/// Multiplies adjacent letters with equal structure time.
fn merge_equal_times(w: &PWord) -> PWord {
    let mut out: PWord = Vec::with_capacity(w.len());
    for (t, a) in w {
        if let Some((pt, pa)) = out.last_mut() {
            if pt.s == t.s {
                *pa = pa.mul(a);
                continue;
            }
        }
        out.push((*t, a.clone()));
    }
    out
}

fn zero_pattern(w: &PWord) -> Vec<bool> {
    let smin = w.iter().map(|(t, _)| t.s).min().expect("nonempty");
    w.iter().map(|(t, _)| t.s == smin).collect()
}

/// Splits a min-0 word into N/S blocks (on the structure component).
struct Blocks {
    zeros: Vec<(usize, usize)>,
    pos: Vec<(usize, usize)>,
}

fn blocks_of(w: &PWord) -> Blocks {
    let is_zero: Vec<bool> = w.iter().map(|(t, _)| t.s == Rat::from_integer(0)).collect();
    let (zeros, pos) = decompose_zero_pattern(&is_zero);
    Blocks { zeros, pos }
}

fn block_product(w: &PWord, range: (usize, usize)) -> Expr {
    Expr::product(w[range.0..range.1].iter().map(|(_, a)| a))
}

fn shift_down(w: &PWord) -> (PT, PWord) {
    let smin = w.iter().map(|(t, _)| t.s).min().expect("nonempty");
    let vmin = w.iter().find(|(t, _)| t.s == smin).map(|(t, _)| t.v).expect("nonempty");
    let tau = PT { s: smin, v: vmin };
    let shifted = w.iter().map(|(t, a)| (PT { s: t.s - smin, v: t.v - vmin }, a.clone())).collect();
    (tau, shifted)
}

/// DLC: selected interior zero-blocks become single ω-centered letters at
/// time 0; unselected ones are deleted (their ω factors are taken by the
/// Ss recursion); positive runs concatenate.
fn dlc_p(w: &PWord, blocks: &Blocks, iota: &[usize]) -> PWord {
    let m = blocks.pos.len();
    let mut out: PWord = Vec::new();
    // Leading boundary zero block z_0 stays letter by letter.
    let (z0s, z0e) = blocks.zeros[0];
    out.extend(w[z0s..z0e].iter().cloned());
    let mut prev = 0usize; // interior zero-block index bound i_{k-1}
    for &i in iota {
        for j in prev + 1..=i {
            let (ps, pe) = blocks.pos[j - 1];
            out.extend(w[ps..pe].iter().cloned());
        }
        let z = blocks.zeros[i];
        let centered = block_product(w, z).centered(ScalarKind::Omega).normalize();
        out.push((PT { s: Rat::from_integer(0), v: Rat::from_integer(0) }, centered));
        prev = i;
    }
    for j in prev + 1..=m {
        let (ps, pe) = blocks.pos[j - 1];
        out.extend(w[ps..pe].iter().cloned());
    }
    // Trailing boundary zero block z_m stays letter by letter.
    let (zms, zme) = blocks.zeros[m];
    out.extend(w[zms..zme].iter().cloned());
    out
}

/// DRC/DUC: selected positive blocks survive with their times; every
/// unselected positive block collapses to ±Ss of the block, interleaved with
/// the zero-block products, forming single time-0 letters.
fn drc_p(w: &PWord, blocks: &Blocks, iota: &[usize], negate: bool) -> PWord {
    let m = blocks.pos.len();
    let mut bounds = vec![0usize];
    bounds.extend_from_slice(iota);
    bounds.push(m + 1);
    let mut out: PWord = Vec::new();
    for k in 0..=iota.len() {
        // β_k = Π(z_{i_k}) · Π_{j=i_k+1}^{i_{k+1}-1} (±Ss(S_j; w_j)) Π(z_j)
        let mut beta = if bounds[k] == 0 { block_product(w, blocks.zeros[0]) } else { block_product(w, blocks.zeros[bounds[k]]) };
        for j in bounds[k] + 1..bounds[k + 1] {
            let (ps, pe) = blocks.pos[j - 1];
            let sub: PWord = w[ps..pe].to_vec();
            let mut val = ss_p(&sub);
            if negate {
                val = val.neg();
            }
            beta = beta.mul(&val).mul(&block_product(w, blocks.zeros[j]));
        }
        out.push((PT { s: Rat::from_integer(0), v: Rat::from_integer(0) }, beta.normalize()));
        if k < iota.len() {
            let (ps, pe) = blocks.pos[iota[k] - 1];
            out.extend(w[ps..pe].iter().cloned());
        }
    }
    out
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..(1u32 << n)).map(move |mask| (0..n).filter(|k| mask & (1 << k) != 0).map(|k| k + 1).collect())
}

/// The moment polynomial on paired-time words.
fn ss_p(w: &PWord) -> Expr {
    let w = merge_equal_times(w);
    if w.is_empty() {
        return Expr::one();
    }
    if w.len() == 1 {
        return phi_wrap(w[0].0.v, &w[0].1).normalize();
    }
    // Bimodule boundary reduction: time-0 letters at either end pull out.
    let zero = Rat::from_integer(0);
    let mut lo = 0usize;
    let mut hi = w.len();
    let mut prefix = Expr::one();
    let mut suffix = Expr::one();
    while hi - lo > 1 && w[lo].0.s == zero {
        prefix = prefix.mul(&w[lo].1);
        lo += 1;
    }
    while hi - lo > 1 && w[hi - 1].0.s == zero {
        suffix = w[hi - 1].1.mul(&suffix);
        hi -= 1;
    }
    let core: PWord = w[lo..hi].to_vec();
    let body = if core.len() == 1 {
        phi_wrap(core[0].0.v, &core[0].1)
    } else if core.iter().all(|(t, _)| t.s > zero) {
        let (tau, shifted) = shift_down(&core);
        phi_wrap(tau.v, &ss_p(&shifted))
    } else {
        ss_main(&core)
    };
    prefix.mul(&body).mul(&suffix).normalize()
}

/// The displayed recursion: min-0 word, m ≥ 1 positive blocks.
fn ss_main(w: &PWord) -> Expr {
    let blocks = blocks_of(w);
    let m = blocks.pos.len();
    debug_assert!(m >= 1);
    let mut acc = Expr::zero();
    for iota in subsets(m.saturating_sub(1)) {
        let collapsed = dlc_p(w, &blocks, &iota);
        let mut term = drm_p(&collapsed);
        let mut sel = iota.iter().copied().peekable();
        for j in 1..m {
            if sel.peek() == Some(&j) {
                sel.next();
            } else {
                term = term.mul(&Expr::omega(&block_product(w, blocks.zeros[j])));
            }
        }
        acc = acc.add(&term);
    }
    acc.normalize()
}

fn drm_p(w: &PWord) -> Expr {
    let w = merge_equal_times(w);
    if w.is_empty() {
        return Expr::one();
    }
    if w.len() == 1 {
        return phi_wrap(w[0].0.v, &w[0].1).normalize();
    }
    let zero = Rat::from_integer(0);
    if w.iter().all(|(t, _)| t.s > zero) {
        // No zero letters means no implicit centerings: DRM agrees with Ss.
        let (tau, shifted) = shift_down(&w);
        return phi_wrap(tau.v, &ss_p(&shifted)).normalize();
    }
    let blocks = blocks_of(&w);
    let m = blocks.pos.len();
    if m == 0 {
        return block_product(&w, (0, w.len())).normalize();
    }
    let mut acc = Expr::zero();
    for iota in subsets(m) {
        if iota.len() == m {
            continue; // strict subset: the fully-kept centered word vanishes
        }
        let collapsed = drc_p(&w, &blocks, &iota, false);
        acc = acc.add(&dum_p(&collapsed));
    }
    acc.normalize()
}

fn dum_p(w: &PWord) -> Expr {
    let w = merge_equal_times(w);
    if w.is_empty() {
        return Expr::one();
    }
    if w.len() == 1 {
        return phi_wrap(w[0].0.v, &w[0].1).normalize();
    }
    let zero = Rat::from_integer(0);
    if w.iter().all(|(t, _)| t.s > zero) {
        let (tau, shifted) = shift_down(&w);
        return phi_wrap(tau.v, &ss_p(&shifted)).normalize();
    }
    let blocks = blocks_of(&w);
    let m = blocks.pos.len();
    if m == 0 {
        return block_product(&w, (0, w.len())).normalize();
    }
    let mut acc = Expr::zero();
    for iota in subsets(m) {
        let collapsed = drc_p(&w, &blocks, &iota, true);
        acc = acc.add(&ss_p(&collapsed));
    }
    acc.normalize()
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

/// The Sauvageot moment polynomial Ss(t⃗; a⃗).
pub fn ss(tw: &TimedWord) -> Expr {
    ss_p(&pair_plain(tw))
}

/// DRM(t⃗; a⃗): the right-collapse sum of the mutual recursion.
pub fn drm(tw: &TimedWord) -> Expr {
    drm_p(&pair_plain(tw))
}

/// DUM(t⃗; a⃗): the un-collapse sum of the mutual recursion.
pub fn dum(tw: &TimedWord) -> Expr {
    dum_p(&pair_plain(tw))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiachronicKind {
    Dlc,
    Drc,
    Duc,
}

/// One diachronic collapse step on a timed word; ι indexes interior
/// zero-blocks (DLC) or positive blocks (DRC/DUC), 1-based.
pub fn diachronic_collapse(kind: DiachronicKind, tw: &TimedWord, iota: &[usize]) -> Result<TimedWord, DilationError> {
    let w = pair_plain(tw);
    let blocks = blocks_of(&w);
    let m = blocks.pos.len();
    if m == 0 {
        return Err(DilationError::NoAlternation);
    }
    let hi = match kind {
        DiachronicKind::Dlc => m - 1,
        _ => m,
    };
    for &i in iota {
        if i < 1 || i > hi {
            return Err(DilationError::IndexRange(i, hi));
        }
    }
    let out = match kind {
        DiachronicKind::Dlc => dlc_p(&w, &blocks, iota),
        DiachronicKind::Drc => drc_p(&w, &blocks, iota, false),
        DiachronicKind::Duc => drc_p(&w, &blocks, iota, true),
    };
    let times = TimeVec::new(out.iter().map(|(t, _)| t.s).collect())?;
    TimedWord::new(times, out.into_iter().map(|(_, a)| a.normalize()).collect())
}

/// Strips boundary zero-time letters into multipliers and merges consecutive
/// equal-time letters; the core always keeps at least one letter.
pub fn reduce_boundary(tw: &TimedWord) -> (Option<Expr>, TimedWord, Option<Expr>) {
    let w = merge_equal_times(&pair_plain(tw));
    let zero = Rat::from_integer(0);
    let mut lo = 0usize;
    let mut hi = w.len();
    let mut prefix: Option<Expr> = None;
    let mut suffix: Option<Expr> = None;
    while hi - lo > 1 && w[lo].0.s == zero {
        let p = prefix.take().unwrap_or_else(Expr::one).mul(&w[lo].1);
        prefix = Some(p);
        lo += 1;
    }
    while hi - lo > 1 && w[hi - 1].0.s == zero {
        let s = w[hi - 1].1.mul(&suffix.take().unwrap_or_else(Expr::one));
        suffix = Some(s);
        hi -= 1;
    }
    let times = TimeVec::new(w[lo..hi].iter().map(|(t, _)| t.s).collect()).expect("core nonempty");
    let letters = w[lo..hi].iter().map(|(_, a)| a.normalize()).collect();
    (prefix.map(|e| e.normalize()), TimedWord { times, letters }, suffix.map(|e| e.normalize()))
}

/// Runs the Ss recursion with branching driven by `structure` and φ
/// subscripts from `values`; realizes one-sided limits such as τ → 0⁺.
pub fn ss_structured(structure: &[Rat], values: &[Rat], letters: &[Expr]) -> Result<Expr, DilationError> {
    if structure.len() != values.len() || structure.len() != letters.len() {
        return Err(DilationError::LengthMismatch { times: structure.len(), letters: letters.len() });
    }
    if structure.is_empty() {
        return Err(DilationError::Empty);
    }
    let w: PWord = structure
        .iter()
        .zip(values.iter())
        .zip(letters.iter())
        .map(|((s, v), a)| (PT { s: *s, v: *v }, a.clone()))
        .collect();
    Ok(ss_p(&w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{canonical_text, parse, rat, AlgebraTag};

    fn times(ts: &[i64]) -> TimeVec {
        TimeVec::new(ts.iter().map(|t| Rat::from_integer(*t)).collect()).unwrap()
    }

    fn letters(n: u32) -> Vec<Expr> {
        (1..=n).map(|k| Expr::gen(AlgebraTag::A, k)).collect()
    }

    fn tw(ts: &[i64]) -> TimedWord {
        TimedWord::new(times(ts), letters(ts.len() as u32)).unwrap()
    }

    fn assert_ss(ts: &[i64], want: &str) {
        let got = ss(&tw(ts));
        let expect = parse(want).unwrap();
        assert_eq!(got, expect, "Ss{ts:?} = `{}`, want `{}`", canonical_text(&got), want);
    }

    #[test]
    fn psi_splits_minimum() {
        let (tau, s) = psi_n(&times(&[2, 1, 3]));
        assert_eq!(tau, Rat::from_integer(1));
        assert_eq!(s.0, vec![Rat::from_integer(1), Rat::from_integer(0), Rat::from_integer(2)]);
        let (tau0, s0) = psi_n(&times(&[0, 0, 0]));
        assert_eq!(tau0, Rat::from_integer(0));
        assert!(s0.0.iter().all(|x| *x == Rat::from_integer(0)));
    }

    #[test]
    fn decomposition_of_spec_example() {
        let d = standard_decomposition(&tw(&[1, 0, 3, 0, 2]));
        assert_eq!(d.tau, Rat::from_integer(0));
        assert_eq!(d.m, 3);
        assert_eq!(d.pos_blocks, vec![(0, 1), (2, 3), (4, 5)]);
        assert_eq!(d.zero_blocks, vec![(0, 0), (1, 2), (3, 4), (5, 5)]);
    }

    #[test]
    fn decomposition_of_constant_vector() {
        let d = standard_decomposition(&tw(&[2, 2, 2]));
        assert_eq!(d.m, 0);
        assert_eq!(d.zero_blocks, vec![(0, 3)]);
    }

    #[test]
    fn decomposition_of_shifted_pair() {
        let d = standard_decomposition(&tw(&[1, 2]));
        assert_eq!(d.tau, Rat::from_integer(1));
        assert_eq!(d.m, 1);
        assert_eq!(d.zero_blocks, vec![(0, 1), (2, 2)]);
        assert_eq!(d.pos_blocks, vec![(1, 2)]);
    }

    #[test]
    fn ss_base_cases() {
        assert_ss(&[0], "a1");
        assert_ss(&[0, 1], "a1 p[1](a2)");
        assert_ss(&[1, 0], "p[1](a1) a2");
    }

    #[test]
    fn ss_101_matches_table() {
        assert_ss(&[1, 0, 1], "p[1](a1) a2 p[1](a3) + w(a2) * ( p[1](a1 a3) - p[1](a1) p[1](a3) )");
    }

    #[test]
    fn ss_201_matches_table() {
        assert_ss(&[2, 0, 1], "p[2](a1) a2 p[1](a3) + w(a2) * ( p[1](p[1](a1) a3) - p[2](a1) p[1](a3) )");
    }

    #[test]
    fn equal_times_merge_to_semigroup_value() {
        assert_ss(&[2, 2, 2], "p[2](a1 a2 a3)");
    }

    #[test]
    fn reduce_boundary_strips_and_merges() {
        let w = TimedWord::new(times(&[0, 1, 1, 2]), letters(4)).unwrap();
        let (pre, core, suf) = reduce_boundary(&w);
        assert_eq!(canonical_text(&pre.unwrap()), "a1");
        assert!(suf.is_none());
        assert_eq!(core.times.0, vec![Rat::from_integer(1), Rat::from_integer(2)]);
        assert_eq!(canonical_text(&core.letters[0]), "a2 a3");
    }

    #[test]
    fn reduce_boundary_identity_when_nothing_to_do() {
        let w = tw(&[1, 0, 2]);
        let (pre, core, suf) = reduce_boundary(&w);
        assert!(pre.is_none() && suf.is_none());
        assert_eq!(core, w);
    }

    #[test]
    fn structured_equals_plain_when_structure_is_values() {
        let w = tw(&[1, 0, 2]);
        let got = ss_structured(&w.times.0, &w.times.0, &w.letters).unwrap();
        assert_eq!(got, ss(&w));
    }

    #[test]
    fn structured_single_letter_uses_value() {
        let s = [Rat::from_integer(1)];
        let v = [rat(1, 2)];
        let got = ss_structured(&s, &v, &[Expr::gen(AlgebraTag::A, 1)]).unwrap();
        assert_eq!(canonical_text(&got), "p[1/2](a1)");
    }

    #[test]
    fn shift_law_smoke() {
        // Ss(t + c; a) = p[c](Ss(t; a))
        let base = tw(&[1, 0, 2]);
        let shifted = TimedWord::new(times(&[3, 2, 4]), base.letters.clone()).unwrap();
        let want = Expr::phi(Rat::from_integer(2), &ss(&base)).normalize();
        assert_eq!(ss(&shifted), want);
    }

    #[test]
    fn drc_full_set_regroups_only() {
        let w = tw(&[1, 0, 2]);
        let out = diachronic_collapse(DiachronicKind::Drc, &w, &[1, 2]).unwrap();
        // (1, 0(=1), 0, a2, 0) pattern: unit boundary letters appear.
        assert_eq!(out.times.0.len(), 5);
        assert_eq!(canonical_text(&out.letters[0]), "1");
        assert_eq!(canonical_text(&out.letters[1]), "a1");
        assert_eq!(canonical_text(&out.letters[2]), "a2");
        assert_eq!(canonical_text(&out.letters[3]), "a3");
        assert_eq!(canonical_text(&out.letters[4]), "1");
    }

    #[test]
    fn duc_differs_from_drc_by_sign_of_inserted_ss() {
        let w = tw(&[1, 0, 2]);
        let r = diachronic_collapse(DiachronicKind::Drc, &w, &[2]).unwrap();
        let u = diachronic_collapse(DiachronicKind::Duc, &w, &[2]).unwrap();
        assert_eq!(r.letters[0], parse("p[1](a1) a2").unwrap());
        assert_eq!(u.letters[0], parse("- p[1](a1) a2").unwrap());
        assert_eq!(r.letters[1], u.letters[1]);
    }

    #[test]
    fn dlc_empty_on_ss101_input() {
        let w = tw(&[1, 0, 1]);
        let out = diachronic_collapse(DiachronicKind::Dlc, &w, &[]).unwrap();
        assert_eq!(out.times.0, vec![Rat::from_integer(1), Rat::from_integer(1)]);
        assert_eq!(canonical_text(&out.letters[0]), "a1");
        assert_eq!(canonical_text(&out.letters[1]), "a3");
    }

    #[test]
    fn collapse_range_errors() {
        let w = tw(&[1, 0, 1]);
        assert!(matches!(diachronic_collapse(DiachronicKind::Dlc, &w, &[2]), Err(DilationError::IndexRange(2, 1))));
        assert!(matches!(diachronic_collapse(DiachronicKind::Drc, &w, &[3]), Err(DilationError::IndexRange(3, 2))));
    }
}
