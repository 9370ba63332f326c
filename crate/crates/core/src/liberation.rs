//! Collapse and moment functions for right liberation (LM/RM/UM with
//! LC/RC/UC), left liberation (primed variants), and strong right liberation
//! (subscript-s variants), plus invocation-count telemetry.
//!
//! Words are alternating tuples with explicit `Expr` entries.  An [`RWord`]
//! of length ℓ is (b_0, a_1, b_1, …, a_ℓ, b_ℓ); an [`LWord`] is
//! (a_0, b_1, a_1, …, b_ℓ, a_ℓ).  The recursions follow the
//! center-expand-simplify semantics; subset sums enumerate subsets in
//! increasing binary order.

use crate::ir::{Expr, ScalarKind};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("word shape invalid: {0} B-entries vs {1} A-entries")]
    Shape(usize, usize),
    #[error("collapse index {0} out of range for word of length {1}")]
    IndexRange(usize, usize),
}

/// The nine moment functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentKind {
    RightL,
    RightR,
    RightU,
    LeftL,
    LeftR,
    LeftU,
    StrongL,
    StrongR,
    StrongU,
}

/// Which of the three collapse surgeries to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollapseKind {
    Left,
    Right,
    Uncollapse,
}

/// Alternating tuple (b_0, a_1, b_1, …, a_ℓ, b_ℓ); `b.len() == a.len() + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RWord {
    pub b: Vec<Expr>,
    pub a: Vec<Expr>,
}

impl RWord {
    pub fn new(b: Vec<Expr>, a: Vec<Expr>) -> Result<Self, WordError> {
        if b.len() != a.len() + 1 {
            return Err(WordError::Shape(b.len(), a.len()));
        }
        Ok(RWord { b, a })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The product b_0 a_1 b_1 ⋯ a_ℓ b_ℓ as an expression.
    pub fn product(&self) -> Expr {
        let mut acc = self.b[0].clone();
        for k in 0..self.a.len() {
            acc = acc.mul(&self.a[k]).mul(&self.b[k + 1]);
        }
        acc
    }

    /// Drops the leading (b_0, a_1) pair: (b_1, a_2, …, a_ℓ, b_ℓ).
    fn tail(&self) -> RWord {
        RWord { b: self.b[1..].to_vec(), a: self.a[1..].to_vec() }
    }
}

/// Alternating tuple (a_0, b_1, a_1, …, b_ℓ, a_ℓ); `a.len() == b.len() + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LWord {
    pub a: Vec<Expr>,
    pub b: Vec<Expr>,
}

impl LWord {
    pub fn new(a: Vec<Expr>, b: Vec<Expr>) -> Result<Self, WordError> {
        if a.len() != b.len() + 1 {
            return Err(WordError::Shape(b.len(), a.len()));
        }
        Ok(LWord { a, b })
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn product(&self) -> Expr {
        let mut acc = self.a[0].clone();
        for k in 0..self.b.len() {
            acc = acc.mul(&self.b[k]).mul(&self.a[k + 1]);
        }
        acc
    }
}

fn nu(x: &Expr) -> Expr {
    Expr::scalar(ScalarKind::Nu, x)
}

fn check_iota(iota: &[usize], lo: usize, hi: usize, len: usize) -> Result<(), WordError> {
    for &i in iota {
        if i < lo || i > hi {
            return Err(WordError::IndexRange(i, len));
        }
    }
    Ok(())
}

/// Subsets of {1..n} in increasing binary order (bit k ↔ element k+1).
fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..(1u32 << n)).map(move |mask| (0..n).filter(|k| mask & (1 << k) != 0).map(|k| k + 1).collect())
}

// ---------------------------------------------------------------------------
// Right-liberation collapses
// ---------------------------------------------------------------------------

/// Left collapse LC(x; ι), ι ⊆ {1..ℓ-1}: selected interior b_j are centered
/// to b_j − ν(b_j)1, the others become 1, and adjacent A-entries multiply.
pub fn right_collapse(kind: CollapseKind, x: &RWord, iota: &[usize]) -> Result<RWord, WordError> {
    let l = x.len();
    match kind {
        CollapseKind::Left => {
            if l == 0 {
                return Err(WordError::IndexRange(0, 0));
            }
            check_iota(iota, 1, l.saturating_sub(1), l)?;
            let mut b = vec![x.b[0].clone()];
            let mut a = Vec::with_capacity(iota.len() + 1);
            let mut prev = 0usize;
            for &i in iota {
                a.push(Expr::product(x.a[prev..i].iter()).normalize());
                b.push(x.b[i].centered(ScalarKind::Nu).normalize());
                prev = i;
            }
            a.push(Expr::product(x.a[prev..l].iter()).normalize());
            b.push(x.b[l].clone());
            RWord::new(b, a)
        }
        CollapseKind::Right | CollapseKind::Uncollapse => {
            check_iota(iota, 1, l, l)?;
            let sign = if kind == CollapseKind::Uncollapse { -1 } else { 1 };
            let mut bounds = vec![0usize];
            bounds.extend_from_slice(iota);
            bounds.push(l + 1);
            let mut b = Vec::with_capacity(iota.len() + 1);
            let mut a = Vec::with_capacity(iota.len());
            for k in 0..=iota.len() {
                // β_k = b_{i_k} · Π_{j=i_k+1}^{i_{k+1}-1} (±ρ(a_j)) b_j
                let mut beta = x.b[bounds[k]].clone();
                for j in bounds[k] + 1..bounds[k + 1] {
                    let r = Expr::rho(&x.a[j - 1]).scale(crate::ir::Rat::from_integer(sign));
                    beta = beta.mul(&r).mul(&x.b[j]);
                }
                b.push(beta.normalize());
                if k < iota.len() {
                    a.push(x.a[iota[k] - 1].clone());
                }
            }
            RWord::new(b, a)
        }
    }
}

// ---------------------------------------------------------------------------
// Left-liberation collapses (primed variants)
// ---------------------------------------------------------------------------

/// LC′(y; ι), ι ⊆ {1..ℓ}: selected b_j centered, others replaced by 1,
/// adjacent A-entries multiplied.  RC′/UC′(y; ι), ι ⊆ {1..ℓ-1}: interior a_j
/// with j ∉ ι replaced by ±ρ(a_j), adjacent B-entries multiplied.
pub fn left_collapse(kind: CollapseKind, y: &LWord, iota: &[usize]) -> Result<LWord, WordError> {
    let l = y.len();
    match kind {
        CollapseKind::Left => {
            if l == 0 {
                return Err(WordError::IndexRange(0, 0));
            }
            check_iota(iota, 1, l, l)?;
            let mut a = Vec::with_capacity(iota.len() + 1);
            let mut b = Vec::with_capacity(iota.len());
            let mut prev = 0usize;
            for &i in iota {
                a.push(Expr::product(y.a[prev..i].iter()).normalize());
                b.push(y.b[i - 1].centered(ScalarKind::Nu).normalize());
                prev = i;
            }
            a.push(Expr::product(y.a[prev..=l].iter()).normalize());
            LWord::new(a, b)
        }
        CollapseKind::Right | CollapseKind::Uncollapse => {
            if l == 0 {
                return Err(WordError::IndexRange(0, 0));
            }
            check_iota(iota, 1, l.saturating_sub(1), l)?;
            let sign = if kind == CollapseKind::Uncollapse { -1 } else { 1 };
            let mut bounds = vec![0usize];
            bounds.extend_from_slice(iota);
            bounds.push(l);
            let mut a = vec![y.a[0].clone()];
            let mut b = Vec::with_capacity(iota.len() + 1);
            for k in 0..=iota.len() {
                // B_k = b_{i_k+1} · Π_{j=i_k+1}^{i_{k+1}-1} (±ρ(a_j)) b_{j+1}
                let mut blk = y.b[bounds[k]].clone();
                for j in bounds[k] + 1..bounds[k + 1] {
                    let r = Expr::rho(&y.a[j]).scale(crate::ir::Rat::from_integer(sign));
                    blk = blk.mul(&r).mul(&y.b[j]);
                }
                b.push(blk.normalize());
                if k < iota.len() {
                    a.push(y.a[iota[k]].clone());
                }
            }
            a.push(y.a[l].clone());
            LWord::new(a, b)
        }
    }
}

// ---------------------------------------------------------------------------
// Right-liberation moments
// ---------------------------------------------------------------------------

fn lm_c(x: &RWord, n: &mut u64) -> Expr {
    *n += 1;
    let l = x.len();
    if l == 0 {
        return x.b[0].normalize();
    }
    let mut acc = Expr::zero();
    for iota in subsets(l - 1) {
        let collapsed = right_collapse(CollapseKind::Left, x, &iota).expect("LC domain");
        let mut term = rm_c(&collapsed, n);
        let mut sel = iota.iter().copied().peekable();
        for j in 1..l {
            if sel.peek() == Some(&j) {
                sel.next();
            } else {
                term = term.mul(&nu(&x.b[j]));
            }
        }
        acc = acc.add(&term);
    }
    acc.normalize()
}

fn rm_c(x: &RWord, n: &mut u64) -> Expr {
    *n += 1;
    let l = x.len();
    if l == 0 {
        return x.b[0].normalize();
    }
    let mut acc = Expr::zero();
    for iota in subsets(l) {
        if iota.len() == l {
            continue; // strict subset: the fully-kept centered word vanishes
        }
        let collapsed = right_collapse(CollapseKind::Right, x, &iota).expect("RC domain");
        acc = acc.add(&um_c(&collapsed, n));
    }
    acc.normalize()
}

fn um_c(x: &RWord, n: &mut u64) -> Expr {
    *n += 1;
    let l = x.len();
    if l == 0 {
        return x.b[0].normalize();
    }
    let mut acc = Expr::zero();
    for iota in subsets(l) {
        let collapsed = right_collapse(CollapseKind::Uncollapse, x, &iota).expect("UC domain");
        acc = acc.add(&lm_c(&collapsed, n));
    }
    acc.normalize()
}

// ---------------------------------------------------------------------------
// Left-liberation moments
// ---------------------------------------------------------------------------

fn lmp_c(y: &LWord, n: &mut u64) -> Expr {
    *n += 1;
    let l = y.len();
    if l == 0 {
        return y.a[0].normalize();
    }
    let mut acc = Expr::zero();
    for iota in subsets(l) {
        let collapsed = left_collapse(CollapseKind::Left, y, &iota).expect("LC' domain");
        let mut term = rmp_c(&collapsed, n);
        let mut sel = iota.iter().copied().peekable();
        for j in 1..=l {
            if sel.peek() == Some(&j) {
                sel.next();
            } else {
                term = term.mul(&nu(&y.b[j - 1]));
            }
        }
        acc = acc.add(&term);
    }
    acc.normalize()
}

fn rmp_c(y: &LWord, n: &mut u64) -> Expr {
    *n += 1;
    let l = y.len();
    if l == 0 {
        return y.a[0].normalize();
    }
    let mut acc = Expr::zero();
    for iota in subsets(l - 1) {
        if iota.len() == l - 1 && l >= 1 {
            continue; // strict subset of the interior positions
        }
        let collapsed = left_collapse(CollapseKind::Right, y, &iota).expect("RC' domain");
        acc = acc.add(&ump_c(&collapsed, n));
    }
    acc.normalize()
}

fn ump_c(y: &LWord, n: &mut u64) -> Expr {
    *n += 1;
    let l = y.len();
    if l == 0 {
        return y.a[0].normalize();
    }
    let mut acc = Expr::zero();
    for iota in subsets(l - 1) {
        let collapsed = left_collapse(CollapseKind::Uncollapse, y, &iota).expect("UC' domain");
        acc = acc.add(&lmp_c(&collapsed, n));
    }
    acc.normalize()
}

// ---------------------------------------------------------------------------
// Strong right-liberation moments
// ---------------------------------------------------------------------------

/// How the first A-entry of a word was centered; un-centering must invert
/// the same map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FirstCentering {
    Rho,
    CapR,
}

fn lms_c(x: &RWord, n: &mut u64) -> Expr {
    *n += 1;
    let l = x.len();
    if l == 0 {
        return x.b[0].normalize();
    }
    let mut acc = Expr::zero();
    for iota in subsets(l - 1) {
        let collapsed = right_collapse(CollapseKind::Left, x, &iota).expect("LC domain");
        let mut term = rms_c(&collapsed, n);
        let mut sel = iota.iter().copied().peekable();
        for j in 1..l {
            if sel.peek() == Some(&j) {
                sel.next();
            } else {
                term = term.mul(&nu(&x.b[j]));
            }
        }
        acc = acc.add(&term);
    }
    acc.normalize()
}

fn rms_c(x: &RWord, n: &mut u64) -> Expr {
    *n += 1;
    let l = x.len();
    if l == 0 {
        return x.b[0].normalize();
    }
    let mut acc = Expr::zero();
    for iota in subsets(l) {
        if iota.first() == Some(&1) {
            if iota.len() == l {
                continue; // the fully-kept strongly centered word vanishes
            }
            let collapsed = right_collapse(CollapseKind::Right, x, &iota).expect("RC_s domain");
            acc = acc.add(&ums_c(&collapsed, FirstCentering::CapR, n));
        } else {
            // 1 ∉ ι: b_0 R(a_1) stays as a left-module prefix; the tail is
            // collapsed with the shifted subset, all entries ρ-centered.
            let shifted: Vec<usize> = iota.iter().map(|i| i - 1).collect();
            let collapsed = right_collapse(CollapseKind::Right, &x.tail(), &shifted).expect("RC_s tail domain");
            let prefix = x.b[0].mul(&Expr::cap_r(&x.a[0]));
            acc = acc.add(&prefix.mul(&ums_c(&collapsed, FirstCentering::Rho, n)));
        }
    }
    acc.normalize()
}

fn ums_c(x: &RWord, first: FirstCentering, n: &mut u64) -> Expr {
    *n += 1;
    let l = x.len();
    if l == 0 {
        return x.b[0].normalize();
    }
    let mut acc = Expr::zero();
    for iota in subsets(l) {
        if first == FirstCentering::Rho || iota.first() == Some(&1) {
            let collapsed = right_collapse(CollapseKind::Uncollapse, x, &iota).expect("UC_s domain");
            acc = acc.add(&lms_c(&collapsed, n));
        } else {
            let shifted: Vec<usize> = iota.iter().map(|i| i - 1).collect();
            let collapsed = right_collapse(CollapseKind::Uncollapse, &x.tail(), &shifted).expect("UC_s tail domain");
            let prefix = x.b[0].mul(&Expr::cap_r(&x.a[0])).neg();
            acc = acc.add(&prefix.mul(&lms_c(&collapsed, n)));
        }
    }
    acc.normalize()
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

/// Right-liberation moment of the given kind (`RightL`/`RightR`/`RightU`).
pub fn right_moment(kind: MomentKind, x: &RWord) -> Expr {
    let mut n = 0u64;
    match kind {
        MomentKind::RightL => lm_c(x, &mut n),
        MomentKind::RightR => rm_c(x, &mut n),
        MomentKind::RightU => um_c(x, &mut n),
        other => panic!("right_moment called with {other:?}"),
    }
}

/// Left-liberation moment of the given kind (`LeftL`/`LeftR`/`LeftU`).
pub fn left_moment(kind: MomentKind, y: &LWord) -> Expr {
    let mut n = 0u64;
    match kind {
        MomentKind::LeftL => lmp_c(y, &mut n),
        MomentKind::LeftR => rmp_c(y, &mut n),
        MomentKind::LeftU => ump_c(y, &mut n),
        other => panic!("left_moment called with {other:?}"),
    }
}

/// Strong right-liberation moment (`StrongL`/`StrongR`/`StrongU`); the
/// first A-entry is centered by `R`, the others by `ρ`.
pub fn strong_right_moment(kind: MomentKind, x: &RWord) -> Expr {
    let mut n = 0u64;
    match kind {
        MomentKind::StrongL => lms_c(x, &mut n),
        MomentKind::StrongR => rms_c(x, &mut n),
        MomentKind::StrongU => ums_c(x, FirstCentering::CapR, &mut n),
        other => panic!("strong_right_moment called with {other:?}"),
    }
}

/// Generic word of length ℓ with distinct generators in every slot.
pub fn generic_rword(l: usize) -> RWord {
    use crate::ir::AlgebraTag;
    let b = (0..=l as u32).map(|k| Expr::gen(AlgebraTag::B, k)).collect();
    let a = (1..=l as u32).map(|k| Expr::gen(AlgebraTag::A, k)).collect();
    RWord::new(b, a).expect("generic word shape")
}

pub fn generic_lword(l: usize) -> LWord {
    use crate::ir::AlgebraTag;
    let a = (0..=l as u32).map(|k| Expr::gen(AlgebraTag::A, k)).collect();
    let b = (1..=l as u32).map(|k| Expr::gen(AlgebraTag::B, k)).collect();
    LWord::new(a, b).expect("generic word shape")
}

/// Number of moment-function invocations triggered by evaluating the
/// L-moment of the given family on a generic word of length ℓ.  Callers
/// compare against the bound 8^{ℓ(ℓ+1)/2}.
pub fn term_count(kind: MomentKind, l: usize) -> u64 {
    assert!(l <= 5, "term_count is only meaningful for short words");
    let mut n = 0u64;
    match kind {
        MomentKind::RightL => {
            lm_c(&generic_rword(l), &mut n);
        }
        MomentKind::RightR => {
            rm_c(&generic_rword(l), &mut n);
        }
        MomentKind::RightU => {
            um_c(&generic_rword(l), &mut n);
        }
        MomentKind::LeftL => {
            lmp_c(&generic_lword(l), &mut n);
        }
        MomentKind::LeftR => {
            rmp_c(&generic_lword(l), &mut n);
        }
        MomentKind::LeftU => {
            ump_c(&generic_lword(l), &mut n);
        }
        MomentKind::StrongL => {
            lms_c(&generic_rword(l), &mut n);
        }
        MomentKind::StrongR => {
            rms_c(&generic_rword(l), &mut n);
        }
        MomentKind::StrongU => {
            ums_c(&generic_rword(l), FirstCentering::CapR, &mut n);
        }
    }
    n
}

/// Upper bound s_ℓ = 8^{ℓ(ℓ+1)/2} on the invocation count.
pub fn term_count_bound(l: u32) -> u128 {
    8u128.pow(l * (l + 1) / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{canonical_text, parse};

    fn x(l: usize) -> RWord {
        generic_rword(l)
    }
    fn y(l: usize) -> LWord {
        generic_lword(l)
    }

    fn assert_expr(e: &Expr, s: &str) {
        let want = parse(s).unwrap();
        assert_eq!(e, &want, "got `{}`, want `{}`", canonical_text(e), s);
    }

    #[test]
    fn lm_x1_is_b0_rho_b1() {
        assert_expr(&right_moment(MomentKind::RightL, &x(1)), "b0 r(a1) b1");
    }

    #[test]
    fn um_x1_vanishes() {
        assert!(right_moment(MomentKind::RightU, &x(1)).terms.is_empty());
    }

    #[test]
    fn lm_x2_matches_table() {
        assert_expr(
            &right_moment(MomentKind::RightL, &x(2)),
            "v(b1) * b0 ( r(a1 a2) - r(a1) r(a2) ) b2 + b0 r(a1) b1 r(a2) b2",
        );
    }

    #[test]
    fn rc_x2_singleton() {
        let w = right_collapse(CollapseKind::Right, &x(2), &[1]).unwrap();
        assert_eq!(w.len(), 1);
        assert_expr(&w.b[0], "b0");
        assert_expr(&w.a[0], "a1");
        assert_expr(&w.b[1], "b1 r(a2) b2");
    }

    #[test]
    fn uc_x2_singleton_has_sign() {
        let w = right_collapse(CollapseKind::Uncollapse, &x(2), &[1]).unwrap();
        assert_expr(&w.b[1], "- b1 r(a2) b2");
    }

    #[test]
    fn rc_full_set_is_identity() {
        let w = right_collapse(CollapseKind::Right, &x(2), &[1, 2]).unwrap();
        assert_eq!(w, x(2));
    }

    #[test]
    fn collapse_index_out_of_range() {
        assert!(matches!(right_collapse(CollapseKind::Right, &x(2), &[3]), Err(WordError::IndexRange(3, 2))));
        assert!(matches!(right_collapse(CollapseKind::Left, &x(2), &[2]), Err(WordError::IndexRange(2, 2))));
    }

    #[test]
    fn lc_prime_empty_merges_everything() {
        let w = left_collapse(CollapseKind::Left, &y(1), &[]).unwrap();
        assert_eq!(w.len(), 0);
        assert_expr(&w.a[0], "a0 a1");
    }

    #[test]
    fn rc_prime_y2_singleton_is_identity() {
        let w = left_collapse(CollapseKind::Right, &y(2), &[1]).unwrap();
        assert_eq!(w, y(2));
    }

    #[test]
    fn uc_prime_y3_matches_table() {
        let w = left_collapse(CollapseKind::Uncollapse, &y(3), &[2]).unwrap();
        assert_eq!(w.len(), 2);
        assert_expr(&w.a[0], "a0");
        assert_expr(&w.b[0], "- b1 r(a1) b2");
        assert_expr(&w.a[1], "a2");
        assert_expr(&w.b[1], "b3");
        assert_expr(&w.a[2], "a3");
    }

    #[test]
    fn rm_prime_y1_vanishes() {
        assert!(left_moment(MomentKind::LeftR, &y(1)).terms.is_empty());
    }

    #[test]
    fn lm_prime_y1_matches_table() {
        assert_expr(&left_moment(MomentKind::LeftL, &y(1)), "v(b1) * a0 a1");
    }

    #[test]
    fn rm_prime_y2_matches_table() {
        assert_expr(&left_moment(MomentKind::LeftR, &y(2)), "v(b1 r(a1) b2) * a0 a2");
    }

    #[test]
    fn lms_base_and_x1() {
        let w0 = RWord::new(vec![Expr::gen(crate::ir::AlgebraTag::B, 0)], vec![]).unwrap();
        assert_expr(&strong_right_moment(MomentKind::StrongL, &w0), "b0");
        assert_expr(&strong_right_moment(MomentKind::StrongL, &x(1)), "b0 R(a1) b1");
    }

    #[test]
    fn definitional_vanishing_via_um() {
        // UM on a word with ν-centered interior b's is the expansion of the
        // fully centered alternating word, which E kills.
        for l in 1..=3 {
            let mut w = x(l);
            for j in 1..l {
                w.b[j] = w.b[j].centered(ScalarKind::Nu).normalize();
            }
            let e = right_moment(MomentKind::RightU, &w);
            assert!(e.terms.is_empty(), "UM(x{l} centered) = {}", canonical_text(&e));
        }
    }

    #[test]
    fn strong_vanishing_via_ums() {
        for l in 1..=3 {
            let mut w = x(l);
            for j in 1..l {
                w.b[j] = w.b[j].centered(ScalarKind::Nu).normalize();
            }
            let e = strong_right_moment(MomentKind::StrongU, &w);
            assert!(e.terms.is_empty(), "UM_s(x{l} centered) = {}", canonical_text(&e));
        }
    }

    #[test]
    fn term_count_base_and_bound() {
        assert_eq!(term_count(MomentKind::RightL, 0), 1);
        assert!(term_count(MomentKind::RightL, 1) <= 8);
        for l in 0..=4 {
            let c = term_count(MomentKind::RightL, l) as u128;
            assert!(c <= term_count_bound(l as u32), "count {c} exceeds bound at l={l}");
        }
    }

    #[test]
    fn lm_lies_in_b_span() {
        // No A-generators survive in LM output.
        let e = right_moment(MomentKind::RightL, &x(3));
        for t in &e.terms {
            for atom in &t.word {
                match atom {
                    crate::ir::Atom::Gen { tag, .. } => assert_eq!(*tag, crate::ir::AlgebraTag::B),
                    crate::ir::Atom::Map { .. } => {}
                }
            }
        }
    }
}
