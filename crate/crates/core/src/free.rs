//! Free-probability joint moments via the recursive alternating/general
//! moment functions.  Subalgebra membership comes from the explicit index
//! tuple; the state of the probability space is the `w(...)` scalar.

use crate::ir::{Expr, ScalarKind};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FreeError {
    #[error("index tuple length {indices} does not match entry count {entries}")]
    LengthMismatch { indices: usize, entries: usize },
    #[error("index tuple must be nonempty")]
    Empty,
}

/// Nonempty tuple of subalgebra indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexTuple(pub Vec<u32>);

impl IndexTuple {
    pub fn new(entries: Vec<u32>) -> Result<Self, FreeError> {
        if entries.is_empty() {
            return Err(FreeError::Empty);
        }
        Ok(IndexTuple(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Maximal runs of equal indices, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsecutivityDecomposition {
    /// Half-open index ranges into the tuple, covering it in order.
    pub blocks: Vec<(usize, usize)>,
    /// True iff every block has length 1, i.e. adjacent indices all differ.
    pub nonstammering: bool,
}

pub fn consecutivity(iota: &IndexTuple) -> ConsecutivityDecomposition {
    let ix = &iota.0;
    let mut blocks = Vec::new();
    let mut start = 0usize;
    for k in 1..ix.len() {
        if ix[k] != ix[k - 1] {
            blocks.push((start, k));
            start = k;
        }
    }
    blocks.push((start, ix.len()));
    let nonstammering = blocks.iter().all(|(s, e)| e - s == 1);
    ConsecutivityDecomposition { blocks, nonstammering }
}

fn state(x: &Expr) -> Expr {
    Expr::scalar(ScalarKind::Omega, x)
}

/// Alternating moment on entries carrying explicit indices; assumes the
/// index tuple is nonstammering (callers merge blocks first).
fn am_indexed(indices: &[u32], entries: &[Expr]) -> Expr {
    let n = entries.len();
    if n == 0 {
        return Expr::one();
    }
    if n == 1 {
        return state(&entries[0]);
    }
    let mut acc = Expr::zero();
    // Subsets of [n] in increasing binary order; the full set is excluded.
    for mask in 0..((1u32 << n) - 1) {
        let mut sub_ix = Vec::new();
        let mut sub_en = Vec::new();
        let mut omitted = Expr::one();
        for k in 0..n {
            if mask & (1 << k) != 0 {
                sub_ix.push(indices[k]);
                sub_en.push(entries[k].centered(ScalarKind::Omega));
            } else {
                omitted = omitted.mul(&state(&entries[k]));
            }
        }
        let inner = if sub_ix.is_empty() { Expr::one() } else { gm_indexed(&sub_ix, &sub_en) };
        acc = acc.add(&inner.mul(&omitted));
    }
    acc.normalize()
}

fn gm_indexed(indices: &[u32], entries: &[Expr]) -> Expr {
    let iota = IndexTuple(indices.to_vec());
    let dec = consecutivity(&iota);
    let mut block_ix = Vec::with_capacity(dec.blocks.len());
    let mut block_en = Vec::with_capacity(dec.blocks.len());
    for (s, e) in &dec.blocks {
        block_ix.push(indices[*s]);
        block_en.push(Expr::product(entries[*s..*e].iter()).normalize());
    }
    am_indexed(&block_ix, &block_en)
}

/// Alternating moment function on a generic alternating word: entries are
/// assumed to lie in pairwise-distinct subalgebras position by position.
pub fn am(entries: &[Expr]) -> Result<Expr, FreeError> {
    if entries.is_empty() {
        return Err(FreeError::Empty);
    }
    let indices: Vec<u32> = (1..=entries.len() as u32).collect();
    Ok(am_indexed(&indices, entries))
}

/// General moment function: alternating moment of the consecutivity-block
/// products.
pub fn gm(iota: &IndexTuple, entries: &[Expr]) -> Result<Expr, FreeError> {
    if iota.len() != entries.len() {
        return Err(FreeError::LengthMismatch { indices: iota.len(), entries: entries.len() });
    }
    Ok(gm_indexed(&iota.0, entries))
}

/// The joint moment φ(a_1 ⋯ a_n) of a located tuple under free independence.
pub fn joint_moment(iota: &IndexTuple, entries: &[Expr]) -> Result<Expr, FreeError> {
    gm(iota, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{canonical_text, AlgebraTag, Expr};

    fn g(id: u32) -> Expr {
        Expr::gen(AlgebraTag::A, id)
    }

    #[test]
    fn consecutivity_blocks_match_paper_example() {
        let iota = IndexTuple::new(vec![1, 2, 2, 1, 1, 3, 1]).unwrap();
        let dec = consecutivity(&iota);
        assert_eq!(dec.blocks, vec![(0, 1), (1, 3), (3, 5), (5, 6), (6, 7)]);
        assert!(!dec.nonstammering);
    }

    #[test]
    fn singleton_and_alternating_are_nonstammering() {
        let one = consecutivity(&IndexTuple::new(vec![1]).unwrap());
        assert_eq!(one.blocks, vec![(0, 1)]);
        assert!(one.nonstammering);
        let alt = consecutivity(&IndexTuple::new(vec![1, 2, 1]).unwrap());
        assert_eq!(alt.blocks.len(), 3);
        assert!(alt.nonstammering);
    }

    #[test]
    fn am_base_case_is_the_state() {
        let e = am(&[g(1)]).unwrap();
        assert_eq!(canonical_text(&e), "w(a1)");
    }

    #[test]
    fn am_vanishes_on_formally_centered_entries() {
        use crate::ir::ScalarKind;
        let entries: Vec<Expr> = (1..=3).map(|k| g(k).centered(ScalarKind::Omega)).collect();
        let e = am(&entries).unwrap();
        assert!(e.terms.is_empty(), "got {}", canonical_text(&e));
    }

    #[test]
    fn am_of_two_is_product_of_states() {
        let e = am(&[g(1), g(2)]).unwrap();
        assert_eq!(canonical_text(&e), "w(a1) * w(a2)");
    }

    #[test]
    fn gm_merges_single_block() {
        let iota = IndexTuple::new(vec![1, 1]).unwrap();
        let e = gm(&iota, &[g(1), g(2)]).unwrap();
        assert_eq!(canonical_text(&e), "w(a1 a2)");
    }

    #[test]
    fn gm_length_mismatch_is_an_error() {
        let iota = IndexTuple::new(vec![1, 2]).unwrap();
        assert!(matches!(gm(&iota, &[g(1)]), Err(FreeError::LengthMismatch { .. })));
    }

    #[test]
    fn joint_moment_on_singleton_index_set_is_state_of_product() {
        let iota = IndexTuple::new(vec![5, 5, 5]).unwrap();
        let e = joint_moment(&iota, &[g(1), g(2), g(3)]).unwrap();
        assert_eq!(canonical_text(&e), "w(a1 a2 a3)");
    }
}
