//! Finite-dimensional numerical realization of CP-tuples: GNS data, minimal
//! Stinespring dilation, the truncated product space with its block
//! representations, corner map, retraction, and the discontinuity bound.
//!
//! Algebras are full matrix algebras; states are density matrices; CP maps
//! are Choi matrices.  Tolerance ladder: 1e-14 structural, 1e-10 defining
//! identities, 1e-8 cross-oracle.

pub mod linalg;
mod space;

pub use space::{
    corner_blocks, corner_of_word, discontinuity_gap, hstar_product_op, numeric_expectation,
    op_norm_restricted, star_product_op, theta, theta_of_word, CornerBlocks, ProductSpaceError,
    PsiWord, Step, TruncatedProductSpace,
};

use linalg::{dagger, hermitian_eig, max_abs, orthonormalize, trace};
use ndarray::{Array1, Array2};
use num_complex::Complex64 as C;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HilbertError {
    #[error("state is not faithful (min eigenvalue {0:e})")]
    NotFaithful(f64),
    #[error("state is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("state trace is {0}, not 1")]
    BadTrace(f64),
    #[error("Choi matrix not positive semidefinite (min eigenvalue {0:e})")]
    ChoiNegative(f64),
    #[error("map is not unital (error {0:e})")]
    NotUnital(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// A faithful state on M_d as a density matrix.
#[derive(Debug, Clone)]
pub struct StateNumeric {
    pub density: Array2<C>,
    pub faithful: bool,
}

impl StateNumeric {
    pub fn new(density: Array2<C>) -> Result<Self, HilbertError> {
        let herm = max_abs(&(&density - &dagger(&density)));
        if herm > 1e-10 {
            return Err(HilbertError::Dimension("density not Hermitian".into()));
        }
        let (vals, _) = hermitian_eig(&density);
        let min = vals.first().copied().unwrap_or(0.0);
        if min < -1e-10 {
            return Err(HilbertError::NotPositive(min));
        }
        let tr = trace(&density).re;
        if (tr - 1.0).abs() > 1e-10 {
            return Err(HilbertError::BadTrace(tr));
        }
        Ok(StateNumeric { density, faithful: min > 1e-8 })
    }

    pub fn dim(&self) -> usize {
        self.density.nrows()
    }

    /// ω(x) = tr(D x)
    pub fn eval(&self, x: &Array2<C>) -> C {
        trace(&self.density.dot(x))
    }

    pub fn maximally_mixed(d: usize) -> StateNumeric {
        let density = Array2::eye(d).mapv(|z: C| z / C::new(d as f64, 0.0));
        StateNumeric { density, faithful: true }
    }

    pub fn random_faithful<R: Rng>(rng: &mut R, d: usize) -> StateNumeric {
        let g = random_matrix(rng, d, d);
        let mut m = g.dot(&dagger(&g));
        for i in 0..d {
            m[[i, i]] += C::new(0.2, 0.0);
        }
        let tr = trace(&m).re;
        StateNumeric::new(m.mapv(|z| z / C::new(tr, 0.0))).expect("constructed faithful state")
    }
}

/// A unital CP map M_{d_in} → M_{d_out} stored as a Choi matrix
/// C[(i,p),(j,q)] = φ(E_ij)[p,q].
#[derive(Debug, Clone)]
pub struct CPMapNumeric {
    pub d_in: usize,
    pub d_out: usize,
    pub choi: Array2<C>,
    pub unital: bool,
}

impl CPMapNumeric {
    pub fn from_choi(d_in: usize, d_out: usize, choi: Array2<C>) -> Result<Self, HilbertError> {
        if choi.nrows() != d_in * d_out || choi.ncols() != d_in * d_out {
            return Err(HilbertError::Dimension(format!(
                "Choi must be {}x{}",
                d_in * d_out,
                d_in * d_out
            )));
        }
        let (vals, _) = hermitian_eig(&choi);
        let min = vals.first().copied().unwrap_or(0.0);
        if min < -1e-10 {
            return Err(HilbertError::ChoiNegative(min));
        }
        let mut map = CPMapNumeric { d_in, d_out, choi, unital: false };
        let unit_err = max_abs(&(&map.apply(&Array2::eye(d_in)) - &Array2::eye(d_out)));
        map.unital = unit_err < 1e-10;
        Ok(map)
    }

    pub fn from_kraus(d_in: usize, d_out: usize, ops: &[Array2<C>]) -> Result<Self, HilbertError> {
        let n = d_in * d_out;
        let mut choi = Array2::zeros((n, n));
        for v in ops {
            if v.nrows() != d_out || v.ncols() != d_in {
                return Err(HilbertError::Dimension("Kraus operator shape".into()));
            }
            for i in 0..d_in {
                for p in 0..d_out {
                    for j in 0..d_in {
                        for q in 0..d_out {
                            choi[[i * d_out + p, j * d_out + q]] += v[[p, i]] * v[[q, j]].conj();
                        }
                    }
                }
            }
        }
        CPMapNumeric::from_choi(d_in, d_out, choi)
    }

    /// φ(a) by Choi contraction.
    pub fn apply(&self, a: &Array2<C>) -> Array2<C> {
        let mut out = Array2::zeros((self.d_out, self.d_out));
        for i in 0..self.d_in {
            for j in 0..self.d_in {
                let aij = a[[i, j]];
                if aij.norm() == 0.0 {
                    continue;
                }
                for p in 0..self.d_out {
                    for q in 0..self.d_out {
                        out[[p, q]] += aij * self.choi[[i * self.d_out + p, j * self.d_out + q]];
                    }
                }
            }
        }
        out
    }

    pub fn identity(d: usize) -> CPMapNumeric {
        let ops = [Array2::eye(d)];
        CPMapNumeric::from_kraus(d, d, &ops).expect("identity channel")
    }

    /// a ↦ tr(a)/d · 1
    pub fn depolarizing(d: usize) -> CPMapNumeric {
        // Kraus ops E_pq / sqrt(d)
        let mut ops = Vec::new();
        for p in 0..d {
            for q in 0..d {
                let mut m = Array2::zeros((d, d));
                m[[p, q]] = C::new(1.0 / (d as f64).sqrt(), 0.0);
                ops.push(m);
            }
        }
        CPMapNumeric::from_kraus(d, d, &ops).expect("depolarizing channel")
    }

    /// Random unital CP map from two unitalized Gaussian Kraus operators.
    pub fn random_unital<R: Rng>(rng: &mut R, d: usize) -> CPMapNumeric {
        let g1 = random_matrix(rng, d, d);
        let g2 = random_matrix(rng, d, d);
        let s = g1.dot(&dagger(&g1)) + g2.dot(&dagger(&g2));
        let s_inv_sqrt = mat_power(&s, -0.5);
        let ops = [s_inv_sqrt.dot(&g1), s_inv_sqrt.dot(&g2)];
        CPMapNumeric::from_kraus(d, d, &ops).expect("random unital channel")
    }
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Array2<C> {
    Array2::from_shape_fn((rows, cols), |_| {
        C::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
    })
}

pub fn random_hermitian<R: Rng>(rng: &mut R, d: usize) -> Array2<C> {
    let g = random_matrix(rng, d, d);
    (&g + &dagger(&g)).mapv(|z| z / C::new(2.0, 0.0))
}

/// Hermitian PSD matrix power via eigendecomposition.
pub fn mat_power(m: &Array2<C>, p: f64) -> Array2<C> {
    let (vals, vecs) = hermitian_eig(m);
    let n = m.nrows();
    let mut d = Array2::<C>::zeros((n, n));
    for i in 0..n {
        let v = vals[i].max(0.0);
        d[[i, i]] = C::new(v.powf(p), 0.0);
    }
    vecs.dot(&d).dot(&dagger(&vecs))
}

/// GNS data for (M_d, ω): an orthonormal basis of M_d under
/// ⟨x,y⟩ = ω(x*y), the cyclic vector, and the left-multiplication
/// representation expressed in that basis.
#[derive(Debug, Clone)]
pub struct GNSData {
    pub d: usize,
    pub dim: usize,
    pub state: StateNumeric,
    /// ONB of the GNS space as matrices.
    pub basis: Vec<Array2<C>>,
    /// Coordinates of the cyclic vector Ω = 1.
    pub omega_vec: Array1<C>,
    /// If true, H = GNS ⊕ ℂ^d with π_R acting standardly on the pad; used to
    /// exercise a nonzero H′ = H ⊖ π_R(B)Ω.
    pub padded: bool,
}

fn gns_inner(state: &StateNumeric, x: &Array2<C>, y: &Array2<C>) -> C {
    trace(&state.density.dot(&dagger(x)).dot(y))
}

/// GNS construction for (M_d, ω); requires a faithful state.
pub fn gns(d: usize, state: &StateNumeric) -> Result<GNSData, HilbertError> {
    gns_with_padding(d, state, false)
}

pub fn gns_with_padding(d: usize, state: &StateNumeric, padded: bool) -> Result<GNSData, HilbertError> {
    if !state.faithful {
        let (vals, _) = hermitian_eig(&state.density);
        return Err(HilbertError::NotFaithful(vals.first().copied().unwrap_or(0.0)));
    }
    if state.dim() != d {
        return Err(HilbertError::Dimension("state dimension".into()));
    }
    // Gram-Schmidt the matrix units under the ω inner product.
    let mut basis: Vec<Array2<C>> = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut m = Array2::<C>::zeros((d, d));
            m[[i, j]] = C::new(1.0, 0.0);
            for b in &basis {
                let c = gns_inner(state, b, &m);
                m = &m - &b.mapv(|z| z * c);
            }
            let norm = gns_inner(state, &m, &m).re.sqrt();
            if norm < 1e-12 {
                return Err(HilbertError::NotFaithful(norm));
            }
            basis.push(m.mapv(|z| z / C::new(norm, 0.0)));
        }
    }
    let gns_dim = d * d;
    let dim = if padded { gns_dim + d } else { gns_dim };
    let one = Array2::eye(d);
    let mut omega_vec = Array1::zeros(dim);
    for (k, b) in basis.iter().enumerate() {
        omega_vec[k] = gns_inner(state, b, &one);
    }
    Ok(GNSData { d, dim, state: state.clone(), basis, omega_vec, padded })
}

impl GNSData {
    /// π_R(b) in GNS coordinates (block diagonal with the standard action on
    /// the pad, when padded).
    pub fn pi_r(&self, b: &Array2<C>) -> Array2<C> {
        let g = self.basis.len();
        let mut m = Array2::zeros((self.dim, self.dim));
        for k in 0..g {
            let target = b.dot(&self.basis[k]);
            for j in 0..g {
                m[[j, k]] = gns_inner(&self.state, &self.basis[j], &target);
            }
        }
        if self.padded {
            for i in 0..self.d {
                for j in 0..self.d {
                    m[[g + i, g + j]] = b[[i, j]];
                }
            }
        }
        m
    }

    /// ⟨Ω, π_R(b) Ω⟩
    pub fn vector_state(&self, b: &Array2<C>) -> C {
        let m = self.pi_r(b);
        let v = m.dot(&self.omega_vec);
        self.omega_vec.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum()
    }
}

/// Minimal Stinespring data for Θ = π_R ∘ φ: an isometry V: H → K and a
/// representation π_L of M_{d_A} on K with V*π_L(·)V = Θ(·), K minimal.
#[derive(Debug, Clone)]
pub struct StinespringData {
    pub d_a: usize,
    pub h_dim: usize,
    pub k_dim: usize,
    pub kraus_rank: usize,
    /// Isometry H → K (k_dim × h_dim).
    pub v: Array2<C>,
    /// Compressor U: ℂ^{k_dim} → ℂ^{d_a · rank}; π_L(a) = U† (a ⊗ I) U.
    u: Array2<C>,
}

impl StinespringData {
    pub fn pi_l(&self, a: &Array2<C>) -> Array2<C> {
        let r = self.kraus_rank;
        let big = self.u.nrows();
        // (a ⊗ I_r) U, then U† ·
        let mut au = Array2::<C>::zeros((big, self.k_dim));
        for col in 0..self.k_dim {
            for i in 0..self.d_a {
                for j in 0..self.d_a {
                    let aij = a[[i, j]];
                    if aij.norm() == 0.0 {
                        continue;
                    }
                    for rr in 0..r {
                        au[[i * r + rr, col]] += aij * self.u[[j * r + rr, col]];
                    }
                }
            }
        }
        dagger(&self.u).dot(&au)
    }
}

/// Minimal Stinespring dilation of π_R ∘ φ by eigendecomposition of its Choi
/// matrix, followed by compression onto span π_L(A) V H.
pub fn stinespring_minimal(phi: &CPMapNumeric, rep: &GNSData) -> Result<StinespringData, HilbertError> {
    if phi.d_out != rep.d {
        return Err(HilbertError::Dimension("φ output vs representation".into()));
    }
    if !phi.unital {
        return Err(HilbertError::NotUnital(max_abs(
            &(&phi.apply(&Array2::eye(phi.d_in)) - &Array2::eye(phi.d_out)),
        )));
    }
    let d_a = phi.d_in;
    let h = rep.dim;
    // Choi of Θ = π_R ∘ φ on (d_a, h).
    let n = d_a * h;
    let mut choi = Array2::<C>::zeros((n, n));
    for i in 0..d_a {
        for j in 0..d_a {
            let mut e = Array2::<C>::zeros((d_a, d_a));
            e[[i, j]] = C::new(1.0, 0.0);
            let th = rep.pi_r(&phi.apply(&e));
            for p in 0..h {
                for q in 0..h {
                    choi[[i * h + p, j * h + q]] = th[[p, q]];
                }
            }
        }
    }
    let (vals, vecs) = hermitian_eig(&choi);
    let vmax = vals.last().copied().unwrap_or(0.0);
    if vals.first().copied().unwrap_or(0.0) < -1e-10 * vmax.max(1.0) {
        return Err(HilbertError::ChoiNegative(vals[0]));
    }
    // Kraus operators V_r (h × d_a) from eigenpairs with λ above cutoff.
    let cutoff = vmax * 1e-12;
    let mut kraus: Vec<Array2<C>> = Vec::new();
    for (k, lam) in vals.iter().enumerate() {
        if *lam <= cutoff {
            continue;
        }
        let col = vecs.column(k);
        let mut vmat = Array2::<C>::zeros((h, d_a));
        for i in 0..d_a {
            for p in 0..h {
                vmat[[p, i]] = col[i * h + p] * C::new(lam.sqrt(), 0.0);
            }
        }
        kraus.push(vmat);
    }
    let rank = kraus.len();
    let big = d_a * rank;
    // V0: H → ℂ^{d_a·rank}, V0[(j,r), q] = conj(Vr[q, j])
    let mut v0 = Array2::<C>::zeros((big, h));
    for (r, vr) in kraus.iter().enumerate() {
        for j in 0..d_a {
            for q in 0..h {
                v0[[j * rank + r, q]] = vr[[q, j]].conj();
            }
        }
    }
    // Span of (E_ij ⊗ I) V0 columns.
    let mut spanning: Vec<Array1<C>> = Vec::new();
    for i in 0..d_a {
        for j in 0..d_a {
            for col in 0..h {
                let mut v = Array1::<C>::zeros(big);
                for r in 0..rank {
                    v[i * rank + r] = v0[[j * rank + r, col]];
                }
                spanning.push(v);
            }
        }
    }
    let basis = orthonormalize(&spanning, 1e-9);
    let k_dim = basis.len();
    let mut u = Array2::<C>::zeros((big, k_dim));
    for (c, b) in basis.iter().enumerate() {
        for rix in 0..big {
            u[[rix, c]] = b[rix];
        }
    }
    let v = dagger(&u).dot(&v0);
    Ok(StinespringData { d_a, h_dim: h, k_dim, kraus_rank: rank, v, u })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gns_of_trace_state_on_m2() {
        let st = StateNumeric::maximally_mixed(2);
        let g = gns(2, &st).unwrap();
        assert_eq!(g.dim, 4);
        let norm: f64 = g.omega_vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gns_is_a_homomorphism_and_reproduces_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let st = StateNumeric::random_faithful(&mut rng, 2);
        let g = gns(2, &st).unwrap();
        for _ in 0..50 {
            let b1 = random_matrix(&mut rng, 2, 2);
            let b2 = random_matrix(&mut rng, 2, 2);
            let lhs = g.pi_r(&b1.dot(&b2));
            let rhs = g.pi_r(&b1).dot(&g.pi_r(&b2));
            assert!(max_abs(&(&lhs - &rhs)) < 1e-12);
            let want = st.eval(&b1);
            let got = g.vector_state(&b1);
            assert!((want - got).norm() < 1e-12);
        }
    }

    #[test]
    fn gns_rejects_non_faithful_state() {
        let mut density = Array2::<C>::zeros((2, 2));
        density[[0, 0]] = C::new(1.0, 0.0);
        let st = StateNumeric::new(density).unwrap();
        assert!(!st.faithful);
        assert!(matches!(gns(2, &st), Err(HilbertError::NotFaithful(_))));
    }

    #[test]
    fn depolarizing_choi_has_full_kraus_rank() {
        let st = StateNumeric::maximally_mixed(2);
        let rep = gns(2, &st).unwrap();
        let phi = CPMapNumeric::depolarizing(2);
        let ss = stinespring_minimal(&phi, &rep).unwrap();
        // Kraus rank of Θ = π_R∘φ for the depolarizing map is d² = 4.
        assert_eq!(ss.kraus_rank, 4);
        let iso = max_abs(&(&dagger(&ss.v).dot(&ss.v) - &Array2::eye(rep.dim)));
        assert!(iso < 1e-10, "V not an isometry: {iso:e}");
    }

    #[test]
    fn identity_channel_gives_zero_complement() {
        let st = StateNumeric::maximally_mixed(2);
        let rep = gns(2, &st).unwrap();
        let phi = CPMapNumeric::identity(2);
        let ss = stinespring_minimal(&phi, &rep).unwrap();
        // π_L(A)VH = π_R(A)H = H: V is unitary onto K and L = K ⊖ VH = 0.
        assert_eq!(ss.k_dim, rep.dim);
        // π_L equals π_R through V.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 2, 2);
            let lhs = dagger(&ss.v).dot(&ss.pi_l(&a)).dot(&ss.v);
            let rhs = rep.pi_r(&a);
            assert!(max_abs(&(&lhs - &rhs)) < 1e-10);
        }
    }

    #[test]
    fn stinespring_identity_on_random_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let st = StateNumeric::random_faithful(&mut rng, 2);
        let rep = gns(2, &st).unwrap();
        let phi = CPMapNumeric::random_unital(&mut rng, 2);
        let ss = stinespring_minimal(&phi, &rep).unwrap();
        let iso = max_abs(&(&dagger(&ss.v).dot(&ss.v) - &Array2::eye(rep.dim)));
        assert!(iso < 1e-10);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, 2, 2);
            let lhs = dagger(&ss.v).dot(&ss.pi_l(&a)).dot(&ss.v);
            let rhs = rep.pi_r(&phi.apply(&a));
            assert!(max_abs(&(&lhs - &rhs)) < 1e-10, "V*π_L V ≠ π_R φ");
        }
        // Multiplicativity of π_L.
        for _ in 0..10 {
            let a1 = random_matrix(&mut rng, 2, 2);
            let a2 = random_matrix(&mut rng, 2, 2);
            let lhs = ss.pi_l(&a1.dot(&a2));
            let rhs = ss.pi_l(&a1).dot(&ss.pi_l(&a2));
            assert!(max_abs(&(&lhs - &rhs)) < 1e-10, "π_L not multiplicative");
        }
    }
}
