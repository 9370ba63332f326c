//! Classical finite-state dilation: transition semigroups P_t = exp(tQ),
//! the pair-contraction θ_t, grid-algebra retractions ε_γ, and the
//! strong-dilation shift check.  Explicitly not an oracle for the moment
//! polynomials — the star-product dilation differs from the tensor one even
//! commutatively, and one test documents that gap.

use crate::ir::{rat_f64 as ratf, Rat};
use ndarray::{Array1, Array2};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MarkovError {
    #[error("rate matrix must be square, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("negative off-diagonal rate at ({0},{1})")]
    NegativeRate(usize, usize),
    #[error("row {0} does not sum to zero (sum {1:e})")]
    RowSum(usize, f64),
    #[error("grid must be sorted, distinct, and nonnegative")]
    BadGrid,
    #[error("tensor has {got} entries, expected m^{legs} = {want}")]
    TensorShape { got: usize, legs: usize, want: usize },
    #[error("negative time")]
    NegativeTime,
}

pub use crate::ir::rat_f64;

/// Generator of a continuous-time Markov chain on m states: nonnegative
/// off-diagonal entries, zero row sums.
#[derive(Debug, Clone)]
pub struct RateMatrix {
    pub q: Array2<f64>,
}

impl RateMatrix {
    pub fn new(q: Array2<f64>) -> Result<Self, MarkovError> {
        let (r, c) = q.dim();
        if r != c {
            return Err(MarkovError::NotSquare(r, c));
        }
        for i in 0..r {
            let mut sum = 0.0;
            for j in 0..c {
                if i != j && q[[i, j]] < 0.0 {
                    return Err(MarkovError::NegativeRate(i, j));
                }
                sum += q[[i, j]];
            }
            if sum.abs() > 1e-12 {
                return Err(MarkovError::RowSum(i, sum));
            }
        }
        Ok(RateMatrix { q })
    }

    pub fn states(&self) -> usize {
        self.q.nrows()
    }
}

/// Matrix exponential by scaling and squaring on a Taylor series; adequate
/// for the small generators used here (accuracy target 1e-12 at m <= 16).
pub fn expm(a: &Array2<f64>) -> Array2<f64> {
    let n = a.nrows();
    let norm = a.iter().map(|x| x.abs()).fold(0.0f64, f64::max) * n as f64;
    let mut s = 0u32;
    while norm / 2f64.powi(s as i32) > 0.5 {
        s += 1;
    }
    let scaled = a.mapv(|x| x / 2f64.powi(s as i32));
    let mut result = Array2::eye(n);
    let mut term = Array2::eye(n);
    for k in 1..=20 {
        term = term.dot(&scaled).mapv(|x| x / k as f64);
        result = result + &term;
    }
    for _ in 0..s {
        result = result.dot(&result);
    }
    result
}

/// P_t = exp(tQ); row-stochastic for t >= 0.
pub fn semigroup_at(q: &RateMatrix, t: Rat) -> Result<Array2<f64>, MarkovError> {
    if t < Rat::from_integer(0) {
        return Err(MarkovError::NegativeTime);
    }
    Ok(expm(&q.q.mapv(|x| x * ratf(&t))))
}

/// (θ_t F)(x) = Σ_y P_t(x,y) F(y,x) for F on S×S (row-major, F[y*m + x]).
pub fn theta_t(q: &RateMatrix, f: &[f64], t: Rat) -> Result<Array1<f64>, MarkovError> {
    let m = q.states();
    if f.len() != m * m {
        return Err(MarkovError::TensorShape { got: f.len(), legs: 2, want: m * m });
    }
    let p = semigroup_at(q, t)?;
    let mut out = Array1::zeros(m);
    for x in 0..m {
        let mut acc = 0.0;
        for y in 0..m {
            acc += p[[x, y]] * f[y * m + x];
        }
        out[x] = acc;
    }
    Ok(out)
}

/// An element of the grid algebra: a dense tensor over S^γ, legs ordered by
/// increasing time; entry index is row-major in the leg order.
#[derive(Debug, Clone)]
pub struct GridAlgebraElement {
    pub gamma: Vec<Rat>,
    pub tensor: Vec<f64>,
}

impl GridAlgebraElement {
    pub fn new(gamma: Vec<Rat>, tensor: Vec<f64>, m: usize) -> Result<Self, MarkovError> {
        if gamma.is_empty()
            || gamma.windows(2).any(|w| w[0] >= w[1])
            || gamma[0] < Rat::from_integer(0)
        {
            return Err(MarkovError::BadGrid);
        }
        let want = m.pow(gamma.len() as u32);
        if tensor.len() != want {
            return Err(MarkovError::TensorShape { got: tensor.len(), legs: gamma.len(), want });
        }
        Ok(GridAlgebraElement { gamma, tensor })
    }

    /// Simple tensor f_1 ⊗ … ⊗ f_n from per-leg value vectors.
    pub fn simple(gamma: Vec<Rat>, factors: &[Vec<f64>]) -> Result<Self, MarkovError> {
        let m = factors.first().map(|f| f.len()).unwrap_or(0);
        let n = gamma.len();
        if factors.len() != n {
            return Err(MarkovError::BadGrid);
        }
        let total = m.pow(n as u32);
        let mut tensor = vec![0.0; total];
        for (idx, t) in tensor.iter_mut().enumerate() {
            let mut rem = idx;
            let mut val = 1.0;
            for leg in (0..n).rev() {
                let state = rem % m;
                rem /= m;
                val *= factors[leg][state];
            }
            *t = val;
        }
        GridAlgebraElement::new(gamma, tensor, m)
    }
}

/// ε_γ: A_γ → A.  For γ = {t_1 < … < t_n} and a simple tensor,
/// ε_γ(f_1 ⊗ … ⊗ f_n) = f_1 · P_{t_2−t_1}(f_2 · P_{t_3−t_2}(… f_n)).
/// General tensors are folded from the last leg inwards: each step contracts
/// the final leg with the kernel P_{t_k − t_{k−1}} conditioned on leg k−1.
pub fn epsilon_gamma(q: &RateMatrix, x: &GridAlgebraElement) -> Result<Array1<f64>, MarkovError> {
    let m = q.states();
    let n = x.gamma.len();
    let want = m.pow(n as u32);
    if x.tensor.len() != want {
        return Err(MarkovError::TensorShape { got: x.tensor.len(), legs: n, want });
    }
    let mut cur = x.tensor.clone();
    for k in (1..n).rev() {
        // contract leg k into leg k-1 with P_{t_k - t_{k-1}}
        let p = semigroup_at(q, x.gamma[k] - x.gamma[k - 1])?;
        let rows = m.pow(k as u32);
        let mut next = vec![0.0; rows];
        for (r, slot) in next.iter_mut().enumerate() {
            let yk_prev = r % m; // state on leg k-1
            let mut acc = 0.0;
            for y in 0..m {
                acc += p[[yk_prev, y]] * cur[r * m + y];
            }
            *slot = acc;
        }
        cur = next;
    }
    Ok(Array1::from(cur))
}

/// Report from a strong-dilation shift check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ShiftReport {
    pub max_error: f64,
    pub pass: bool,
}

/// Verifies ε over the shifted grid γ+t, composed with the inclusion that
/// pads time 0 with the unit, equals P_t ∘ ε_γ.
pub fn strong_dilation_check(
    q: &RateMatrix,
    x: &GridAlgebraElement,
    t: Rat,
    tol: f64,
) -> Result<ShiftReport, MarkovError> {
    if x.gamma[0] != Rat::from_integer(0) {
        return Err(MarkovError::BadGrid);
    }
    if t < Rat::from_integer(0) {
        return Err(MarkovError::NegativeTime);
    }
    let m = q.states();
    let rhs = {
        let e = epsilon_gamma(q, x)?;
        semigroup_at(q, t)?.dot(&e)
    };
    let lhs = if t == Rat::from_integer(0) {
        epsilon_gamma(q, x)?
    } else {
        // Embed into A_{{0} ∪ (γ+t)}: unit on the new first leg.
        let mut gamma = vec![Rat::from_integer(0)];
        gamma.extend(x.gamma.iter().map(|s| *s + t));
        let mut tensor = Vec::with_capacity(m * x.tensor.len());
        for _first in 0..m {
            tensor.extend_from_slice(&x.tensor);
        }
        // Leg order: new leg is earliest, so it must be the *first* leg:
        // tensor[(y0, y1..yn)] = x.tensor[(y1..yn)]; the layout above indexes
        // the new leg as the slowest-varying coordinate, which is leg 0.
        let padded = GridAlgebraElement::new(gamma, tensor, m)?;
        epsilon_gamma(q, &padded)?
    };
    let max_error = lhs
        .iter()
        .zip(rhs.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    Ok(ShiftReport { max_error, pass: max_error < tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::rat;
    use ndarray::array;

    fn two_state() -> RateMatrix {
        RateMatrix::new(array![[-1.0, 1.0], [1.0, -1.0]]).unwrap()
    }

    #[test]
    fn p0_is_identity() {
        let q = two_state();
        let p = semigroup_at(&q, Rat::from_integer(0)).unwrap();
        assert!((p[[0, 0]] - 1.0).abs() < 1e-14 && p[[0, 1]].abs() < 1e-14);
    }

    #[test]
    fn two_state_closed_form() {
        let q = two_state();
        for t in [rat(1, 2), Rat::from_integer(1), rat(7, 3)] {
            let p = semigroup_at(&q, t).unwrap();
            let e = (-2.0 * ratf(&t)).exp();
            assert!((p[[0, 0]] - (1.0 + e) / 2.0).abs() < 1e-12);
            assert!((p[[0, 1]] - (1.0 - e) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn chapman_kolmogorov() {
        let q = two_state();
        let s = rat(1, 3);
        let t = rat(5, 7);
        let pst = semigroup_at(&q, s + t).unwrap();
        let prod = semigroup_at(&q, s).unwrap().dot(&semigroup_at(&q, t).unwrap());
        let err = (&pst - &prod).iter().map(|x| x.abs()).fold(0.0f64, f64::max);
        assert!(err < 1e-10, "CK error {err:e}");
    }

    #[test]
    fn theta_on_simple_tensor() {
        // θ_t(f ⊗ g) = (P_t f) g with F[y*m+x] = f(y) g(x)
        let q = two_state();
        let f = [0.3, 1.7];
        let g = [1.0, -2.0];
        let mut big = vec![0.0; 4];
        for y in 0..2 {
            for x in 0..2 {
                big[y * 2 + x] = f[y] * g[x];
            }
        }
        let t = rat(1, 2);
        let got = theta_t(&q, &big, t).unwrap();
        let p = semigroup_at(&q, t).unwrap();
        for x in 0..2 {
            let want = (p[[x, 0]] * f[0] + p[[x, 1]] * f[1]) * g[x];
            assert!((got[x] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn theta_is_unital_and_contractive() {
        let q = two_state();
        let ones = vec![1.0; 4];
        let got = theta_t(&q, &ones, rat(3, 4)).unwrap();
        assert!(got.iter().all(|x| (x - 1.0).abs() < 1e-12));
        let f = [0.9, -0.4, 0.2, 0.8];
        let sup_in = f.iter().map(|x| x.abs()).fold(0.0f64, f64::max);
        let out = theta_t(&q, &f, rat(1, 5)).unwrap();
        let sup_out = out.iter().map(|x| x.abs()).fold(0.0f64, f64::max);
        assert!(sup_out <= sup_in + 1e-12);
    }

    #[test]
    fn epsilon_singleton_is_identity() {
        let q = two_state();
        let x = GridAlgebraElement::new(vec![Rat::from_integer(0)], vec![0.4, 0.6], 2).unwrap();
        let e = epsilon_gamma(&q, &x).unwrap();
        assert!((e[0] - 0.4).abs() < 1e-14 && (e[1] - 0.6).abs() < 1e-14);
    }

    #[test]
    fn epsilon_unital() {
        let q = two_state();
        let x = GridAlgebraElement::new(vec![Rat::from_integer(0), Rat::from_integer(1)], vec![1.0; 4], 2).unwrap();
        let e = epsilon_gamma(&q, &x).unwrap();
        assert!(e.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn epsilon_matches_path_sum_on_pair() {
        // Brute-force path-measure sum over S^2 weighted by the P_1 kernel.
        let q = two_state();
        let f = [0.5, 2.0];
        let g = [1.0, 3.0];
        let x = GridAlgebraElement::simple(
            vec![Rat::from_integer(0), Rat::from_integer(1)],
            &[f.to_vec(), g.to_vec()],
        )
        .unwrap();
        let e = epsilon_gamma(&q, &x).unwrap();
        let p = semigroup_at(&q, Rat::from_integer(1)).unwrap();
        for x0 in 0..2 {
            let mut want = 0.0;
            for y in 0..2 {
                want += f[x0] * p[[x0, y]] * g[y];
            }
            assert!((e[x0] - want).abs() < 1e-12, "state {x0}");
        }
    }

    #[test]
    fn shift_law_holds_and_detects_injected_failure() {
        let q = two_state();
        let x = GridAlgebraElement::simple(
            vec![Rat::from_integer(0), rat(3, 2)],
            &[vec![0.2, 1.1], vec![-0.7, 0.4]],
        )
        .unwrap();
        let rep = strong_dilation_check(&q, &x, rat(1, 2), 1e-10).unwrap();
        assert!(rep.pass, "error {:e}", rep.max_error);
        let rep0 = strong_dilation_check(&q, &x, Rat::from_integer(0), 1e-14).unwrap();
        assert!(rep0.pass);
        // negative control: wrong time difference
        let wrong = GridAlgebraElement::simple(
            vec![Rat::from_integer(0), Rat::from_integer(2)],
            &[vec![0.2, 1.1], vec![-0.7, 0.4]],
        )
        .unwrap();
        let lhs = {
            let mut gamma = vec![Rat::from_integer(0)];
            gamma.extend(wrong.gamma.iter().map(|s| *s + rat(1, 2)));
            let mut tensor = Vec::new();
            for _ in 0..2 {
                tensor.extend_from_slice(&wrong.tensor);
            }
            epsilon_gamma(&q, &GridAlgebraElement::new(gamma, tensor, 2).unwrap()).unwrap()
        };
        let bad_rhs = semigroup_at(&q, Rat::from_integer(1)).unwrap().dot(&epsilon_gamma(&q, &wrong).unwrap());
        let err = lhs.iter().zip(bad_rhs.iter()).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
        assert!(err > 1e-3, "injected failure not detected");
    }
}
