//! Abstract numerical interpretation: homomorphic evaluation of expressions
//! into complex matrices, the bridge between symbolic results and the
//! finite-dimensional oracle.

use super::{AlgebraTag, Atom, Expr, MapSymbol, Rat, ScalarKind};
use ndarray::Array2;
use num_complex::Complex64;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("missing assignment for {0}")]
    MissingAssignment(String),
    #[error("dimension mismatch: expected {expected}x{expected}, got {got_rows}x{got_cols}")]
    DimensionMismatch { expected: usize, got_rows: usize, got_cols: usize },
}

type MatFn = Box<dyn Fn(&Array2<Complex64>) -> Array2<Complex64> + Send + Sync>;
type PhiFn = Box<dyn Fn(Rat, &Array2<Complex64>) -> Array2<Complex64> + Send + Sync>;
type FunFn = Box<dyn Fn(&Array2<Complex64>) -> Complex64 + Send + Sync>;

/// Assigns matrices to generators, concrete linear maps to `r`/`R`/`p[t]`,
/// and functionals to `w`/`v`; all on one matrix algebra of size `dim`.
pub struct InterpretationContext {
    pub dim: usize,
    gens: HashMap<(AlgebraTag, u32), Array2<Complex64>>,
    rho: Option<MatFn>,
    cap_r: Option<MatFn>,
    phi: Option<PhiFn>,
    omega: Option<FunFn>,
    nu: Option<FunFn>,
}

impl InterpretationContext {
    pub fn new(dim: usize) -> Self {
        InterpretationContext { dim, gens: HashMap::new(), rho: None, cap_r: None, phi: None, omega: None, nu: None }
    }

    pub fn assign_gen(&mut self, tag: AlgebraTag, id: u32, m: Array2<Complex64>) -> &mut Self {
        self.gens.insert((tag, id), m);
        self
    }

    pub fn set_rho(&mut self, f: MatFn) -> &mut Self {
        self.rho = Some(f);
        self
    }

    pub fn set_cap_r(&mut self, f: MatFn) -> &mut Self {
        self.cap_r = Some(f);
        self
    }

    pub fn set_phi(&mut self, f: PhiFn) -> &mut Self {
        self.phi = Some(f);
        self
    }

    pub fn set_omega(&mut self, f: FunFn) -> &mut Self {
        self.omega = Some(f);
        self
    }

    pub fn set_nu(&mut self, f: FunFn) -> &mut Self {
        self.nu = Some(f);
        self
    }

    fn eye(&self) -> Array2<Complex64> {
        Array2::eye(self.dim)
    }

    fn check(&self, m: &Array2<Complex64>) -> Result<(), EvalError> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(EvalError::DimensionMismatch { expected: self.dim, got_rows: m.nrows(), got_cols: m.ncols() });
        }
        Ok(())
    }

    fn eval_atom(&self, a: &Atom) -> Result<Array2<Complex64>, EvalError> {
        match a {
            Atom::Gen { tag, id, adjoint } => {
                let m = self
                    .gens
                    .get(&(*tag, *id))
                    .ok_or_else(|| EvalError::MissingAssignment(format!("generator {tag:?}{id}")))?;
                self.check(m)?;
                if *adjoint {
                    Ok(dagger(m))
                } else {
                    Ok(m.clone())
                }
            }
            Atom::Map { sym, arg } => {
                let x = self.eval(arg)?;
                let out = match sym {
                    MapSymbol::Rho => {
                        let f = self.rho.as_ref().ok_or_else(|| EvalError::MissingAssignment("map r".into()))?;
                        f(&x)
                    }
                    MapSymbol::CapR => {
                        let f = self.cap_r.as_ref().ok_or_else(|| EvalError::MissingAssignment("map R".into()))?;
                        f(&x)
                    }
                    MapSymbol::Phi(t) => {
                        let f = self.phi.as_ref().ok_or_else(|| EvalError::MissingAssignment("map p[t]".into()))?;
                        f(*t, &x)
                    }
                };
                self.check(&out)?;
                Ok(out)
            }
        }
    }

    /// Homomorphic evaluation: words to matrix products, sums to sums,
    /// scalar factors to complex multipliers.  Independent of normalization.
    pub fn eval(&self, e: &Expr) -> Result<Array2<Complex64>, EvalError> {
        let mut acc = Array2::<Complex64>::zeros((self.dim, self.dim));
        for t in &e.terms {
            let mut c = Complex64::new(rat_f64(&t.coeff), 0.0);
            for s in &t.scalars {
                let x = self.eval(&s.arg)?;
                let f = match s.kind {
                    ScalarKind::Omega => {
                        self.omega.as_ref().ok_or_else(|| EvalError::MissingAssignment("functional w".into()))?
                    }
                    ScalarKind::Nu => {
                        self.nu.as_ref().ok_or_else(|| EvalError::MissingAssignment("functional v".into()))?
                    }
                };
                c *= f(&x);
            }
            let mut w = self.eye();
            for a in &t.word {
                w = w.dot(&self.eval_atom(a)?);
            }
            acc = acc + w.mapv(|z| z * c);
        }
        Ok(acc)
    }
}

pub fn rat_f64(r: &Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn dagger(m: &Array2<Complex64>) -> Array2<Complex64> {
    m.t().mapv(|z| z.conj())
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;
    use ndarray::array;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn unit_evaluates_to_identity() {
        let ctx = InterpretationContext::new(2);
        let e = Expr::one();
        let m = ctx.eval(&e).unwrap();
        assert_eq!(m, Array2::eye(2));
    }

    #[test]
    fn sums_double() {
        let mut ctx = InterpretationContext::new(2);
        let m = array![[c(1.0), c(2.0)], [c(3.0), c(4.0)]];
        ctx.assign_gen(AlgebraTag::A, 1, m.clone());
        let e = parse("a1 + a1").unwrap();
        let got = ctx.eval(&e).unwrap();
        let want = m.mapv(|z| z * c(2.0));
        assert_eq!(got, want);
    }

    #[test]
    fn missing_assignment_is_an_error() {
        let ctx = InterpretationContext::new(2);
        let e = parse("a7").unwrap();
        assert!(matches!(ctx.eval(&e), Err(EvalError::MissingAssignment(_))));
    }
}
