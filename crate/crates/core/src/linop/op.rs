use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use super::LinopError;
use crate::field::GaussRat;
use crate::poly::{same_context, ExpPoly, Monomial, VarContext, VarId, Weight};

/// Coordinate key of an operator term: derivative multi-index, exponential
/// weight, coefficient monomial.
pub type OpKey = (Vec<u32>, Weight, Monomial);

/// Linear differential operator `sum_J a_J * d^J` in normal form
/// (coefficients left of derivatives). Multi-indices run over all variables
/// of the context.
#[derive(Clone)]
pub struct LinDiffOp {
    ctx: Arc<VarContext>,
    terms: BTreeMap<Vec<u32>, ExpPoly>,
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

impl LinDiffOp {
    pub fn zero(ctx: &Arc<VarContext>) -> Self {
        LinDiffOp {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(ctx: &Arc<VarContext>) -> Self {
        Self::multiplication(ExpPoly::one(ctx))
    }

    /// Multiplication by a function.
    pub fn multiplication(f: ExpPoly) -> Self {
        let ctx = f.ctx().clone();
        let mut out = Self::zero(&ctx);
        out.add_term(vec![0; ctx.len()], f);
        out
    }

    pub fn scalar(ctx: &Arc<VarContext>, c: GaussRat) -> Self {
        Self::multiplication(ExpPoly::constant(ctx, c))
    }

    /// `d^J`.
    pub fn derivative(ctx: &Arc<VarContext>, multi: Vec<u32>) -> Self {
        assert_eq!(multi.len(), ctx.len(), "multi-index length");
        let mut out = Self::zero(ctx);
        out.add_term(multi, ExpPoly::one(ctx));
        out
    }

    /// `d/dv`.
    pub fn partial_op(ctx: &Arc<VarContext>, v: VarId) -> Self {
        let mut multi = vec![0; ctx.len()];
        multi[v.0] = 1;
        Self::derivative(ctx, multi)
    }

    pub fn term(coeff: ExpPoly, multi: Vec<u32>) -> Self {
        let ctx = coeff.ctx().clone();
        let mut out = Self::zero(&ctx);
        out.add_term(multi, coeff);
        out
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms by ascending multi-index (lexicographic).
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &ExpPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, multi: &[u32]) -> ExpPoly {
        self.terms
            .get(multi)
            .cloned()
            .unwrap_or_else(|| ExpPoly::zero(&self.ctx))
    }

    pub fn add_term(&mut self, multi: Vec<u32>, c: ExpPoly) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.get(&multi) {
            Some(old) => old + &c,
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&multi);
        } else {
            self.terms.insert(multi, sum);
        }
    }

    /// Total order `max |J|`; `None` for the zero operator.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|j| j.iter().sum()).max()
    }

    pub fn order_in(&self, v: VarId) -> Option<u32> {
        self.terms.keys().map(|j| j[v.0]).max()
    }

    fn check(&self, o: &LinDiffOp) -> Result<(), LinopError> {
        if same_context(&self.ctx, &o.ctx) {
            Ok(())
        } else {
            Err(LinopError::ContextMismatch)
        }
    }

    pub fn add(&self, o: &LinDiffOp) -> LinDiffOp {
        self.check(o).expect("operators from different contexts");
        let mut out = self.clone();
        for (j, c) in &o.terms {
            out.add_term(j.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &LinDiffOp) -> LinDiffOp {
        self.add(&o.scale(&-GaussRat::one()))
    }

    pub fn scale(&self, s: &GaussRat) -> LinDiffOp {
        let mut out = Self::zero(&self.ctx);
        for (j, c) in &self.terms {
            out.add_term(j.clone(), c.scale(s));
        }
        out
    }

    /// Left multiplication by a function.
    pub fn left_mul(&self, f: &ExpPoly) -> LinDiffOp {
        let mut out = Self::zero(&self.ctx);
        for (j, c) in &self.terms {
            out.add_term(j.clone(), f * c);
        }
        out
    }

    /// `d^I(b) ` for a coefficient function.
    fn derive(&self, b: &ExpPoly, multi: &[u32]) -> ExpPoly {
        let mut out = b.clone();
        for (k, &j) in multi.iter().enumerate() {
            for _ in 0..j {
                out = out.partial(VarId(k));
            }
        }
        out
    }

    /// Operator product by the Leibniz rule:
    /// `a d^I . b d^J = sum_{K <= I} C(I,K) a (d^{I-K} b) d^{K+J}`.
    pub fn compose(&self, o: &LinDiffOp) -> Result<LinDiffOp, LinopError> {
        self.check(o)?;
        let mut out = Self::zero(&self.ctx);
        for (i, a) in &self.terms {
            for k in sub_indices(i) {
                let rest: Vec<u32> = i.iter().zip(&k).map(|(x, y)| x - y).collect();
                let binom = k
                    .iter()
                    .zip(i)
                    .fold(BigInt::one(), |acc, (&kk, &ii)| acc * binomial(ii, kk));
                let binom = GaussRat::from(binom);
                for (j, b) in &o.terms {
                    let db = self.derive(b, &rest);
                    if db.is_zero() {
                        continue;
                    }
                    let multi: Vec<u32> = k.iter().zip(j).map(|(x, y)| x + y).collect();
                    out.add_term(multi, (a * &db).scale(&binom));
                }
            }
        }
        Ok(out)
    }

    /// `AB - BA`.
    pub fn commutator(&self, o: &LinDiffOp) -> Result<LinDiffOp, LinopError> {
        Ok(self.compose(o)?.sub(&o.compose(self)?))
    }

    /// Applies the operator to a function.
    pub fn apply_to(&self, f: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::zero(&self.ctx);
        for (j, a) in &self.terms {
            out = &out + &(a * &self.derive(f, j));
        }
        out
    }

    /// Coefficientwise partial derivative, i.e. `[d/dv, R]`.
    pub fn partial_coeffs(&self, v: VarId) -> LinDiffOp {
        let mut out = Self::zero(&self.ctx);
        for (j, c) in &self.terms {
            out.add_term(j.clone(), c.partial(v));
        }
        out
    }

    /// Coefficientwise evaluation at `v = 0`.
    pub fn set_zero(&self, v: VarId) -> LinDiffOp {
        let mut out = Self::zero(&self.ctx);
        for (j, c) in &self.terms {
            out.add_term(j.clone(), c.set_zero(v));
        }
        out
    }

    pub fn map_coeffs(&self, mut f: impl FnMut(&ExpPoly) -> ExpPoly) -> LinDiffOp {
        let mut out = Self::zero(&self.ctx);
        for (j, c) in &self.terms {
            out.add_term(j.clone(), f(c));
        }
        out
    }

    /// Exact coordinates: every `(J, weight, monomial)` with its coefficient.
    pub fn coords(&self) -> Vec<(OpKey, GaussRat)> {
        let mut out = Vec::new();
        for (j, c) in &self.terms {
            for (w, m, x) in c.coeff_extract() {
                out.push(((j.clone(), w, m), x));
            }
        }
        out
    }

    pub fn from_coords(ctx: &Arc<VarContext>, coords: impl IntoIterator<Item = (OpKey, GaussRat)>) -> Self {
        let mut out = Self::zero(ctx);
        for ((j, w, m), x) in coords {
            out.add_term(j, ExpPoly::from_coeffs(ctx, [(w, m, x)]));
        }
        out
    }

    /// Renders the derivative part as `d_x^2*d_t`.
    pub fn render_derivative(&self, multi: &[u32]) -> String {
        multi
            .iter()
            .enumerate()
            .filter(|(_, &j)| j > 0)
            .map(|(k, &j)| {
                let name = self.ctx.name(VarId(k));
                if j == 1 {
                    format!("d_{name}")
                } else {
                    format!("d_{name}^{j}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .rev()
                .map(|(j, c)| {
                    let d: Vec<serde_json::Value> = j
                        .iter()
                        .enumerate()
                        .filter(|(_, &e)| e > 0)
                        .map(|(k, &e)| serde_json::json!([self.ctx.name(VarId(k)), e]))
                        .collect();
                    serde_json::json!([d, c.to_json()])
                })
                .collect(),
        )
    }
}

/// All `K <= I` componentwise.
fn sub_indices(i: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &n in i {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=n).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    out
}

impl PartialEq for LinDiffOp {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl fmt::Display for LinDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let d = self.render_derivative(j);
            match (d.is_empty(), c.constant_value()) {
                (true, _) => write!(f, "({c})")?,
                (false, Some(x)) if x.is_one() => write!(f, "{d}")?,
                (false, _) => write!(f, "({c})*{d}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LinDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
