use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::context::{same_context, VarContext, VarId};
use super::multi::{render_scaled, Monomial, MultiPoly};
use super::PolyError;
use crate::field::GaussRat;

/// Exponential weight vector: one entry per translation variable of the
/// context, standing for `exp(sum_s w_s * z_s)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(pub Vec<GaussRat>);

impl Weight {
    pub fn zero(len: usize) -> Self {
        Weight(vec![GaussRat::zero(); len])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn render(&self, ctx: &VarContext) -> String {
        let mut out = String::new();
        for (w, &z) in self.0.iter().zip(ctx.translations()) {
            if w.is_zero() {
                continue;
            }
            let neg = w.is_negative_looking();
            let mag = if neg { -w } else { w.clone() };
            match (out.is_empty(), neg) {
                (true, true) => out.push('-'),
                (true, false) => {}
                (false, true) => out.push_str(" - "),
                (false, false) => out.push_str(" + "),
            }
            out.push_str(&render_scaled(&mag, ctx.name(z)));
        }
        out
    }
}

/// A finite sum `sum_w exp(w . z) * p_w(vars)` over the Gaussian rationals.
///
/// Every value carries its [`VarContext`]; binary operations between values
/// of different contexts panic (use the `checked_*` variants to get a
/// [`PolyError::VariableMismatch`] instead).
#[derive(Clone)]
pub struct ExpPoly {
    ctx: Arc<VarContext>,
    terms: BTreeMap<Weight, MultiPoly>,
}

/// One entry of [`ExpPoly::coeff_extract`].
pub type CoeffEntry = (Weight, Monomial, GaussRat);

impl ExpPoly {
    pub fn zero(ctx: &Arc<VarContext>) -> Self {
        ExpPoly {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &Arc<VarContext>, c: GaussRat) -> Self {
        Self::from_poly(ctx, MultiPoly::constant(c))
    }

    pub fn one(ctx: &Arc<VarContext>) -> Self {
        Self::constant(ctx, GaussRat::one())
    }

    pub fn var(ctx: &Arc<VarContext>, v: VarId) -> Self {
        Self::from_poly(ctx, MultiPoly::var(v))
    }

    pub fn from_poly(ctx: &Arc<VarContext>, p: MultiPoly) -> Self {
        Self::with_weight(ctx, Weight::zero(ctx.weight_len()), p)
    }

    pub fn with_weight(ctx: &Arc<VarContext>, w: Weight, p: MultiPoly) -> Self {
        assert_eq!(w.0.len(), ctx.weight_len(), "weight length mismatch");
        let mut terms = BTreeMap::new();
        if !p.is_zero() {
            terms.insert(w, p);
        }
        ExpPoly {
            ctx: ctx.clone(),
            terms,
        }
    }

    /// `exp(w . z)` alone.
    pub fn exp(ctx: &Arc<VarContext>, w: Weight) -> Self {
        Self::with_weight(ctx, w, MultiPoly::constant(GaussRat::one()))
    }

    pub fn monomial(ctx: &Arc<VarContext>, m: Monomial, c: GaussRat) -> Self {
        Self::from_poly(ctx, MultiPoly::term(m, c))
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn parts(&self) -> impl Iterator<Item = (&Weight, &MultiPoly)> {
        self.terms.iter()
    }

    pub fn part(&self, w: &Weight) -> Option<&MultiPoly> {
        self.terms.get(w)
    }

    /// The polynomial part when the only weight present is zero.
    pub fn as_poly(&self) -> Option<MultiPoly> {
        match self.terms.len() {
            0 => Some(MultiPoly::zero()),
            1 => {
                let (w, p) = self.terms.iter().next().unwrap();
                w.is_zero().then(|| p.clone())
            }
            _ => None,
        }
    }

    pub fn constant_value(&self) -> Option<GaussRat> {
        self.as_poly()?.constant_value()
    }

    pub fn weights(&self) -> impl Iterator<Item = &Weight> {
        self.terms.keys()
    }

    fn check(&self, other: &ExpPoly) -> Result<(), PolyError> {
        if same_context(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(PolyError::VariableMismatch)
        }
    }

    fn insert_part(&mut self, w: Weight, p: MultiPoly) {
        if p.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&p);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_term(&mut self, w: Weight, m: Monomial, c: GaussRat) {
        self.insert_part(w, MultiPoly::term(m, c));
    }

    pub fn checked_add(&self, other: &ExpPoly) -> Result<ExpPoly, PolyError> {
        self.check(other)?;
        let mut out = self.clone();
        for (w, p) in &other.terms {
            out.insert_part(w.clone(), p.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &ExpPoly) -> Result<ExpPoly, PolyError> {
        self.check(other)?;
        let mut out = ExpPoly::zero(&self.ctx);
        for (wa, pa) in &self.terms {
            for (wb, pb) in &other.terms {
                out.insert_part(wa.add(wb), pa.mul(pb));
            }
        }
        Ok(out)
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &ExpPoly, s: &GaussRat) {
        self.check(other).expect("variable context mismatch");
        if s.is_zero() {
            return;
        }
        for (w, p) in &other.terms {
            self.insert_part(w.clone(), p.scale(s));
        }
    }

    pub fn scale(&self, s: &GaussRat) -> ExpPoly {
        if s.is_zero() {
            return ExpPoly::zero(&self.ctx);
        }
        ExpPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(w, p)| (w.clone(), p.scale(s))).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &GaussRat) -> ExpPoly {
        let mut out = ExpPoly::zero(&self.ctx);
        for (w, p) in &self.terms {
            out.insert_part(w.clone(), p.mul_monomial(m, c));
        }
        out
    }

    /// Multiplies by `exp(w . z)`.
    pub fn shift_weight(&self, w: &Weight) -> ExpPoly {
        ExpPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(v, p)| (v.add(w), p.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> ExpPoly {
        let mut acc = ExpPoly::one(&self.ctx);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative. A translation variable also differentiates the
    /// exponential factor, contributing `w_s * p`.
    pub fn partial(&self, v: VarId) -> ExpPoly {
        let slot = self.ctx.translation_slot(v);
        let mut out = ExpPoly::zero(&self.ctx);
        for (w, p) in &self.terms {
            let mut d = p.partial(v);
            if let Some(s) = slot {
                d.add_assign_scaled(p, &w.0[s]);
            }
            out.insert_part(w.clone(), d);
        }
        out
    }

    pub fn partial_by_name(&self, name: &str) -> Result<ExpPoly, PolyError> {
        Ok(self.partial(self.ctx.get(name)?))
    }

    /// Highest exponent of `v` in the polynomial parts.
    pub fn degree_in(&self, v: VarId) -> Option<u32> {
        self.terms.values().filter_map(|p| p.degree_in(v)).max()
    }

    pub fn contains_var(&self, v: VarId) -> bool {
        self.terms.values().any(|p| p.contains_var(v))
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.terms.values().flat_map(|p| p.vars()).collect()
    }

    /// Evaluates at `v = 0`; for a translation variable the exponential
    /// factor becomes 1 in that slot.
    pub fn set_zero(&self, v: VarId) -> ExpPoly {
        let slot = self.ctx.translation_slot(v);
        let mut out = ExpPoly::zero(&self.ctx);
        for (w, p) in &self.terms {
            let mut w = w.clone();
            if let Some(s) = slot {
                w.0[s] = GaussRat::zero();
            }
            out.insert_part(w, p.set_zero(v));
        }
        out
    }

    /// Replaces every occurrence of the polynomial variable `v` by `e`.
    /// `v` must not be a translation variable with nonzero weight present.
    pub fn substitute(&self, v: VarId, e: &ExpPoly) -> ExpPoly {
        self.substitute_many(&HashMap::from([(v, e.clone())]))
    }

    /// Simultaneous substitution of several polynomial variables.
    pub fn substitute_many(&self, map: &HashMap<VarId, ExpPoly>) -> ExpPoly {
        let mut powers: HashMap<(VarId, u32), ExpPoly> = HashMap::new();
        let mut out = ExpPoly::zero(&self.ctx);
        for (w, p) in &self.terms {
            for (m, c) in p.terms() {
                let mut kept = Vec::new();
                let mut factor = ExpPoly::with_weight(
                    &self.ctx,
                    w.clone(),
                    MultiPoly::constant(c.clone()),
                );
                for &(var, k) in m.pairs() {
                    match map.get(&var) {
                        Some(rep) => {
                            debug_assert!(
                                self.ctx.translation_slot(var).is_none() || w.is_zero(),
                                "substituting a weighted translation variable"
                            );
                            let pw = powers
                                .entry((var, k))
                                .or_insert_with(|| rep.pow(k))
                                .clone();
                            factor = &factor * &pw;
                        }
                        None => kept.push((var, k)),
                    }
                }
                let kept = Monomial::from_pairs(kept);
                out.add_scaled(&factor.mul_monomial(&kept, &GaussRat::one()), &GaussRat::one());
            }
        }
        out
    }

    /// Complete, duplicate-free `(weight, monomial, coefficient)` listing in
    /// canonical order (weights ascending, monomials descending graded-lex).
    pub fn coeff_extract(&self) -> Vec<CoeffEntry> {
        let mut out = Vec::new();
        for (w, p) in &self.terms {
            for (m, c) in p.terms().rev() {
                out.push((w.clone(), m.clone(), c.clone()));
            }
        }
        out
    }

    /// Inverse of [`coeff_extract`](Self::coeff_extract); repeated keys add.
    pub fn from_coeffs(ctx: &Arc<VarContext>, entries: impl IntoIterator<Item = CoeffEntry>) -> Self {
        let mut out = ExpPoly::zero(ctx);
        for (w, m, c) in entries {
            out.add_term(w, m, c);
        }
        out
    }

    /// JSON form: an array of `[weight, exponents, coefficient]` with the
    /// weight as exact strings, the exponents as `[name, power]` pairs and
    /// the coefficient as an exact string.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.coeff_extract()
                .into_iter()
                .map(|(w, m, c)| {
                    let ws: Vec<String> = w.0.iter().map(|x| x.to_string()).collect();
                    let es: Vec<Value> = m
                        .pairs()
                        .iter()
                        .map(|&(v, e)| json!([self.ctx.name(v), e]))
                        .collect();
                    json!([ws, es, c.to_string()])
                })
                .collect(),
        )
    }
}

impl PartialEq for ExpPoly {
    fn eq(&self, other: &Self) -> bool {
        same_context(&self.ctx, &other.ctx) && self.terms == other.terms
    }
}

impl Eq for ExpPoly {}

impl<'a> Add<&'a ExpPoly> for &'a ExpPoly {
    type Output = ExpPoly;
    fn add(self, rhs: &ExpPoly) -> ExpPoly {
        self.checked_add(rhs).expect("variable context mismatch")
    }
}

impl<'a> Sub<&'a ExpPoly> for &'a ExpPoly {
    type Output = ExpPoly;
    fn sub(self, rhs: &ExpPoly) -> ExpPoly {
        self.check(rhs).expect("variable context mismatch");
        let mut out = self.clone();
        out.add_scaled(rhs, &-GaussRat::one());
        out
    }
}

impl<'a> Mul<&'a ExpPoly> for &'a ExpPoly {
    type Output = ExpPoly;
    fn mul(self, rhs: &ExpPoly) -> ExpPoly {
        self.checked_mul(rhs).expect("variable context mismatch")
    }
}

impl Neg for &ExpPoly {
    type Output = ExpPoly;
    fn neg(self) -> ExpPoly {
        self.scale(&-GaussRat::one())
    }
}

impl fmt::Display for ExpPoly {
    /// Canonical text: `exp(...)*(...)` groups in ascending weight order,
    /// each polynomial part in descending graded-lex order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, p) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if w.is_zero() {
                write!(f, "{}", p.render(&self.ctx))?;
            } else {
                write!(f, "exp({})*({})", w.render(&self.ctx), p.render(&self.ctx))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Arc<VarContext> {
        VarContext::independents(&["x", "t"], &["t"]).unwrap()
    }

    fn w(l: i64) -> Weight {
        Weight(vec![GaussRat::from_int(l)])
    }

    #[test]
    fn exponent_law() {
        let c = ctx();
        let x = ExpPoly::var(&c, c.get("x").unwrap());
        let a = x.shift_weight(&w(2));
        let b = x.shift_weight(&w(-5));
        let prod = &a * &b;
        let x2 = ExpPoly::monomial(&c, Monomial::var_pow(VarId(0), 2), GaussRat::one());
        assert_eq!(prod, x2.shift_weight(&w(-3)));
    }

    #[test]
    fn difference_of_squares() {
        let c = ctx();
        let x = ExpPoly::var(&c, VarId(0));
        let t = ExpPoly::var(&c, VarId(1));
        let lhs = &(&x + &t) * &(&x - &t);
        let rhs = &(&x * &x) - &(&t * &t);
        assert_eq!(lhs, rhs);
        assert_eq!(&lhs + &ExpPoly::zero(&c), lhs);
    }

    #[test]
    fn partials() {
        let c = ctx();
        let (x, t) = (VarId(0), VarId(1));
        let x2t = ExpPoly::monomial(&c, Monomial::from_pairs([(x, 2), (t, 1)]), GaussRat::one());
        let two_xt = ExpPoly::monomial(&c, Monomial::from_pairs([(x, 1), (t, 1)]), GaussRat::from_int(2));
        assert_eq!(x2t.partial(x), two_xt);

        let lam = GaussRat::from_parts((3, 2), (1, 1));
        let e = ExpPoly::var(&c, x).shift_weight(&Weight(vec![lam.clone()]));
        assert_eq!(e.partial(t), e.scale(&lam));
        assert!(ExpPoly::constant(&c, GaussRat::from_int(7)).partial(x).is_zero());
        assert!(ExpPoly::zero(&c).partial(t).is_zero());
    }

    #[test]
    fn coefficient_listing() {
        let c = ctx();
        let (x, t) = (VarId(0), VarId(1));
        let p = &ExpPoly::monomial(&c, Monomial::var_pow(x, 2), GaussRat::one())
            - &ExpPoly::monomial(&c, Monomial::var_pow(t, 2), GaussRat::one());
        assert_eq!(
            p.coeff_extract(),
            vec![
                (w(0), Monomial::var_pow(x, 2), GaussRat::one()),
                (w(0), Monomial::var_pow(t, 2), -GaussRat::one()),
            ]
        );
        assert!(ExpPoly::zero(&c).coeff_extract().is_empty());
        let lam = GaussRat::from_frac(1, 3);
        let q = ExpPoly::monomial(&c, Monomial::var(x), GaussRat::from_int(3))
            .shift_weight(&Weight(vec![lam.clone()]));
        assert_eq!(
            q.coeff_extract(),
            vec![(Weight(vec![lam]), Monomial::var(x), GaussRat::from_int(3))]
        );
        assert_eq!(ExpPoly::from_coeffs(&c, q.coeff_extract()), q);
    }

    #[test]
    fn mismatched_contexts() {
        let a = ExpPoly::one(&ctx());
        let other = VarContext::independents(&["y"], &[]).unwrap();
        let b = ExpPoly::one(&other);
        assert_eq!(a.checked_add(&b), Err(PolyError::VariableMismatch));
        assert_eq!(a.checked_mul(&b), Err(PolyError::VariableMismatch));
    }

    #[test]
    fn rendering() {
        let c = ctx();
        let (x, t) = (VarId(0), VarId(1));
        let p = ExpPoly::from_coeffs(
            &c,
            [
                (w(0), Monomial::one(), GaussRat::from_frac(1, 2)),
                (w(0), Monomial::from_pairs([(x, 1), (t, 1)]), GaussRat::from_int(-2)),
                (w(0), Monomial::var_pow(x, 2), GaussRat::one()),
            ],
        );
        assert_eq!(p.to_string(), "x^2 - 2*x*t + 1/2");
        let e = ExpPoly::var(&c, x).shift_weight(&Weight(vec![GaussRat::i()]));
        assert_eq!(e.to_string(), "exp(i*t)*(x)");
    }

    #[test]
    fn substitution() {
        let c = ctx();
        let (x, t) = (VarId(0), VarId(1));
        // x^2*t with x -> (t + 1)
        let p = ExpPoly::monomial(&c, Monomial::from_pairs([(x, 2), (t, 1)]), GaussRat::one());
        let rep = &ExpPoly::var(&c, t) + &ExpPoly::one(&c);
        let tt = ExpPoly::var(&c, t);
        let expect = &(&rep * &rep) * &tt;
        assert_eq!(p.substitute(x, &rep), expect);
    }
}
