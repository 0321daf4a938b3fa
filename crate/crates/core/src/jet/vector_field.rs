use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;


use super::context::{multi_indices, JetContext};
use super::JetError;
use crate::field::GaussRat;
use crate::poly::{same_context, ExpPoly, VarId};

/// Total derivative `D_l p = dp/dx_l + sum u_{alpha,J+1_l} dp/du_{alpha,J}`.
pub fn total_derivative(ctx: &JetContext, p: &ExpPoly, l: usize) -> Result<ExpPoly, JetError> {
    let mut out = p.partial(ctx.x(l));
    for v in jet_support(ctx, p) {
        let (alpha, mut multi) = ctx.jet_of(v).expect("jet variable");
        let d = p.partial(v);
        if d.is_zero() {
            continue;
        }
        multi[l] += 1;
        let next = ctx.u(alpha, &multi)?;
        out = &out + &(&d * &ctx.poly_var(next));
    }
    Ok(out)
}

/// `D_J p`, applying the axes in order.
pub fn total_derivative_multi(ctx: &JetContext, p: &ExpPoly, multi: &[u32]) -> Result<ExpPoly, JetError> {
    let mut out = p.clone();
    for (l, &j) in multi.iter().enumerate() {
        for _ in 0..j {
            out = total_derivative(ctx, &out, l)?;
        }
    }
    Ok(out)
}

/// Dependent/jet variables `p` may depend on: those present polynomially,
/// plus dependent translation variables (their exponential factor).
fn jet_support(ctx: &JetContext, p: &ExpPoly) -> Vec<VarId> {
    let mut vs: Vec<VarId> = p
        .vars()
        .into_iter()
        .filter(|&v| ctx.jet_of(v).is_some())
        .collect();
    for &z in ctx.vars().translations() {
        if ctx.jet_of(z).is_some() && !vs.contains(&z) {
            vs.push(z);
        }
    }
    vs.sort();
    vs
}

/// A generalized vector field `Q = sum xi_i d/dx_i + sum eta_alpha d/du_alpha`.
#[derive(Clone)]
pub struct GenVectorField {
    ctx: Arc<JetContext>,
    xi: Vec<ExpPoly>,
    eta: Vec<ExpPoly>,
}

impl GenVectorField {
    pub fn new(ctx: &Arc<JetContext>, xi: Vec<ExpPoly>, eta: Vec<ExpPoly>) -> Result<Self, JetError> {
        if xi.len() != ctx.m() || eta.len() != ctx.n() {
            return Err(JetError::InvalidContext(format!(
                "expected {} xi and {} eta coefficients, got {} and {}",
                ctx.m(),
                ctx.n(),
                xi.len(),
                eta.len()
            )));
        }
        if xi.iter().chain(&eta).any(|c| !same_context(c.ctx(), ctx.vars())) {
            return Err(JetError::ContextMismatch);
        }
        Ok(GenVectorField {
            ctx: ctx.clone(),
            xi,
            eta,
        })
    }

    /// Evolutionary field (`xi = 0`) with the given characteristics.
    pub fn evolutionary(ctx: &Arc<JetContext>, eta: Vec<ExpPoly>) -> Result<Self, JetError> {
        let xi = vec![ExpPoly::zero(ctx.vars()); ctx.m()];
        Self::new(ctx, xi, eta)
    }

    pub fn zero(ctx: &Arc<JetContext>) -> Self {
        GenVectorField {
            ctx: ctx.clone(),
            xi: vec![ExpPoly::zero(ctx.vars()); ctx.m()],
            eta: vec![ExpPoly::zero(ctx.vars()); ctx.n()],
        }
    }

    pub fn ctx(&self) -> &Arc<JetContext> {
        &self.ctx
    }

    pub fn xi(&self) -> &[ExpPoly] {
        &self.xi
    }

    pub fn eta(&self) -> &[ExpPoly] {
        &self.eta
    }

    pub fn is_zero(&self) -> bool {
        self.xi.iter().chain(&self.eta).all(ExpPoly::is_zero)
    }

    pub fn is_evolutionary(&self) -> bool {
        self.xi.iter().all(ExpPoly::is_zero)
    }

    /// Highest jet order occurring in any coefficient.
    pub fn order(&self) -> usize {
        self.xi
            .iter()
            .chain(&self.eta)
            .map(|c| self.ctx.order_of_poly(c))
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, s: &GaussRat) -> Self {
        GenVectorField {
            ctx: self.ctx.clone(),
            xi: self.xi.iter().map(|c| c.scale(s)).collect(),
            eta: self.eta.iter().map(|c| c.scale(s)).collect(),
        }
    }

    pub fn add(&self, o: &GenVectorField) -> Self {
        GenVectorField {
            ctx: self.ctx.clone(),
            xi: self.xi.iter().zip(&o.xi).map(|(a, b)| a + b).collect(),
            eta: self.eta.iter().zip(&o.eta).map(|(a, b)| a + b).collect(),
        }
    }

    /// Characteristic `eta_alpha - sum_l xi_l u_{alpha,l}`.
    pub fn characteristic(&self, alpha: usize) -> Result<ExpPoly, JetError> {
        let mut c = self.eta[alpha].clone();
        for (l, xi) in self.xi.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let ul = self.ctx.u_along(alpha, &[l])?;
            c = &c - &(xi * &self.ctx.poly_var(ul));
        }
        Ok(c)
    }

    /// Applies `pr Q` to a jet function.
    pub fn apply_prolonged(&self, f: &ExpPoly) -> Result<ExpPoly, JetError> {
        Prolonger::new(self).apply(f)
    }

    pub fn prolong(&self, up_to: usize) -> Result<Prolongation, JetError> {
        let mut pr = Prolonger::new(self);
        let mut jets = BTreeMap::new();
        for alpha in 0..self.ctx.n() {
            for order in 0..=up_to {
                for multi in multi_indices(self.ctx.m(), order) {
                    let v = self.ctx.u(alpha, &multi)?;
                    jets.insert(v, pr.coefficient(alpha, &multi)?);
                }
            }
        }
        Ok(Prolongation {
            xi: self.xi.clone(),
            jets,
        })
    }
}

impl PartialEq for GenVectorField {
    fn eq(&self, other: &Self) -> bool {
        self.xi == other.xi && self.eta == other.eta
    }
}

impl fmt::Debug for GenVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let names = self
            .ctx
            .independents()
            .iter()
            .chain(self.ctx.dependents())
            .collect::<Vec<_>>();
        for (c, name) in self.xi.iter().chain(&self.eta).zip(names) {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*d/d{name}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Coefficients of `pr Q`: `xi_l` on `D_l`-direction `d/dx_l`, and for
/// every jet coordinate the coefficient of `d/du_{alpha,J}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Prolongation {
    pub xi: Vec<ExpPoly>,
    pub jets: BTreeMap<VarId, ExpPoly>,
}

/// Memoized evaluation of prolongation coefficients
/// `D_J(eta_alpha - sum xi_l u_{alpha,l}) + sum xi_l u_{alpha,J+1_l}`.
struct Prolonger<'a> {
    q: &'a GenVectorField,
    derived: HashMap<(usize, Vec<u32>), ExpPoly>,
}

impl<'a> Prolonger<'a> {
    fn new(q: &'a GenVectorField) -> Self {
        Prolonger {
            q,
            derived: HashMap::new(),
        }
    }

    fn ctx(&self) -> &JetContext {
        &self.q.ctx
    }

    /// `D_J` of the characteristic, built from the parent `J - 1_l`.
    fn derived(&mut self, alpha: usize, multi: &[u32]) -> Result<ExpPoly, JetError> {
        if let Some(p) = self.derived.get(&(alpha, multi.to_vec())) {
            return Ok(p.clone());
        }
        let value = match multi.iter().position(|&j| j > 0) {
            None => self.q.characteristic(alpha)?,
            Some(l) => {
                let mut parent = multi.to_vec();
                parent[l] -= 1;
                let p = self.derived(alpha, &parent)?;
                total_derivative(self.ctx(), &p, l)?
            }
        };
        self.derived.insert((alpha, multi.to_vec()), value.clone());
        Ok(value)
    }

    fn coefficient(&mut self, alpha: usize, multi: &[u32]) -> Result<ExpPoly, JetError> {
        let mut c = self.derived(alpha, multi)?;
        for (l, xi) in self.q.xi.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let mut next = multi.to_vec();
            next[l] += 1;
            let v = self.ctx().u(alpha, &next)?;
            c = &c + &(xi * &self.ctx().poly_var(v));
        }
        Ok(c)
    }

    fn apply(&mut self, f: &ExpPoly) -> Result<ExpPoly, JetError> {
        let ctx = self.q.ctx.clone();
        let mut out = ExpPoly::zero(ctx.vars());
        for (l, xi) in self.q.xi.iter().enumerate() {
            if !xi.is_zero() {
                out = &out + &(xi * &f.partial(ctx.x(l)));
            }
        }
        for v in jet_support(&ctx, f) {
            let d = f.partial(v);
            if d.is_zero() {
                continue;
            }
            let (alpha, multi) = ctx.jet_of(v).unwrap();
            let c = self.coefficient(alpha, &multi)?;
            out = &out + &(&c * &d);
        }
        Ok(out)
    }
}

/// Lie bracket of generalized vector fields:
/// `xi3 = pr Q1[xi2] - pr Q2[xi1]`, `eta3 = pr Q1[eta2] - pr Q2[eta1]`.
pub fn lie_bracket(q1: &GenVectorField, q2: &GenVectorField) -> Result<GenVectorField, JetError> {
    if !same_context(q1.ctx.vars(), q2.ctx.vars()) {
        return Err(JetError::ContextMismatch);
    }
    let mut p1 = Prolonger::new(q1);
    let mut p2 = Prolonger::new(q2);
    let mut comb = |a: &ExpPoly, b: &ExpPoly| -> Result<ExpPoly, JetError> {
        Ok(&p1.apply(b)? - &p2.apply(a)?)
    };
    let xi = q1
        .xi
        .iter()
        .zip(&q2.xi)
        .map(|(a, b)| comb(a, b))
        .collect::<Result<Vec<_>, _>>()?;
    let eta = q1
        .eta
        .iter()
        .zip(&q2.eta)
        .map(|(a, b)| comb(a, b))
        .collect::<Result<Vec<_>, _>>()?;
    GenVectorField::new(&q1.ctx, xi, eta)
}
