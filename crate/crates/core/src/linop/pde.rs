use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::op::{LinDiffOp, OpKey};
use super::LinopError;
use crate::field::GaussRat;
use crate::jet::multi_indices;
use crate::linalg::{SparseEliminator, SparseRow};
use crate::poly::{ExpPoly, Monomial, MultiPoly, VarContext, VarId, Weight};

/// Linear PDE `L psi = 0` with `L = c d_t + B`, `c` a nonzero constant and
/// `B` free of `d_t`.
#[derive(Debug, Clone)]
pub struct OperatorPde {
    l: LinDiffOp,
    axis: VarId,
    c_inv: GaussRat,
    rest: LinDiffOp,
}

impl OperatorPde {
    pub fn new(l: LinDiffOp, axis: VarId) -> Result<Self, LinopError> {
        let ctx = l.ctx().clone();
        let mut unit = vec![0; ctx.len()];
        unit[axis.0] = 1;
        let c = l
            .coeff(&unit)
            .constant_value()
            .filter(|c| !c.is_zero())
            .ok_or_else(|| {
                LinopError::InvalidOperatorPde(format!(
                    "d_{} must appear with a nonzero constant coefficient",
                    ctx.name(axis)
                ))
            })?;
        let mut rest = LinDiffOp::zero(&ctx);
        for (j, a) in l.terms() {
            if *j == unit {
                continue;
            }
            if j[axis.0] > 0 {
                return Err(LinopError::InvalidOperatorPde(format!(
                    "d_{} may only appear at first order",
                    ctx.name(axis)
                )));
            }
            rest.add_term(j.clone(), a.clone());
        }
        let c_inv = c.inv().expect("checked nonzero");
        Ok(OperatorPde { l, axis, c_inv, rest })
    }

    pub fn operator(&self) -> &LinDiffOp {
        &self.l
    }

    pub fn axis(&self) -> VarId {
        self.axis
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        self.l.ctx()
    }

    /// Normal form modulo the right ideal generated by `L`: each
    /// `a d^J` with `j_t >= 1` becomes `-c^{-1} a d^{J - e_t} B`.
    pub fn reduce(&self, r: &LinDiffOp) -> Result<LinDiffOp, LinopError> {
        let ctx = self.ctx().clone();
        let t = self.axis.0;
        let mut cur = r.clone();
        loop {
            let mut out = LinDiffOp::zero(&ctx);
            let mut pending = Vec::new();
            for (j, a) in cur.terms() {
                if j[t] > 0 {
                    pending.push((j.clone(), a.clone()));
                } else {
                    out.add_term(j.clone(), a.clone());
                }
            }
            if pending.is_empty() {
                return Ok(cur);
            }
            let scale = -self.c_inv.clone();
            for (mut j, a) in pending {
                j[t] -= 1;
                let piece = LinDiffOp::derivative(&ctx, j).compose(&self.rest)?;
                out = out.add(&piece.left_mul(&a).scale(&scale));
            }
            cur = out;
        }
    }

    /// `[R, L]` reduced modulo `L`.
    pub fn residual(&self, r: &LinDiffOp) -> Result<LinDiffOp, LinopError> {
        self.reduce(&r.commutator(&self.l)?)
    }

    pub fn is_symmetry(&self, r: &LinDiffOp) -> Result<bool, LinopError> {
        Ok(self.residual(r)?.is_zero())
    }
}

/// `R = exp(w . z) sum C t^k x^l d^J` with the derivative running over the
/// non-evolution variables, `|J| <= order`, and per-variable degree caps.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorAnsatz {
    pub order: usize,
    /// Polynomial degree cap per context variable.
    pub degree_caps: Vec<u32>,
    /// Exponential weight per translation variable.
    pub weights: Vec<GaussRat>,
}

impl OperatorAnsatz {
    /// Same degree cap for every variable.
    pub fn uniform(ctx: &VarContext, order: usize, cap: u32, weights: Vec<GaussRat>) -> Self {
        OperatorAnsatz {
            order,
            degree_caps: vec![cap; ctx.len()],
            weights,
        }
    }

    /// Caps `v - 1` from a dimension bound `v`.
    pub fn from_bound(ctx: &VarContext, order: usize, v: usize, weights: Vec<GaussRat>) -> Self {
        Self::uniform(ctx, order, v.saturating_sub(1) as u32, weights)
    }

    pub fn terms(&self, pde: &OperatorPde) -> Result<Vec<LinDiffOp>, LinopError> {
        let ctx = pde.ctx();
        if self.weights.len() != ctx.weight_len() {
            return Err(LinopError::InvalidAnsatz(format!(
                "expected {} exponential weights, got {}",
                ctx.weight_len(),
                self.weights.len()
            )));
        }
        if self.degree_caps.len() != ctx.len() {
            return Err(LinopError::InvalidAnsatz(format!(
                "expected {} degree caps, got {}",
                ctx.len(),
                self.degree_caps.len()
            )));
        }
        let space: Vec<usize> = (0..ctx.len()).filter(|&k| k != pde.axis().0).collect();
        let mut derivs = Vec::new();
        for order in (0..=self.order).rev() {
            for sub in multi_indices(space.len(), order) {
                let mut j = vec![0; ctx.len()];
                for (&k, &e) in space.iter().zip(&sub) {
                    j[k] = e;
                }
                derivs.push(j);
            }
        }
        let mut monos = vec![Monomial::one()];
        for (k, &cap) in self.degree_caps.iter().enumerate() {
            monos = monos
                .iter()
                .flat_map(|m| (0..=cap).map(move |e| m.mul(&Monomial::var_pow(VarId(k), e))))
                .collect();
        }
        monos.sort_by(|a, b| b.cmp(a));
        let w = Weight(self.weights.clone());
        let mut out = Vec::with_capacity(derivs.len() * monos.len());
        for j in &derivs {
            for m in &monos {
                let c = ExpPoly::with_weight(ctx, w.clone(), MultiPoly::term(m.clone(), GaussRat::one()));
                out.push(LinDiffOp::term(c, j.clone()));
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct OperatorSolution {
    pub basis: Vec<LinDiffOp>,
    pub unknowns: usize,
    pub rank: usize,
}

/// Symmetry operators of `pde` within the ansatz: every returned `R`
/// satisfies `[R, L] = 0` modulo `L`.
pub fn operator_determining_solve(
    pde: &OperatorPde,
    ansatz: &OperatorAnsatz,
) -> Result<OperatorSolution, LinopError> {
    let terms = ansatz.terms(pde)?;
    let columns: Vec<Vec<(OpKey, GaussRat)>> = terms
        .par_iter()
        .map(|phi| Ok(pde.residual(phi)?.coords()))
        .collect::<Result<_, LinopError>>()?;
    let mut rows: BTreeMap<OpKey, SparseRow> = BTreeMap::new();
    for (j, col) in columns.into_iter().enumerate() {
        for (key, c) in col {
            rows.entry(key).or_default().insert(j, c);
        }
    }
    let mut elim = SparseEliminator::new(terms.len());
    for (_, row) in rows {
        elim.push(row);
    }
    let ctx = pde.ctx();
    let basis = elim
        .nullspace()
        .into_iter()
        .map(|vec| {
            let mut r = LinDiffOp::zero(ctx);
            for (&j, c) in &vec {
                r = r.add(&terms[j].scale(c));
            }
            r
        })
        .collect();
    Ok(OperatorSolution {
        basis,
        unknowns: terms.len(),
        rank: elim.rank(),
    })
}
