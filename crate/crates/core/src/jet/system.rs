use std::collections::HashMap;
use std::sync::Arc;

use super::context::JetContext;
use super::vector_field::{total_derivative_multi, GenVectorField};
use super::JetError;
use crate::poly::{same_context, ExpPoly, VarId};

/// Recursion guard for on-solution elimination.
const MAX_ELIMINATION_DEPTH: usize = 64;

/// One solved-form rule `u_{alpha,K} = rhs`.
#[derive(Debug, Clone)]
pub struct SolvedRule {
    pub alpha: usize,
    pub multi: Vec<u32>,
    pub rhs: ExpPoly,
}

/// A PDE system `F_nu = 0`, optionally with solved forms used to restrict
/// expressions to the solution set.
#[derive(Debug, Clone)]
pub struct PdeSystem {
    ctx: Arc<JetContext>,
    equations: Vec<ExpPoly>,
    solved: Vec<SolvedRule>,
}

impl PdeSystem {
    pub fn new(
        ctx: &Arc<JetContext>,
        equations: Vec<ExpPoly>,
        solved: Vec<SolvedRule>,
    ) -> Result<Self, JetError> {
        for (k, f) in equations.iter().enumerate() {
            if !same_context(f.ctx(), ctx.vars()) {
                return Err(JetError::ContextMismatch);
            }
            if f.constant_value().is_some() {
                return Err(JetError::DegenerateEquation(k));
            }
        }
        for rule in &solved {
            if rule.multi.iter().all(|&j| j == 0) {
                return Err(JetError::NotSolvedForm(
                    "a solved form must isolate a derivative, not the unknown itself".into(),
                ));
            }
            ctx.u(rule.alpha, &rule.multi)?;
            for v in rule.rhs.vars() {
                if let Some((beta, j)) = ctx.jet_of(v) {
                    if solved
                        .iter()
                        .any(|r| r.alpha == beta && dominates(&j, &r.multi))
                    {
                        return Err(JetError::NotSolvedForm(format!(
                            "right-hand side contains eliminable {}",
                            ctx.vars().name(v)
                        )));
                    }
                }
            }
        }
        Ok(PdeSystem {
            ctx: ctx.clone(),
            equations,
            solved,
        })
    }

    /// Evolution equation `u_alpha,t = G` along `axis`.
    pub fn evolution(ctx: &Arc<JetContext>, alpha: usize, axis: usize, g: ExpPoly) -> Result<Self, JetError> {
        let ut = ctx.u_along(alpha, &[axis])?;
        let f = &ctx.poly_var(ut) - &g;
        let mut multi = vec![0; ctx.m()];
        multi[axis] = 1;
        PdeSystem::new(
            ctx,
            vec![f],
            vec![SolvedRule {
                alpha,
                multi,
                rhs: g,
            }],
        )
    }

    pub fn ctx(&self) -> &Arc<JetContext> {
        &self.ctx
    }

    pub fn equations(&self) -> &[ExpPoly] {
        &self.equations
    }

    pub fn solved(&self) -> &[SolvedRule] {
        &self.solved
    }

    /// The evolution axis and right-hand side when the system is a single
    /// solved equation `u_t = G`.
    pub fn as_evolution(&self) -> Option<(usize, usize, &ExpPoly)> {
        if self.equations.len() != 1 || self.solved.len() != 1 {
            return None;
        }
        let r = &self.solved[0];
        let axis = r.multi.iter().position(|&j| j == 1)?;
        (r.multi.iter().map(|&j| j as usize).sum::<usize>() == 1).then_some((r.alpha, axis, &r.rhs))
    }

    /// Restricts `p` to the solution set by eliminating every jet variable
    /// that is a derivative of a solved-form variable.
    pub fn reduce(&self, p: &ExpPoly) -> Result<ExpPoly, JetError> {
        Reducer::new(self).reduce(p, 0)
    }

    /// `pr Q[F_nu]` restricted to solutions, one residual per equation.
    pub fn apply_on_solutions(&self, q: &GenVectorField) -> Result<Vec<ExpPoly>, JetError> {
        if !same_context(q.ctx().vars(), self.ctx.vars()) {
            return Err(JetError::ContextMismatch);
        }
        let mut red = Reducer::new(self);
        self.equations
            .iter()
            .map(|f| {
                let r = q.apply_prolonged(f)?;
                red.reduce(&r, 0)
            })
            .collect()
    }

    pub fn is_symmetry(&self, q: &GenVectorField) -> Result<bool, JetError> {
        Ok(self.apply_on_solutions(q)?.iter().all(ExpPoly::is_zero))
    }
}

/// `J >= K` componentwise.
fn dominates(j: &[u32], k: &[u32]) -> bool {
    j.iter().zip(k).all(|(a, b)| a >= b)
}

struct Reducer<'a> {
    sys: &'a PdeSystem,
    memo: HashMap<VarId, ExpPoly>,
}

impl<'a> Reducer<'a> {
    fn new(sys: &'a PdeSystem) -> Self {
        Reducer {
            sys,
            memo: HashMap::new(),
        }
    }

    fn rule_for(&self, v: VarId) -> Option<(&'a SolvedRule, Vec<u32>)> {
        let (alpha, j) = self.sys.ctx.jet_of(v)?;
        self.sys.solved.iter().find_map(|r| {
            (r.alpha == alpha && dominates(&j, &r.multi))
                .then(|| (r, j.iter().zip(&r.multi).map(|(a, b)| a - b).collect()))
        })
    }

    fn reduce(&mut self, p: &ExpPoly, depth: usize) -> Result<ExpPoly, JetError> {
        if depth > MAX_ELIMINATION_DEPTH {
            return Err(JetError::NotSolvedForm("elimination does not terminate".into()));
        }
        let mut map = HashMap::new();
        for v in p.vars() {
            if map.contains_key(&v) {
                continue;
            }
            if let Some(e) = self.replacement(v, depth)? {
                map.insert(v, e);
            }
        }
        if map.is_empty() {
            return Ok(p.clone());
        }
        Ok(p.substitute_many(&map))
    }

    fn replacement(&mut self, v: VarId, depth: usize) -> Result<Option<ExpPoly>, JetError> {
        if let Some(e) = self.memo.get(&v) {
            return Ok(Some(e.clone()));
        }
        let Some((rule, rest)) = self.rule_for(v) else {
            return Ok(None);
        };
        let derived = total_derivative_multi(&self.sys.ctx, &rule.rhs, &rest).map_err(|e| match e {
            JetError::OrderOverflow { needed, max_order } => JetError::NotSolvedForm(format!(
                "eliminating {} needs jet order {needed} beyond {max_order}",
                self.sys.ctx.vars().name(v)
            )),
            other => other,
        })?;
        let e = self.reduce(&derived, depth + 1)?;
        self.memo.insert(v, e.clone());
        Ok(Some(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GaussRat;

    fn heat() -> (Arc<JetContext>, PdeSystem) {
        let ctx = JetContext::new(&["t", "y"], &["u"], 6, &["y"]).unwrap();
        let g = ctx.poly_var(ctx.var("u_yy").unwrap());
        let sys = PdeSystem::evolution(&ctx, 0, 0, g).unwrap();
        (ctx, sys)
    }

    fn v(ctx: &JetContext, name: &str) -> ExpPoly {
        ctx.poly_var(ctx.var(name).unwrap())
    }

    #[test]
    fn heat_residuals() {
        let (c, sys) = heat();
        let q = GenVectorField::evolutionary(&c, vec![v(&c, "u_y")]).unwrap();
        assert!(sys.is_symmetry(&q).unwrap());

        let two_t = v(&c, "t").scale(&GaussRat::from_int(2));
        let galilei = &(&two_t * &v(&c, "u_y")) + &(&v(&c, "y") * &v(&c, "u"));
        let q = GenVectorField::evolutionary(&c, vec![galilei]).unwrap();
        assert!(sys.is_symmetry(&q).unwrap());

        let u = v(&c, "u");
        let q = GenVectorField::evolutionary(&c, vec![&u * &u]).unwrap();
        let r = sys.apply_on_solutions(&q).unwrap();
        let uy = v(&c, "u_y");
        assert_eq!(r[0], (&uy * &uy).scale(&GaussRat::from_int(-2)));
    }

    #[test]
    fn reduction_eliminates_mixed_derivatives() {
        let (c, sys) = heat();
        assert_eq!(sys.reduce(&v(&c, "u_tt")).unwrap(), v(&c, "u_yyyy"));
        assert_eq!(sys.reduce(&v(&c, "u_ty")).unwrap(), v(&c, "u_yyy"));
    }

    #[test]
    fn rejects_degenerate_and_cyclic_systems() {
        let ctx = JetContext::new(&["t", "y"], &["u"], 2, &[]).unwrap();
        let one = ExpPoly::one(ctx.vars());
        assert!(matches!(
            PdeSystem::new(&ctx, vec![one], vec![]),
            Err(JetError::DegenerateEquation(0))
        ));
        let g = v(&ctx, "u_tt");
        assert!(matches!(
            PdeSystem::evolution(&ctx, 0, 0, g),
            Err(JetError::NotSolvedForm(_))
        ));
    }

    #[test]
    fn elimination_overflow_is_reported() {
        let ctx = JetContext::new(&["t", "y"], &["u"], 2, &[]).unwrap();
        let sys = PdeSystem::evolution(&ctx, 0, 0, v(&ctx, "u_yy")).unwrap();
        assert!(matches!(sys.reduce(&v(&ctx, "u_ty")), Err(JetError::NotSolvedForm(_))));
    }
}
