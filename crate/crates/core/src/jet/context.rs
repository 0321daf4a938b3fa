use std::collections::HashMap;
use std::sync::Arc;

use super::JetError;
use crate::poly::{ExpPoly, Var, VarContext, VarId, VarKind};

/// Jet space `J^N` over `m` independent and `n` dependent variables.
///
/// Every jet coordinate `u_{alpha,J}` with `|J| <= max_order` is declared
/// up front as a polynomial variable; nothing beyond `max_order` exists, and
/// operations that would need it fail with [`JetError::OrderOverflow`].
#[derive(Debug)]
pub struct JetContext {
    vars: Arc<VarContext>,
    independents: Vec<String>,
    dependents: Vec<String>,
    max_order: usize,
    index: HashMap<(usize, Vec<u32>), VarId>,
}

/// All multi-indices over `m` axes with `|J| = order`, in descending lex
/// order (`(2,0), (1,1), (0,2)`).
pub fn multi_indices(m: usize, order: usize) -> Vec<Vec<u32>> {
    fn rec(m: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == m {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for j in (0..=left).rev() {
            prefix.push(j);
            rec(m, left - j, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if m == 0 {
        if order == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(m, order as u32, &mut Vec::new(), &mut out);
    out
}

pub fn order_of(multi: &[u32]) -> usize {
    multi.iter().map(|&j| j as usize).sum()
}

impl JetContext {
    pub fn new(
        independents: &[&str],
        dependents: &[&str],
        max_order: usize,
        translations: &[&str],
    ) -> Result<Arc<Self>, JetError> {
        let (m, n) = (independents.len(), dependents.len());
        if m == 0 || n == 0 {
            return Err(JetError::InvalidContext(
                "need at least one independent and one dependent variable".into(),
            ));
        }
        let mut vars: Vec<Var> = independents.iter().map(|x| Var::independent(*x)).collect();
        let mut pending = Vec::new();
        for (alpha, u) in dependents.iter().enumerate() {
            for order in 0..=max_order {
                for multi in multi_indices(m, order) {
                    let name = jet_name(u, independents, &multi);
                    let kind = if order == 0 {
                        VarKind::Dependent { alpha }
                    } else {
                        VarKind::Jet {
                            alpha,
                            multi: multi.clone(),
                        }
                    };
                    pending.push(((alpha, multi), VarId(vars.len())));
                    vars.push(Var { name, kind });
                }
            }
        }
        let ctx = VarContext::new(vars, translations)?;
        Ok(Arc::new(JetContext {
            vars: ctx,
            independents: independents.iter().map(|s| s.to_string()).collect(),
            dependents: dependents.iter().map(|s| s.to_string()).collect(),
            max_order,
            index: pending.into_iter().collect(),
        }))
    }

    pub fn vars(&self) -> &Arc<VarContext> {
        &self.vars
    }

    pub fn m(&self) -> usize {
        self.independents.len()
    }

    pub fn n(&self) -> usize {
        self.dependents.len()
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn independents(&self) -> &[String] {
        &self.independents
    }

    pub fn dependents(&self) -> &[String] {
        &self.dependents
    }

    /// Independent variable `x_l`.
    pub fn x(&self, l: usize) -> VarId {
        assert!(l < self.m());
        VarId(l)
    }

    pub fn axis(&self, name: &str) -> Option<usize> {
        self.independents.iter().position(|x| x == name)
    }

    pub fn dependent(&self, name: &str) -> Option<usize> {
        self.dependents.iter().position(|u| u == name)
    }

    /// Jet coordinate `u_{alpha,J}`.
    pub fn u(&self, alpha: usize, multi: &[u32]) -> Result<VarId, JetError> {
        assert_eq!(multi.len(), self.m(), "multi-index length");
        let order = order_of(multi);
        if order > self.max_order {
            return Err(JetError::OrderOverflow {
                needed: order,
                max_order: self.max_order,
            });
        }
        Ok(self.index[&(alpha, multi.to_vec())])
    }

    /// Jet coordinate reached by differentiating `u_alpha` along the listed
    /// axes (repetition allowed).
    pub fn u_along(&self, alpha: usize, axes: &[usize]) -> Result<VarId, JetError> {
        let mut multi = vec![0u32; self.m()];
        for &a in axes {
            multi[a] += 1;
        }
        self.u(alpha, &multi)
    }

    /// `(alpha, J)` for a dependent or jet variable.
    pub fn jet_of(&self, v: VarId) -> Option<(usize, Vec<u32>)> {
        match &self.vars.var(v).kind {
            VarKind::Independent => None,
            VarKind::Dependent { alpha } => Some((*alpha, vec![0; self.m()])),
            VarKind::Jet { alpha, multi } => Some((*alpha, multi.clone())),
        }
    }

    pub fn jet_order(&self, v: VarId) -> Option<usize> {
        self.jet_of(v).map(|(_, j)| order_of(&j))
    }

    /// Highest jet order present in `p`; 0 when only `x, u` appear.
    pub fn order_of_poly(&self, p: &ExpPoly) -> usize {
        p.vars()
            .into_iter()
            .filter_map(|v| self.jet_order(v))
            .max()
            .unwrap_or(0)
    }

    pub fn var(&self, name: &str) -> Result<VarId, JetError> {
        Ok(self.vars.get(name)?)
    }

    pub fn poly_var(&self, v: VarId) -> ExpPoly {
        ExpPoly::var(&self.vars, v)
    }
}

/// `u`, `u_x`, `u_xxt`: axis names repeated by multiplicity, in axis order.
pub fn jet_name(u: &str, axes: &[&str], multi: &[u32]) -> String {
    if multi.iter().all(|&j| j == 0) {
        return u.to_string();
    }
    let mut s = format!("{u}_");
    for (a, &j) in axes.iter().zip(multi) {
        for _ in 0..j {
            s.push_str(a);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_multi_indices() {
        assert_eq!(multi_indices(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(multi_indices(3, 1).len(), 3);
        assert_eq!(multi_indices(1, 4), vec![vec![4]]);
    }

    #[test]
    fn jet_variables_exist_up_to_max_order() {
        let ctx = JetContext::new(&["t", "y"], &["u"], 3, &["y"]).unwrap();
        // 2 independents + (1 + 2 + 3 + 4) jets
        assert_eq!(ctx.vars().len(), 12);
        assert_eq!(ctx.vars().name(ctx.u(0, &[1, 2]).unwrap()), "u_tyy");
        assert!(matches!(
            ctx.u(0, &[2, 2]),
            Err(JetError::OrderOverflow { needed: 4, max_order: 3 })
        ));
        assert_eq!(ctx.jet_of(ctx.var("u_y").unwrap()), Some((0, vec![0, 1])));
    }
}
