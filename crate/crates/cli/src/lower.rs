use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::{One, Zero};
use symkit::jet::{JetContext, PdeSystem};
use symkit::linop::{LinDiffOp, OperatorPde};
use symkit::{ExpPoly, GaussRat, VarContext, VarId, Weight};

use crate::ast::{Declarations, Expr, LambdaItem};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct SemanticError(pub String);

fn err<T>(msg: impl Into<String>) -> Result<T, SemanticError> {
    Err(SemanticError(msg.into()))
}

impl Declarations {
    pub fn check(&self) -> Result<(), SemanticError> {
        let mut seen = BTreeSet::new();
        for name in self.vars.iter().chain(&self.unknowns) {
            if !seen.insert(name) {
                return err(format!("`{name}` is declared twice"));
            }
        }
        for z in &self.translations {
            if !seen.contains(z) {
                return err(format!("translation variable `{z}` is not declared"));
            }
        }
        Ok(())
    }

    fn strs(v: &[String]) -> Vec<&str> {
        v.iter().map(String::as_str).collect()
    }

    pub fn jet_context(&self, max_order: usize) -> Result<Arc<JetContext>, SemanticError> {
        self.check()?;
        JetContext::new(
            &Self::strs(&self.vars),
            &Self::strs(&self.unknowns),
            max_order,
            &Self::strs(&self.translations),
        )
        .map_err(|e| SemanticError(e.to_string()))
    }

    /// Context of the independent variables alone, for operators.
    pub fn operator_context(&self) -> Result<Arc<VarContext>, SemanticError> {
        self.check()?;
        if let Some(z) = self.translations.iter().find(|z| !self.vars.contains(z)) {
            return err(format!("operator translations must be independent variables, not `{z}`"));
        }
        VarContext::independents(&Self::strs(&self.vars), &Self::strs(&self.translations))
            .map_err(|e| SemanticError(e.to_string()))
    }
}

/// Value of a constant expression.
pub fn constant(e: &Expr) -> Result<GaussRat, SemanticError> {
    Ok(match e {
        Expr::Num(n) => n.clone(),
        Expr::I => GaussRat::i(),
        Expr::Var(v) => return err(format!("`{v}` is not a constant")),
        Expr::Deriv { .. } => return err("derivatives are not constants"),
        Expr::Neg(a) => -constant(a)?,
        Expr::Add(a, b) => &constant(a)? + &constant(b)?,
        Expr::Sub(a, b) => &constant(a)? - &constant(b)?,
        Expr::Mul(a, b) => &constant(a)? * &constant(b)?,
        Expr::Div(a, b) => constant(a)?
            .checked_div(&constant(b)?)
            .map_err(|_| SemanticError("division by zero".into()))?,
        Expr::Pow(a, k) => constant(a)?.pow(*k),
    })
}

/// Weight vectors, one per list item, each of length `g`.
pub fn weights(items: &[LambdaItem], g: usize) -> Result<Vec<Vec<GaussRat>>, SemanticError> {
    items
        .iter()
        .map(|item| match item {
            LambdaItem::Scalar(e) => Ok(vec![constant(e)?; g]),
            LambdaItem::Tuple(es) if es.len() == g => es.iter().map(constant).collect(),
            LambdaItem::Tuple(es) => err(format!(
                "lambda tuple has {} entries but there are {g} translation variables",
                es.len()
            )),
        })
        .collect()
}

/// Evaluates an expression as a jet polynomial.
pub fn jet_poly(ctx: &Arc<JetContext>, e: &Expr) -> Result<ExpPoly, SemanticError> {
    let vars = ctx.vars();
    Ok(match e {
        Expr::Num(_) | Expr::I => ExpPoly::constant(vars, constant(e)?),
        Expr::Var(name) => match (ctx.axis(name), ctx.dependent(name)) {
            (Some(l), _) => ctx.poly_var(ctx.x(l)),
            (_, Some(alpha)) => ctx.poly_var(ctx.u(alpha, &vec![0; ctx.m()]).expect("order zero")),
            _ => return err(format!("undeclared variable `{name}`")),
        },
        Expr::Deriv { unknown, vars: axes } => {
            let alpha = ctx
                .dependent(unknown)
                .ok_or_else(|| SemanticError(format!("`{unknown}` is not an unknown")))?;
            let axes = axes
                .iter()
                .map(|a| {
                    ctx.axis(a)
                        .ok_or_else(|| SemanticError(format!("`{a}` is not an independent variable")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            ctx.poly_var(ctx.u_along(alpha, &axes).map_err(|e| SemanticError(e.to_string()))?)
        }
        Expr::Neg(a) => jet_poly(ctx, a)?.scale(&-GaussRat::one()),
        Expr::Add(a, b) => &jet_poly(ctx, a)? + &jet_poly(ctx, b)?,
        Expr::Sub(a, b) => &jet_poly(ctx, a)? - &jet_poly(ctx, b)?,
        Expr::Mul(a, b) => &jet_poly(ctx, a)? * &jet_poly(ctx, b)?,
        Expr::Div(a, b) => {
            let d = constant(b).map_err(|_| SemanticError("only division by constants is supported".into()))?;
            let inv = d.inv().map_err(|_| SemanticError("division by zero".into()))?;
            jet_poly(ctx, a)?.scale(&inv)
        }
        Expr::Pow(a, k) => jet_poly(ctx, a)?.pow(*k),
    })
}

/// Reads `f = sum_J c_J(x) u_J` as the operator `sum_J c_J d^J`; fails
/// unless `f` is linear and homogeneous in the single unknown.
pub fn as_operator(
    jet: &Arc<JetContext>,
    f: &ExpPoly,
    ctx: &Arc<VarContext>,
) -> Result<LinDiffOp, SemanticError> {
    if jet.n() != 1 {
        return err("operator form needs exactly one unknown");
    }
    let mut op = LinDiffOp::zero(ctx);
    let g = ctx.weight_len();
    for (_, mono, _) in f.coeff_extract() {
        let jets = mono.pairs().iter().filter(|(v, _)| jet.jet_of(*v).is_some());
        if jets.map(|(_, e)| e).sum::<u32>() != 1 {
            return err("not linear and homogeneous in the unknown");
        }
    }
    for v in f.vars() {
        let Some((_, multi)) = jet.jet_of(v) else { continue };
        let c = f.partial(v);
        if c.vars().iter().any(|w| jet.jet_of(*w).is_some()) {
            return err("not linear in the unknown");
        }
        // independents occupy the same slots in both contexts
        let coeff = ExpPoly::from_coeffs(
            ctx,
            c.coeff_extract().into_iter().map(|(_, m, x)| (Weight::zero(g), m, x)),
        );
        op.add_term(multi, coeff);
    }
    Ok(op)
}

/// `L = c d_a + B` with `c` constant and `B` free of `d_a`: the first such
/// axis in declaration order.
pub fn operator_pde(op: LinDiffOp) -> Result<OperatorPde, SemanticError> {
    let ctx = op.ctx().clone();
    for a in 0..ctx.len() {
        let with: Vec<_> = op.terms().filter(|(j, _)| j[a] > 0).collect();
        let ok = with.len() == 1
            && with[0].0.iter().enumerate().all(|(k, &e)| e == u32::from(k == a))
            && with[0].1.constant_value().is_some_and(|c| !c.is_zero());
        if ok {
            return OperatorPde::new(op, VarId(a)).map_err(|e| SemanticError(e.to_string()));
        }
    }
    err("no variable enters as a single first derivative with constant coefficient")
}

/// `D[u, t] = G` (either side), giving the solved evolution system.
pub fn evolution_system(jet: &Arc<JetContext>, lhs: &Expr, rhs: &Expr) -> Result<PdeSystem, SemanticError> {
    let (dt, g) = match (lhs, rhs) {
        (Expr::Deriv { vars, .. }, g) if vars.len() == 1 => (lhs, g),
        (g, Expr::Deriv { vars, .. }) if vars.len() == 1 => (rhs, g),
        _ => return err("equation is not in evolution form `D[u, t] = G`"),
    };
    let Expr::Deriv { unknown, vars } = dt else { unreachable!() };
    let alpha = jet
        .dependent(unknown)
        .ok_or_else(|| SemanticError(format!("`{unknown}` is not an unknown")))?;
    let axis = jet
        .axis(&vars[0])
        .ok_or_else(|| SemanticError(format!("`{}` is not an independent variable", vars[0])))?;
    let g = jet_poly(jet, g)?;
    PdeSystem::evolution(jet, alpha, axis, g).map_err(|e| SemanticError(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_expr, parse_problem};

    #[test]
    fn schrodinger_operator() {
        let p = parse_problem("vars t,x; unknowns psi; eq i*D[psi,t] + D[psi,x,x] = 0;").unwrap();
        let jet = p.decls.jet_context(2).unwrap();
        let f = &jet_poly(&jet, &p.lhs).unwrap() - &jet_poly(&jet, &p.rhs).unwrap();
        let ctx = p.decls.operator_context().unwrap();
        let pde = operator_pde(as_operator(&jet, &f, &ctx).unwrap()).unwrap();
        assert_eq!(pde.axis(), VarId(0));
        assert_eq!(pde.operator().to_string(), "(i)*d_t + d_x^2");
    }

    #[test]
    fn nonlinear_is_not_an_operator() {
        let p = parse_problem("vars t,x; unknowns u; eq D[u,t] = u*D[u,x];").unwrap();
        let jet = p.decls.jet_context(2).unwrap();
        let f = &jet_poly(&jet, &p.lhs).unwrap() - &jet_poly(&jet, &p.rhs).unwrap();
        let ctx = p.decls.operator_context().unwrap();
        assert!(as_operator(&jet, &f, &ctx).is_err());
        assert!(evolution_system(&jet, &p.lhs, &p.rhs).is_ok());
    }

    #[test]
    fn semantic_errors() {
        let p = parse_problem("vars t; unknowns u; translations y; eq D[u,t] = 0;").unwrap();
        assert!(p.decls.jet_context(2).is_err());
        let p = parse_problem("vars t; unknowns u; eq D[u,z] = 0;").unwrap();
        let jet = p.decls.jet_context(2).unwrap();
        assert!(jet_poly(&jet, &p.lhs).is_err());
        assert!(jet_poly(&jet, &parse_expr("u/t").unwrap()).is_err());
        assert!(constant(&parse_expr("1/(i - i)").unwrap()).is_err());
        let p = parse_problem("vars t, x; unknowns u; eq D[u,t,x] = u;").unwrap();
        let jet = p.decls.jet_context(3).unwrap();
        assert!(evolution_system(&jet, &p.lhs, &p.rhs).is_err());
    }

    #[test]
    fn constants() {
        assert_eq!(constant(&parse_expr("(1 + i)^2/4").unwrap()).unwrap(), &GaussRat::from_frac(1, 2) * &GaussRat::i());
    }
}
